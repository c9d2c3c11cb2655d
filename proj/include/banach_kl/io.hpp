#ifndef BANACH_KL_IO_HPP
#define BANACH_KL_IO_HPP

#include "banach_kl/greedy.hpp"
#include "banach_kl/sampling.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace banach_kl::io {

inline constexpr int kFormatVersion = 1;

nlohmann::json kernel_to_json(const KernelSpec &spec);
KernelSpec kernel_from_json(const nlohmann::json &j);

nlohmann::json grid_to_json(const Grid &grid);
/// Accepts {"points": [...]} or {"dyadic_level": J}.
Grid grid_from_json(const nlohmann::json &j);

nlohmann::json matrix_to_json(const Matrix &m);
Matrix matrix_from_json(const nlohmann::json &j);

nlohmann::json decomposition_to_json(const Decomposition &decomposition, const KernelSpec &kernel,
                                     bool include_residual);

struct LoadedDecomposition {
  KernelSpec kernel;
  Decomposition decomposition;
};

/// Rebuilds the source from the echoed kernel and grid, and the residual by
/// replaying the recorded steps.
LoadedDecomposition decomposition_from_json(const nlohmann::json &j);

/// Parses a whole file; throws ConfigError with the parser diagnostics on
/// malformed input.
nlohmann::json read_json_file(const std::string &path);
void write_json_file(const std::string &path, const nlohmann::json &j);

/// One row per path, header row of grid values, preceded by a
/// "# format_version" comment line.
void write_paths_csv(std::ostream &os, const Matrix &paths, const Grid &grid);

}  // namespace banach_kl::io

#endif  // BANACH_KL_IO_HPP
