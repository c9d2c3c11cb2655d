#ifndef BANACH_KL_CLI_HPP
#define BANACH_KL_CLI_HPP

#include "banach_kl/kernel.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace banach_kl::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kInvariantViolation = 3,
  kCheckFailed = 4,
};

/// Validated configuration shared by every subcommand.
struct RunConfig {
  std::string kernel = "brownian_motion";  // kind name or path to a kernel JSON file
  std::string matrix_file;                 // JSON matrix for user_matrix kernels
  std::optional<int> dyadic_level;         // default 6 unless a grid file is given
  std::string grid_file;
  std::size_t max_steps = 16;
  double lambda_tol = 1e-12;
  std::uint64_t seed = 42;
  std::size_t n_samples = 10000;
  std::string out;
  // subcommand-specific
  std::string decomposition_file;
  bool with_residual = false;
  std::optional<std::size_t> n_terms;
  std::vector<double> values;
  std::size_t condition_order = 2;
};

inline constexpr int kDefaultDyadicLevel = 6;

/// Resolves --kernel / --matrix-file into a kernel spec.
KernelSpec resolve_kernel(const RunConfig &config);
/// Resolves --grid-file / --dyadic-level; user matrices default to a uniform
/// grid of matching size.
Grid resolve_grid(const RunConfig &config, const KernelSpec &kernel);

/// Entry point for the banach_kl executable. Writes human-readable output to
/// `out` and diagnostics to `err`; returns an ExitCode.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace banach_kl::cli

#endif  // BANACH_KL_CLI_HPP
