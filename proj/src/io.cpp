#include "banach_kl/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

namespace banach_kl::io {

using nlohmann::json;

namespace {

template <typename T>
T get_field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

json kernel_to_json(const KernelSpec &spec) {
  json j{{"kind", to_string(spec.kind)}};
  if (spec.kind == KernelKind::UserMatrix) j["matrix"] = matrix_to_json(spec.matrix);
  return j;
}

KernelSpec kernel_from_json(const json &j) {
  const auto kind = kernel_kind_from_string(get_field<std::string>(j, "kind"));
  switch (kind) {
    case KernelKind::BrownianMotion:
      return KernelSpec::brownian_motion();
    case KernelKind::BrownianBridge:
      return KernelSpec::brownian_bridge();
    case KernelKind::UserMatrix:
      if (!j.contains("matrix")) throw ConfigError("user_matrix kernel needs a 'matrix' field");
      return KernelSpec::user_matrix(matrix_from_json(j.at("matrix")));
  }
  throw ConfigError("unknown kernel");
}

json grid_to_json(const Grid &grid) { return json{{"points", grid.points()}}; }

Grid grid_from_json(const json &j) {
  if (j.is_object() && j.contains("dyadic_level")) return Grid::dyadic(get_field<int>(j, "dyadic_level"));
  return Grid(get_field<std::vector<double>>(j, "points"));
}

json matrix_to_json(const Matrix &m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json &j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (!j.front().is_array()) throw ConfigError("matrix rows must be arrays");
  const auto cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto &row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw ConfigError("matrix rows differ in length");
    for (Index k = 0; k < cols; ++k) {
      const auto &v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw ConfigError("matrix entries must be numbers");
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

json decomposition_to_json(const Decomposition &decomposition, const KernelSpec &kernel, bool include_residual) {
  const Grid &grid = decomposition.grid();
  json steps = json::array();
  for (const auto &s : decomposition.steps) {
    json x_star = json::object();
    for (const auto &[i, w] : s.x_star.coefficients()) x_star[std::to_string(i)] = w;
    steps.push_back({{"lambda", s.lambda},
                     {"pivot_index", s.pivot_index},
                     {"pivot_t", grid[s.pivot_index]},
                     {"pivot_sign", s.pivot_sign},
                     {"x", std::vector<double>(s.x.data(), s.x.data() + s.x.size())},
                     {"x_star", std::move(x_star)}});
  }
  json j{{"format_version", kFormatVersion},
         {"kernel", kernel_to_json(kernel)},
         {"grid", grid_to_json(grid)},
         {"termination", to_string(decomposition.termination)},
         {"steps", std::move(steps)}};
  if (include_residual) j["residual"] = matrix_to_json(decomposition.residual.matrix());
  return j;
}

LoadedDecomposition decomposition_from_json(const json &j) {
  const int version = get_field<int>(j, "format_version");
  if (version != kFormatVersion) throw ConfigError("unsupported decomposition format_version " + std::to_string(version));
  KernelSpec kernel = kernel_from_json(j.at("kernel"));
  const Grid grid = grid_from_json(j.at("grid"));
  const GridCovariance source = discretize(kernel, grid);

  Decomposition dec{source, {}, source, termination_from_string(get_field<std::string>(j, "termination"))};
  const auto m = grid.size();
  const json steps = get_field<json>(j, "steps");
  if (!steps.is_array()) throw ConfigError("'steps' must be an array");
  for (const auto &js : steps) {
    DecompositionStep s;
    s.lambda = get_field<double>(js, "lambda");
    s.pivot_index = get_field<std::size_t>(js, "pivot_index");
    s.pivot_sign = get_field<int>(js, "pivot_sign");
    if (!(s.lambda > 0.0) || s.pivot_index >= m || (s.pivot_sign != 1 && s.pivot_sign != -1)) {
      throw ConfigError("malformed decomposition step");
    }
    const auto x = get_field<std::vector<double>>(js, "x");
    if (x.size() != m) throw ConfigError("step direction does not match grid size");
    s.x = Eigen::Map<const Vector>(x.data(), static_cast<Index>(m));
    s.h = std::sqrt(s.lambda) * s.x;
    s.f = DualFunctional::dirac(s.pivot_index, s.pivot_sign);
    const json x_star = get_field<json>(js, "x_star");
    for (const auto &[key, w] : x_star.items()) {
      const auto idx = static_cast<std::size_t>(std::stoul(key));
      if (idx >= m) throw ConfigError("dual functional index outside grid");
      s.x_star.add(idx, w.get<double>());
    }
    dec.steps.push_back(std::move(s));
  }
  dec.residual = GridCovariance::unchecked(residual_after(dec, dec.steps.size()), grid);
  return {std::move(kernel), std::move(dec)};
}

json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

void write_json_file(const std::string &path, const json &j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

void write_paths_csv(std::ostream &os, const Matrix &paths, const Grid &grid) {
  os << "# format_version: " << kFormatVersion << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < grid.size(); ++i) os << (i ? "," : "") << grid[i];
  os << '\n';
  for (Index r = 0; r < paths.rows(); ++r) {
    for (Index c = 0; c < paths.cols(); ++c) os << (c ? "," : "") << paths(r, c);
    os << '\n';
  }
}

}  // namespace banach_kl::io
