#include "banach_kl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace banach_kl {

namespace {

void require_psd(const Matrix &matrix, const char *what) {
  if (matrix.size() == 0) return;
  const double scale = std::max(matrix.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  if ((matrix.diagonal().array() < -kPsdTolerance * scale).any()) {
    throw ConfigError(std::string(what) + ": negative diagonal entry");
  }
  const double lmin = min_eigenvalue(matrix);
  if (lmin < -kPsdTolerance * scale) {
    std::ostringstream os;
    os << what << ": matrix is not positive semidefinite (min eigenvalue " << lmin << ")";
    throw ConfigError(os.str());
  }
}

void require_unit_interval(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << "argument " << t << " outside [0,1]";
    throw std::domain_error(os.str());
  }
}

}  // namespace

double min_eigenvalue(const Matrix &matrix) {
  if (matrix.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

KernelSpec KernelSpec::user_matrix(const Matrix &matrix) {
  if (matrix.rows() != matrix.cols()) throw ConfigError("user matrix must be square");
  if (matrix.rows() == 0) throw ConfigError("user matrix must be non-empty");
  if (!matrix.allFinite()) throw ConfigError("user matrix has non-finite entries");
  const double scale = std::max(matrix.cwiseAbs().maxCoeff(), 1e-300);
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > kPsdTolerance * scale) {
    throw ConfigError("user matrix is not symmetric");
  }
  Matrix symmetric = 0.5 * (matrix + matrix.transpose());
  require_psd(symmetric, "user matrix");
  return {KernelKind::UserMatrix, std::move(symmetric)};
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::BrownianMotion:
      return "brownian_motion";
    case KernelKind::BrownianBridge:
      return "brownian_bridge";
    case KernelKind::UserMatrix:
      return "user_matrix";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string &name) {
  if (name == "brownian_motion") return KernelKind::BrownianMotion;
  if (name == "brownian_bridge") return KernelKind::BrownianBridge;
  if (name == "user_matrix") return KernelKind::UserMatrix;
  throw ConfigError("unknown kernel kind '" + name + "'");
}

// Grid

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw ConfigError("grid must contain at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i] >= 0.0 && points_[i] <= 1.0)) throw ConfigError("grid points must lie in [0,1]");
    if (i > 0 && !(points_[i] > points_[i - 1])) throw ConfigError("grid points must be strictly increasing");
  }
}

Grid Grid::dyadic(int level) {
  if (level < 0 || level > 20) throw ConfigError("dyadic level must be in [0, 20]");
  const std::size_t n = std::size_t{1} << level;
  std::vector<double> pts(n + 1);
  for (std::size_t k = 0; k <= n; ++k) pts[k] = std::ldexp(static_cast<double>(k), -level);
  return Grid(std::move(pts));
}

Grid Grid::uniform(std::size_t m) {
  if (m == 0) throw ConfigError("grid must contain at least one point");
  if (m == 1) return Grid({0.0});
  std::vector<double> pts(m);
  for (std::size_t i = 0; i < m; ++i) pts[i] = static_cast<double>(i) / static_cast<double>(m - 1);
  pts.back() = 1.0;
  return Grid(std::move(pts));
}

std::size_t Grid::index_of(double t) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t);
  if (it == points_.end() || *it != t) {
    std::ostringstream os;
    os << "point " << t << " is not on the grid";
    throw std::out_of_range(os.str());
  }
  return static_cast<std::size_t>(it - points_.begin());
}

bool Grid::contains_dyadic_level(int level) const {
  const std::size_t n = std::size_t{1} << level;
  for (std::size_t k = 0; k <= n; ++k) {
    if (!std::binary_search(points_.begin(), points_.end(), std::ldexp(static_cast<double>(k), -level))) {
      return false;
    }
  }
  return true;
}

// GridCovariance

GridCovariance::GridCovariance(Matrix matrix, Grid grid, Unchecked)
    : matrix_(std::move(matrix)), grid_(std::move(grid)) {
  if (matrix_.rows() != matrix_.cols() || static_cast<std::size_t>(matrix_.rows()) != grid_.size()) {
    throw ConfigError("covariance matrix size does not match grid");
  }
}

GridCovariance::GridCovariance(Matrix matrix, Grid grid)
    : GridCovariance(std::move(matrix), std::move(grid), Unchecked{}) {
  if (matrix_ != matrix_.transpose()) throw ConfigError("covariance matrix is not symmetric");
  require_psd(matrix_, "covariance");
}

GridCovariance GridCovariance::unchecked(Matrix matrix, Grid grid) {
  return GridCovariance(std::move(matrix), std::move(grid), Unchecked{});
}

// DualFunctional

DualFunctional DualFunctional::dirac(std::size_t index, double weight) {
  DualFunctional f;
  f.add(index, weight);
  return f;
}

void DualFunctional::add(std::size_t index, double weight) {
  if (weight == 0.0) return;
  auto [it, inserted] = coefficients_.try_emplace(index, weight);
  if (!inserted) {
    it->second += weight;
    if (it->second == 0.0) coefficients_.erase(it);
  }
}

double DualFunctional::weight(std::size_t index) const {
  auto it = coefficients_.find(index);
  return it == coefficients_.end() ? 0.0 : it->second;
}

double DualFunctional::norm() const {
  double s = 0.0;
  for (const auto &[i, w] : coefficients_) s += std::abs(w);
  return s;
}

double DualFunctional::apply(const Vector &x) const {
  double s = 0.0;
  for (const auto &[i, w] : coefficients_) {
    if (static_cast<Index>(i) >= x.size()) throw std::out_of_range("functional support exceeds vector size");
    s += w * x(static_cast<Index>(i));
  }
  return s;
}

Vector DualFunctional::dense(std::size_t m) const {
  Vector v = Vector::Zero(static_cast<Index>(m));
  for (const auto &[i, w] : coefficients_) {
    if (i >= m) throw std::out_of_range("functional support exceeds grid size");
    v(static_cast<Index>(i)) = w;
  }
  return v;
}

std::size_t DualFunctional::max_index() const {
  if (coefficients_.empty()) throw std::out_of_range("empty functional");
  return coefficients_.rbegin()->first;
}

DualFunctional DualFunctional::scaled(double factor) const {
  DualFunctional out;
  for (const auto &[i, w] : coefficients_) out.add(i, factor * w);
  return out;
}

// Kernel evaluation

double eval_kernel(const KernelSpec &spec, double s, double t) {
  switch (spec.kind) {
    case KernelKind::BrownianMotion:
      require_unit_interval(s);
      require_unit_interval(t);
      return std::min(s, t);
    case KernelKind::BrownianBridge:
      require_unit_interval(s);
      require_unit_interval(t);
      return std::min(s, t) - s * t;
    case KernelKind::UserMatrix:
      throw std::domain_error("user matrix kernels are evaluated at grid indices");
  }
  return 0.0;
}

double eval_kernel(const KernelSpec &spec, std::size_t i, std::size_t j) {
  if (spec.kind != KernelKind::UserMatrix) throw std::domain_error("index evaluation needs a user matrix kernel");
  const auto m = static_cast<std::size_t>(spec.matrix.rows());
  if (i >= m || j >= m) throw std::domain_error("matrix index out of range");
  return spec.matrix(static_cast<Index>(i), static_cast<Index>(j));
}

GridCovariance discretize(const KernelSpec &spec, const Grid &grid) {
  const auto m = static_cast<Index>(grid.size());
  if (spec.kind == KernelKind::UserMatrix) {
    if (spec.matrix.rows() != m) throw ConfigError("user matrix size does not match grid size");
    return GridCovariance(spec.matrix, grid);
  }
  Matrix r(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double v = eval_kernel(spec, grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)]);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return GridCovariance(std::move(r), grid);
}

double characteristic_functional(const GridCovariance &cov, const DualFunctional &f) {
  if (!f.empty() && f.max_index() >= cov.size()) throw std::out_of_range("functional not supported on grid");
  double q = 0.0;
  for (const auto &[i, wi] : f.coefficients()) {
    for (const auto &[j, wj] : f.coefficients()) {
      q += wi * wj * cov(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  return std::exp(-0.5 * q);
}

}  // namespace banach_kl
