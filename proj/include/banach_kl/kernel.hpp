#ifndef BANACH_KL_KERNEL_HPP
#define BANACH_KL_KERNEL_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace banach_kl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a user-supplied object fails validation (bad grid, non-PSD
/// matrix, malformed config). The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical invariant breaks during a computation (for
/// instance a residual that is no longer PSD). The CLI maps it to exit code 3.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative tolerance used for PSD and symmetry validation.
inline constexpr double kPsdTolerance = 1e-10;

enum class KernelKind { BrownianMotion, BrownianBridge, UserMatrix };

/// Covariance kernel on [0,1], or an explicit matrix over grid indices.
struct KernelSpec {
  KernelKind kind = KernelKind::BrownianMotion;
  Matrix matrix;  // only used by UserMatrix

  static KernelSpec brownian_motion() { return {KernelKind::BrownianMotion, {}}; }
  static KernelSpec brownian_bridge() { return {KernelKind::BrownianBridge, {}}; }
  /// Symmetrizes as (A + A^T)/2 and validates squareness, symmetry and PSD.
  static KernelSpec user_matrix(const Matrix &matrix);
};

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string &name);

/// Strictly increasing points in [0,1].
class Grid {
 public:
  explicit Grid(std::vector<double> points);

  /// 2^level + 1 uniform points k / 2^level.
  static Grid dyadic(int level);
  /// m uniform points i/(m-1); {0} when m == 1.
  static Grid uniform(std::size_t m);

  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  const std::vector<double> &points() const { return points_; }

  /// Index of the point equal to t, or throws std::out_of_range.
  std::size_t index_of(double t) const;
  /// True when every k / 2^level is a grid point.
  bool contains_dyadic_level(int level) const;

 private:
  std::vector<double> points_;
};

/// Symmetric PSD covariance matrix over a grid. Immutable once built.
class GridCovariance {
 public:
  /// Validates symmetry and PSD at relative tolerance kPsdTolerance.
  GridCovariance(Matrix matrix, Grid grid);

  const Matrix &matrix() const { return matrix_; }
  const Grid &grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  double operator()(Index i, Index j) const { return matrix_(i, j); }

  /// Skips PSD validation; used for residuals whose PSD-ness is checked by
  /// the caller with its own tolerance.
  static GridCovariance unchecked(Matrix matrix, Grid grid);

 private:
  struct Unchecked {};
  GridCovariance(Matrix matrix, Grid grid, Unchecked);

  Matrix matrix_;
  Grid grid_;
};

/// Finite signed combination of Dirac masses at grid indices.
class DualFunctional {
 public:
  DualFunctional() = default;

  static DualFunctional dirac(std::size_t index, double weight = 1.0);

  void add(std::size_t index, double weight);
  const std::map<std::size_t, double> &coefficients() const { return coefficients_; }
  bool empty() const { return coefficients_.empty(); }

  /// Coefficient at a grid index (0 when absent).
  double weight(std::size_t index) const;
  /// Total-variation (l1) norm of the coefficients.
  double norm() const;
  /// Pairing <x, f> with a vector over the grid.
  double apply(const Vector &x) const;
  /// Dense coefficient vector of length m.
  Vector dense(std::size_t m) const;
  /// Largest support index, or throws if empty.
  std::size_t max_index() const;

  DualFunctional scaled(double factor) const;

 private:
  std::map<std::size_t, double> coefficients_;
};

/// K(s, t) for the analytic kernels; s and t must lie in [0,1].
double eval_kernel(const KernelSpec &spec, double s, double t);
/// K(i, j) for UserMatrix, where i and j are matrix indices.
double eval_kernel(const KernelSpec &spec, std::size_t i, std::size_t j);

GridCovariance discretize(const KernelSpec &spec, const Grid &grid);

/// exp(-f^T R f / 2).
double characteristic_functional(const GridCovariance &cov, const DualFunctional &f);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix &matrix);

}  // namespace banach_kl

#endif  // BANACH_KL_KERNEL_HPP
