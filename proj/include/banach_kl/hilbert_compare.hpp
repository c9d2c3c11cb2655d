#ifndef BANACH_KL_HILBERT_COMPARE_HPP
#define BANACH_KL_HILBERT_COMPARE_HPP

#include "banach_kl/greedy.hpp"

#include <optional>
#include <vector>

namespace banach_kl {

/// Trapezoidal quadrature weights on a grid; a single point gets weight 1.
Vector trapezoid_weights(const Grid &grid);

/// Eigen-decomposition of the covariance operator on L^2 with quadrature
/// weights W: eigenpairs of W^{1/2} R W^{1/2}, mapped back so that the
/// eigenvectors are orthonormal in the weighted inner product.
struct SpectralDecomposition {
  Vector eigenvalues;   // non-increasing
  Matrix eigenvectors;  // columns, v_i^T W v_j = delta_ij
  Vector weight;
  Matrix source;

  double trace() const { return eigenvalues.sum(); }
};

SpectralDecomposition spectral_decompose(const GridCovariance &cov, const Vector &weight);

struct ComparisonRow {
  std::size_t n = 0;
  std::optional<double> greedy_lambda;
  double spectral_lambda = 0.0;
  double greedy_partial_sum = 0.0;
  double spectral_partial_sum = 0.0;
  /// Greedy error in its own norm (max residual entry), equal to the next greedy lambda.
  std::optional<double> greedy_error;
  /// Spectral error in its own norm (weighted operator 2-norm), equal to the next eigenvalue.
  double spectral_error = 0.0;
  /// Both truncations measured as l1 -> sup operators (max absolute entry).
  std::optional<double> greedy_error_sup;
  double spectral_error_sup = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double spectral_trace = 0.0;
  double weighted_diagonal_sum = 0.0;
  /// First n at which the greedy partial sum exceeds the spectral trace.
  std::optional<std::size_t> greedy_exceeds_trace_at;
};

/// Side-by-side diagnostics for the first n + 1 components of both
/// decompositions. Throws std::invalid_argument if they come from different
/// sources.
ComparisonReport compare_decompositions(const Decomposition &greedy, const SpectralDecomposition &spectral,
                                        std::size_t n);

}  // namespace banach_kl

#endif  // BANACH_KL_HILBERT_COMPARE_HPP
