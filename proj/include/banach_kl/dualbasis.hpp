#ifndef BANACH_KL_DUALBASIS_HPP
#define BANACH_KL_DUALBASIS_HPP

#include "banach_kl/greedy.hpp"

#include <vector>

namespace banach_kl {

/// x*_0 = f_0 and x*_n = f_n - sum_{k<n} <x_k, f_n> x*_k. Each x*_n is
/// supported on the pivots p_0..p_n.
std::vector<DualFunctional> dual_vectors(const std::vector<DecompositionStep> &steps);

/// h*_n = lambda_n^{-1/2} x*_n.
DualFunctional normalized_dual(const DecompositionStep &step);

struct ProjectionResult {
  Vector projected;
  std::vector<double> coefficients;  // <x, x*_k>, k = 0..n
};

/// P_n x through the dual coefficients: sum_{k<=n} <x, x*_k> x_k.
ProjectionResult project(const std::vector<DecompositionStep> &steps, const Vector &x, std::size_t n);

/// P_n x through the recursion sum_{k<=n} <x - P_{k-1} x, f_k> x_k.
Vector project_recursive(const std::vector<DecompositionStep> &steps, const Vector &x, std::size_t n);

/// c^T R d, the Cameron-Martin inner product of the representers R c, R d.
double cm_inner(const GridCovariance &cov, const DualFunctional &c, const DualFunctional &d);

struct BiorthogonalityReport {
  double max_pairing_error = 0.0;      // max |<x_j, x*_k> - delta_jk|
  double max_covariance_error = 0.0;   // max |x*_n^T R x*_m - lambda_n delta_nm|
  double max_representer_error = 0.0;  // max |R x*_n - lambda_n x_n|_inf
  double tolerance = 0.0;              // 1e-8 * lambda_0
  bool ok() const {
    return max_pairing_error <= tolerance && max_covariance_error <= tolerance && max_representer_error <= tolerance;
  }
};

BiorthogonalityReport verify_biorthogonality(const Decomposition &decomposition);

}  // namespace banach_kl

#endif  // BANACH_KL_DUALBASIS_HPP
