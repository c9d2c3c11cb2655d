#ifndef BANACH_KL_GREEDY_HPP
#define BANACH_KL_GREEDY_HPP

#include "banach_kl/kernel.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace banach_kl {

/// One rank-one split of the current residual measure.
///
/// The pivot functional is f = sign * delta_{pivot}, the direction x is the
/// residual covariance applied to f divided by lambda (so x[pivot] == 1 and
/// the sup-norm of x is 1), and h = sqrt(lambda) * x is the corresponding
/// unit vector of the Cameron-Martin space. x_star is the biorthogonal dual
/// functional, supported on the pivots chosen so far.
struct DecompositionStep {
  double lambda = 0.0;
  std::size_t pivot_index = 0;
  int pivot_sign = 1;
  DualFunctional f;
  Vector x;
  Vector h;
  DualFunctional x_star;
};

enum class Termination { StepLimit, RankExhausted, ToleranceReached };

std::string to_string(Termination termination);
Termination termination_from_string(const std::string &name);

/// Greedy decomposition source = sum_k lambda_k x_k x_k^T + residual.
struct Decomposition {
  GridCovariance source;
  std::vector<DecompositionStep> steps;
  GridCovariance residual;
  Termination termination = Termination::StepLimit;

  const Grid &grid() const { return source.grid(); }
  std::vector<double> lambdas() const;
};

struct RayleighMax {
  double lambda = 0.0;
  std::size_t pivot_index = 0;
  int sign = 1;
};

/// Maximizes <R f, f> over the extreme points +-delta_t of the l1 dual ball,
/// i.e. picks the largest diagonal entry. Ties go to the smallest index; the
/// sign is always +1. A zero matrix yields (0, 0, +1).
RayleighMax rayleigh_max(const GridCovariance &residual);

struct SplitResult {
  double lambda = 0.0;
  DualFunctional f;
  Vector x;
  Vector h;
  GridCovariance residual;
};

/// Removes the rank-one component carried by delta_{pivot}. The new residual
/// is the Schur complement R - R e_p e_p^T R / R_pp, with row and column p
/// set to zero. Throws std::domain_error for a non-positive pivot.
SplitResult split_step(const GridCovariance &residual, std::size_t pivot_index);

struct DecomposeOptions {
  std::size_t max_steps = 16;
  /// Stop once lambda <= relative_tol * lambda_0.
  double relative_tol = 1e-12;
};

/// Iterates rayleigh_max / split_step and fills the dual basis.
Decomposition decompose(const GridCovariance &cov, const DecomposeOptions &options = {});

/// Residual after the first `count` steps, recomputed from the source by
/// replaying the same downdates (bit-identical to what decompose produced).
Matrix residual_after(const Decomposition &decomposition, std::size_t count);

/// Norm of source - sum_{k<=n} lambda_k x_k x_k^T as a map from the l1 dual
/// ball to the sup norm: the largest absolute entry of that matrix. Equals
/// lambda_{n+1}.
double truncation_error(const Decomposition &decomposition, std::size_t n);
/// truncation_error for every recorded step, in one replay.
std::vector<double> truncation_errors(const Decomposition &decomposition);

/// sum_k lambda_k x_k x_k^T over the first `count` steps.
Matrix reconstruction(const Decomposition &decomposition, std::size_t count);

/// Throws InvariantError when the matrix has an eigenvalue below
/// -kPsdTolerance * scale.
void require_psd_residual(const Matrix &residual, double scale);

}  // namespace banach_kl

#endif  // BANACH_KL_GREEDY_HPP
