#ifndef BANACH_KL_ORACLE_WIENER_HPP
#define BANACH_KL_ORACLE_WIENER_HPP

#include "banach_kl/greedy.hpp"

#include <cstddef>

// Closed-form Levy-Ciesielski quantities for standard Brownian motion on
// [0,1]: variances 2^-(p+2), Schauder hat functions and Haar derivatives.
namespace banach_kl::wiener {

/// n = 2^p + k with 0 <= k < 2^p, for n >= 1.
struct LevyIndex {
  int p = 0;
  std::size_t k = 0;

  static LevyIndex from(std::size_t n);
  std::size_t n() const { return (std::size_t{1} << p) + k; }
};

double levy_lambda(long long n);
double schauder_x(long long n, double t);
/// Haar derivative of h_n. n = 0 returns the constant 1 (h_0(t) = t).
double haar_h_prime(long long n, double s);
/// Pivot t_n under leftmost tie-breaking: 1 for n = 0, else (2k+1)/2^{p+1}.
double expected_pivot(long long n);

/// sum of levy_lambda over levels 0..p: 1 + (p+1)/4.
double level_partial_sum(int p);

struct OracleReport {
  int level = 0;
  std::size_t steps = 0;
  double max_lambda_error = 0.0;  // relative
  std::size_t max_pivot_mismatch = 0;  // number of steps whose pivot differs
  double max_x_error = 0.0;
  bool ok() const { return max_lambda_error <= 1e-12 && max_pivot_mismatch == 0 && max_x_error <= 1e-10; }
};

/// Runs the greedy engine on the dyadic grid of `level` for 2^level steps and
/// compares against the closed forms. Throws ConfigError if the request
/// exceeds what the grid resolves.
OracleReport oracle_check(int level, std::size_t steps);
OracleReport oracle_check(int level);

/// Compares an existing decomposition of the Wiener kernel with the oracle.
OracleReport compare_with_oracle(const Decomposition &decomposition, int level);

}  // namespace banach_kl::wiener

#endif  // BANACH_KL_ORACLE_WIENER_HPP
