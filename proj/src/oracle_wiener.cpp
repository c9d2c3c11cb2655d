#include "banach_kl/oracle_wiener.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace banach_kl::wiener {

namespace {

std::size_t checked_index(long long n) {
  if (n < 0) throw std::domain_error("Levy index must be non-negative");
  return static_cast<std::size_t>(n);
}

void require_unit_interval(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("argument outside [0,1]");
}

}  // namespace

LevyIndex LevyIndex::from(std::size_t n) {
  if (n == 0) throw std::domain_error("n = 0 has no (p, k) decomposition");
  const int p = static_cast<int>(std::bit_width(n)) - 1;
  return {p, n - (std::size_t{1} << p)};
}

double levy_lambda(long long n) {
  const auto idx = checked_index(n);
  if (idx == 0) return 1.0;
  return std::ldexp(1.0, -(LevyIndex::from(idx).p + 2));
}

double schauder_x(long long n, double t) {
  const auto idx = checked_index(n);
  require_unit_interval(t);
  if (idx == 0) return t;
  const auto [p, k] = LevyIndex::from(idx);
  const double u = std::ldexp(t, p + 1) - static_cast<double>(2 * k + 1);
  return std::max(0.0, 1.0 - std::abs(u));
}

double haar_h_prime(long long n, double s) {
  const auto idx = checked_index(n);
  require_unit_interval(s);
  if (idx == 0) return 1.0;
  const auto [p, k] = LevyIndex::from(idx);
  const double height = std::sqrt(std::ldexp(1.0, p));
  const double a = std::ldexp(static_cast<double>(2 * k), -(p + 1));
  const double mid = std::ldexp(static_cast<double>(2 * k + 1), -(p + 1));
  const double b = std::ldexp(static_cast<double>(2 * k + 2), -(p + 1));
  if (s >= a && s <= mid) return height;
  if (s > mid && s <= b) return -height;
  return 0.0;
}

double expected_pivot(long long n) {
  const auto idx = checked_index(n);
  if (idx == 0) return 1.0;
  const auto [p, k] = LevyIndex::from(idx);
  return std::ldexp(static_cast<double>(2 * k + 1), -(p + 1));
}

double level_partial_sum(int p) {
  if (p < 0) throw std::domain_error("level must be non-negative");
  return 1.0 + (p + 1) / 4.0;
}

OracleReport compare_with_oracle(const Decomposition &decomposition, int level) {
  const Grid &grid = decomposition.grid();
  if (level < 0 || !grid.contains_dyadic_level(level)) {
    throw ConfigError("oracle comparison needs a grid containing every dyadic point of the level");
  }
  const std::size_t resolvable = std::size_t{1} << level;
  if (decomposition.steps.size() > resolvable) {
    std::ostringstream os;
    os << "level " << level << " grid resolves only " << resolvable << " oracle steps";
    throw ConfigError(os.str());
  }

  OracleReport report;
  report.level = level;
  report.steps = decomposition.steps.size();
  for (std::size_t n = 0; n < decomposition.steps.size(); ++n) {
    const auto &step = decomposition.steps[n];
    const auto nn = static_cast<long long>(n);
    const double lam = levy_lambda(nn);
    report.max_lambda_error = std::max(report.max_lambda_error, std::abs(step.lambda - lam) / lam);
    if (grid[step.pivot_index] != expected_pivot(nn)) ++report.max_pivot_mismatch;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double err = std::abs(step.x(static_cast<Index>(i)) - schauder_x(nn, grid[i]));
      report.max_x_error = std::max(report.max_x_error, err);
    }
  }
  return report;
}

OracleReport oracle_check(int level, std::size_t steps) {
  if (level < 0 || level > 14) throw ConfigError("oracle level must be in [0, 14]");
  if (steps > (std::size_t{1} << level)) {
    throw ConfigError("requested oracle steps exceed what the dyadic grid resolves");
  }
  const Grid grid = Grid::dyadic(level);
  const auto cov = discretize(KernelSpec::brownian_motion(), grid);
  const auto dec = decompose(cov, {steps, 0.0});
  auto report = compare_with_oracle(dec, level);
  if (dec.steps.size() != steps) report.max_pivot_mismatch += steps - dec.steps.size();
  return report;
}

OracleReport oracle_check(int level) {
  return oracle_check(level, std::size_t{1} << std::max(level, 0));
}

}  // namespace banach_kl::wiener
