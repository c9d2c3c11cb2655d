#include "banach_kl/dualbasis.hpp"

#include <algorithm>
#include <cmath>

namespace banach_kl {

namespace {

void require_index(const std::vector<DecompositionStep> &steps, const Vector &x, std::size_t n) {
  if (n >= steps.size()) throw std::out_of_range("projection order beyond recorded steps");
  if (x.size() != steps.front().x.size()) throw std::invalid_argument("vector dimension does not match grid");
}

}  // namespace

std::vector<DualFunctional> dual_vectors(const std::vector<DecompositionStep> &steps) {
  std::vector<DualFunctional> duals;
  duals.reserve(steps.size());
  for (const auto &step : steps) {
    DualFunctional xs = step.f;
    const auto p = static_cast<Index>(step.pivot_index);
    for (std::size_t k = 0; k < duals.size(); ++k) {
      // <x_k, f_n> with f_n = sign * delta_p
      const double c = step.pivot_sign * steps[k].x(p);
      if (c == 0.0) continue;
      for (const auto &[i, w] : duals[k].coefficients()) xs.add(i, -c * w);
    }
    duals.push_back(std::move(xs));
  }
  return duals;
}

DualFunctional normalized_dual(const DecompositionStep &step) {
  return step.x_star.scaled(1.0 / std::sqrt(step.lambda));
}

ProjectionResult project(const std::vector<DecompositionStep> &steps, const Vector &x, std::size_t n) {
  require_index(steps, x, n);
  ProjectionResult out{Vector::Zero(x.size()), {}};
  out.coefficients.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double c = steps[k].x_star.apply(x);
    out.coefficients.push_back(c);
    out.projected += c * steps[k].x;
  }
  return out;
}

Vector project_recursive(const std::vector<DecompositionStep> &steps, const Vector &x, std::size_t n) {
  require_index(steps, x, n);
  Vector projected = Vector::Zero(x.size());
  for (std::size_t k = 0; k <= n; ++k) {
    const Vector remainder = x - projected;
    projected += steps[k].f.apply(remainder) * steps[k].x;
  }
  return projected;
}

double cm_inner(const GridCovariance &cov, const DualFunctional &c, const DualFunctional &d) {
  if ((!c.empty() && c.max_index() >= cov.size()) || (!d.empty() && d.max_index() >= cov.size())) {
    throw std::out_of_range("functional not supported on covariance grid");
  }
  double s = 0.0;
  for (const auto &[i, wi] : c.coefficients()) {
    for (const auto &[j, wj] : d.coefficients()) {
      s += wi * wj * cov(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  return s;
}

BiorthogonalityReport verify_biorthogonality(const Decomposition &decomposition) {
  BiorthogonalityReport report;
  const auto &steps = decomposition.steps;
  if (steps.empty()) return report;
  report.tolerance = 1e-8 * steps.front().lambda;
  const auto &cov = decomposition.source;
  const auto m = cov.size();

  for (std::size_t n = 0; n < steps.size(); ++n) {
    for (std::size_t j = 0; j < steps.size(); ++j) {
      const double pairing = steps[n].x_star.apply(steps[j].x);
      report.max_pairing_error = std::max(report.max_pairing_error, std::abs(pairing - (n == j ? 1.0 : 0.0)));
    }
    for (std::size_t k = n; k < steps.size(); ++k) {
      const double c = cm_inner(cov, steps[n].x_star, steps[k].x_star);
      const double expected = n == k ? steps[n].lambda : 0.0;
      report.max_covariance_error = std::max(report.max_covariance_error, std::abs(c - expected));
    }
    const Vector rx = cov.matrix() * steps[n].x_star.dense(m);
    report.max_representer_error =
        std::max(report.max_representer_error, (rx - steps[n].lambda * steps[n].x).cwiseAbs().maxCoeff());
  }
  return report;
}

}  // namespace banach_kl
