#include "banach_kl/conditioning.hpp"

#include <cmath>
#include <random>

namespace banach_kl {

namespace {

double bernoulli_se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

double hit_rate(const Matrix &paths, Index column, const ThresholdEvent &event) {
  std::size_t hits = 0;
  for (Index i = 0; i < paths.rows(); ++i) hits += event.contains(paths(i, column)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(paths.rows());
}

}  // namespace

ConditionalMeasure conditional_measure(const Decomposition &decomposition, const std::vector<double> &values) {
  if (values.size() > decomposition.steps.size()) throw std::out_of_range("more pinned values than recorded steps");
  Vector mean = Vector::Zero(static_cast<Index>(decomposition.source.size()));
  std::vector<std::pair<std::size_t, double>> pinned;
  for (std::size_t k = 0; k < values.size(); ++k) {
    mean += values[k] * decomposition.steps[k].x;
    pinned.emplace_back(k, values[k]);
  }
  return {std::move(mean),
          GridCovariance::unchecked(residual_after(decomposition, values.size()), decomposition.grid()),
          std::move(pinned)};
}

Matrix sample_conditional(const ConditionalMeasure &measure, std::size_t n_samples, std::uint64_t seed,
                          double scale) {
  Matrix paths =
      gaussian_combinations(symmetric_factor(measure.covariance.matrix(), scale), n_samples, seed, Stream::Residual);
  paths.rowwise() += measure.mean.transpose();
  return paths;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double DeconditionReport::combined_se() const {
  return std::sqrt(direct_se * direct_se + deconditioned_se * deconditioned_se);
}

bool DeconditionReport::agree() const {
  return std::abs(direct - deconditioned) <= 3.0 * combined_se();
}

bool DeconditionReport::matches_analytic() const {
  return std::abs(direct - analytic) <= 3.0 * direct_se && std::abs(deconditioned - analytic) <= 3.0 * deconditioned_se;
}

DeconditionReport decondition_mc(const Decomposition &decomposition, std::size_t n, const ThresholdEvent &event,
                                 std::size_t n_samples, std::uint64_t seed) {
  if (n >= decomposition.steps.size()) throw std::out_of_range("conditioning order beyond recorded steps");
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  const auto column = static_cast<Index>(decomposition.grid().index_of(event.t));
  const double lambda0 = decomposition.steps.front().lambda;
  const Matrix &source = decomposition.source.matrix();

  DeconditionReport report;
  report.event = event;
  report.n = n;
  report.n_samples = n_samples;

  const double var = source(column, column);
  if (var > 0.0) {
    const double p = standard_normal_cdf(event.level / std::sqrt(var));
    report.analytic = event.direction == Direction::LessEqual ? p : 1.0 - p;
  } else {
    report.analytic = event.contains(0.0) ? 1.0 : 0.0;
  }

  // Direct route: factor the source covariance without using the decomposition.
  const Matrix direct = gaussian_combinations(symmetric_factor(source, lambda0), n_samples, seed, Stream::Source);
  report.direct = hit_rate(direct, column, event);
  report.direct_se = bernoulli_se(report.direct, n_samples);

  // Deconditioning route: t_k ~ N(0, lambda_k) then a draw from gamma^t.
  const auto pinned = static_cast<Index>(n + 1);
  Matrix directions(pinned, static_cast<Index>(decomposition.source.size()));
  for (Index k = 0; k < pinned; ++k) directions.row(k) = decomposition.steps[static_cast<std::size_t>(k)].x.transpose();
  Matrix sqrt_lambda = Matrix::Zero(pinned, pinned);
  for (Index k = 0; k < pinned; ++k) sqrt_lambda(k, k) = std::sqrt(decomposition.steps[static_cast<std::size_t>(k)].lambda);
  const Matrix t = gaussian_combinations(sqrt_lambda, n_samples, seed, Stream::Pinned);
  const Matrix residual = residual_after(decomposition, n + 1);
  const Matrix conditional =
      t * directions + gaussian_combinations(symmetric_factor(residual, lambda0), n_samples, seed, Stream::Residual);
  report.deconditioned = hit_rate(conditional, column, event);
  report.deconditioned_se = bernoulli_se(report.deconditioned, n_samples);
  return report;
}

std::vector<ThresholdEvent> default_event_suite() {
  return {
      {1.0, 0.0, Direction::LessEqual},
      {1.0, 1.0, Direction::LessEqual},
      {0.5, 0.3, Direction::LessEqual},
      {0.25, 0.2, Direction::Greater},
      {0.75, -0.5, Direction::LessEqual},
  };
}

}  // namespace banach_kl
