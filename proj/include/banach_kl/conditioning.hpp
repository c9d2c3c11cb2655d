#ifndef BANACH_KL_CONDITIONING_HPP
#define BANACH_KL_CONDITIONING_HPP

#include "banach_kl/greedy.hpp"
#include "banach_kl/sampling.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace banach_kl {

/// Law of x given x*_k(x) = t_k for k < pinned.size(): mean sum_k t_k x_k
/// and covariance equal to the residual after those steps.
struct ConditionalMeasure {
  Vector mean;
  GridCovariance covariance;
  std::vector<std::pair<std::size_t, double>> pinned;  // (step index, t_k)
};

ConditionalMeasure conditional_measure(const Decomposition &decomposition, const std::vector<double> &values);

/// Paths drawn from the conditional measure (n_samples x m).
Matrix sample_conditional(const ConditionalMeasure &measure, std::size_t n_samples, std::uint64_t seed,
                          double scale);

enum class Direction { LessEqual, Greater };

/// {path(t) <= level} or {path(t) > level} for a grid point t.
struct ThresholdEvent {
  double t = 1.0;
  double level = 0.0;
  Direction direction = Direction::LessEqual;

  bool contains(double value) const { return direction == Direction::LessEqual ? value <= level : value > level; }
};

struct DeconditionReport {
  ThresholdEvent event;
  std::size_t n = 0;
  std::size_t n_samples = 0;
  double direct = 0.0;          // gamma(B) from samples of the source measure
  double direct_se = 0.0;
  double deconditioned = 0.0;   // mean over t ~ N(0, lambda) of samples of gamma^t(B)
  double deconditioned_se = 0.0;
  double analytic = 0.0;        // Phi from the source variance at t
  double combined_se() const;
  bool agree() const;           // |direct - deconditioned| <= 3 combined standard errors
  bool matches_analytic() const;  // both estimates within 3 of their own standard errors of `analytic`
};

double standard_normal_cdf(double x);

/// Estimates gamma(event) directly and through the deconditioning integral
/// over the pinned values of x*_0..x*_n.
DeconditionReport decondition_mc(const Decomposition &decomposition, std::size_t n, const ThresholdEvent &event,
                                 std::size_t n_samples, std::uint64_t seed);

/// Five threshold events used by the CLI and the acceptance suite.
std::vector<ThresholdEvent> default_event_suite();

}  // namespace banach_kl

#endif  // BANACH_KL_CONDITIONING_HPP
