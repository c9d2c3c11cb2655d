#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "banach_kl/hilbert_compare.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace banach_kl;

namespace {

GridCovariance wiener(int level) { return discretize(KernelSpec::brownian_motion(), Grid::dyadic(level)); }

}  // namespace

TEST_CASE("trapezoid weights") {
  const Vector w = trapezoid_weights(Grid::dyadic(2));
  CHECK(w(0) == 0.125);
  CHECK(w(1) == 0.25);
  CHECK(w(4) == 0.125);
  CHECK(w.sum() == 1.0);
  CHECK(trapezoid_weights(Grid({0.3})).sum() == 1.0);
}

TEST_CASE("diagonal source with unit weights") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 3.0;
  const auto sd = spectral_decompose(GridCovariance(a, Grid::uniform(2)), Vector::Ones(2));
  CHECK(sd.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(sd.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(std::abs(sd.eigenvectors(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("eigenvectors are weight-orthonormal and reconstruct the source") {
  std::mt19937_64 rng(83);
  const Matrix a = testing::random_psd(rng, 12);
  const Grid g = Grid::uniform(12);
  const auto sd = spectral_decompose(GridCovariance(a, g), trapezoid_weights(g));
  const Matrix &v = sd.eigenvectors;
  const Matrix gram = v.transpose() * sd.weight.asDiagonal() * v;
  CHECK((gram - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() <= 1e-10);
  const Matrix rebuilt = v * sd.eigenvalues.asDiagonal() * v.transpose();
  CHECK((rebuilt - a).cwiseAbs().maxCoeff() <= 1e-9 * a.cwiseAbs().maxCoeff());
  for (Index i = 1; i < 12; ++i) CHECK(sd.eigenvalues(i) <= sd.eigenvalues(i - 1));
}

TEST_CASE("Wiener spectrum approaches the continuum values") {
  // continuum eigenvalues are 1 / ((k + 1/2)^2 pi^2)
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double previous = 1.0;
  for (int level : {4, 6, 8}) {
    const auto cov = wiener(level);
    const auto sd = spectral_decompose(cov, trapezoid_weights(cov.grid()));
    const double err = std::abs(sd.eigenvalues(0) - 4.0 / pi2);
    CHECK(err < previous);
    previous = err;
    CHECK(sd.trace() == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(previous <= 1e-5);
  const auto cov = wiener(6);
  const auto sd = spectral_decompose(cov, trapezoid_weights(cov.grid()));
  CHECK(sd.eigenvalues(0) == doctest::Approx(4.0 / pi2).epsilon(1e-3));
  CHECK(sd.eigenvalues(1) == doctest::Approx(4.0 / (9.0 * pi2)).epsilon(1e-2));
}

TEST_CASE("rank one source: both decompositions coincide") {
  Vector v(5);
  v << 0.5, 1.0, -0.25, 2.0, 0.0;
  const Matrix a = v * v.transpose();
  const Grid g = Grid::uniform(5);
  const GridCovariance cov(a, g);
  const Vector w = trapezoid_weights(g);
  const auto sd = spectral_decompose(cov, w);
  CHECK(sd.eigenvalues(0) == doctest::Approx(v.dot(w.asDiagonal() * v)).epsilon(1e-14));
  CHECK(std::abs(sd.eigenvalues(1)) <= 1e-14);

  const auto dec = decompose(cov, {5, 1e-12});
  REQUIRE(dec.steps.size() == 1);
  const Matrix greedy = dec.steps[0].h * dec.steps[0].h.transpose();
  const Matrix spectral = sd.eigenvalues(0) * sd.eigenvectors.col(0) * sd.eigenvectors.col(0).transpose();
  CHECK((greedy - spectral).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("comparison report on the Wiener kernel") {
  const auto cov = wiener(5);
  const auto dec = decompose(cov, {32, 0.0});
  const auto sd = spectral_decompose(cov, trapezoid_weights(cov.grid()));
  const auto rep = compare_decompositions(dec, sd, 31);
  REQUIRE(rep.rows.size() == 32);
  CHECK(rep.weighted_diagonal_sum == 0.5);
  CHECK(rep.spectral_trace == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t k = 0; k + 1 < rep.rows.size(); ++k) {
    const auto &row = rep.rows[k];
    CHECK(*row.greedy_error == dec.steps[k + 1].lambda);
    CHECK(row.spectral_error == doctest::Approx(sd.eigenvalues(static_cast<Index>(k + 1))).epsilon(1e-9));
  }
  CHECK(rep.rows.back().greedy_partial_sum == 1.0 + 5.0 / 4.0);
  REQUIRE(rep.greedy_exceeds_trace_at.has_value());
  CHECK(*rep.greedy_exceeds_trace_at == 0);  // lambda_0 = 1 already exceeds the trace 1/2
}

TEST_CASE("comparison errors") {
  const auto cov = wiener(3);
  const auto dec = decompose(cov, {4, 0.0});
  const auto other = wiener(3);
  Matrix shifted = other.matrix();
  shifted(1, 1) += 1.0;
  const auto sd_other = spectral_decompose(GridCovariance(shifted, other.grid()), trapezoid_weights(other.grid()));
  CHECK_THROWS_AS(compare_decompositions(dec, sd_other, 2), std::invalid_argument);
  const auto sd = spectral_decompose(cov, trapezoid_weights(cov.grid()));
  CHECK_THROWS_AS(compare_decompositions(dec, sd, 9), std::out_of_range);
  CHECK_THROWS_AS(spectral_decompose(cov, Vector::Zero(9)), ConfigError);
  CHECK_THROWS_AS(spectral_decompose(cov, Vector::Ones(3)), ConfigError);
  // rows past the greedy steps keep only spectral data
  const auto rep = compare_decompositions(dec, sd, 6);
  CHECK_FALSE(rep.rows[5].greedy_lambda.has_value());
  CHECK(rep.rows[5].greedy_partial_sum == rep.rows[3].greedy_partial_sum);
}
