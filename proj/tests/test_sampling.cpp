#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "banach_kl/sampling.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstdlib>

using namespace banach_kl;

namespace {

Decomposition wiener(int level, std::size_t steps) {
  return decompose(discretize(KernelSpec::brownian_motion(), Grid::dyadic(level)), {steps, 0.0});
}

}  // namespace

TEST_CASE("zero terms give zero paths") {
  const auto dec = wiener(3, 8);
  const auto batch = sample_paths(dec, 0, 10, 1);
  CHECK(batch.paths.rows() == 10);
  CHECK(batch.paths.isZero(0.0));
  CHECK_THROWS_AS(sample_paths(dec, 9, 10, 1), std::out_of_range);
  CHECK_THROWS_AS(sample_paths(dec, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("seed determinism and thread independence") {
  const auto dec = wiener(4, 16);
  const auto a = sample_paths(dec, 16, 3000, 99);
  const auto b = sample_paths(dec, 16, 3000, 99);
  CHECK(a.paths == b.paths);
  const auto c = sample_paths(dec, 16, 3000, 100);
  CHECK(a.paths != c.paths);

  setenv("BANACH_KL_THREADS", "1", 1);
  const auto single = sample_paths(dec, 16, 3000, 99);
  unsetenv("BANACH_KL_THREADS");
  CHECK(single.paths == a.paths);

  // a shorter batch is a prefix of a longer one
  const auto prefix = sample_paths(dec, 16, 1500, 99);
  CHECK(prefix.paths == a.paths.topRows(1500));
}

TEST_CASE("Wiener variance at t = 1") {
  const auto dec = wiener(3, 8);
  const auto batch = sample_paths(dec, 8, 100000, 2024);
  const auto cov = empirical_covariance(batch);
  CHECK(std::abs(cov(8, 8) - 1.0) <= 0.02);
  // truncation at one term already reproduces the pivot variance
  const auto one = empirical_covariance(sample_paths(dec, 1, 100000, 2024));
  CHECK(std::abs(one(8, 8) - 1.0) <= 0.02);
}

TEST_CASE("full-rank sampling matches the source within Monte-Carlo error") {
  std::mt19937_64 rng(43);
  const Matrix a = testing::random_psd(rng, 6);
  const auto dec = decompose(GridCovariance(a, Grid::uniform(6)), {6, 1e-12});
  const std::size_t n = 100000;
  const auto batch = sample_paths(dec, dec.steps.size(), n, 5);
  const Matrix err = empirical_covariance(batch).matrix() - a;
  const double lambda0 = dec.steps.front().lambda;
  CHECK(err.cwiseAbs().maxCoeff() <= 5.0 * std::sqrt(lambda0 * lambda0 / n));
  CHECK(summarize(dec, batch).max_cov_error == doctest::Approx(err.cwiseAbs().maxCoeff()));
}

TEST_CASE("empirical covariance closed forms") {
  const Grid g = Grid::uniform(3);
  SampleBatch zero{Matrix::Zero(5, 3), 0, 0, g};
  CHECK(empirical_covariance(zero).matrix().isZero(0.0));

  Vector v(3);
  v << 1.0, -2.0, 0.5;
  Matrix paths(2, 3);
  paths.row(0) = v.transpose();
  paths.row(1) = -v.transpose();
  // mean 0, sum of outer products 2 v v^T, divided by n - 1 = 1
  const Matrix expected = 2.0 * v * v.transpose();
  CHECK((empirical_covariance(paths) - expected).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(empirical_covariance(Matrix::Zero(1, 3)), std::invalid_argument);
}

TEST_CASE("variance additivity and truncated variance bound") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = testing::random_psd(rng, 12, 6);
    const auto dec = decompose(GridCovariance(a, Grid::uniform(12)), {12, 1e-12});
    for (std::size_t n = 0; n <= dec.steps.size(); ++n) {
      const Vector kl = reconstruction(dec, n).diagonal();
      const Vector res = residual_after(dec, n).diagonal();
      CHECK((kl + res - a.diagonal()).cwiseAbs().maxCoeff() <= 1e-12 * a.diagonal().maxCoeff());
      CHECK((kl.array() <= a.diagonal().array() + 1e-12).all());
    }
  }
}

TEST_CASE("symmetric factor") {
  std::mt19937_64 rng(53);
  const Matrix a = testing::random_psd(rng, 7, 3);
  const Matrix f = symmetric_factor(a, a.diagonal().maxCoeff());
  CHECK((f.transpose() * f - a).cwiseAbs().maxCoeff() <= 1e-12);

  Matrix pinned = a;
  pinned.row(2).setZero();
  pinned.col(2).setZero();
  CHECK(symmetric_factor(pinned, 1.0).col(2).isZero(0.0));

  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(symmetric_factor(bad, 1.0), InvariantError);
  CHECK(symmetric_factor(Matrix::Zero(3, 3), 1.0).rows() == 0);
}

TEST_CASE("convolution check") {
  const auto dec = wiener(4, 16);
  for (std::size_t n = 0; n < 16; ++n) {
    const auto r = convolution_check(dec, n, 2000, 3);
    CHECK(r.max_identity_error <= r.identity_tolerance);
  }
  // after one step the residual is the bridge, pinned at t = 1
  const auto first = convolution_check(dec, 0, 50000, 11);
  CHECK(first.max_residual_variance_at_pivots == 0.0);
  CHECK(first.ok());

  std::mt19937_64 rng(59);
  const Matrix a = testing::random_psd(rng, 6);
  const auto random = decompose(GridCovariance(a, Grid::uniform(6)), {6, 1e-12});
  const auto r = convolution_check(random, 2, 100000, 17);
  CHECK(r.ok());
  CHECK_THROWS_AS(convolution_check(random, 6, 100, 1), std::out_of_range);
}
