#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "banach_kl/dualbasis.hpp"
#include "banach_kl/greedy.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace banach_kl;

namespace {

GridCovariance wiener(int level) { return discretize(KernelSpec::brownian_motion(), Grid::dyadic(level)); }

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("rayleigh_max picks the largest variance, leftmost on ties") {
  const auto w = wiener(4);
  auto best = rayleigh_max(w);
  CHECK(best.lambda == 1.0);
  CHECK(w.grid()[best.pivot_index] == 1.0);
  CHECK(best.sign == 1);

  const auto bridge = discretize(KernelSpec::brownian_bridge(), Grid::dyadic(4));
  best = rayleigh_max(bridge);
  CHECK(best.lambda == 0.25);
  CHECK(bridge.grid()[best.pivot_index] == 0.5);

  const GridCovariance zero(Matrix::Zero(3, 3), Grid::uniform(3));
  best = rayleigh_max(zero);
  CHECK(best.lambda == 0.0);
  CHECK(best.pivot_index == 0);
  CHECK(best.sign == 1);

  Matrix tie = Matrix::Identity(3, 3);
  tie(0, 0) = 0.5;
  best = rayleigh_max(GridCovariance(tie, Grid::uniform(3)));
  CHECK(best.pivot_index == 1);
}

TEST_CASE("split_step on the Wiener matrix yields x_0(t) = t and the Brownian bridge") {
  const auto w = wiener(4);
  const auto split = split_step(w, w.grid().index_of(1.0));
  CHECK(split.lambda == 1.0);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(split.x(static_cast<Index>(i)) == w.grid()[i]);
  CHECK(split.residual.matrix() == discretize(KernelSpec::brownian_bridge(), w.grid()).matrix());
  CHECK(split.f.weight(w.size() - 1) == 1.0);
  CHECK(split.h == split.x);
}

TEST_CASE("split_step on a diagonal matrix") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 3.0;
  const auto split = split_step(GridCovariance(a, Grid::uniform(2)), 1);
  CHECK(split.lambda == 3.0);
  CHECK(split.x == Vector::Unit(2, 1));
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 2.0;
  CHECK(split.residual.matrix() == expected);
  CHECK(split.h(1) == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(split_step(split.residual, 1), std::domain_error);
}

TEST_CASE("split_step equals the dense Schur complement") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const GridCovariance cov(testing::random_psd(rng, 5), Grid::uniform(5));
    const Index p = trial % 5;
    const auto split = split_step(cov, static_cast<std::size_t>(p));
    const Vector c = cov.matrix().col(p);
    const Matrix schur = cov.matrix() - c * c.transpose() / cov(p, p);
    CHECK(max_abs(split.residual.matrix() - schur) <= 1e-14 * max_abs(cov.matrix()));
    CHECK(split.residual.matrix().row(p).isZero(0.0));
    CHECK(split.residual.matrix().col(p).isZero(0.0));
    CHECK(split.x(p) == 1.0);
    // unit sup norm needs the pivot to carry the largest variance
    Index pmax = 0;
    cov.matrix().diagonal().maxCoeff(&pmax);
    CHECK(split_step(cov, static_cast<std::size_t>(pmax)).x.cwiseAbs().maxCoeff() == 1.0);
  }
}

TEST_CASE("decompose reproduces the Wiener eigenvalue law on a level-3 grid") {
  const auto dec = decompose(wiener(3), {8, 1e-12});
  REQUIRE(dec.steps.size() == 8);
  const std::vector<double> expected{1, 0.25, 0.125, 0.125, 0.0625, 0.0625, 0.0625, 0.0625};
  CHECK(dec.lambdas() == expected);
  CHECK(dec.termination == Termination::StepLimit);
  CHECK(truncation_error(dec, 0) == 0.25);
  // every grid point of level 3 is pinned after 8 steps
  CHECK(truncation_error(dec, 7) == 0.0);
}

TEST_CASE("truncation error after 8 Wiener steps is 1/32 once the grid resolves level 3 hats") {
  const auto dec = decompose(wiener(4), {9, 0.0});
  CHECK(truncation_error(dec, 7) == 1.0 / 32.0);
  CHECK(dec.steps[8].lambda == 1.0 / 32.0);
  CHECK_THROWS_AS(truncation_error(dec, 9), std::out_of_range);
}

TEST_CASE("finite rank inputs exhaust") {
  // exactly representable rank-2 matrix so the residual is exactly zero
  Vector u(4), v(4);
  u << 1, 1, 0, 0.5;
  v << 0, 0, 1, 1;
  const Matrix a = 4.0 * u * u.transpose() + v * v.transpose();
  const auto dec = decompose(GridCovariance(a, Grid::uniform(4)), {10, 1e-12});
  CHECK(dec.steps.size() == 2);
  CHECK(dec.termination == Termination::RankExhausted);
  CHECK(max_abs(reconstruction(dec, 2) - a) == 0.0);

  const auto zero = decompose(GridCovariance(Matrix::Zero(3, 3), Grid::uniform(3)), {5, 1e-12});
  CHECK(zero.steps.empty());
  CHECK(zero.termination == Termination::RankExhausted);

  const auto none = decompose(wiener(2), {0, 1e-12});
  CHECK(none.steps.empty());
  CHECK(none.termination == Termination::StepLimit);
}

TEST_CASE("tolerance stops small eigenvalues") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-3;
  a(2, 2) = 1e-14;
  const auto dec = decompose(GridCovariance(a, Grid::uniform(3)), {10, 1e-12});
  CHECK(dec.steps.size() == 2);
  CHECK(dec.termination == Termination::ToleranceReached);
  CHECK_THROWS_AS(decompose(GridCovariance(a, Grid::uniform(3)), {10, -1.0}), ConfigError);
}

TEST_CASE("full-rank exhaustion reconstructs random matrices") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = testing::random_psd(rng, 8);
    const auto dec = decompose(GridCovariance(a, Grid::uniform(8)), {8, 1e-12});
    REQUIRE(dec.steps.size() == 8);
    CHECK(max_abs(reconstruction(dec, 8) - a) <= 1e-9 * max_abs(a));
    CHECK(truncation_error(dec, 7) <= 1e-12 * dec.steps[0].lambda);
  }
}

TEST_CASE("step invariants hold on random inputs") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Index m = 4 + trial % 13;
    const Index rank = trial % 2 ? m : m / 2 + 1;
    const Matrix a = testing::random_psd(rng, m, rank);
    const auto dec = decompose(GridCovariance(a, Grid::uniform(static_cast<std::size_t>(m))),
                               {static_cast<std::size_t>(m), 1e-12});
    const double lambda0 = dec.steps.front().lambda;
    for (std::size_t n = 0; n < dec.steps.size(); ++n) {
      const auto &s = dec.steps[n];
      // unit sup norm, <x_n, f_n> = 1, h = sqrt(lambda) x
      CHECK(s.x.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(s.f.apply(s.x) == 1.0);
      CHECK(max_abs(s.h - std::sqrt(s.lambda) * s.x) == 0.0);
      if (n > 0) CHECK(s.lambda <= dec.steps[n - 1].lambda);
      // pivot annihilation: <x_k, f_l> = 0 for k > l
      for (std::size_t l = 0; l < n; ++l) CHECK(dec.steps[l].f.apply(s.x) == 0.0);
      // max entry on diagonal
      const Matrix r = residual_after(dec, n + 1);
      CHECK(r.cwiseAbs().maxCoeff() <= r.diagonal().maxCoeff() + 1e-12 * lambda0);
    }
    // source = sum lambda x x^T + residual
    CHECK(max_abs(a - reconstruction(dec, dec.steps.size()) - dec.residual.matrix()) <= 1e-9 * lambda0);
    CHECK(residual_after(dec, dec.steps.size()) == dec.residual.matrix());
  }
}

TEST_CASE("h_k are orthonormal in the Cameron-Martin inner product") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const GridCovariance cov(testing::random_psd(rng, 7), Grid::uniform(7));
    const auto dec = decompose(cov, {7, 1e-12});
    for (std::size_t k = 0; k < dec.steps.size(); ++k) {
      for (std::size_t l = 0; l < dec.steps.size(); ++l) {
        const double g = cm_inner(cov, normalized_dual(dec.steps[k]), normalized_dual(dec.steps[l]));
        CHECK(std::abs(g - (k == l ? 1.0 : 0.0)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("greedy matches a diagonally pivoted Cholesky oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const Index m = 2 + trial % 20;
    const Matrix a = testing::random_psd(rng, m, trial % 3 ? 2 * m : m / 2 + 1);
    const auto dec = decompose(GridCovariance(a, Grid::uniform(static_cast<std::size_t>(m))),
                               {static_cast<std::size_t>(m), 1e-12});
    const auto ref = testing::pivoted_cholesky(a, static_cast<std::size_t>(m), 1e-12);
    REQUIRE(dec.steps.size() == ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) {
      CHECK(static_cast<Index>(dec.steps[k].pivot_index) == ref[k].pivot);
      CHECK(dec.steps[k].lambda == doctest::Approx(ref[k].lambda).epsilon(1e-10));
      CHECK(max_abs(dec.steps[k].x - ref[k].x) <= 1e-9);
    }
  }
}
