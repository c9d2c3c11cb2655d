#include "banach_kl/sampling.hpp"

#include "banach_kl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace banach_kl {

Matrix gaussian_combinations(const Matrix &factor, std::size_t n_samples, std::uint64_t seed, Stream stream) {
  const Index r = factor.rows();
  const Index m = factor.cols();
  Matrix out = Matrix::Zero(static_cast<Index>(n_samples), m);
  if (r == 0 || n_samples == 0) return out;

  const std::size_t n_chunks = (n_samples + kSampleChunk - 1) / kSampleChunk;
  parallel_for_chunks(n_chunks, [&](std::size_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(chunk)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t begin = chunk * kSampleChunk;
    const auto rows = static_cast<Index>(std::min(kSampleChunk, n_samples - begin));
    Matrix z(rows, r);
    for (Index i = 0; i < rows; ++i) {
      for (Index k = 0; k < r; ++k) z(i, k) = normal(engine);
    }
    out.middleRows(static_cast<Index>(begin), rows).noalias() = z * factor;
  });
  return out;
}

Matrix symmetric_factor(const Matrix &cov, double scale) {
  const Index m = cov.rows();
  std::vector<Index> active;
  for (Index i = 0; i < m; ++i) {
    if (!cov.row(i).isZero(0.0)) active.push_back(i);
  }
  const auto a = static_cast<Index>(active.size());
  if (a == 0) return Matrix::Zero(0, m);

  Matrix sub(a, a);
  for (Index i = 0; i < a; ++i) {
    for (Index j = 0; j < a; ++j) sub(i, j) = cov(active[i], active[j]);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sub);
  const Vector &mu = solver.eigenvalues();
  if (mu.minCoeff() < -kPsdTolerance * scale) {
    std::ostringstream os;
    os << "covariance to factor is not positive semidefinite (min eigenvalue " << mu.minCoeff() << ")";
    throw InvariantError(os.str());
  }
  Matrix factor = Matrix::Zero(a, m);
  for (Index k = 0; k < a; ++k) {
    const double s = std::sqrt(std::max(mu(k), 0.0));
    for (Index i = 0; i < a; ++i) factor(k, active[i]) = s * solver.eigenvectors()(i, k);
  }
  return factor;
}

SampleBatch sample_paths(const Decomposition &decomposition, std::size_t n_terms, std::size_t n_samples,
                         std::uint64_t seed) {
  if (n_terms > decomposition.steps.size()) throw std::out_of_range("n_terms exceeds recorded steps");
  if (n_samples == 0) throw std::invalid_argument("n_samples must be at least 1");
  const auto m = static_cast<Index>(decomposition.source.size());
  Matrix factor(static_cast<Index>(n_terms), m);
  for (std::size_t k = 0; k < n_terms; ++k) factor.row(static_cast<Index>(k)) = decomposition.steps[k].h.transpose();
  return {gaussian_combinations(factor, n_samples, seed, Stream::KarhunenLoeve), n_terms, seed,
          decomposition.grid()};
}

Matrix empirical_covariance(const Matrix &paths) {
  if (paths.rows() < 2) throw std::invalid_argument("degenerate batch: need at least two samples");
  const Matrix centered = paths.rowwise() - paths.colwise().mean();
  Matrix c = (centered.transpose() * centered) / static_cast<double>(paths.rows() - 1);
  return 0.5 * (c + c.transpose());
}

GridCovariance empirical_covariance(const SampleBatch &batch) {
  return GridCovariance::unchecked(empirical_covariance(batch.paths), batch.grid);
}

Matrix covariance_standard_errors(const Matrix &cov, std::size_t n_samples) {
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  const Vector d = cov.diagonal();
  Matrix var = (d * d.transpose() + cov.cwiseProduct(cov)) / static_cast<double>(n_samples - 1);
  return var.cwiseSqrt();
}

SampleSummary summarize(const Decomposition &decomposition, const SampleBatch &batch) {
  SampleSummary s{batch.n_terms, batch.n_samples(), batch.seed, 0.0};
  if (batch.n_samples() >= 2) {
    const Matrix diff = empirical_covariance(batch.paths) - reconstruction(decomposition, batch.n_terms);
    s.max_cov_error = diff.cwiseAbs().maxCoeff();
  }
  return s;
}

ConvolutionReport convolution_check(const Decomposition &decomposition, std::size_t n, std::size_t n_samples,
                                    std::uint64_t seed) {
  if (n >= decomposition.steps.size()) throw std::out_of_range("no residual recorded after the requested step");
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  const double lambda0 = decomposition.steps.front().lambda;
  const Matrix &source = decomposition.source.matrix();
  const Matrix low_rank = reconstruction(decomposition, n + 1);
  const Matrix residual = residual_after(decomposition, n + 1);

  ConvolutionReport report;
  report.n = n;
  report.identity_tolerance = 1e-9 * lambda0;
  report.max_identity_error = (source - low_rank - residual).cwiseAbs().maxCoeff();
  report.mc_tolerance = 5.0 * lambda0 / std::sqrt(static_cast<double>(n_samples));

  const SampleBatch kl = sample_paths(decomposition, n + 1, n_samples, seed);
  const Matrix res = gaussian_combinations(symmetric_factor(residual, lambda0), n_samples, seed, Stream::Residual);
  const Matrix combined = kl.paths + res;
  report.max_mc_error = (empirical_covariance(combined) - source).cwiseAbs().maxCoeff();

  const Matrix res_cov = empirical_covariance(res);
  for (std::size_t k = 0; k <= n; ++k) {
    const auto p = static_cast<Index>(decomposition.steps[k].pivot_index);
    report.max_residual_variance_at_pivots = std::max(report.max_residual_variance_at_pivots, res_cov(p, p));
  }
  return report;
}

}  // namespace banach_kl
