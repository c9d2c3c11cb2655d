#include "banach_kl/hilbert_compare.hpp"

#include <algorithm>
#include <cmath>

namespace banach_kl {

Vector trapezoid_weights(const Grid &grid) {
  const auto m = static_cast<Index>(grid.size());
  Vector w = Vector::Zero(m);
  if (m == 1) {
    w(0) = 1.0;
    return w;
  }
  for (Index i = 0; i + 1 < m; ++i) {
    const double h = grid[static_cast<std::size_t>(i + 1)] - grid[static_cast<std::size_t>(i)];
    w(i) += 0.5 * h;
    w(i + 1) += 0.5 * h;
  }
  return w;
}

SpectralDecomposition spectral_decompose(const GridCovariance &cov, const Vector &weight) {
  const auto m = static_cast<Index>(cov.size());
  if (weight.size() != m) throw ConfigError("quadrature weights do not match grid size");
  if (!(weight.array() > 0.0).all()) throw ConfigError("quadrature weights must be positive");

  const Vector root = weight.cwiseSqrt();
  const Matrix a = root.asDiagonal() * cov.matrix() * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.transpose()));

  // Eigen returns ascending order.
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = root.cwiseInverse().asDiagonal() * solver.eigenvectors().rowwise().reverse();
  out.weight = weight;
  out.source = cov.matrix();
  return out;
}

ComparisonReport compare_decompositions(const Decomposition &greedy, const SpectralDecomposition &spectral,
                                        std::size_t n) {
  const Matrix &source = greedy.source.matrix();
  if (spectral.source.rows() != source.rows() || spectral.source != source) {
    throw std::invalid_argument("greedy and spectral decompositions come from different sources");
  }
  const auto m = static_cast<std::size_t>(source.rows());
  if (n >= m) throw std::out_of_range("comparison order exceeds grid size");

  ComparisonReport report;
  report.spectral_trace = spectral.trace();
  report.weighted_diagonal_sum = spectral.weight.dot(source.diagonal());

  const Vector root = spectral.weight.cwiseSqrt();
  Matrix greedy_residual = source;
  Matrix spectral_residual = source;
  double greedy_sum = 0.0;
  double spectral_sum = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    ComparisonRow row;
    row.n = k;
    const auto kk = static_cast<Index>(k);
    if (k < greedy.steps.size()) {
      const auto &s = greedy.steps[k];
      row.greedy_lambda = s.lambda;
      greedy_sum += s.lambda;
      greedy_residual = residual_after(greedy, k + 1);
      row.greedy_error = greedy_residual.cwiseAbs().maxCoeff();
      row.greedy_error_sup = row.greedy_error;
    }
    row.greedy_partial_sum = greedy_sum;

    const double mu = spectral.eigenvalues(kk);
    row.spectral_lambda = mu;
    spectral_sum += mu;
    row.spectral_partial_sum = spectral_sum;
    spectral_residual.noalias() -= mu * spectral.eigenvectors.col(kk) * spectral.eigenvectors.col(kk).transpose();
    row.spectral_error_sup = spectral_residual.cwiseAbs().maxCoeff();
    const Matrix weighted = root.asDiagonal() * spectral_residual * root.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (weighted + weighted.transpose()), Eigen::EigenvaluesOnly);
    row.spectral_error = solver.eigenvalues().cwiseAbs().maxCoeff();

    if (!report.greedy_exceeds_trace_at && row.greedy_lambda && greedy_sum > report.spectral_trace) {
      report.greedy_exceeds_trace_at = k;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace banach_kl
