#ifndef BANACH_KL_SAMPLING_HPP
#define BANACH_KL_SAMPLING_HPP

#include "banach_kl/greedy.hpp"

#include <cstdint>

namespace banach_kl {

/// Normal variates come from std::mt19937_64 fed through
/// std::normal_distribution. Samples are generated in fixed chunks of
/// kSampleChunk paths; chunk c of stream s draws from an engine seeded with
/// std::seed_seq{seed_lo, seed_hi, s, c}, so batches do not depend on the
/// thread count.
inline constexpr std::size_t kSampleChunk = 1024;
inline constexpr const char *kGeneratorName = "mt19937_64+normal_distribution/seed_seq(seed,stream,chunk)";

/// Stream tags keep draws for different purposes independent under one seed.
enum class Stream : std::uint32_t { KarhunenLoeve = 1, Residual = 2, Source = 3, Pinned = 4 };

struct SampleBatch {
  Matrix paths;  // n_samples x m
  std::size_t n_terms = 0;
  std::uint64_t seed = 0;
  Grid grid;

  std::size_t n_samples() const { return static_cast<std::size_t>(paths.rows()); }
};

/// Returns Z * factor where Z is an n_samples x factor.rows() matrix of
/// i.i.d. standard normals drawn from the given stream.
Matrix gaussian_combinations(const Matrix &factor, std::size_t n_samples, std::uint64_t seed, Stream stream);

/// Rows F with F^T F = cov, from an eigen-decomposition whose eigenvalues
/// within -kPsdTolerance * scale of zero are clamped; more negative ones throw
/// InvariantError. Rows and columns that are identically zero stay exactly
/// zero in the factor.
Matrix symmetric_factor(const Matrix &cov, double scale);

/// Paths sum_{k<n_terms} sqrt(lambda_k) xi_k x_k.
SampleBatch sample_paths(const Decomposition &decomposition, std::size_t n_terms, std::size_t n_samples,
                         std::uint64_t seed);

/// Unbiased sample covariance (divides by n - 1).
GridCovariance empirical_covariance(const SampleBatch &batch);
Matrix empirical_covariance(const Matrix &paths);

/// Per-entry standard error of the unbiased covariance estimator for
/// Gaussian data with true covariance `cov`.
Matrix covariance_standard_errors(const Matrix &cov, std::size_t n_samples);

/// Truncated KL covariance sum_{k<n_terms} lambda_k x_k x_k^T compared with
/// a sampled batch.
struct SampleSummary {
  std::size_t n_terms = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  double max_cov_error = 0.0;
};
SampleSummary summarize(const Decomposition &decomposition, const SampleBatch &batch);

struct ConvolutionReport {
  std::size_t n = 0;
  double max_identity_error = 0.0;   // |R - R_{lambda_0..lambda_n} - R_{n+1}|
  double identity_tolerance = 0.0;   // 1e-9 * lambda_0
  double max_mc_error = 0.0;         // |empirical - R|
  double mc_tolerance = 0.0;         // 5 * lambda_0 / sqrt(n_samples)
  double max_residual_variance_at_pivots = 0.0;
  bool ok() const { return max_identity_error <= identity_tolerance && max_mc_error <= mc_tolerance; }
};

/// Checks source = rank-(n+1) part + residual after step n, exactly and by
/// sampling the two parts independently.
ConvolutionReport convolution_check(const Decomposition &decomposition, std::size_t n, std::size_t n_samples,
                                    std::uint64_t seed);

}  // namespace banach_kl

#endif  // BANACH_KL_SAMPLING_HPP
