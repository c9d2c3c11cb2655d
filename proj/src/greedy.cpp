#include "banach_kl/greedy.hpp"

#include "banach_kl/dualbasis.hpp"

#include <cmath>
#include <sstream>

namespace banach_kl {

namespace {

// Shared by split_step and residual_after so that replays are bit-identical.
void downdate(Matrix &r, double lambda, const Vector &x, Index p) {
  const Index m = r.rows();
  for (Index j = 0; j < m; ++j) {
    const double lxj = lambda * x(j);
    for (Index i = j; i < m; ++i) {
      const double v = r(i, j) - x(i) * lxj;
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  r.row(p).setZero();
  r.col(p).setZero();
}

void check_step_invariants(const Matrix &r, double lambda0, std::size_t step) {
  if (r.size() == 0) return;
  const double tol = 1e-9 * lambda0;
  const double dmin = r.diagonal().minCoeff();
  if (dmin < -tol) {
    std::ostringstream os;
    os << "residual after step " << step << " has negative variance " << dmin;
    throw InvariantError(os.str());
  }
  const double dmax = r.diagonal().maxCoeff();
  const double emax = r.cwiseAbs().maxCoeff();
  if (emax > dmax + tol) {
    std::ostringstream os;
    os << "residual after step " << step << " has off-diagonal entry " << emax << " above max variance " << dmax;
    throw InvariantError(os.str());
  }
}

}  // namespace

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::StepLimit:
      return "step_limit";
    case Termination::RankExhausted:
      return "rank_exhausted";
    case Termination::ToleranceReached:
      return "tolerance_reached";
  }
  return "unknown";
}

Termination termination_from_string(const std::string &name) {
  if (name == "step_limit") return Termination::StepLimit;
  if (name == "rank_exhausted") return Termination::RankExhausted;
  if (name == "tolerance_reached") return Termination::ToleranceReached;
  throw ConfigError("unknown termination '" + name + "'");
}

std::vector<double> Decomposition::lambdas() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto &s : steps) out.push_back(s.lambda);
  return out;
}

RayleighMax rayleigh_max(const GridCovariance &residual) {
  RayleighMax best;
  const auto &d = residual.matrix().diagonal();
  for (Index i = 0; i < d.size(); ++i) {
    // strict comparison keeps the leftmost maximizer
    if (d(i) > best.lambda) {
      best.lambda = d(i);
      best.pivot_index = static_cast<std::size_t>(i);
    }
  }
  return best;
}

SplitResult split_step(const GridCovariance &residual, std::size_t pivot_index) {
  if (pivot_index >= residual.size()) throw std::out_of_range("pivot index outside grid");
  const auto p = static_cast<Index>(pivot_index);
  const double lambda = residual(p, p);
  if (!(lambda > 0.0)) throw std::domain_error("degenerate pivot: zero variance at pivot");

  Vector x = residual.matrix().col(p) / lambda;
  x(p) = 1.0;
  Matrix r = residual.matrix();
  downdate(r, lambda, x, p);

  SplitResult out{lambda, DualFunctional::dirac(pivot_index), x, std::sqrt(lambda) * x,
                  GridCovariance::unchecked(std::move(r), residual.grid())};
  return out;
}

Decomposition decompose(const GridCovariance &cov, const DecomposeOptions &options) {
  if (options.relative_tol < 0.0) throw ConfigError("lambda tolerance must be non-negative");
  Decomposition out{cov, {}, cov, Termination::StepLimit};
  GridCovariance current = cov;
  double lambda0 = 0.0;
  bool stopped = false;

  while (out.steps.size() < options.max_steps) {
    const RayleighMax best = rayleigh_max(current);
    if (best.lambda == 0.0) {
      out.termination = Termination::RankExhausted;
      stopped = true;
      break;
    }
    if (out.steps.empty()) lambda0 = best.lambda;
    if (best.lambda <= options.relative_tol * lambda0) {
      out.termination = Termination::ToleranceReached;
      stopped = true;
      break;
    }
    SplitResult split = split_step(current, best.pivot_index);
    check_step_invariants(split.residual.matrix(), lambda0, out.steps.size());

    DecompositionStep step;
    step.lambda = split.lambda;
    step.pivot_index = best.pivot_index;
    step.pivot_sign = best.sign;
    step.f = std::move(split.f);
    step.x = std::move(split.x);
    step.h = std::move(split.h);
    out.steps.push_back(std::move(step));
    current = std::move(split.residual);
  }
  if (!stopped) out.termination = Termination::StepLimit;

  const auto duals = dual_vectors(out.steps);
  for (std::size_t k = 0; k < duals.size(); ++k) out.steps[k].x_star = duals[k];
  out.residual = std::move(current);
  return out;
}

Matrix residual_after(const Decomposition &decomposition, std::size_t count) {
  if (count > decomposition.steps.size()) throw std::out_of_range("more steps requested than recorded");
  Matrix r = decomposition.source.matrix();
  for (std::size_t k = 0; k < count; ++k) {
    const auto &s = decomposition.steps[k];
    downdate(r, s.lambda, s.x, static_cast<Index>(s.pivot_index));
  }
  return r;
}

double truncation_error(const Decomposition &decomposition, std::size_t n) {
  if (n >= decomposition.steps.size()) throw std::out_of_range("truncation index beyond recorded steps");
  const Matrix r = residual_after(decomposition, n + 1);
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

std::vector<double> truncation_errors(const Decomposition &decomposition) {
  std::vector<double> out;
  out.reserve(decomposition.steps.size());
  Matrix r = decomposition.source.matrix();
  for (const auto &s : decomposition.steps) {
    downdate(r, s.lambda, s.x, static_cast<Index>(s.pivot_index));
    out.push_back(r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff());
  }
  return out;
}

Matrix reconstruction(const Decomposition &decomposition, std::size_t count) {
  if (count > decomposition.steps.size()) throw std::out_of_range("more steps requested than recorded");
  const auto m = static_cast<Index>(decomposition.source.size());
  Matrix out = Matrix::Zero(m, m);
  for (std::size_t k = 0; k < count; ++k) {
    const auto &s = decomposition.steps[k];
    out.noalias() += s.lambda * s.x * s.x.transpose();
  }
  return out;
}

void require_psd_residual(const Matrix &residual, double scale) {
  const double lmin = min_eigenvalue(residual);
  if (lmin < -kPsdTolerance * scale) {
    std::ostringstream os;
    os << "residual is not positive semidefinite (min eigenvalue " << lmin << ")";
    throw InvariantError(os.str());
  }
}

}  // namespace banach_kl
