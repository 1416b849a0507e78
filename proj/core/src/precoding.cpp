#include "cfmimo/precoding.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cfmimo/evaluation.hpp"

namespace cfmimo {
namespace {

constexpr double kRealnessTolerance = 1e-10;

// Hermitian forms must have real traces; a sizeable imaginary part means a
// conjugation bug upstream.
double real_trace(const Complex& t, const char* what) {
  const double scale = std::max(std::abs(t.real()), 1e-300);
  if (std::abs(t.imag()) > kRealnessTolerance * scale &&
      std::abs(t.imag()) > std::numeric_limits<double>::min()) {
    std::ostringstream msg;
    msg << what << " has imaginary residue " << t.imag() << " (real part "
        << t.real() << ")";
    throw NumericalError(msg.str());
  }
  return t.real();
}

double frobenius2(const CMatrix& m) { return m.squaredNorm(); }

// h = sqrt(P / (rho tr(B^H B))), so that tr(P^H P) = budget with
// P = h sqrt(rho) B.
double gain_for_budget(const CMatrix& b, const LinkParams& link) {
  return std::sqrt(link.power_budget / frobenius2(b)) / std::sqrt(link.rho_f);
}

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + " is not finite");
  }
}

}  // namespace

CMatrix ErrorStatistics::dense() const {
  return diagonal.cast<Complex>().asDiagonal();
}

std::string_view to_string(PrecoderKind kind) {
  switch (kind) {
    case PrecoderKind::kZf: return "zf";
    case PrecoderKind::kMmse: return "mmse";
    case PrecoderKind::kRobust: return "robust";
  }
  return "unknown";
}

PrecoderKind parse_precoder_kind(std::string_view name) {
  if (name == "zf") return PrecoderKind::kZf;
  if (name == "mmse") return PrecoderKind::kMmse;
  if (name == "robust") return PrecoderKind::kRobust;
  throw ConfigError("unknown precoder '" + std::string(name) +
                    "' (expected zf, mmse or robust)");
}

std::string_view to_string(LambdaRule rule) {
  switch (rule) {
    case LambdaRule::kBaseline: return "baseline";
    case LambdaRule::kStationary: return "stationary";
  }
  return "unknown";
}

LambdaRule parse_lambda_rule(std::string_view name) {
  if (name == "baseline") return LambdaRule::kBaseline;
  if (name == "stationary") return LambdaRule::kStationary;
  throw ConfigError("unknown lambda rule '" + std::string(name) +
                    "' (expected baseline or stationary)");
}

void RobustSettings::validate() const {
  if (i_max < 1) throw ConfigError("robust.i_max must be >= 1");
  if (!(epsilon > 0.0)) throw ConfigError("robust.epsilon must be > 0");
  if (!(jitter_scale >= 0.0)) throw ConfigError("robust.jitter must be >= 0");
}

ErrorStatistics error_covariance_psi(const RMatrix& lsf_scheduled,
                                     const Mask& mask, double alpha) {
  ErrorStatistics psi;
  psi.diagonal =
      alpha * lsf_scheduled.cwiseProduct(mask.cast<double>()).rowwise().sum();
  return psi;
}

PrecoderOutput zf_precoder(const CMatrix& g_hat_s, double power_budget) {
  const CMatrix g_conj = g_hat_s.conjugate();
  const CMatrix gram = g_hat_s.transpose() * g_conj;
  Eigen::LLT<CMatrix> llt(gram);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (g_hat_s.cols() > g_hat_s.rows() || !(rcond > 1e-13)) {
    std::ostringstream msg;
    msg << "rank-deficient channel (M=" << g_hat_s.rows()
        << ", n=" << g_hat_s.cols() << ", rcond=" << rcond << ")";
    throw NumericalError(msg.str());
  }
  const CMatrix raw = g_conj * llt.solve(CMatrix::Identity(gram.rows(), gram.cols()));
  const double scale = std::sqrt(power_budget / frobenius2(raw));

  PrecoderOutput out;
  out.kind = PrecoderKind::kZf;
  out.p = scale * raw;
  out.h = scale;
  out.lambda = 0.0;
  require_finite(out.p, "ZF precoder");
  return out;
}

PrecoderOutput mmse_precoder(const CMatrix& g_hat_s, const LinkParams& link) {
  const auto n = static_cast<double>(g_hat_s.cols());
  const CMatrix g_conj = g_hat_s.conjugate();

  CMatrix system = link.rho_f * (g_conj * g_hat_s.transpose());
  system.diagonal().array() += link.sigma_w2 * n / link.power_budget;
  Eigen::LLT<CMatrix> llt(system);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("MMSE system matrix is not positive definite");
  }
  const CMatrix b = llt.solve(g_conj);
  const double h = gain_for_budget(b, link);

  PrecoderOutput out;
  out.kind = PrecoderKind::kMmse;
  out.p = h * std::sqrt(link.rho_f) * b;
  out.h = h;
  out.lambda = 0.0;
  require_finite(out.p, "MMSE precoder");
  return out;
}

double lambda_update(const CMatrix& p, double h, const CMatrix& g_hat_s,
                     const ErrorStatistics& psi, const LinkParams& link,
                     LambdaRule rule) {
  const auto n = static_cast<double>(g_hat_s.cols());
  const double budget = link.power_budget;
  const double h2 = h * h;

  const CMatrix effective = g_hat_s.transpose() * p;  // G^T P, n x n
  const double signal =
      real_trace((effective.adjoint() * effective).trace(),
                 "tr(P^H G* G^T P)");
  const double leakage = real_trace(
      (p.adjoint() * psi.diagonal.cast<Complex>().asDiagonal() * p).trace(),
      "tr(P^H Psi P)");

  double lambda = link.sigma_w2 * n / (h2 * budget) -
                  link.rho_f * leakage / budget;
  if (rule == LambdaRule::kBaseline) {
    lambda -= 2.0 * link.rho_f * signal / (h2 * budget);
  }
  return lambda;
}

RobustState robust_init(const CMatrix& g_hat_s, const ErrorStatistics& psi,
                        const LinkParams& link, LambdaRule rule) {
  PrecoderOutput mmse = mmse_precoder(g_hat_s, link);
  RobustState state;
  state.h = mmse.h;
  state.b = mmse.p / (mmse.h * std::sqrt(link.rho_f));
  state.p = std::move(mmse.p);
  state.lambda = lambda_update(state.p, state.h, g_hat_s, psi, link, rule);
  state.iteration = 0;
  return state;
}

CMatrix stationarity_matrix(const CMatrix& g_hat_s, const ErrorStatistics& psi,
                            double rho_f, double h, double lambda) {
  const double h2 = h * h;
  CMatrix a = rho_f * (g_hat_s.conjugate() * g_hat_s.transpose());
  a.diagonal() += (h2 * rho_f * psi.diagonal).cast<Complex>();
  a.diagonal().array() += h2 * lambda;
  return a;
}

IterateResult robust_iterate(const RobustState& state, const CMatrix& g_hat_s,
                             const ErrorStatistics& psi, const LinkParams& link,
                             const RobustSettings& settings) {
  const auto m = g_hat_s.rows();
  const int iteration = state.iteration + 1;
  CMatrix system =
      stationarity_matrix(g_hat_s, psi, link.rho_f, state.h, state.lambda);

  const double data_scale =
      link.rho_f * frobenius2(g_hat_s) / static_cast<double>(m);
  const double jitter = settings.jitter_scale * data_scale;

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(system, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigenvalue solver failed at iteration " +
                         std::to_string(iteration));
  }
  const RVector& values = eig.eigenvalues();
  IterationRecord record;
  record.iteration = iteration;
  record.min_eigenvalue = values.minCoeff();

  double shift = 0.0;
  if (record.min_eigenvalue < jitter) {
    shift = jitter;
    record.jitter_applied = true;
    system.diagonal().array() += shift;
  }
  const RVector shifted = values.array() + shift;
  const double largest = std::max(shifted.cwiseAbs().maxCoeff(), data_scale);
  const double smallest = shifted.cwiseAbs().minCoeff();
  if (!(smallest > std::numeric_limits<double>::epsilon() * largest)) {
    std::ostringstream msg;
    msg << "indefinite system matrix at iteration " << iteration
        << " (min |eigenvalue| " << smallest << ", lambda " << state.lambda
        << ")";
    throw NumericalError(msg.str());
  }

  const CMatrix g_conj = g_hat_s.conjugate();
  RobustState next;
  next.iteration = iteration;
  if (shifted.minCoeff() > 0.0) {
    next.b = system.llt().solve(g_conj);
  } else {
    next.b = system.partialPivLu().solve(g_conj);
  }
  require_finite(next.b, "robust system solution");

  next.h = gain_for_budget(next.b, link);
  next.p = next.h * std::sqrt(link.rho_f) * next.b;
  next.lambda = lambda_update(next.p, next.h, g_hat_s, psi, link,
                              settings.lambda_rule);

  record.h = next.h;
  record.lambda = next.lambda;
  record.relative_change = (next.p - state.p).norm() / state.p.norm();
  record.objective = mse_objective(next.p, next.h, g_hat_s, psi, link.rho_f,
                                   link.sigma_w2);
  return {std::move(next), record};
}

PrecoderOutput robust_precoder(const CMatrix& g_hat_s,
                               const ErrorStatistics& psi,
                               const LinkParams& link,
                               const RobustSettings& settings) {
  settings.validate();
  RobustState state = robust_init(g_hat_s, psi, link, settings.lambda_rule);

  PrecoderOutput out;
  out.kind = PrecoderKind::kRobust;
  out.trace.reserve(static_cast<std::size_t>(settings.i_max));
  for (int i = 1; i <= settings.i_max; ++i) {
    IterateResult step = robust_iterate(state, g_hat_s, psi, link, settings);
    state = std::move(step.state);
    out.jitter_applied = out.jitter_applied || step.record.jitter_applied;
    out.trace.push_back(step.record);
    if (step.record.relative_change < settings.epsilon) break;
  }
  out.iterations_run = state.iteration;
  out.p = std::move(state.p);
  out.h = state.h;
  out.lambda = state.lambda;
  return out;
}

double stationarity_residual(const PrecoderOutput& out, const CMatrix& g_hat_s,
                             const ErrorStatistics& psi,
                             const LinkParams& link) {
  const CMatrix a = stationarity_matrix(g_hat_s, psi, link.rho_f, out.h, out.lambda);
  const double gain = out.h * std::sqrt(link.rho_f);
  const CMatrix target = gain * g_hat_s.conjugate();
  return (a * out.p - target).norm() / target.norm();
}

double power_violation(const CMatrix& p, double power_budget) {
  return std::abs(p.squaredNorm() - power_budget) / power_budget;
}

}  // namespace cfmimo
