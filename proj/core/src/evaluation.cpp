#include "cfmimo/evaluation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cfmimo {
namespace {

// rho * (G^T P)(G^T P)^H, the desired-signal covariance (n x n).
CMatrix signal_covariance(const CMatrix& g_hat_s, const CMatrix& p,
                          double rho_f) {
  const CMatrix effective = g_hat_s.transpose() * p;
  return rho_f * (effective * effective.adjoint());
}

}  // namespace

RMatrix residual_covariance(const CMatrix& p, const RMatrix& beta_s,
                            const Mask& mask, double alpha, double rho_f,
                            double sigma_w2) {
  const RVector antenna_power = p.rowwise().squaredNorm();  // diag(P P^H)
  const RMatrix error_power = alpha * beta_s.cwiseProduct(mask.cast<double>());
  const RVector diag =
      rho_f * (error_power.transpose() * antenna_power).array() + sigma_w2;
  return diag.asDiagonal();
}

RateReport sum_rate(const CMatrix& g_hat_s, const CMatrix& p, double rho_f,
                    const RMatrix& r_tilde) {
  const auto n = g_hat_s.cols();
  Eigen::LLT<CMatrix> r_chol(r_tilde.cast<Complex>());
  if (r_chol.info() != Eigen::Success) {
    throw NumericalError("residual covariance is not positive definite");
  }
  // R_UC = S R^-1 is similar to L^-1 S L^-H, which is Hermitian PSD.
  const CMatrix s = signal_covariance(g_hat_s, p, rho_f);
  const auto lower = r_chol.matrixL();
  CMatrix whitened = lower.solve(s);
  whitened = lower.solve(whitened.adjoint()).eval();
  whitened = 0.5 * (whitened + whitened.adjoint()).eval();

  CMatrix shifted = whitened;
  shifted.diagonal().array() += 1.0;
  Eigen::LLT<CMatrix> chol(shifted);
  double log_det = 0.0;
  if (chol.info() == Eigen::Success) {
    const CMatrix& factor = chol.matrixLLT();
    for (Eigen::Index i = 0; i < n; ++i) {
      log_det += 2.0 * std::log(factor(i, i).real());
    }
  } else {
    log_det = std::numeric_limits<double>::quiet_NaN();
  }

  RateReport report;
  report.sum_rate = log_det / std::numbers::ln2;
  if (!std::isfinite(report.sum_rate)) {
    const RVector r_diag = r_tilde.diagonal();
    std::ostringstream msg;
    msg << "sum-rate determinant is not finite (||S||_F=" << s.norm()
        << ", min R_kk=" << r_diag.minCoeff()
        << ", max R_kk=" << r_diag.maxCoeff() << ")";
    throw NumericalError(msg.str());
  }
  // det(I + X) >= 1 for PSD X; clip rounding below zero.
  report.sum_rate = std::max(report.sum_rate, 0.0);

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(whitened, Eigen::EigenvaluesOnly);
  report.r_uc_eigenvalues = eig.eigenvalues();
  return report;
}

double sum_rate_eigen_path(const CMatrix& g_hat_s, const CMatrix& p,
                           double rho_f, const RMatrix& r_tilde) {
  const CMatrix s = signal_covariance(g_hat_s, p, rho_f);
  const CMatrix r_inv =
      r_tilde.cast<Complex>().partialPivLu().inverse();
  CMatrix r_uc = s * r_inv;
  r_uc.diagonal().array() += 1.0;
  Eigen::ComplexEigenSolver<CMatrix> eig(r_uc, false);
  double total = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    total += std::log(eig.eigenvalues()(i)).real();
  }
  return total / std::numbers::ln2;
}

double mse_objective(const CMatrix& p, double h, const CMatrix& g_hat_s,
                     const ErrorStatistics& psi, double rho_f,
                     double sigma_w2) {
  const auto n = static_cast<double>(g_hat_s.cols());
  const double sqrt_rho = std::sqrt(rho_f);
  const CMatrix effective = g_hat_s.transpose() * p;  // G^T P

  const Complex cross = (sqrt_rho / h) * effective.trace();
  const Complex cross_conj =
      (sqrt_rho / h) * (p.adjoint() * g_hat_s.conjugate()).trace();
  const Complex signal =
      (rho_f / (h * h)) * (effective.adjoint() * effective).trace();
  const Complex leakage =
      rho_f *
      (p.adjoint() * psi.diagonal.cast<Complex>().asDiagonal() * p).trace();

  const Complex total = Complex(n + sigma_w2 * n / (h * h)) - cross -
                        cross_conj + signal + leakage;

  const double scale = n + std::abs(cross) + std::abs(signal) +
                       std::abs(leakage) + sigma_w2 * n / (h * h);
  if (std::abs(total.imag()) > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "objective has imaginary residue " << total.imag();
    throw NumericalError(msg.str());
  }
  return total.real();
}

FlopReport flop_count(PrecoderKind method, int num_antennas, int num_scheduled,
                      int i_max, const FlopModel& model) {
  if (num_scheduled < 1 || num_antennas < num_scheduled) {
    throw ConfigError("flop_count requires M >= n >= 1");
  }
  if (i_max < 1) throw ConfigError("flop_count requires i_max >= 1");

  const double n = num_scheduled;
  const double m = num_antennas;
  const double solve = model.solve_coeff * n * n * n;
  const double build = model.multiply_coeff * n * m * m;
  const double traces = model.trace_coeff * n * n;

  FlopReport report;
  report.method = method;
  if (method == PrecoderKind::kRobust) {
    const double reps = i_max;
    report.breakdown = {
        {"initialization", model.robust_init_units * (solve + build + traces)},
        {"matrix_build", reps * build},
        {"solve", reps * solve},
        {"traces", reps * traces},
    };
  } else {
    report.breakdown = {
        {"matrix_build", build},
        {"solve", solve},
        {"traces", traces},
    };
  }
  for (const FlopStep& step : report.breakdown) report.flops += step.flops;
  return report;
}

}  // namespace cfmimo
