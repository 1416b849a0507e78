#pragma once

#include <string>
#include <vector>

#include "cfmimo/precoding.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Sum-rate bound log2 det(R_UC + I_n) for one channel drop.
struct RateReport {
  double sum_rate = 0.0;
  /// Eigenvalues of R_UC (real, >= 0 up to rounding), ascending.
  RVector r_uc_eigenvalues;
};

/// Closed-form R_G~s: diagonal with
///   [R]_kk = rho_f * sum_m alpha beta_mk mask_mk [P P^H]_mm + sigma_w^2.
RMatrix residual_covariance(const CMatrix& p, const RMatrix& beta_s,
                            const Mask& mask, double alpha, double rho_f,
                            double sigma_w2);

/// log2 det(I + rho G^T P P^H G* R^-1) through the Cholesky factor of R,
/// i.e. the Hermitian PD form I + L^-1 S L^-H. Throws NumericalError if R is
/// not positive definite or the result is not finite.
RateReport sum_rate(const CMatrix& g_hat_s, const CMatrix& p, double rho_f,
                    const RMatrix& r_tilde);

/// Same quantity via the (non-Hermitian) eigenvalues of R_UC + I. Used as an
/// independent route in tests.
double sum_rate_eigen_path(const CMatrix& g_hat_s, const CMatrix& p,
                           double rho_f, const RMatrix& r_tilde);

/// MSE plus error-leakage objective
///   J = n + h^-2 sigma^2 n - tr(h^-1 sqrt(rho) G^T P)
///       - tr(h^-1 sqrt(rho) P^H G*) + tr(h^-2 rho P^H G* G^T P)
///       + tr(rho P^H Psi P).
double mse_objective(const CMatrix& p, double h, const CMatrix& g_hat_s,
                     const ErrorStatistics& psi, double rho_f, double sigma_w2);

/// Constants of the analytic FLOP model. One "unit" costs
///   solve_coeff * n^3 + multiply_coeff * n * M^2 + trace_coeff * n^2.
struct FlopModel {
  double solve_coeff = 2.0 / 3.0;
  double multiply_coeff = 8.0;
  double trace_coeff = 8.0;
  /// Robust initialization overhead in units (the MMSE start point).
  double robust_init_units = 1.0;
};

struct FlopStep {
  std::string name;
  double flops = 0.0;
};

struct FlopReport {
  PrecoderKind method = PrecoderKind::kMmse;
  double flops = 0.0;
  std::vector<FlopStep> breakdown;
};

/// Requires M >= n >= 1 and i_max >= 1 (ConfigError otherwise). i_max is
/// ignored for zf and mmse.
FlopReport flop_count(PrecoderKind method, int num_antennas, int num_scheduled,
                      int i_max, const FlopModel& model = {});

}  // namespace cfmimo
