#pragma once

#include <string_view>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

/// Psi = E[conj(G_tilde_s) G_tilde_s^T], M x M. Diagonal in closed form for
/// independent error entries, so only the diagonal is stored.
struct ErrorStatistics {
  RVector diagonal;

  [[nodiscard]] Eigen::Index size() const { return diagonal.size(); }
  [[nodiscard]] CMatrix dense() const;
};

/// Scalars shared by every precoder: rho_f, sigma_w^2 and the power budget P.
struct LinkParams {
  double rho_f = 1.0;
  double sigma_w2 = 1.0;
  double power_budget = 1.0;
};

enum class PrecoderKind { kZf, kMmse, kRobust };

std::string_view to_string(PrecoderKind kind);
/// Throws ConfigError on an unknown name.
PrecoderKind parse_precoder_kind(std::string_view name);

/// How lambda is refreshed after each (B, h, P) update of the robust loop.
enum class LambdaRule {
  /// lambda = sigma^2 n / (h^2 P) - 2 rho tr(P^H G* G^T P) / (h^2 P)
  ///          - rho tr(P^H Psi P) / P
  kBaseline,
  /// Eliminates lambda using the h-stationarity condition with its signs
  /// re-derived: lambda = sigma^2 n / (h^2 P) - rho tr(P^H Psi P) / P.
  kStationary,
};

std::string_view to_string(LambdaRule rule);
LambdaRule parse_lambda_rule(std::string_view name);

struct RobustSettings {
  int i_max = 4;
  double epsilon = 1e-3;
  /// Diagonal loading is jitter_scale * tr(rho_f G* G^T) / M.
  double jitter_scale = 1e-12;
  LambdaRule lambda_rule = LambdaRule::kBaseline;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double h = 0.0;
  double lambda = 0.0;
  double objective = 0.0;        // J at (P, h) after this iteration
  double relative_change = 0.0;  // ||P_i - P_{i-1}||_F / ||P_{i-1}||_F
  double min_eigenvalue = 0.0;   // of the system matrix before loading
  bool jitter_applied = false;
};

struct PrecoderOutput {
  PrecoderKind kind = PrecoderKind::kMmse;
  CMatrix p;
  double h = 0.0;
  double lambda = 0.0;
  int iterations_run = 0;
  std::vector<IterationRecord> trace;
  bool jitter_applied = false;
};

/// Iteration state of the robust precoder.
struct RobustState {
  CMatrix b;
  CMatrix p;
  double h = 0.0;
  double lambda = 0.0;
  int iteration = 0;
};

ErrorStatistics error_covariance_psi(const RMatrix& lsf_scheduled,
                                     const Mask& mask, double alpha);

/// Right pseudo-inverse conj(G) (G^T conj(G))^{-1}, globally scaled to the
/// power budget. Throws NumericalError("rank-deficient channel ...").
PrecoderOutput zf_precoder(const CMatrix& g_hat_s, double power_budget);

/// Regularized (MMSE) precoder used to initialise the robust loop.
PrecoderOutput mmse_precoder(const CMatrix& g_hat_s, const LinkParams& link);

/// Lagrange multiplier update evaluated at (P, h).
double lambda_update(const CMatrix& p, double h, const CMatrix& g_hat_s,
                     const ErrorStatistics& psi, const LinkParams& link,
                     LambdaRule rule);

RobustState robust_init(const CMatrix& g_hat_s, const ErrorStatistics& psi,
                        const LinkParams& link, LambdaRule rule);

struct IterateResult {
  RobustState state;
  IterationRecord record;
};

/// One alternating update: solve M B = conj(G), rescale h, refresh lambda.
/// Throws NumericalError("indefinite system matrix ...") if the loaded
/// system is still singular.
IterateResult robust_iterate(const RobustState& state, const CMatrix& g_hat_s,
                             const ErrorStatistics& psi, const LinkParams& link,
                             const RobustSettings& settings);

PrecoderOutput robust_precoder(const CMatrix& g_hat_s,
                               const ErrorStatistics& psi,
                               const LinkParams& link,
                               const RobustSettings& settings);

/// The conjugated first-order system
///   A* = rho G* G^T + h^2 rho Psi + h^2 lambda I
/// evaluated at (h, lambda).
CMatrix stationarity_matrix(const CMatrix& g_hat_s, const ErrorStatistics& psi,
                            double rho_f, double h, double lambda);

/// ||A* P - h sqrt(rho) conj(G)||_F / ||h sqrt(rho) G||_F at the returned
/// triple. Equals the residual of A P* = h sqrt(rho) G by conjugation.
double stationarity_residual(const PrecoderOutput& out, const CMatrix& g_hat_s,
                             const ErrorStatistics& psi,
                             const LinkParams& link);

/// |tr(P^H P) - budget| / budget.
double power_violation(const CMatrix& p, double power_budget);

}  // namespace cfmimo
