#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cfmimo/evaluation.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace cfmimo {
namespace {

using testing::make_instance;
using testing::random_channel;
using testing::small_system;

TEST(ResidualCovariance, NoErrorGivesNoiseOnly) {
  const auto inst = make_instance(small_system(), 2);
  const CMatrix p = random_channel(inst.channel.g_hat_s.rows(), 4, 3);
  const RMatrix r = residual_covariance(p, inst.beta_s, inst.channel.mask, 0.0, 5.0, 0.3);
  EXPECT_LT((r - 0.3 * RMatrix::Identity(4, 4)).norm(), 1e-15);
  const RMatrix r0 = residual_covariance(CMatrix::Zero(p.rows(), 4), inst.beta_s,
                                         inst.channel.mask, 0.4, 5.0, 0.3);
  EXPECT_LT((r0 - 0.3 * RMatrix::Identity(4, 4)).norm(), 1e-15);
}

TEST(ResidualCovariance, HandExample) {
  RMatrix beta(2, 1);
  beta << 1.0, 2.0;
  CMatrix p(2, 1);
  p << Complex(1.0, 0.0), Complex(0.0, 1.0);
  const RMatrix r = residual_covariance(p, beta, Mask::Ones(2, 1), 0.5, 2.0, 1.0);
  // 2 * (0.5 * 1 + 0.5 * 2) + 1
  EXPECT_NEAR(r(0, 0), 4.0, 1e-15);
}

TEST(ResidualCovariance, MatchesSampledCovariance) {
  const auto inst = make_instance(small_system(), 12);
  const PrecoderOutput mmse = mmse_precoder(inst.channel.g_hat_s, inst.link);
  const double rho = 10.0;
  const RMatrix r = residual_covariance(mmse.p, inst.beta_s, inst.channel.mask,
                                        inst.cfg.alpha, rho, inst.cfg.sigma_w2);
  std::mt19937_64 rng(77);
  const CMatrix sampled = oracle::sample_residual_covariance(
      mmse.p, inst.beta_s, inst.channel.mask, inst.cfg.alpha, rho,
      inst.cfg.sigma_w2, 40000, rng);
  EXPECT_LT(oracle::relative_frobenius(sampled, r.cast<Complex>()), 0.03);
}

TEST(SumRate, ZeroPrecoderGivesZero) {
  const CMatrix g = random_channel(6, 3, 4);
  const RateReport rep = sum_rate(g, CMatrix::Zero(6, 3), 1.0, RMatrix::Identity(3, 3));
  EXPECT_EQ(rep.sum_rate, 0.0);
}

TEST(SumRate, ScalarExample) {
  CMatrix g(1, 1);
  g << Complex(0.0, 1.0);
  CMatrix p(1, 1);
  p << Complex(0.0, -1.0);
  // rho |g p|^2 / R = 3 -> log2(4)
  const RateReport rep = sum_rate(g, p, 3.0, RMatrix::Identity(1, 1));
  EXPECT_NEAR(rep.sum_rate, 2.0, 1e-14);
  EXPECT_NEAR(rep.r_uc_eigenvalues(0), 3.0, 1e-14);
}

TEST(SumRate, DeterminantAndEigenPathsAgree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = make_instance(small_system(), 100 + seed);
    const PrecoderOutput mmse = mmse_precoder(inst.channel.g_hat_s, inst.link);
    const RMatrix r = residual_covariance(mmse.p, inst.beta_s, inst.channel.mask,
                                          inst.cfg.alpha, 4.0, 1.0);
    const double det_path = sum_rate(inst.channel.g_hat_s, mmse.p, 4.0, r).sum_rate;
    const double eig_path = sum_rate_eigen_path(inst.channel.g_hat_s, mmse.p, 4.0, r);
    EXPECT_NEAR(det_path, eig_path, 1e-9 * std::max(1.0, det_path));
  }
}

TEST(SumRate, InvariantUnderUePermutation) {
  const CMatrix g = random_channel(8, 4, 5);
  const CMatrix p = random_channel(8, 4, 6);
  RMatrix r = RMatrix::Zero(4, 4);
  r.diagonal() << 1.0, 2.0, 0.5, 3.0;
  const std::vector<int> perm{2, 0, 3, 1};
  CMatrix gp(8, 4);
  CMatrix pp(8, 4);
  RMatrix rp = RMatrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) {
    gp.col(k) = g.col(perm[static_cast<std::size_t>(k)]);
    pp.col(k) = p.col(perm[static_cast<std::size_t>(k)]);
    rp(k, k) = r(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(k)]);
  }
  EXPECT_NEAR(sum_rate(g, p, 2.0, r).sum_rate, sum_rate(gp, pp, 2.0, rp).sum_rate, 1e-10);
}

TEST(SumRate, IncreasesWithTransmitPower) {
  const CMatrix g = random_channel(8, 4, 7);
  const CMatrix p = random_channel(8, 4, 8);
  double prev = -1.0;
  for (double rho : {0.1, 1.0, 10.0, 100.0}) {
    const double sr = sum_rate(g, p, rho, RMatrix::Identity(4, 4)).sum_rate;
    EXPECT_GT(sr, prev);
    prev = sr;
  }
}

TEST(SumRate, RejectsIndefiniteResidual) {
  const CMatrix g = random_channel(4, 2, 9);
  RMatrix r = RMatrix::Identity(2, 2);
  r(1, 1) = -1.0;
  EXPECT_THROW(sum_rate(g, g.conjugate(), 1.0, r), NumericalError);
}

TEST(Objective, ZeroPrecoder) {
  const CMatrix g = random_channel(6, 3, 10);
  ErrorStatistics psi;
  psi.diagonal = RVector::Constant(6, 0.3);
  // n + sigma^2 n / h^2
  EXPECT_NEAR(mse_objective(CMatrix::Zero(6, 3), 2.0, g, psi, 1.0, 0.5),
              3.0 + 0.5 * 3.0 / 4.0, 1e-14);
}

TEST(Objective, PerfectEqualizationLeavesNoiseAndLeakage) {
  const CMatrix g = random_channel(6, 3, 11);
  const double h = 1.5;
  const double rho = 2.0;
  const PrecoderOutput zf = zf_precoder(g, 1.0);
  // Rescale so that h^-1 sqrt(rho) G^T P = I.
  const CMatrix p = zf.p * (h / (std::sqrt(rho) * zf.h));
  ErrorStatistics psi;
  psi.diagonal = RVector::LinSpaced(6, 0.1, 0.6);
  const double leakage =
      rho * (p.adjoint() * psi.dense() * p).trace().real();
  EXPECT_NEAR(mse_objective(p, h, g, psi, rho, 0.7), 0.7 * 3.0 / (h * h) + leakage, 1e-12);
}

TEST(Objective, EqualsSquaredErrorForm) {
  // J = ||h^-1 sqrt(rho) G^T P - I||_F^2 + sigma^2 n / h^2 + rho tr(P^H Psi P)
  const auto inst = make_instance(small_system(), 13);
  const CMatrix& g = inst.channel.g_hat_s;
  const CMatrix p = random_channel(g.rows(), g.cols(), 14);
  const double h = 0.8;
  const double rho = 3.0;
  const double sigma2 = 0.4;
  const auto n = static_cast<double>(g.cols());
  const CMatrix e = std::sqrt(rho) / h * (g.transpose() * p) -
                    CMatrix::Identity(g.cols(), g.cols());
  double leak = 0.0;
  for (Eigen::Index m = 0; m < p.rows(); ++m) {
    leak += inst.psi.diagonal(m) * p.row(m).squaredNorm();
  }
  const double expected = e.squaredNorm() + sigma2 * n / (h * h) + rho * leak;
  EXPECT_NEAR(mse_objective(p, h, g, inst.psi, rho, sigma2), expected,
              1e-10 * expected);
}

TEST(Flops, RobustCostsBetweenFourAndFiveMmse) {
  for (int n : {1, 4, 16}) {
    for (int m : {n, 2 * n, 64}) {
      if (m < n) continue;
      const double robust = flop_count(PrecoderKind::kRobust, m, n, 4).flops;
      const double mmse = flop_count(PrecoderKind::kMmse, m, n, 4).flops;
      EXPECT_GT(robust / mmse, 4.0);
      EXPECT_LE(robust / mmse, 5.0);
    }
  }
}

TEST(Flops, BreakdownSumsToTotal) {
  for (PrecoderKind kind : {PrecoderKind::kZf, PrecoderKind::kMmse, PrecoderKind::kRobust}) {
    const FlopReport rep = flop_count(kind, 64, 16, 4);
    double total = 0.0;
    for (const FlopStep& s : rep.breakdown) total += s.flops;
    EXPECT_EQ(total, rep.flops);
    EXPECT_EQ(rep.method, kind);
  }
}

TEST(Flops, UnitCostFormula) {
  // (2/3) n^3 + 8 n M^2 + 8 n^2 at M = 64, n = 16
  const double unit = 2.0 / 3.0 * 4096.0 + 8.0 * 16.0 * 4096.0 + 8.0 * 256.0;
  EXPECT_NEAR(flop_count(PrecoderKind::kMmse, 64, 16, 4).flops, unit, 1e-9);
  EXPECT_NEAR(flop_count(PrecoderKind::kZf, 64, 16, 4).flops, unit, 1e-9);
  EXPECT_NEAR(flop_count(PrecoderKind::kRobust, 64, 16, 4).flops, 5.0 * unit, 1e-6);
}

TEST(Flops, MonotoneInSize) {
  for (PrecoderKind kind : {PrecoderKind::kZf, PrecoderKind::kMmse, PrecoderKind::kRobust}) {
    EXPECT_LT(flop_count(kind, 32, 8, 4).flops, flop_count(kind, 64, 8, 4).flops);
    EXPECT_LT(flop_count(kind, 64, 8, 4).flops, flop_count(kind, 64, 16, 4).flops);
  }
  EXPECT_LT(flop_count(PrecoderKind::kRobust, 64, 16, 2).flops,
            flop_count(PrecoderKind::kRobust, 64, 16, 3).flops);
}

TEST(Flops, RejectsBadDimensions) {
  EXPECT_THROW(flop_count(PrecoderKind::kMmse, 4, 8, 4), ConfigError);
  EXPECT_THROW(flop_count(PrecoderKind::kMmse, 4, 0, 4), ConfigError);
  EXPECT_THROW(flop_count(PrecoderKind::kRobust, 64, 16, 0), ConfigError);
}

}  // namespace
}  // namespace cfmimo
