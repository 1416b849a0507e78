#include "cfmimo/network_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfmimo {
namespace {

int grid_side(int num_aps) {
  const int side = static_cast<int>(std::lround(std::sqrt(num_aps)));
  return side * side == num_aps ? side : 0;
}

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

RMatrix LsfMatrix::columns(std::span<const int> ues) const {
  RMatrix out(beta.rows(), static_cast<Eigen::Index>(ues.size()));
  for (std::size_t c = 0; c < ues.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = beta.col(ues[c]);
  }
  return out;
}

Complex standard_complex_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

NetworkLayout generate_layout(const SystemConfig& cfg, Rng& rng) {
  NetworkLayout layout;
  layout.antennas_per_ap = cfg.antennas_per_ap;
  std::uniform_real_distribution<double> uniform(0.0, cfg.area_side_m);

  const int side = grid_side(cfg.num_aps);
  const bool use_grid =
      cfg.ap_placement == ApPlacement::kGrid ||
      (cfg.ap_placement == ApPlacement::kAuto && side > 0);

  std::vector<Point> aps;
  aps.reserve(static_cast<std::size_t>(cfg.num_aps));
  if (use_grid) {
    const double pitch = cfg.area_side_m / side;
    for (int row = 0; row < side; ++row) {
      for (int col = 0; col < side; ++col) {
        aps.push_back({(col + 0.5) * pitch, (row + 0.5) * pitch});
      }
    }
  } else {
    for (int l = 0; l < cfg.num_aps; ++l) {
      const double x = uniform(rng);
      const double y = uniform(rng);
      aps.push_back({x, y});
    }
  }

  layout.antenna_positions.reserve(static_cast<std::size_t>(cfg.num_antennas()));
  for (const Point& ap : aps) {
    for (int j = 0; j < cfg.antennas_per_ap; ++j) {
      layout.antenna_positions.push_back(ap);
    }
  }

  layout.ue_positions.reserve(static_cast<std::size_t>(cfg.num_ues));
  for (int k = 0; k < cfg.num_ues; ++k) {
    const double x = uniform(rng);
    const double y = uniform(rng);
    layout.ue_positions.push_back({x, y});
  }
  return layout;
}

LsfMatrix compute_lsf(const NetworkLayout& layout, const SystemConfig& cfg,
                      Rng& rng) {
  const PathlossParams& p = cfg.pathloss;
  const int num_aps = layout.num_aps();
  const int n_ant = layout.antennas_per_ap;
  const auto num_ues = static_cast<int>(layout.ue_positions.size());
  const double reference_db = pathloss_db(p.reference_distance_m, p);

  LsfMatrix lsf;
  lsf.antennas_per_ap = n_ant;
  lsf.beta.resize(num_aps * n_ant, num_ues);

  std::normal_distribution<double> shadowing(0.0, 1.0);
  for (int l = 0; l < num_aps; ++l) {
    for (int k = 0; k < num_ues; ++k) {
      // Always consume one draw per pair so the stream does not depend on
      // which pairs fall inside the breakpoint.
      const double z = p.shadowing_std_db * shadowing(rng);
      double d = distance(layout.ap_position(l),
                          layout.ue_positions[static_cast<std::size_t>(k)]);
      if (d < p.min_distance_m) {
        d = p.min_distance_m;
        ++lsf.clamped_pairs;
      }
      double gain_db = pathloss_db(d, p) - reference_db;
      if (d > p.d1_m) gain_db += z;
      const double beta = std::pow(10.0, gain_db / 10.0);
      lsf.beta.block(l * n_ant, k, n_ant, 1).setConstant(beta);
    }
  }
  return lsf;
}

std::vector<int> schedule_users(const LsfMatrix& lsf, const SystemConfig& cfg) {
  const RVector totals = lsf.beta.colwise().sum().transpose();
  std::vector<int> order(static_cast<std::size_t>(totals.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return totals(a) > totals(b); });
  order.resize(static_cast<std::size_t>(cfg.num_scheduled));
  return order;
}

Mask select_aps(const RMatrix& lsf_scheduled, const SystemConfig& cfg) {
  const int n_ant = cfg.antennas_per_ap;
  const auto num_aps = static_cast<int>(lsf_scheduled.rows()) / n_ant;
  Mask mask = Mask::Zero(lsf_scheduled.rows(), lsf_scheduled.cols());

  for (Eigen::Index k = 0; k < lsf_scheduled.cols(); ++k) {
    int best = 0;
    for (int l = 1; l < num_aps; ++l) {
      if (lsf_scheduled(l * n_ant, k) > lsf_scheduled(best * n_ant, k)) best = l;
    }
    const double threshold =
        cfg.ap_selection_delta * lsf_scheduled(best * n_ant, k);
    for (int l = 0; l < num_aps; ++l) {
      if (l == best || lsf_scheduled(l * n_ant, k) >= threshold) {
        mask.block(l * n_ant, k, n_ant, 1).setOnes();
      }
    }
  }
  return mask;
}

CMatrix apply_mask(const CMatrix& m, const Mask& mask) {
  return m.cwiseProduct(mask.cast<double>().cast<Complex>());
}

ChannelSet draw_channel(const LsfMatrix& lsf, std::span<const int> scheduled,
                        const Mask& mask, const SystemConfig& cfg, Rng& rng) {
  ChannelSet ch;
  ch.scheduled_ues.assign(scheduled.begin(), scheduled.end());
  ch.beta_s = lsf.columns(scheduled);
  ch.mask = mask;

  const Eigen::Index m = ch.beta_s.rows();
  const Eigen::Index n = ch.beta_s.cols();
  const double est_scale = std::sqrt(1.0 - cfg.alpha);
  const double err_scale = std::sqrt(cfg.alpha);

  ch.g_hat.resize(m, n);
  ch.g_tilde.resize(m, n);
  // Column-major fill order; estimate and error draws interleave per entry.
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double amp = std::sqrt(ch.beta_s(i, k));
      const Complex fading = standard_complex_normal(rng);
      const Complex error = standard_complex_normal(rng);
      ch.g_hat(i, k) = est_scale * amp * fading;
      ch.g_tilde(i, k) = err_scale * amp * error;
    }
  }
  ch.g = ch.g_hat + ch.g_tilde;
  ch.g_s = apply_mask(ch.g, mask);
  ch.g_hat_s = apply_mask(ch.g_hat, mask);
  ch.g_tilde_s = apply_mask(ch.g_tilde, mask);
  return ch;
}

}  // namespace cfmimo
