#pragma once

#include <random>

#include "cfmimo/network_model.hpp"
#include "cfmimo/precoding.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo::testing {

/// i.i.d. CN(0, 1) matrix from a fixed seed.
inline CMatrix random_channel(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed) {
  Rng rng(seed);
  CMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = standard_complex_normal(rng);
  }
  return g;
}

inline SystemConfig small_system() {
  SystemConfig cfg;
  cfg.num_aps = 4;
  cfg.antennas_per_ap = 2;
  cfg.num_ues = 16;
  cfg.num_scheduled = 4;
  return cfg;
}

/// One drop built through the library pipeline.
struct Instance {
  SystemConfig cfg;
  ChannelSet channel;
  RMatrix beta_s;
  ErrorStatistics psi;
  LinkParams link;
};

inline Instance make_instance(SystemConfig cfg, std::uint64_t seed) {
  Rng rng(seed);
  const NetworkLayout layout = generate_layout(cfg, rng);
  const LsfMatrix lsf = compute_lsf(layout, cfg, rng);
  const auto scheduled = schedule_users(lsf, cfg);
  Instance inst;
  inst.beta_s = lsf.columns(scheduled);
  const Mask mask = select_aps(inst.beta_s, cfg);
  inst.channel = draw_channel(lsf, scheduled, mask, cfg, rng);
  inst.psi = error_covariance_psi(inst.beta_s, mask, cfg.alpha);
  inst.link = {cfg.rho_f, cfg.sigma_w2, cfg.power_budget};
  inst.cfg = cfg;
  return inst;
}

}  // namespace cfmimo::testing
