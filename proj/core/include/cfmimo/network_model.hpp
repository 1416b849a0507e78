#pragma once

#include <random>
#include <span>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

using Rng = std::mt19937_64;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Antenna and UE coordinates. The N antennas of an AP share one coordinate,
/// so `antenna_positions[l * N + j]` is AP `l` for every `j`.
struct NetworkLayout {
  int antennas_per_ap = 1;
  std::vector<Point> antenna_positions;
  std::vector<Point> ue_positions;

  [[nodiscard]] int num_aps() const {
    return static_cast<int>(antenna_positions.size()) / antennas_per_ap;
  }
  [[nodiscard]] const Point& ap_position(int ap) const {
    return antenna_positions[static_cast<std::size_t>(ap * antennas_per_ap)];
  }
};

/// Large-scale fading, M x K, linear scale.
struct LsfMatrix {
  int antennas_per_ap = 1;
  RMatrix beta;
  /// Number of (AP, UE) pairs whose distance was clamped to the floor.
  int clamped_pairs = 0;

  [[nodiscard]] int num_aps() const {
    return static_cast<int>(beta.rows()) / antennas_per_ap;
  }
  /// M x |ues| submatrix with the selected columns, in order.
  [[nodiscard]] RMatrix columns(std::span<const int> ues) const;
};

struct ChannelSet {
  CMatrix g;            // true channel, M x n
  CMatrix g_hat;        // estimate
  CMatrix g_tilde;      // estimation error
  Mask mask;            // active AP-UE pairs (1 = active)
  CMatrix g_s;          // masked copies
  CMatrix g_hat_s;
  CMatrix g_tilde_s;
  RMatrix beta_s;       // LSF of the scheduled UEs, M x n (unmasked)
  std::vector<int> scheduled_ues;
};

/// Pathloss gain in dB (negative) at planar distance `d_m`, without
/// shadowing. Continuous at both breakpoints.
double pathloss_db(double d_m, const PathlossParams& p);

/// Individual slope branches, exposed so continuity can be checked directly.
double pathloss_far_db(double d_m, const PathlossParams& p);
double pathloss_mid_db(double d_m, const PathlossParams& p);
double pathloss_near_db(const PathlossParams& p);

NetworkLayout generate_layout(const SystemConfig& cfg, Rng& rng);

LsfMatrix compute_lsf(const NetworkLayout& layout, const SystemConfig& cfg,
                      Rng& rng);

/// Greedy top-n by total LSF; ties resolved toward the lower index. The
/// result is sorted by descending total LSF.
std::vector<int> schedule_users(const LsfMatrix& lsf, const SystemConfig& cfg);

/// Relative-threshold user-centric AP selection on the M x n scheduled LSF.
Mask select_aps(const RMatrix& lsf_scheduled, const SystemConfig& cfg);

/// Elementwise product; inactive entries become exact zeros.
CMatrix apply_mask(const CMatrix& m, const Mask& mask);

ChannelSet draw_channel(const LsfMatrix& lsf, std::span<const int> scheduled,
                        const Mask& mask, const SystemConfig& cfg, Rng& rng);

/// One standard circularly-symmetric complex Gaussian sample, CN(0, 1).
Complex standard_complex_normal(Rng& rng);

}  // namespace cfmimo
