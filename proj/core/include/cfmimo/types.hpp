#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cfmimo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Invalid configuration values. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (rank deficiency, indefinite system, non-finite result).
/// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure. Maps to CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Three-slope pathloss with log-normal shadowing.
///
/// Distances are in meters at the interface. The reference loss
/// `l0_db` is calibrated for distances expressed in kilometres, so the
/// formulas convert internally:
///
///   PL(d) = -L0 - 35 log10(d)                      d > d1
///   PL(d) = -L0 - 15 log10(d1) - 20 log10(d)       d0 < d <= d1
///   PL(d) = -L0 - 15 log10(d1) - 20 log10(d0)      d <= d0
///
/// PL here is a (negative) gain in dB. Shadowing with standard deviation
/// `shadowing_std_db` is only applied beyond d1.
struct PathlossParams {
  double d0_m = 10.0;
  double d1_m = 50.0;
  double l0_db = 140.7;
  double shadowing_std_db = 8.0;
  /// beta is reported relative to the deterministic gain at this distance,
  /// which keeps SNR = rho_f / sigma_w2 in a meaningful range.
  double reference_distance_m = 50.0;
  double min_distance_m = 1.0;
};

enum class ApPlacement { kAuto, kGrid, kRandom };

struct SystemConfig {
  int num_aps = 16;               // L
  int antennas_per_ap = 4;        // N
  int num_ues = 128;              // K
  int num_scheduled = 16;         // n
  double area_side_m = 400.0;
  double alpha = 0.15;
  double rho_f = 1.0;
  double sigma_w2 = 1.0;
  double power_budget = 1.0;      // P in tr(P^H P) = P
  double ap_selection_delta = 0.05;
  ApPlacement ap_placement = ApPlacement::kAuto;
  PathlossParams pathloss;
  std::uint64_t rng_seed = 1;

  [[nodiscard]] int num_antennas() const { return num_aps * antennas_per_ap; }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

}  // namespace cfmimo
