#include <algorithm>
#include <cmath>

#include "cfmimo/network_model.hpp"

namespace cfmimo {
namespace {

// The reference loss L0 is calibrated with distances in kilometres.
constexpr double kMetersPerKm = 1000.0;

double km(double meters) { return meters / kMetersPerKm; }

}  // namespace

double pathloss_far_db(double d_m, const PathlossParams& p) {
  return -p.l0_db - 35.0 * std::log10(km(d_m));
}

double pathloss_mid_db(double d_m, const PathlossParams& p) {
  return -p.l0_db - 15.0 * std::log10(km(p.d1_m)) - 20.0 * std::log10(km(d_m));
}

double pathloss_near_db(const PathlossParams& p) {
  return -p.l0_db - 15.0 * std::log10(km(p.d1_m)) -
         20.0 * std::log10(km(p.d0_m));
}

double pathloss_db(double d_m, const PathlossParams& p) {
  if (d_m > p.d1_m) return pathloss_far_db(d_m, p);
  if (d_m > p.d0_m) return pathloss_mid_db(d_m, p);
  return pathloss_near_db(p);
}

}  // namespace cfmimo
