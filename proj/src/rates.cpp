#include "qkdtopo/rates.hpp"

#include <cmath>

#include "qkdtopo/common.hpp"

namespace qkdtopo {

namespace {

void check_params(const RateParams& p) {
  if (!(p.r0_kbps >= 0.0) || !(p.r0_hat_kbps >= 0.0)) {
    throw ValidationError("rate parameters r0/r0_hat must be non-negative");
  }
  if (!(p.alpha_db_per_km >= 0.0) || !(p.asym_gamma >= 0.0)) {
    throw ValidationError("rate parameters alpha/asym_gamma must be non-negative");
  }
  if (!(p.l_max_km > 0.0) || !(p.l_max_total_km > 0.0)) {
    throw ValidationError("rate cutoffs must be positive");
  }
}

}  // namespace

double c2c_rate(const RateParams& p, double length_km) {
  check_params(p);
  if (!(length_km > 0.0)) throw ValidationError("c2c_rate: length must be positive");
  if (length_km > p.l_max_km) return 0.0;
  return p.r0_kbps * std::pow(10.0, -p.alpha_db_per_km * length_km / 10.0);
}

double csc_rate(const RateParams& p, double len1_km, double len2_km) {
  check_params(p);
  if (!(len1_km > 0.0) || !(len2_km > 0.0)) {
    throw ValidationError("csc_rate: arm lengths must be positive");
  }
  const double total = len1_km + len2_km;
  if (total > p.l_max_total_km) return 0.0;
  const double loss = std::pow(10.0, -p.alpha_db_per_km * total / 20.0);
  const double asym = std::pow(10.0, -p.asym_gamma * std::fabs(len1_km - len2_km) / 10.0);
  return p.r0_hat_kbps * loss * asym;
}

}  // namespace qkdtopo
