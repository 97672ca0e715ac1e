#pragma once

namespace qkdtopo {

/// Key-rate model parameters. Rates are in kbps, lengths in km, alpha in
/// dB/km. A device pair on a link longer than its cutoff produces no key.
struct RateParams {
  double r0_kbps = 1000.0;       // C2C rate at zero distance
  double r0_hat_kbps = 1000.0;   // CSC rate at zero distance
  double alpha_db_per_km = 0.2;  // fibre attenuation
  double asym_gamma = 0.05;      // CSC asymmetry penalty per km of |L1-L2|
  double l_max_km = 200.0;       // C2C reach cutoff
  double l_max_total_km = 600.0; // CSC combined-reach cutoff
};

/// Secret-key rate of one C2C device pair over a link of length `length_km`.
double c2c_rate(const RateParams& p, double length_km);

/// Secret-key rate of one CSC device triple with client-server arms
/// `len1_km` and `len2_km`.
double csc_rate(const RateParams& p, double len1_km, double len2_km);

}  // namespace qkdtopo
