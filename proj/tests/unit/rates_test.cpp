#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "qkdtopo/common.hpp"
#include "qkdtopo/rates.hpp"

using namespace qkdtopo;

TEST_CASE("C2C rate follows the attenuation law") {
  RateParams p;
  CHECK(c2c_rate(p, 0.001) == doctest::Approx(1000.0).epsilon(1e-4));  // -> r0 as L -> 0
  CHECK(c2c_rate(p, 50.0) == doctest::Approx(100.0));   // -10 dB
  CHECK(c2c_rate(p, 100.0) == doctest::Approx(10.0));   // -20 dB
  CHECK(c2c_rate(p, 150.0) == doctest::Approx(1.0));
  CHECK(c2c_rate(p, 120.0) > c2c_rate(p, 121.0));
  CHECK_THROWS_AS(c2c_rate(p, 0.0), ValidationError);
  CHECK_THROWS_AS(c2c_rate(p, -10.0), ValidationError);
}

TEST_CASE("C2C reach cutoff") {
  RateParams p;
  CHECK(c2c_rate(p, 200.0) > 0.0);  // boundary still usable
  CHECK(c2c_rate(p, 200.0001) == 0.0);
  CHECK(c2c_rate(p, 500.0) == 0.0);
}

TEST_CASE("CSC on a symmetric placement matches C2C per device") {
  RateParams p;
  for (double l : {10.0, 50.0, 100.0, 150.0}) {
    CHECK(csc_rate(p, l, l) == doctest::Approx(c2c_rate(p, l)).epsilon(1e-12));
  }
}

TEST_CASE("CSC asymmetry penalty") {
  RateParams p;
  // Same total length, growing imbalance: rate strictly decreases.
  CHECK(csc_rate(p, 50.0, 50.0) > csc_rate(p, 60.0, 40.0));
  CHECK(csc_rate(p, 60.0, 40.0) > csc_rate(p, 80.0, 20.0));
  CHECK(csc_rate(p, 70.0, 30.0) == doctest::Approx(csc_rate(p, 30.0, 70.0)));  // symmetric in arms
  // Closed form: r0_hat * 10^(-alpha(L1+L2)/20) * 10^(-gamma|L1-L2|/10).
  CHECK(csc_rate(p, 100.0, 50.0) ==
        doctest::Approx(1000.0 * std::pow(10.0, -1.5) * std::pow(10.0, -0.25)));
  CHECK_THROWS_AS(csc_rate(p, 100.0, 0.0), ValidationError);
  CHECK_THROWS_AS(csc_rate(p, -1.0, 50.0), ValidationError);
}

TEST_CASE("CSC combined reach cutoff") {
  RateParams p;
  CHECK(csc_rate(p, 300.0, 300.0) > 0.0);
  CHECK(csc_rate(p, 300.0, 300.1) == 0.0);
}

TEST_CASE("CSC vs a two-hop C2C chain hinges on the asymmetry penalty") {
  RateParams p;
  // Two-hop C2C relaying over lengths (L1, L2) is throttled by the harmonic
  // composition of the per-hop rates; one CSC triple spans both hops with a
  // single device budget unit.
  auto chain = [&](double l1, double l2) {
    const double r1 = c2c_rate(p, l1);
    const double r2 = c2c_rate(p, l2);
    return r1 * r2 / (r1 + r2);  // two devices, one per hop, rate-balanced
  };
  // A symmetric CSC triple doubles the per-budget chain throughput.
  CHECK(csc_rate(p, 50.0, 50.0) == doctest::Approx(2.0 * chain(50.0, 50.0)));
  // With the mild default gamma the CSC edge survives strong imbalance: its
  // penalty grows at gamma*delta/10 dB versus alpha*delta/20 for the chain.
  CHECK(csc_rate(p, 65.0, 35.0) > chain(65.0, 35.0));
  CHECK(csc_rate(p, 75.0, 25.0) > chain(75.0, 25.0));
  // A harsher penalty (gamma = 0.3) hands lopsided splits to the chain.
  p.asym_gamma = 0.3;
  CHECK(csc_rate(p, 75.0, 25.0) < chain(75.0, 25.0));
  CHECK(csc_rate(p, 50.0, 50.0) == doctest::Approx(2.0 * chain(50.0, 50.0)));  // unaffected at delta 0
}

TEST_CASE("custom parameters are honoured") {
  RateParams p;
  p.r0_kbps = 500.0;
  p.r0_hat_kbps = 800.0;
  p.alpha_db_per_km = 0.4;
  p.asym_gamma = 0.1;
  p.l_max_km = 100.0;
  CHECK(c2c_rate(p, 25.0) == doctest::Approx(50.0));  // 500 * 10^-1
  CHECK(c2c_rate(p, 100.5) == 0.0);
  CHECK(csc_rate(p, 20.0, 10.0) ==
        doctest::Approx(800.0 * std::pow(10.0, -0.4 * 30.0 / 20.0) * std::pow(10.0, -0.1)));
}
