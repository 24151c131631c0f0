#include "rrdps/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"

using namespace rrdps;

TEST_SUITE_BEGIN("channel");

TEST_CASE("transmittance follows the 0.2 dB/km law") {
  CHECK(channel_transmittance(0.0, 0.2) == 1.0);
  CHECK(channel_transmittance(50.0, 0.2) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(channel_transmittance(100.0, 0.2) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK_THROWS_AS(channel_transmittance(-1.0, 0.2), std::domain_error);
}

TEST_CASE("detection rate reference points") {
  CHECK(detection_rate(128, 0.0, 0.15, 0.0) == 0.0);
  CHECK(detection_rate(128, 1.0 / 128.0, 0.15, 5e-7) ==
        doctest::Approx(6.4617098231879336e-2).epsilon(1e-14));
}

TEST_CASE("detection rate peaks where the block mean times efficiency is one") {
  const double eta_sy = 0.015;
  const int l = 128;
  const double mu_star = 1.0 / (l * eta_sy);
  const double peak = detection_rate(l, mu_star, eta_sy, 0.0);
  for (double factor : {0.5, 0.8, 1.2, 2.0}) {
    CHECK(detection_rate(l, factor * mu_star, eta_sy, 0.0) < peak);
  }
}

TEST_CASE("bit error rate limits") {
  // Signal only: the misalignment comes through exactly.
  CHECK(bit_error_rate(128, 0.01, 0.1, 0.0, 0.05) ==
        doctest::Approx(0.05).epsilon(1e-15));
  // Dark counts only: coin-flip errors.
  CHECK(bit_error_rate(128, 0.0, 0.1, 5e-7, 0.05) == doctest::Approx(0.5).epsilon(1e-15));
  // Reference operating point at 50 km.
  const double eta_sy = 0.1 * 0.15;
  CHECK(bit_error_rate(128, 1.0 / 128.0, eta_sy, 5e-7, 0.05) ==
        doctest::Approx(0.053864558212662882).epsilon(1e-13));
  CHECK_THROWS_AS(bit_error_rate(128, 0.0, 0.1, 0.0, 0.05), std::domain_error);
}

TEST_CASE("bit error rate stays in range and grows with distance") {
  const int l = 128;
  const double mu0 = 1.0 / 128.0;
  double prev = 0.0;
  for (double dist = 0.0; dist <= 200.0; dist += 10.0) {
    const double eta_sy = channel_transmittance(dist, 0.2) * 0.15;
    const double e = bit_error_rate(l, mu0, eta_sy, 5e-7, 0.05);
    CHECK(e >= 0.0);
    CHECK(e <= 0.5);
    CHECK(e >= prev);
    prev = e;
  }
}

TEST_CASE("detection rate falls with distance in the linear regime") {
  const int l = 128;
  const double mu0 = 1.0 / 128.0;
  double prev = 1.0;
  for (double dist = 0.0; dist <= 200.0; dist += 10.0) {
    const double eta_sy = channel_transmittance(dist, 0.2) * 0.15;
    REQUIRE(l * mu0 * eta_sy < 1.0);
    const double q = detection_rate(l, mu0, eta_sy, 5e-7);
    CHECK(q < prev);
    prev = q;
  }
}

TEST_CASE("block photon-number overflow probabilities") {
  CHECK(e_src_case_i(128, 1.0 / 128.0, 4) ==
        doctest::Approx(3.6598468273437123e-3).epsilon(1e-13));

  const double mu0 = 0.02;
  const MuRange collapsed{mu0, mu0};
  CHECK(e_src_case_ii(128, mu0, collapsed, 6) == e_src_case_i(128, mu0, 6));

  const MuRange spread{0.99 * mu0, 1.01 * mu0};
  CHECK(e_src_case_ii(128, mu0, spread, 6) == poisson_tail(128 * 1.01 * mu0, 6));

  double prev = 0.0;
  for (double hi : {1.0, 1.01, 1.05, 1.2}) {
    const double v = e_src_case_ii(128, mu0, MuRange{0.99 * mu0, hi * mu0}, 6);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("worst-case mean scan confirms the attainment shortcut") {
  // The overflow probability over the admitted means is maximized at the
  // upper end; a 50-point scan of the range must never exceed it.
  const int l = 128;
  const double mu0 = 0.03;
  const MuRange range{0.99 * mu0, 1.01 * mu0};
  const double shortcut = e_src_case_ii(l, mu0, range, 8);
  for (int i = 0; i < 50; ++i) {
    const double gamma = range.lo + (range.hi - range.lo) * i / 49.0;
    CHECK(poisson_tail(l * gamma, 8) <= shortcut + 1e-18);
  }
}

TEST_CASE("case-ii overflow never undercuts case-i on a containing range") {
  const double mu0 = 0.02;
  for (double widen : {0.0, 0.01, 0.05}) {
    const MuRange range{mu0 * (1.0 - widen), mu0 * (1.0 + widen)};
    CHECK(e_src_case_ii(128, mu0, range, 5) >= e_src_case_i(128, mu0, 5));
  }
}

TEST_CASE("vacuum bounds of a coherent pair") {
  const double mu0 = 0.02;
  const VacuumBounds collapsed = vacuum_bounds_case_ii(mu0, MuRange{mu0, mu0});
  CHECK(collapsed.p_u0 == std::exp(-mu0));
  CHECK(collapsed.p_l0 == std::exp(-mu0));
  CHECK(collapsed.p_u1 == std::exp(-mu0));
  CHECK(collapsed.p_l1 == std::exp(-mu0));

  const VacuumBounds spread =
      vacuum_bounds_case_ii(mu0, MuRange{0.99 * mu0, 1.01 * mu0});
  CHECK(spread.p_u0 == std::exp(-mu0));
  CHECK(spread.p_l0 == std::exp(-mu0));
  CHECK(spread.p_u1 == std::exp(-0.99 * mu0));
  CHECK(spread.p_l1 == std::exp(-1.01 * mu0));
  CHECK(spread.p_l1 <= spread.p_u1);
  CHECK(spread.valid());
}

TEST_CASE("threshold growth from back-reflected light") {
  const SourceSpec base{.pulses_per_block = 100, .nu_th = 4, .e_src = 0.0};
  CHECK(tha_phase_error_delta(100, 0.0, base, 0.05) == 0.0);

  // ceil(100 * 0.01) = 1 extra photon of threshold.
  const double delta = tha_phase_error_delta(100, 1e-2, base, 0.05);
  CHECK(delta == doctest::Approx(1.0 / 99.0).epsilon(1e-14));

  // With no overflow term the increase carries no distance dependence.
  const double q_near = detection_rate(100, 0.01, 0.15, 5e-7);
  const double q_far = detection_rate(100, 0.01, 0.15 * 0.01, 5e-7);
  CHECK(tha_phase_error_delta(100, 1e-2, base, q_near) ==
        tha_phase_error_delta(100, 1e-2, base, q_far));
}

TEST_SUITE_END();
