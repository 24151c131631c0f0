#include "rrdps/calibration.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rrdps/rng.hpp"

using namespace rrdps;

namespace {

/// Asymptotic record for a known photon-number distribution: exact no-click
/// fractions fed in as unit counts.
DecoyRecord asymptotic_record(std::span<const double> pn, double eta1, double eta2,
                              double eta_d, double p_d) {
  DecoyRecord rec;
  rec.eta1 = eta1;
  rec.eta2 = eta2;
  rec.eta_d = eta_d;
  rec.p_d = p_d;
  rec.n1 = 1.0;
  rec.n2 = 1.0;
  rec.n1_vac = expected_vacuum_fraction(pn, eta1, eta_d, p_d);
  rec.n2_vac = expected_vacuum_fraction(pn, eta2, eta_d, p_d);
  return rec;
}

std::vector<double> poisson_pn(double mu, int cutoff) {
  std::vector<double> pn(cutoff + 1);
  double term = std::exp(-mu);
  double sum = 0.0;
  for (int n = 0; n < cutoff; ++n) {
    pn[n] = term;
    sum += term;
    term *= mu / (n + 1);
  }
  pn[cutoff] = 1.0 - sum;  // fold the tail into the last bin
  return pn;
}

}  // namespace

TEST_SUITE_BEGIN("calibration");

TEST_CASE("decoy bounds sandwich a poisson source") {
  const auto pn = poisson_pn(0.1, 40);
  const DecoyRecord rec = asymptotic_record(pn, 1.0, 0.5, 0.8, 0.0);
  const VacuumInterval iv = decoy_vacuum_bounds(rec);
  const double truth = std::exp(-0.1);
  CHECK(iv.p_l <= truth);
  CHECK(truth <= iv.p_u);
  CHECK_FALSE(iv.clamped);
  // Frozen closed-form values for this configuration.
  CHECK(iv.p_l == doctest::Approx(0.90427980000379207).epsilon(1e-12));
  CHECK(iv.p_u == doctest::Approx(0.92311634638663578).epsilon(1e-12));
}

TEST_CASE("decoy bounds are tight for a vacuum source") {
  const std::array<double, 1> vacuum_only{1.0};
  const DecoyRecord rec = asymptotic_record(vacuum_only, 0.9, 0.4, 0.7, 0.0);
  const VacuumInterval iv = decoy_vacuum_bounds(rec);
  CHECK(iv.p_l == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(iv.p_u == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decoy bounds widen with slack") {
  const auto pn = poisson_pn(0.2, 40);
  DecoyRecord rec = asymptotic_record(pn, 1.0, 0.5, 0.8, 1e-6);
  rec.n1 *= 1e6;
  rec.n2 *= 1e6;
  rec.n1_vac *= 1e6;
  rec.n2_vac *= 1e6;
  const VacuumInterval plain = decoy_vacuum_bounds(rec);
  DecoyRecord slacked = rec;
  slacked.delta1 = finite_size_slack(rec.n1, 1e-6);
  slacked.delta2 = finite_size_slack(rec.n2, 1e-6);
  const VacuumInterval wide = decoy_vacuum_bounds(slacked);
  CHECK(wide.p_u >= plain.p_u);
  CHECK(wide.p_l <= plain.p_l);
}

TEST_CASE("decoy bounds reject inconsistent records") {
  // Click statistics that no photon-number distribution can produce for the
  // claimed transmittances: the inferred lower bound exceeds the upper.
  DecoyRecord rec;
  rec.eta1 = 1.0;
  rec.eta2 = 0.5;
  rec.eta_d = 1.0;
  rec.p_d = 0.0;
  rec.n1 = 1.0;
  rec.n2 = 1.0;
  rec.n1_vac = 0.95;
  rec.n2_vac = 0.80;
  CHECK_THROWS_AS(decoy_vacuum_bounds(rec), std::runtime_error);
  rec.eta2 = 1.0;
  CHECK_THROWS_AS(decoy_vacuum_bounds(rec), std::domain_error);
}

TEST_CASE("decoy bounds clamp and flag noisy estimates") {
  // Fractions noisy enough that the linear combination lands below zero
  // (3 f1 - 2 f2 < 0 for these transmittances).
  DecoyRecord rec;
  rec.eta1 = 1.0;
  rec.eta2 = 0.5;
  rec.eta_d = 0.5;
  rec.p_d = 0.0;
  rec.n1 = 100.0;
  rec.n2 = 100.0;
  rec.n1_vac = 50.0;
  rec.n2_vac = 80.0;
  const VacuumInterval iv = decoy_vacuum_bounds(rec);
  CHECK(iv.p_l == 0.0);
  CHECK(iv.p_u == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(iv.clamped);
}

TEST_CASE("sandwich property over random synthetic sources") {
  SplitRng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> pn(1 + rng.uniform_below(12));
    double sum = 0.0;
    for (double& p : pn) {
      p = rng.uniform();
      sum += p;
    }
    for (double& p : pn) p /= sum;
    const double eta2 = 0.05 + 0.5 * rng.uniform();
    const double eta1 = eta2 + (1.0 - eta2) * (0.1 + 0.9 * rng.uniform());
    const double eta_d = 0.2 + 0.8 * rng.uniform();
    const double p_d = rng.uniform() * 1e-3;
    const DecoyRecord rec = asymptotic_record(pn, eta1, eta2, eta_d, p_d);
    const VacuumInterval iv = decoy_vacuum_bounds(rec);
    CHECK(iv.p_l <= pn[0] + 1e-12);
    CHECK(pn[0] <= iv.p_u + 1e-12);
  }
}

TEST_CASE("hoeffding slack reference points") {
  CHECK(finite_size_slack(1e6, 1e-10) == doctest::Approx(3393.0702122075559).epsilon(1e-13));
  CHECK(finite_size_slack(1e6, 1.0 - 1e-9) < 1e-1);
  CHECK(finite_size_slack(4e6, 1e-10) ==
        doctest::Approx(2.0 * finite_size_slack(1e6, 1e-10)).epsilon(1e-13));
  CHECK_THROWS_AS(finite_size_slack(0.0, 1e-6), std::domain_error);
  CHECK_THROWS_AS(finite_size_slack(10.0, 0.0), std::domain_error);
}

TEST_CASE("expected vacuum fraction") {
  const std::array<double, 1> vacuum_only{1.0};
  CHECK(expected_vacuum_fraction(vacuum_only, 0.7, 0.9, 0.25) ==
        doctest::Approx(0.75).epsilon(1e-14));

  const auto pn = poisson_pn(0.3, 60);
  CHECK(expected_vacuum_fraction(pn, 0.6, 0.8, 0.0) ==
        doctest::Approx(std::exp(-0.3 * 0.6 * 0.8)).epsilon(1e-10));

  CHECK(expected_vacuum_fraction(pn, 0.0, 0.8, 0.1) ==
        doctest::Approx(0.9).epsilon(1e-14));

  const std::array<double, 2> not_normalized{0.5, 0.4};
  CHECK_THROWS_AS(expected_vacuum_fraction(not_normalized, 0.5, 0.5, 0.0),
                  std::domain_error);
}

TEST_CASE("monitor bounds") {
  const std::array<IntensityInterval, 1> flat{IntensityInterval{2.0, 2.0}};
  const auto [u_flat, l_flat] = monitor_bounds_single(0.01, flat);
  CHECK(u_flat == doctest::Approx(std::exp(-0.02)).epsilon(1e-14));
  CHECK(l_flat == doctest::Approx(std::exp(-0.02)).epsilon(1e-14));

  const std::array<IntensityInterval, 2> two{IntensityInterval{1.0, 2.0},
                                             IntensityInterval{3.0, 4.0}};
  const auto [u, l] = monitor_bounds_single(0.01, two);
  CHECK(u == doctest::Approx(std::exp(-0.01)).epsilon(1e-14));
  CHECK(l == doctest::Approx(std::exp(-0.04)).epsilon(1e-14));

  // Widening any interval can only widen the result.
  const std::array<IntensityInterval, 2> wider{IntensityInterval{0.5, 2.0},
                                               IntensityInterval{3.0, 4.5}};
  const auto [u2, l2] = monitor_bounds_single(0.01, wider);
  CHECK(u2 >= u);
  CHECK(l2 <= l);

  MonitorRecord rec;
  rec.eta = 0.01;
  rec.beta0.assign(two.begin(), two.end());
  rec.beta1.assign(wider.begin(), wider.end());
  const VacuumBounds vb = monitor_vacuum_bounds(rec);
  CHECK(vb.p_u0 == u);
  CHECK(vb.p_l0 == l);
  CHECK(vb.p_u1 == u2);
  CHECK(vb.p_l1 == l2);
  CHECK(vb.valid());
}

TEST_CASE("back-reflection adjustment") {
  const VacuumBounds b{.p_u0 = 0.95, .p_l0 = 0.9, .p_u1 = 0.93, .p_l1 = 0.88};
  const VacuumBounds same = tha_adjust(b, 0.0);
  CHECK(same.p_u0 == b.p_u0);
  CHECK(same.p_l1 == b.p_l1);

  const VacuumBounds scaled = tha_adjust(b, 1e-2);
  CHECK(scaled.p_u0 == doctest::Approx(0.95 * 0.99004983374916811).epsilon(1e-13));
  CHECK(scaled.p_l0 <= scaled.p_u0);
  CHECK(scaled.p_l1 <= scaled.p_u1);
  CHECK(scaled.valid());
}

TEST_CASE("back-reflection adjustment commutes with the estimator extremes") {
  // Scaling every input of the monitor estimator's max/min by the same
  // factor equals scaling its output.
  const std::array<IntensityInterval, 3> ivs{IntensityInterval{1.0, 2.0},
                                             IntensityInterval{0.5, 2.5},
                                             IntensityInterval{1.5, 1.8}};
  MonitorRecord rec;
  rec.eta = 0.02;
  rec.beta0.assign(ivs.begin(), ivs.end());
  rec.beta1.assign(ivs.begin(), ivs.end());
  const double mu_out = 3e-2;
  const VacuumBounds adjusted = tha_adjust(monitor_vacuum_bounds(rec), mu_out);
  const double factor = std::exp(-mu_out);
  const VacuumBounds direct = monitor_vacuum_bounds(rec);
  CHECK(adjusted.p_u0 == doctest::Approx(factor * direct.p_u0).epsilon(1e-15));
  CHECK(adjusted.p_l0 == doctest::Approx(factor * direct.p_l0).epsilon(1e-15));
}

TEST_CASE("finite-size coverage with hoeffding slack") {
  // Sampled records at N = 1e5 with slack at epsilon = 1e-6; a coverage
  // failure needs a > 5-sigma fluctuation, so none should appear in 2000
  // trials (the acceptance suite runs the full 1e4).
  const auto pn = poisson_pn(0.1, 40);
  const double eta1 = 1.0;
  const double eta2 = 0.5;
  const double eta_d = 0.8;
  const double p_d = 1e-6;
  const double n = 1e5;
  const double f1 = expected_vacuum_fraction(pn, eta1, eta_d, p_d);
  const double f2 = expected_vacuum_fraction(pn, eta2, eta_d, p_d);
  const double delta = finite_size_slack(n, 1e-6);
  SplitRng rng(77);
  int failures = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::binomial_distribution<long> b1(static_cast<long>(n), f1);
    std::binomial_distribution<long> b2(static_cast<long>(n), f2);
    DecoyRecord rec;
    rec.eta1 = eta1;
    rec.eta2 = eta2;
    rec.eta_d = eta_d;
    rec.p_d = p_d;
    rec.n1 = n;
    rec.n2 = n;
    rec.n1_vac = static_cast<double>(b1(rng));
    rec.n2_vac = static_cast<double>(b2(rng));
    rec.delta1 = delta;
    rec.delta2 = delta;
    const VacuumInterval iv = decoy_vacuum_bounds(rec);
    if (!(iv.p_l <= pn[0] && pn[0] <= iv.p_u)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_SUITE_END();
