#include "rrdps/simulation.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "support/stats.hpp"

using namespace rrdps;

namespace {

SimConfig model_config(double distance_km, std::int64_t n_blocks, std::uint64_t seed) {
  SimConfig cfg;
  cfg.pulses_per_block = 128;
  cfg.mu0 = 1.0 / 128.0;
  cfg.mu1 = 1.0 / 128.0;
  cfg.channel.distance_km = distance_km;
  cfg.n_blocks = n_blocks;
  cfg.seed = seed;
  cfg.fidelity = Fidelity::kModelLevel;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("simulation");

TEST_CASE("dead source never clicks") {
  SimConfig cfg = model_config(0.0, 10000, 5);
  cfg.mu0 = 0.0;
  cfg.mu1 = 0.0;
  cfg.channel.p_d = 0.0;
  CHECK(run_blocks(cfg).n_detected == 0);

  cfg.fidelity = Fidelity::kPulseLevel;
  CHECK(run_blocks(cfg).n_detected == 0);
}

TEST_CASE("fixed seed reproduces results bit for bit") {
  const SimConfig cfg = model_config(25.0, 200000, 99);
  const SimResult a = run_blocks(cfg);
  const SimResult b = run_blocks(cfg);
  CHECK(a.n_detected == b.n_detected);
  CHECK(a.n_errors == b.n_errors);
  CHECK(a.q_hat == b.q_hat);
  CHECK(a.detections_by_offset == b.detections_by_offset);

  SimConfig other = cfg;
  other.seed = 100;
  const SimResult c = run_blocks(other);
  CHECK(c.n_detected != a.n_detected);  // different stream, same statistics
  CHECK(std::abs(c.q_hat - a.q_hat) < 8.0 * a.se_q);
}

TEST_CASE("model fidelity reproduces the closed forms at two distances") {
  for (double distance : {0.0, 50.0}) {
    const SimConfig cfg = model_config(distance, 1000000, 7);
    const SimResult res = run_blocks(cfg);
    const double eta_sy = channel_transmittance(distance, 0.2) * cfg.channel.eta_d;
    const double q = detection_rate(cfg.pulses_per_block, cfg.mu0, eta_sy,
                                    cfg.channel.p_d);
    const double e_bit = bit_error_rate(cfg.pulses_per_block, cfg.mu0, eta_sy,
                                        cfg.channel.p_d, cfg.channel.e_sym);
    CHECK(std::abs(res.q_hat - q) <= 4.0 * std::sqrt(q * (1.0 - q) / cfg.n_blocks));
    CHECK(std::abs(res.e_bit_hat - e_bit) <= 4.0 * res.se_e);
  }
}

TEST_CASE("model fidelity respects the offset support") {
  const SimConfig cfg = model_config(0.0, 100000, 3);
  const SimResult res = run_blocks(cfg);
  CHECK(res.detections_by_offset[0] == 0);
  std::int64_t total = 0;
  for (std::int64_t c : res.detections_by_offset) total += c;
  CHECK(total == res.n_detected);
}

TEST_CASE("pulse fidelity with a clean line agrees perfectly after sifting") {
  SimConfig cfg = model_config(0.0, 400000, 11);
  cfg.fidelity = Fidelity::kPulseLevel;
  cfg.channel.e_sym = 0.0;
  cfg.channel.p_d = 0.0;
  cfg.record_detections = true;
  const SimResult res = run_blocks(cfg);
  REQUIRE(res.n_detected >= 10000);
  CHECK(res.n_errors == 0);
  const auto [alice, bob] = sift_keys(res.alice_bits, res.detections);
  REQUIRE(alice.size() == bob.size());
  for (std::size_t i = 0; i < alice.size(); ++i) REQUIRE(alice[i] == bob[i]);
}

TEST_CASE("pulse fidelity matches its exact acceptance probability") {
  // With equal means, no dark counts and ideal phases, every interfering
  // pair carries mu * eta_sy photons on average, so a block at shift r
  // accepts with probability lambda_r e^{-lambda_r}, lambda_r = (L-r) mu
  // eta_sy. Averaging over the uniform shift gives the exact single-click
  // rate of this measurement, which differs measurably from the
  // closed-form model's (L mu eta_sy) e^{-..}/2.
  SimConfig cfg = model_config(0.0, 800000, 17);
  cfg.fidelity = Fidelity::kPulseLevel;
  cfg.channel.p_d = 0.0;
  const int l = cfg.pulses_per_block;
  const double eta_sy = cfg.channel.eta_d;  // zero distance
  double expected = 0.0;
  for (int r = 1; r < l; ++r) {
    const double lambda = (l - r) * cfg.mu0 * eta_sy;
    expected += lambda * std::exp(-lambda);
  }
  expected /= l - 1;
  const SimResult res = run_blocks(cfg);
  CHECK(std::abs(res.q_hat - expected) <= 4.0 * res.se_q);

  const double closed_form = detection_rate(l, cfg.mu0, eta_sy, 0.0);
  REQUIRE(std::abs(closed_form - expected) > 8.0 * res.se_q);
}

TEST_CASE("pulse fidelity turns dark-count dominance into coin flips") {
  SimConfig cfg = model_config(0.0, 300000, 19);
  cfg.fidelity = Fidelity::kPulseLevel;
  cfg.mu0 = 1e-7;
  cfg.mu1 = 1e-7;
  cfg.channel.p_d = 1e-4;
  const SimResult res = run_blocks(cfg);
  REQUIRE(res.n_detected > 2000);
  CHECK(std::abs(res.e_bit_hat - 0.5) <= 4.0 * res.se_e);
}

TEST_CASE("two-pulse blocks run at both fidelities") {
  for (Fidelity fidelity : {Fidelity::kModelLevel, Fidelity::kPulseLevel}) {
    SimConfig cfg = model_config(0.0, 50000, 29);
    cfg.pulses_per_block = 2;
    cfg.mu0 = 0.05;
    cfg.mu1 = 0.05;
    cfg.fidelity = fidelity;
    const SimResult res = run_blocks(cfg);
    CHECK(res.n_detected > 0);
    CHECK(res.detections_by_offset[1] == res.n_detected);  // r = 1 only
  }
}

TEST_CASE("pulse fidelity reproduces the misalignment error rate") {
  SimConfig cfg = model_config(0.0, 300000, 13);
  cfg.fidelity = Fidelity::kPulseLevel;
  cfg.channel.e_sym = 0.05;
  cfg.channel.p_d = 0.0;
  const SimResult res = run_blocks(cfg);
  REQUIRE(res.n_detected > 5000);
  CHECK(std::abs(res.e_bit_hat - 0.05) <= 4.0 * res.se_e);
}

TEST_CASE("sifting validates the paired range") {
  std::vector<std::vector<std::uint8_t>> bits{{1, 0, 1, 1}};
  std::vector<Detection> dets{{.block = 0, .slot = 2, .offset = 2, .bob_bit = 0}};
  const auto [alice, bob] = sift_keys(bits, dets);
  CHECK(alice[0] == (0 ^ 1));
  dets[0].offset = 3;  // slot 2 + 3 walks past L = 4
  CHECK_THROWS_AS(sift_keys(bits, dets), std::out_of_range);
  CHECK_THROWS_AS(sift_keys({}, dets), std::invalid_argument);
}

TEST_CASE("sifting an all-zero bit string yields an all-zero key") {
  std::vector<std::vector<std::uint8_t>> bits(16, std::vector<std::uint8_t>(8, 0));
  std::vector<Detection> dets;
  for (int k = 0; k < 16; ++k) {
    dets.push_back(Detection{.block = k, .slot = 1 + k % 4, .offset = 1 + k % 3});
  }
  const auto [alice, bob] = sift_keys(bits, dets);
  for (std::uint8_t bit : alice) CHECK(bit == 0);
}

TEST_CASE("pairing distribution: L = 2 pins the partner slot") {
  const auto hist = pairing_distribution(1, 2, 1000, 21);
  CHECK(hist[1] == 0);
  CHECK(hist[2] == 1000);
}

TEST_CASE("pairing distribution is uniform over the other slots") {
  const int l = 8;
  const int i = 3;
  const std::int64_t n = 1000000;
  const auto hist = pairing_distribution(i, l, n, 23);
  CHECK(hist[i] == 0);
  const double p = 1.0 / (l - 1);
  const double sigma = std::sqrt(n * p * (1.0 - p));
  for (int j = 1; j <= l; ++j) {
    if (j == i) continue;
    CHECK(std::abs(hist[j] - n * p) <= 5.0 * sigma);
  }

  std::vector<std::int64_t> counts;
  for (int j = 1; j <= l; ++j) {
    if (j != i) counts.push_back(hist[j]);
  }
  const double chi2 = teststat::chi_square_uniform(counts, n);
  CHECK(teststat::chi_square_survival(chi2, l - 2) > 1e-4);
}

TEST_CASE("recording is bounded by the memory budget") {
  SimConfig cfg = model_config(0.0, 1000000, 1);
  cfg.record_detections = true;
  cfg.memory_budget = 1 << 20;
  CHECK_THROWS_AS(run_blocks(cfg), std::invalid_argument);
}

TEST_SUITE_END();
