#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rrdps/channel.hpp"

namespace rrdps {

/// ModelLevel samples the closed-form detection/error model directly and
/// must reproduce it statistically. PulseLevel simulates the pulse trains,
/// interference and sifting; its rates are reported, not asserted against
/// the closed forms.
enum class Fidelity { kModelLevel, kPulseLevel };

struct SimConfig {
  int pulses_per_block = 128;
  double mu0 = 1.0 / 128.0;
  double mu1 = 1.0 / 128.0;
  ChannelParams channel;
  std::int64_t n_blocks = 1;
  std::uint64_t seed = 0;
  Fidelity fidelity = Fidelity::kModelLevel;
  bool record_detections = false;         // keep per-detection data for sifting
  std::int64_t memory_budget = 1 << 30;   // max n_blocks * L when recording
};

/// One accepted single-click event.
struct Detection {
  std::int64_t block = 0;
  int slot = 0;      // 1-based time slot of the click
  int offset = 0;    // interferometer delay r
  int bob_bit = 0;   // detector identity
  bool error = false;
};

struct SimResult {
  std::int64_t n_blocks = 0;
  std::int64_t n_detected = 0;
  std::int64_t n_errors = 0;
  double q_hat = 0.0;
  double e_bit_hat = 0.0;
  double se_q = 0.0;
  double se_e = 0.0;
  /// detections_by_offset[r] counts accepted clicks at delay r (index 0 unused).
  std::vector<std::int64_t> detections_by_offset;
  /// Populated only when record_detections is set (PulseLevel).
  std::vector<Detection> detections;
  std::vector<std::vector<std::uint8_t>> alice_bits;  // one row per detection
};

/// Runs n_blocks independent blocks; deterministic in (seed, config) and
/// independent of any execution interleaving.
SimResult run_blocks(const SimConfig& cfg);

/// Reconstructs both sifted keys from recorded detections. Alice's bit is
/// a[slot] xor a[slot + r]; Bob's is the detector identity. Throws
/// std::out_of_range when slot + r walks off the block.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> sift_keys(
    const std::vector<std::vector<std::uint8_t>>& alice_bits,
    const std::vector<Detection>& detections);

/// Samples the announced pulse pairing: r uniform on {1..L-1}, b uniform on
/// {0,1}, j = i + (-1)^b r (mod L, residue 0 mapped to slot L). Returns a
/// 1-based histogram over j (index 0 unused).
std::vector<std::int64_t> pairing_distribution(int i, int l_pulses,
                                               std::int64_t n_samples,
                                               std::uint64_t seed);

}  // namespace rrdps
