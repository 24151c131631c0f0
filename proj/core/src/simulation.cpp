#include "rrdps/simulation.hpp"

#include <cmath>
#include <stdexcept>

#include "rrdps/rng.hpp"

namespace rrdps {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

struct BlockOutcome {
  bool detected = false;
  bool error = false;
  int slot = 0;
  int offset = 0;
  int bob_bit = 0;
  std::vector<std::uint8_t> bits;  // filled only when recording
};

/// Draws one block of the closed-form model: a signal click with probability
/// (L mu0 eta_sy) e^{-..}/2, else a dark click with probability L p_d; the
/// two are treated as exclusive in this regime.
BlockOutcome model_level_block(SplitRng& rng, int l, double p_signal, double p_dark,
                               double e_sym) {
  BlockOutcome out;
  const double u = rng.uniform();
  bool dark = false;
  if (u < p_signal) {
    out.detected = true;
  } else if (u < p_signal + p_dark) {
    out.detected = true;
    dark = true;
  } else {
    return out;
  }
  out.offset = 1 + static_cast<int>(rng.uniform_below(l - 1));
  out.slot = 1 + static_cast<int>(rng.uniform_below(l - out.offset));
  out.error = rng.bernoulli(dark ? 0.5 : e_sym);
  return out;
}

/// Simulates the interferometric measurement of one block: coherent
/// amplitudes +-sqrt(mu eta_sy), a random delay r, pairwise 50:50
/// interference over the overlapping L-r slots, misalignment mixing, dark
/// counts, and postselection on exactly one count in the whole block.
BlockOutcome pulse_level_block(SplitRng& rng, const SimConfig& cfg, double eta_sy,
                               std::vector<double>& intensity0,
                               std::vector<double>& intensity1) {
  const int l = cfg.pulses_per_block;
  BlockOutcome out;
  std::vector<std::uint8_t> bits(l);
  for (int k = 0; k < l; ++k) bits[k] = static_cast<std::uint8_t>(rng() & 1u);

  const int r = 1 + static_cast<int>(rng.uniform_below(l - 1));
  const int pairs = l - r;
  intensity0.resize(pairs);
  intensity1.resize(pairs);

  const double amp0 = std::sqrt(cfg.mu0 * eta_sy);
  const double amp1 = std::sqrt(cfg.mu1 * eta_sy);
  double lambda_total = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const double a = bits[k] ? -amp1 : amp0;
    const double b = bits[k + r] ? -amp1 : amp0;
    const double sum = a + b;
    const double dif = a - b;
    const double bright = sum * sum / 4.0;  // detector 0 port, ideal alignment
    const double dim = dif * dif / 4.0;
    intensity0[k] = (1.0 - cfg.channel.e_sym) * bright + cfg.channel.e_sym * dim;
    intensity1[k] = cfg.channel.e_sym * bright + (1.0 - cfg.channel.e_sym) * dim;
    lambda_total += intensity0[k] + intensity1[k];
  }

  const int n_signal = rng.poisson(lambda_total);
  if (n_signal > 1) return out;

  // Dark clicks across the 2*pairs gates, by sequential inversion; the
  // no-click branch costs one uniform.
  int n_dark = 0;
  int dark_gate = -1;
  {
    const int gates = 2 * pairs;
    const double u = rng.uniform();
    const double p0 = std::exp(gates * std::log1p(-cfg.channel.p_d));
    if (u >= p0) {
      // At least one dark click; find how many, then place them.
      double cdf = p0;
      double term = p0;
      n_dark = 0;
      while (cdf <= u && n_dark < gates) {
        ++n_dark;
        term *= (gates - n_dark + 1) * cfg.channel.p_d /
                (n_dark * (1.0 - cfg.channel.p_d));
        cdf += term;
      }
      if (n_dark == 1) dark_gate = static_cast<int>(rng.uniform_below(gates));
    }
  }

  if (n_signal + n_dark != 1) return out;

  out.detected = true;
  out.offset = r;
  if (n_signal == 1) {
    double target = rng.uniform() * lambda_total;
    int k = 0;
    int bit = 0;
    for (; k < pairs; ++k) {
      if (target < intensity0[k]) {
        bit = 0;
        break;
      }
      target -= intensity0[k];
      if (target < intensity1[k]) {
        bit = 1;
        break;
      }
      target -= intensity1[k];
    }
    if (k == pairs) {  // guard against accumulated rounding
      k = pairs - 1;
      bit = 1;
    }
    out.slot = k + 1;
    out.bob_bit = bit;
  } else {
    out.slot = dark_gate / 2 + 1;
    out.bob_bit = dark_gate & 1;
  }
  const int alice_bit = bits[out.slot - 1] ^ bits[out.slot - 1 + r];
  out.error = out.bob_bit != alice_bit;
  if (cfg.record_detections) out.bits = std::move(bits);
  return out;
}

}  // namespace

SimResult run_blocks(const SimConfig& cfg) {
  require(cfg.pulses_per_block >= 2, "run_blocks: L must be >= 2");
  require(cfg.n_blocks >= 1, "run_blocks: n_blocks must be >= 1");
  require(cfg.mu0 >= 0.0 && cfg.mu1 >= 0.0, "run_blocks: mean photon numbers >= 0");
  require(cfg.channel.valid(), "run_blocks: invalid channel parameters");
  if (cfg.record_detections &&
      cfg.n_blocks > cfg.memory_budget / cfg.pulses_per_block) {
    throw std::invalid_argument("run_blocks: n_blocks * L exceeds the memory budget");
  }

  const int l = cfg.pulses_per_block;
  const double eta_sy =
      channel_transmittance(cfg.channel.distance_km, cfg.channel.alpha_db_per_km) *
      cfg.channel.eta_d;
  const double x = l * cfg.mu0 * eta_sy;
  const double p_signal = x * std::exp(-x) / 2.0;
  const double p_dark = l * cfg.channel.p_d;
  require(p_signal + p_dark <= 1.0, "run_blocks: model click probability exceeds 1");

  SimResult res;
  res.n_blocks = cfg.n_blocks;
  res.detections_by_offset.assign(l, 0);

  std::vector<double> scratch0;
  std::vector<double> scratch1;
  for (std::int64_t block = 0; block < cfg.n_blocks; ++block) {
    SplitRng rng(cfg.seed, static_cast<std::uint64_t>(block));
    BlockOutcome outcome =
        cfg.fidelity == Fidelity::kModelLevel
            ? model_level_block(rng, l, p_signal, p_dark, cfg.channel.e_sym)
            : pulse_level_block(rng, cfg, eta_sy, scratch0, scratch1);
    if (!outcome.detected) continue;
    ++res.n_detected;
    res.n_errors += outcome.error ? 1 : 0;
    res.detections_by_offset[outcome.offset] += 1;
    if (cfg.record_detections) {
      res.detections.push_back(Detection{.block = block,
                                         .slot = outcome.slot,
                                         .offset = outcome.offset,
                                         .bob_bit = outcome.bob_bit,
                                         .error = outcome.error});
      if (cfg.fidelity == Fidelity::kPulseLevel) {
        res.alice_bits.push_back(std::move(outcome.bits));
      }
    }
  }

  res.q_hat = static_cast<double>(res.n_detected) / static_cast<double>(res.n_blocks);
  res.se_q = std::sqrt(res.q_hat * (1.0 - res.q_hat) / static_cast<double>(res.n_blocks));
  if (res.n_detected > 0) {
    res.e_bit_hat =
        static_cast<double>(res.n_errors) / static_cast<double>(res.n_detected);
    res.se_e = std::sqrt(res.e_bit_hat * (1.0 - res.e_bit_hat) /
                         static_cast<double>(res.n_detected));
  }
  return res;
}

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> sift_keys(
    const std::vector<std::vector<std::uint8_t>>& alice_bits,
    const std::vector<Detection>& detections) {
  if (alice_bits.size() != detections.size()) {
    throw std::invalid_argument("sift_keys: one bit row per detection required");
  }
  std::vector<std::uint8_t> alice;
  std::vector<std::uint8_t> bob;
  alice.reserve(detections.size());
  bob.reserve(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& det = detections[i];
    const auto& bits = alice_bits[i];
    const std::size_t hi = static_cast<std::size_t>(det.slot) + det.offset;
    if (det.slot < 1 || hi > bits.size()) {
      throw std::out_of_range("sift_keys: slot + offset outside the paired range");
    }
    alice.push_back(bits[det.slot - 1] ^ bits[hi - 1]);
    bob.push_back(static_cast<std::uint8_t>(det.bob_bit));
  }
  return {std::move(alice), std::move(bob)};
}

std::vector<std::int64_t> pairing_distribution(int i, int l_pulses,
                                               std::int64_t n_samples,
                                               std::uint64_t seed) {
  require(l_pulses >= 2, "pairing_distribution: L must be >= 2");
  require(i >= 1 && i <= l_pulses, "pairing_distribution: need 1 <= i <= L");
  require(n_samples >= 1, "pairing_distribution: n_samples must be >= 1");
  std::vector<std::int64_t> hist(static_cast<std::size_t>(l_pulses) + 1, 0);
  SplitRng rng(seed);
  for (std::int64_t s = 0; s < n_samples; ++s) {
    const int r = 1 + static_cast<int>(rng.uniform_below(l_pulses - 1));
    const bool minus = (rng() & 1u) != 0;
    const int shift = minus ? l_pulses - r : r;
    const int j = (i - 1 + shift) % l_pulses + 1;
    hist[j] += 1;
  }
  return hist;
}

}  // namespace rrdps
