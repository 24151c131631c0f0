#pragma once

#include <string>
#include <vector>

#include "rrdps/optimizer.hpp"
#include "rrdps/simulation.hpp"

namespace rrdps {

/// Simulation section of a scenario file.
struct SimulateSection {
  std::int64_t n_blocks = 1'000'000;
  std::uint64_t seed = 1;
  Fidelity fidelity = Fidelity::kModelLevel;
  double mu0 = 1.0 / 128.0;
  double mu1 = 1.0 / 128.0;
  std::vector<double> distances{0.0, 25.0, 50.0, 75.0, 100.0};
};

/// Versioned scenario document binding source, channel, optimizer and
/// simulator settings. Field defaults are the reference operating point
/// (L = 128, eta_d = 0.15, p_d = 5e-7, e_sym = 5%, f_EC = 1.16, 0.2 dB/km).
struct ScenarioConfig {
  int version = 1;
  int pulses_per_block = 128;
  int nu_th_max = 40;
  std::string source_case = "i";  // "i" | "ii" | "coherent"
  double spread = 0.01;
  double spread0 = 0.0;
  std::string coherent_mean = "block";  // "block" | "pulse"
  ChannelParams channel;
  GridSpec mu_grid{0.0, 0.0, 0};  // points == 0: derive from L
  GridSpec epsilon_grid{1e-15, 1e-3, 13};
  int threads = 0;
  SimulateSection simulate;

  OptimizeConfig to_optimize_config() const;
  SimConfig to_sim_config(double distance_km) const;
};

/// Parses and validates a scenario document. Unknown keys, a bad version or
/// out-of-range values throw std::invalid_argument with the offending key.
ScenarioConfig parse_scenario(const std::string& json_text);

/// Canonical JSON rendering of the effective settings (keys sorted).
std::string emit_scenario(const ScenarioConfig& cfg);

/// Hash of the canonical rendering; embedded in every output file.
std::string scenario_hash(const ScenarioConfig& cfg);

}  // namespace rrdps
