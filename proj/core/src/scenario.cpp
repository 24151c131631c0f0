#include "rrdps/scenario.hpp"

#include <stdexcept>

#include "json.hpp"
#include "rrdps/strings.hpp"

namespace rrdps {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void reject_unknown(const json& obj, const char* section,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) fail(std::string("scenario: unknown key '") + key + "' in " + section);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      fail(std::string("scenario: bad value for '") + key + "'");
    }
  }
}

}  // namespace

OptimizeConfig ScenarioConfig::to_optimize_config() const {
  OptimizeConfig cfg = OptimizeConfig::defaults(pulses_per_block);
  // Unset grid fields (zeros) keep the L-derived defaults.
  if (mu_grid.lo > 0.0) cfg.mu_grid.lo = mu_grid.lo;
  if (mu_grid.hi > 0.0) cfg.mu_grid.hi = mu_grid.hi;
  if (mu_grid.points > 0) cfg.mu_grid.points = mu_grid.points;
  cfg.nu_th_max = nu_th_max;
  cfg.epsilon_grid = epsilon_grid;
  cfg.channel = channel;
  cfg.threads = threads;
  if (source_case == "ii") {
    cfg.source_case = CaseII{spread};
  } else if (source_case == "coherent") {
    cfg.source_case = CoherentCase{
        .spread0 = spread0,
        .spread1 = spread,
        .convention = coherent_mean == "pulse" ? CoherentMeanConvention::kPerPulse
                                               : CoherentMeanConvention::kBlockTotal};
  } else if (source_case == "i") {
    cfg.source_case = CaseI{};
  } else {
    fail("scenario: case must be 'i', 'ii' or 'coherent'");
  }
  return cfg;
}

SimConfig ScenarioConfig::to_sim_config(double distance_km) const {
  SimConfig cfg;
  cfg.pulses_per_block = pulses_per_block;
  cfg.mu0 = simulate.mu0;
  cfg.mu1 = simulate.mu1;
  cfg.channel = channel;
  cfg.channel.distance_km = distance_km;
  cfg.n_blocks = simulate.n_blocks;
  cfg.seed = simulate.seed;
  cfg.fidelity = simulate.fidelity;
  return cfg;
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("scenario: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("scenario: document must be a JSON object");
  reject_unknown(doc, "document",
                 {"version", "source", "channel", "optimize", "simulate"});

  ScenarioConfig cfg;
  read(doc, "version", cfg.version);
  if (cfg.version != 1) fail("scenario: unsupported version");

  if (auto it = doc.find("source"); it != doc.end()) {
    reject_unknown(*it, "source",
                   {"L", "nu_th_max", "case", "spread", "spread0", "coherent_mean"});
    read(*it, "L", cfg.pulses_per_block);
    read(*it, "nu_th_max", cfg.nu_th_max);
    read(*it, "case", cfg.source_case);
    read(*it, "spread", cfg.spread);
    read(*it, "spread0", cfg.spread0);
    read(*it, "coherent_mean", cfg.coherent_mean);
  }
  if (auto it = doc.find("channel"); it != doc.end()) {
    reject_unknown(*it, "channel", {"alpha_db_per_km", "eta_d", "p_d", "e_sym", "f_ec"});
    read(*it, "alpha_db_per_km", cfg.channel.alpha_db_per_km);
    read(*it, "eta_d", cfg.channel.eta_d);
    read(*it, "p_d", cfg.channel.p_d);
    read(*it, "e_sym", cfg.channel.e_sym);
    read(*it, "f_ec", cfg.channel.f_ec);
  }
  if (auto it = doc.find("optimize"); it != doc.end()) {
    reject_unknown(*it, "optimize",
                   {"mu_lo", "mu_hi", "mu_points", "eps_lo", "eps_hi", "eps_points",
                    "threads"});
    read(*it, "mu_lo", cfg.mu_grid.lo);
    read(*it, "mu_hi", cfg.mu_grid.hi);
    read(*it, "mu_points", cfg.mu_grid.points);
    read(*it, "eps_lo", cfg.epsilon_grid.lo);
    read(*it, "eps_hi", cfg.epsilon_grid.hi);
    read(*it, "eps_points", cfg.epsilon_grid.points);
    read(*it, "threads", cfg.threads);
  }
  if (auto it = doc.find("simulate"); it != doc.end()) {
    reject_unknown(*it, "simulate",
                   {"n_blocks", "seed", "fidelity", "mu0", "mu1", "distances"});
    read(*it, "n_blocks", cfg.simulate.n_blocks);
    read(*it, "seed", cfg.simulate.seed);
    std::string fidelity = "model";
    read(*it, "fidelity", fidelity);
    if (fidelity == "model") {
      cfg.simulate.fidelity = Fidelity::kModelLevel;
    } else if (fidelity == "pulse") {
      cfg.simulate.fidelity = Fidelity::kPulseLevel;
    } else {
      fail("scenario: fidelity must be 'model' or 'pulse'");
    }
    read(*it, "mu0", cfg.simulate.mu0);
    read(*it, "mu1", cfg.simulate.mu1);
    read(*it, "distances", cfg.simulate.distances);
  }

  if (cfg.pulses_per_block < 2 || cfg.pulses_per_block > 4096) {
    fail("scenario: L must lie in [2, 4096]");
  }
  if (cfg.nu_th_max < 0) fail("scenario: nu_th_max must be >= 0");
  if (cfg.source_case != "i" && cfg.source_case != "ii" &&
      cfg.source_case != "coherent") {
    fail("scenario: case must be 'i', 'ii' or 'coherent'");
  }
  if (cfg.spread < 0.0 || cfg.spread >= 1.0 || cfg.spread0 < 0.0 || cfg.spread0 >= 1.0) {
    fail("scenario: spreads must lie in [0, 1)");
  }
  if (cfg.coherent_mean != "block" && cfg.coherent_mean != "pulse") {
    fail("scenario: coherent_mean must be 'block' or 'pulse'");
  }
  if (!cfg.channel.valid()) fail("scenario: invalid channel parameters");
  if (cfg.mu_grid.lo < 0.0 || cfg.mu_grid.hi < 0.0 || cfg.mu_grid.points < 0 ||
      (cfg.mu_grid.lo > 0.0 && cfg.mu_grid.hi > 0.0 &&
       cfg.mu_grid.hi < cfg.mu_grid.lo)) {
    fail("scenario: invalid mu grid");
  }
  if (!(cfg.epsilon_grid.points >= 1 && cfg.epsilon_grid.lo > 0.0 &&
        cfg.epsilon_grid.hi >= cfg.epsilon_grid.lo && cfg.epsilon_grid.hi <= 1.0)) {
    fail("scenario: invalid epsilon grid");
  }
  if (cfg.threads < 0) fail("scenario: threads must be >= 0");
  if (cfg.simulate.n_blocks < 1) fail("scenario: n_blocks must be >= 1");
  if (cfg.simulate.mu0 < 0.0 || cfg.simulate.mu1 < 0.0) {
    fail("scenario: simulate means must be >= 0");
  }
  for (double d : cfg.simulate.distances) {
    if (d < 0.0) fail("scenario: distances must be >= 0");
  }
  return cfg;
}

std::string emit_scenario(const ScenarioConfig& cfg) {
  json doc;
  doc["version"] = cfg.version;
  doc["source"] = {{"L", cfg.pulses_per_block},
                   {"nu_th_max", cfg.nu_th_max},
                   {"case", cfg.source_case},
                   {"spread", cfg.spread},
                   {"spread0", cfg.spread0},
                   {"coherent_mean", cfg.coherent_mean}};
  doc["channel"] = {{"alpha_db_per_km", cfg.channel.alpha_db_per_km},
                    {"eta_d", cfg.channel.eta_d},
                    {"p_d", cfg.channel.p_d},
                    {"e_sym", cfg.channel.e_sym},
                    {"f_ec", cfg.channel.f_ec}};
  const OptimizeConfig opt = cfg.to_optimize_config();
  doc["optimize"] = {{"mu_lo", opt.mu_grid.lo},       {"mu_hi", opt.mu_grid.hi},
                     {"mu_points", opt.mu_grid.points}, {"eps_lo", cfg.epsilon_grid.lo},
                     {"eps_hi", cfg.epsilon_grid.hi},  {"eps_points", cfg.epsilon_grid.points},
                     {"threads", cfg.threads}};
  doc["simulate"] = {
      {"n_blocks", cfg.simulate.n_blocks},
      {"seed", cfg.simulate.seed},
      {"fidelity", cfg.simulate.fidelity == Fidelity::kModelLevel ? "model" : "pulse"},
      {"mu0", cfg.simulate.mu0},
      {"mu1", cfg.simulate.mu1},
      {"distances", cfg.simulate.distances}};
  return doc.dump(2) + "\n";
}

std::string scenario_hash(const ScenarioConfig& cfg) {
  return fnv1a_hex(emit_scenario(cfg));
}

}  // namespace rrdps
