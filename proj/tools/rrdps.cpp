// Command-line surface for the RRDPS key-rate toolkit: single-point
// evaluation, rate-vs-distance curves, grid optimization, protocol
// simulation, and source-calibration utilities.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rrdps/calibration.hpp"
#include "rrdps/optimizer.hpp"
#include "rrdps/scenario.hpp"
#include "rrdps/simulation.hpp"
#include "rrdps/strings.hpp"
#include "rrdps/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;     // validation or usage
constexpr int kExitInsecure = 2;  // evaluated point has R = 0
constexpr int kExitIo = 3;        // missing or unwritable files

struct CommonArgs {
  std::string config_path;
  bool emit_config = false;
  int threads = -1;  // -1: not set on the command line
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Scenario JSON overriding defaults");
  cmd->add_flag("--emit-config", args.emit_config, "Print effective settings and exit");
  cmd->add_option("--threads", args.threads, "Worker cap (env RRDPS_THREADS as fallback)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << data;
}

rrdps::ScenarioConfig load_scenario(const CommonArgs& args) {
  rrdps::ScenarioConfig cfg;
  if (!args.config_path.empty()) {
    cfg = rrdps::parse_scenario(read_file(args.config_path));
  }
  if (args.threads >= 0) {
    cfg.threads = args.threads;
  } else if (const char* env = std::getenv("RRDPS_THREADS")) {
    cfg.threads = std::max(0, std::atoi(env));
  }
  return cfg;
}

json meta_block(const rrdps::ScenarioConfig& cfg) {
  return json{{"config_hash", rrdps::scenario_hash(cfg)}, {"version", rrdps::kVersion}};
}

json point_to_json(const rrdps::KeyRatePoint& p) {
  return json{{"distance_km", p.distance_km},
              {"mu0", p.mu0},
              {"nu_th", p.nu_th},
              {"epsilon", p.epsilon},
              {"Q", p.q},
              {"e_bit", p.e_bit},
              {"e_src", p.e_src},
              {"e_ph", p.e_ph},
              {"R", p.rate},
              {"R_raw", p.rate_raw},
              {"secure", p.secure}};
}

json bounds_to_json(const rrdps::VacuumBounds& b) {
  return json{
      {"p_U0", b.p_u0}, {"p_L0", b.p_l0}, {"p_U1", b.p_u1}, {"p_L1", b.p_l1}};
}

int emit_or_run(const CommonArgs& common, const rrdps::ScenarioConfig& cfg,
                const std::function<int()>& run) {
  if (common.emit_config) {
    std::cout << rrdps::emit_scenario(cfg);
    return kExitOk;
  }
  return run();
}

int cmd_keyrate(const CommonArgs& common, const rrdps::ScenarioConfig& cfg,
                double distance, double mu0, int nu_th, double epsilon,
                bool per_block) {
  return emit_or_run(common, cfg, [&] {
    const rrdps::OptimizeConfig opt = cfg.to_optimize_config();
    const rrdps::KeyRatePoint p =
        rrdps::evaluate_point(distance, mu0, nu_th, epsilon, opt);
    json out = point_to_json(p);
    if (per_block) out["R_per_block"] = p.rate * cfg.pulses_per_block;
    out["meta"] = meta_block(cfg);
    std::cout << out.dump(2) << "\n";
    return p.rate > 0.0 ? kExitOk : kExitInsecure;
  });
}

int cmd_optimize(const CommonArgs& common, const rrdps::ScenarioConfig& cfg,
                 double distance, const std::string& out_path, bool per_block) {
  return emit_or_run(common, cfg, [&] {
    const rrdps::OptimizeConfig opt = cfg.to_optimize_config();
    const rrdps::KeyRatePoint p = rrdps::optimize_point(distance, opt);
    json out = point_to_json(p);
    if (per_block) out["R_per_block"] = p.rate * cfg.pulses_per_block;
    out["meta"] = meta_block(cfg);
    const std::string text = out.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      write_file(out_path, text);
    }
    return p.rate > 0.0 ? kExitOk : kExitInsecure;
  });
}

int cmd_curve(const CommonArgs& common, const rrdps::ScenarioConfig& cfg, double from,
              double to, double step, const std::string& out_path) {
  return emit_or_run(common, cfg, [&] {
    if (step <= 0.0 || to < from) {
      throw std::invalid_argument("curve: need step > 0 and to >= from");
    }
    std::vector<double> distances;
    for (double l = from; l <= to + 1e-9; l += step) distances.push_back(l);
    const rrdps::CurveResult result = rrdps::curve(distances, cfg.to_optimize_config());
    std::ostringstream ss;
    rrdps::write_curve_csv(ss, result);
    if (out_path.empty()) {
      std::cout << ss.str();
    } else {
      write_file(out_path, ss.str());
    }
    return kExitOk;
  });
}

int cmd_simulate(const CommonArgs& common, const rrdps::ScenarioConfig& cfg,
                 const std::string& out_path) {
  return emit_or_run(common, cfg, [&] {
    std::ostringstream ss;
    ss << "# rrdps " << rrdps::kVersion << "\n";
    ss << "# config_hash=" << rrdps::scenario_hash(cfg) << "\n";
    ss << "distance_km,n_blocks,Q_hat,Q_model,e_bit_hat,e_bit_model,se_Q,se_e\n";
    for (double l : cfg.simulate.distances) {
      const rrdps::SimConfig sim = cfg.to_sim_config(l);
      const rrdps::SimResult res = rrdps::run_blocks(sim);
      const double eta_sy =
          rrdps::channel_transmittance(l, cfg.channel.alpha_db_per_km) *
          cfg.channel.eta_d;
      const double q_model = rrdps::detection_rate(
          cfg.pulses_per_block, cfg.simulate.mu0, eta_sy, cfg.channel.p_d);
      const double e_model =
          q_model > 0.0
              ? rrdps::bit_error_rate(cfg.pulses_per_block, cfg.simulate.mu0, eta_sy,
                                      cfg.channel.p_d, cfg.channel.e_sym)
              : 0.0;
      ss << rrdps::format_double(l) << ',' << res.n_blocks << ','
         << rrdps::format_double(res.q_hat) << ',' << rrdps::format_double(q_model)
         << ',' << rrdps::format_double(res.e_bit_hat) << ','
         << rrdps::format_double(e_model) << ',' << rrdps::format_double(res.se_q)
         << ',' << rrdps::format_double(res.se_e) << '\n';
    }
    if (out_path.empty()) {
      std::cout << ss.str();
    } else {
      write_file(out_path, ss.str());
    }
    return kExitOk;
  });
}

struct DecoySetting {
  int bit = 0;
  double eta = 0.0;
  double n = 0.0;
  double n_vac = 0.0;
};

rrdps::DecoyRecord pair_settings(const DecoySetting& a, const DecoySetting& b,
                                 double eta_d, double p_d, double confidence) {
  const DecoySetting& high = a.eta >= b.eta ? a : b;
  const DecoySetting& low = a.eta >= b.eta ? b : a;
  rrdps::DecoyRecord rec;
  rec.eta1 = high.eta;
  rec.eta2 = low.eta;
  rec.n1 = high.n;
  rec.n2 = low.n;
  rec.n1_vac = high.n_vac;
  rec.n2_vac = low.n_vac;
  rec.eta_d = eta_d;
  rec.p_d = p_d;
  if (confidence > 0.0) {
    rec.delta1 = rrdps::finite_size_slack(high.n, confidence);
    rec.delta2 = rrdps::finite_size_slack(low.n, confidence);
  }
  return rec;
}

int cmd_calibrate_decoy(const CommonArgs& common, const rrdps::ScenarioConfig& cfg,
                        const std::string& input_path, double eta_d, double p_d,
                        double confidence) {
  return emit_or_run(common, cfg, [&] {
    const std::string text = read_file(input_path);
    std::istringstream lines(text);
    std::string line;
    std::vector<DecoySetting> settings[2];
    int line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::exception& e) {
        throw std::invalid_argument("calibration line " + std::to_string(line_no) +
                                    ": " + e.what());
      }
      for (const auto& [key, value] : rec.items()) {
        if (key != "bit" && key != "eta" && key != "N" && key != "N_vac") {
          throw std::invalid_argument("calibration line " + std::to_string(line_no) +
                                      ": unknown key '" + key + "'");
        }
      }
      DecoySetting s;
      s.bit = rec.at("bit").get<int>();
      s.eta = rec.at("eta").get<double>();
      s.n = rec.at("N").get<double>();
      s.n_vac = rec.at("N_vac").get<double>();
      if (s.bit != 0 && s.bit != 1) {
        throw std::invalid_argument("calibration line " + std::to_string(line_no) +
                                    ": bit must be 0 or 1");
      }
      settings[s.bit].push_back(s);
    }
    if (settings[0].size() != 2 || settings[1].size() != 2) {
      throw std::invalid_argument(
          "calibrate-decoy: need exactly two settings per bit value");
    }
    const rrdps::VacuumInterval b0 = rrdps::decoy_vacuum_bounds(
        pair_settings(settings[0][0], settings[0][1], eta_d, p_d, confidence));
    const rrdps::VacuumInterval b1 = rrdps::decoy_vacuum_bounds(
        pair_settings(settings[1][0], settings[1][1], eta_d, p_d, confidence));
    json out = bounds_to_json(rrdps::VacuumBounds{
        .p_u0 = b0.p_u, .p_l0 = b0.p_l, .p_u1 = b1.p_u, .p_l1 = b1.p_l});
    out["clamped"] = b0.clamped || b1.clamped;
    out["meta"] = {{"config_hash", rrdps::fnv1a_hex(text)},
                   {"version", rrdps::kVersion}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  });
}

int cmd_calibrate_monitor(const CommonArgs& common, const rrdps::ScenarioConfig& cfg,
                          const std::string& input_path) {
  return emit_or_run(common, cfg, [&] {
    const std::string text = read_file(input_path);
    json doc = json::parse(text);
    for (const auto& [key, value] : doc.items()) {
      if (key != "eta" && key != "beta0" && key != "beta1") {
        throw std::invalid_argument("calibrate-monitor: unknown key '" + key + "'");
      }
    }
    rrdps::MonitorRecord rec;
    rec.eta = doc.at("eta").get<double>();
    for (const auto& iv : doc.at("beta0")) {
      rec.beta0.push_back(
          rrdps::IntensityInterval{iv.at(0).get<double>(), iv.at(1).get<double>()});
    }
    for (const auto& iv : doc.at("beta1")) {
      rec.beta1.push_back(
          rrdps::IntensityInterval{iv.at(0).get<double>(), iv.at(1).get<double>()});
    }
    json out = bounds_to_json(rrdps::monitor_vacuum_bounds(rec));
    out["meta"] = {{"config_hash", rrdps::fnv1a_hex(text)},
                   {"version", rrdps::kVersion}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  });
}

int cmd_tha_adjust(const CommonArgs& common, const rrdps::ScenarioConfig& cfg,
                   const std::string& input_path, double mu_out) {
  return emit_or_run(common, cfg, [&] {
    const std::string text = read_file(input_path);
    json doc = json::parse(text);
    json out;
    if (doc.contains("p_U") || doc.contains("p_L")) {
      const rrdps::VacuumInterval adjusted = rrdps::tha_adjust(
          rrdps::VacuumInterval{.p_l = doc.at("p_L").get<double>(),
                                .p_u = doc.at("p_U").get<double>()},
          mu_out);
      out = json{{"p_L", adjusted.p_l}, {"p_U", adjusted.p_u}};
    } else {
      const rrdps::VacuumBounds adjusted = rrdps::tha_adjust(
          rrdps::VacuumBounds{.p_u0 = doc.at("p_U0").get<double>(),
                              .p_l0 = doc.at("p_L0").get<double>(),
                              .p_u1 = doc.at("p_U1").get<double>(),
                              .p_l1 = doc.at("p_L1").get<double>()},
          mu_out);
      out = bounds_to_json(adjusted);
    }
    out["meta"] = {{"config_hash", rrdps::fnv1a_hex(text)},
                   {"version", rrdps::kVersion}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RRDPS secret-key-rate calculator and protocol simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("rrdps ") + rrdps::kVersion);

  CommonArgs common;

  auto* keyrate = app.add_subcommand("keyrate", "Evaluate one operating point");
  double kr_distance = 0.0;
  double kr_mu0 = 1.0 / 128.0;
  int kr_nu_th = 10;
  double kr_epsilon = 1e-10;
  std::string kr_case;
  double kr_spread = -1.0;
  int kr_l = 0;
  bool kr_per_block = false;
  add_common(keyrate, common);
  keyrate->add_option("--distance", kr_distance, "Fibre length in km");
  keyrate->add_option("--mu0", kr_mu0, "Mean photon number per pulse");
  keyrate->add_option("--nu-th", kr_nu_th, "Photon-number threshold");
  keyrate->add_option("--epsilon", kr_epsilon, "Concentration failure probability");
  keyrate->add_option("--case", kr_case, "Source case: i, ii or coherent");
  keyrate->add_option("--spread", kr_spread, "Relative spread of the bit-1 mean");
  keyrate->add_option("--L", kr_l, "Pulses per block");
  keyrate->add_flag("--per-block", kr_per_block, "Also report the per-block rate");

  auto* optimize = app.add_subcommand("optimize", "Maximize R at one distance");
  double op_distance = 0.0;
  std::string op_case;
  double op_spread = -1.0;
  int op_l = 0;
  std::string op_out;
  bool op_per_block = false;
  add_common(optimize, common);
  optimize->add_option("--distance", op_distance, "Fibre length in km")->required();
  optimize->add_option("--case", op_case, "Source case: i, ii or coherent");
  optimize->add_option("--spread", op_spread, "Relative spread of the bit-1 mean");
  optimize->add_option("--L", op_l, "Pulses per block");
  optimize->add_option("--out", op_out, "Write the point JSON here");
  optimize->add_flag("--per-block", op_per_block, "Also report the per-block rate");

  auto* curve_cmd = app.add_subcommand("curve", "Optimized R over a distance range");
  double cv_from = 0.0;
  double cv_to = 200.0;
  double cv_step = 5.0;
  std::string cv_case;
  double cv_spread = -1.0;
  int cv_l = 0;
  std::string cv_out;
  add_common(curve_cmd, common);
  curve_cmd->add_option("--from", cv_from, "First distance in km");
  curve_cmd->add_option("--to", cv_to, "Last distance in km");
  curve_cmd->add_option("--step", cv_step, "Distance step in km");
  curve_cmd->add_option("--case", cv_case, "Source case: i, ii or coherent");
  curve_cmd->add_option("--spread", cv_spread, "Relative spread of the bit-1 mean");
  curve_cmd->add_option("--L", cv_l, "Pulses per block");
  curve_cmd->add_option("--out", cv_out, "Write the CSV here");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo protocol run");
  std::string sm_out;
  add_common(simulate, common);
  simulate->add_option("--out", sm_out, "Write the CSV here");

  auto* decoy = app.add_subcommand("calibrate-decoy",
                                   "Vacuum bounds from two-setting click records");
  std::string dc_input;
  double dc_eta_d = 1.0;
  double dc_p_d = 0.0;
  double dc_confidence = 0.0;
  add_common(decoy, common);
  decoy->add_option("--input", dc_input, "JSON-lines click records")->required();
  decoy->add_option("--eta-d", dc_eta_d, "Detector efficiency")->required();
  decoy->add_option("--p-d", dc_p_d, "Dark-count rate")->required();
  decoy->add_option("--confidence", dc_confidence,
                    "Apply Hoeffding slack at this failure probability");

  auto* monitor = app.add_subcommand("calibrate-monitor",
                                     "Vacuum bounds from intensity monitoring");
  std::string mn_input;
  add_common(monitor, common);
  monitor->add_option("--input", mn_input, "Monitor record JSON")->required();

  auto* tha = app.add_subcommand("tha-adjust",
                                 "Attenuate vacuum bounds for back-reflected light");
  std::string th_input;
  double th_mu_out = 0.0;
  add_common(tha, common);
  tha->add_option("--input", th_input, "Bounds JSON (full or single-bit pair)")
      ->required();
  tha->add_option("--mu-out", th_mu_out, "Back-reflected mean photon number")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    rrdps::ScenarioConfig cfg = load_scenario(common);
    if (keyrate->parsed()) {
      if (!kr_case.empty()) cfg.source_case = kr_case;
      if (kr_spread >= 0.0) cfg.spread = kr_spread;
      if (kr_l > 0) cfg.pulses_per_block = kr_l;
      return cmd_keyrate(common, cfg, kr_distance, kr_mu0, kr_nu_th, kr_epsilon,
                         kr_per_block);
    }
    if (optimize->parsed()) {
      if (!op_case.empty()) cfg.source_case = op_case;
      if (op_spread >= 0.0) cfg.spread = op_spread;
      if (op_l > 0) cfg.pulses_per_block = op_l;
      return cmd_optimize(common, cfg, op_distance, op_out, op_per_block);
    }
    if (curve_cmd->parsed()) {
      if (!cv_case.empty()) cfg.source_case = cv_case;
      if (cv_spread >= 0.0) cfg.spread = cv_spread;
      if (cv_l > 0) cfg.pulses_per_block = cv_l;
      return cmd_curve(common, cfg, cv_from, cv_to, cv_step, cv_out);
    }
    if (simulate->parsed()) return cmd_simulate(common, cfg, sm_out);
    if (decoy->parsed()) {
      return cmd_calibrate_decoy(common, cfg, dc_input, dc_eta_d, dc_p_d,
                                 dc_confidence);
    }
    if (monitor->parsed()) return cmd_calibrate_monitor(common, cfg, mn_input);
    if (tha->parsed()) return cmd_tha_adjust(common, cfg, th_input, th_mu_out);
    return kExitError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "rrdps: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "rrdps: " << e.what() << "\n";
    return kExitError;
  }
}
