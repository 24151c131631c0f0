#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rrdps/channel.hpp"
#include "rrdps/security.hpp"

namespace rrdps {

/// Geometric grid between lo and hi (inclusive) with `points` entries.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int points = 1;
};

std::vector<double> geometric_grid(const GridSpec& spec);

struct CaseI {};

/// Bit-1 mean photon number admitted within +-spread of mu0.
struct CaseII {
  double spread = 0.01;
};

/// Correlated coherent pulses; per-bit mean ranges mu0 * (1 -+ spread_b).
struct CoherentCase {
  double spread0 = 0.0;
  double spread1 = 0.01;
  CoherentMeanConvention convention = CoherentMeanConvention::kBlockTotal;
};

using SourceCase = std::variant<CaseI, CaseII, CoherentCase>;

struct OptimizeConfig {
  GridSpec mu_grid;        // defaulted from L by default_config()
  int nu_th_max = 40;
  GridSpec epsilon_grid{1e-15, 1e-3, 13};
  SourceCase source_case = CaseI{};
  ChannelParams channel;
  int pulses_per_block = 128;
  int threads = 0;  // 0: hardware concurrency

  static OptimizeConfig defaults(int l_pulses);
};

/// One evaluated operating point with all intermediates.
struct KeyRatePoint {
  double distance_km = 0.0;
  double mu0 = 0.0;
  int nu_th = 0;
  double epsilon = 0.0;  // 0 when the bound does not use one
  double q = 0.0;
  double e_bit = 0.0;
  double e_src = 0.0;
  double e_ph = 0.5;
  double rate = 0.0;      // clamped at zero
  double rate_raw = 0.0;
  bool secure = false;
};

struct CurveResult {
  std::vector<KeyRatePoint> points;
  std::string config_hash;
  std::string version;
};

/// Composes channel model, source bound and key rate at one operating point.
KeyRatePoint evaluate_point(double distance_km, double mu0, int nu_th, double epsilon,
                            const OptimizeConfig& cfg);

/// Exhaustive scan over mu x nu_th (x epsilon where used) followed by one
/// golden-section refinement of mu around the best grid point. Ties break
/// toward smaller mu, then nu_th, then epsilon. Returns a rate-zero insecure
/// point when no candidate is secure.
KeyRatePoint optimize_point(double distance_km, const OptimizeConfig& cfg);

/// optimize_point per distance. Distances must be sorted ascending.
CurveResult curve(std::span<const double> distances, const OptimizeConfig& cfg);

/// CSV with columns l_km,mu0,nu_th,epsilon,Q,e_bit,e_ph,R after two comment
/// lines carrying version and config hash.
void write_curve_csv(std::ostream& os, const CurveResult& result);

/// FNV-1a hash of a canonical rendering of the config; stable across runs.
std::string config_hash(const OptimizeConfig& cfg);

}  // namespace rrdps
