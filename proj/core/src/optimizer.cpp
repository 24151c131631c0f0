#include "rrdps/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "rrdps/strings.hpp"
#include "rrdps/version.hpp"

namespace rrdps {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

/// Strict total order on candidates: higher raw rate wins, ties break toward
/// smaller mu, then nu_th, then epsilon, so any reduction order agrees.
bool better(const KeyRatePoint& a, const KeyRatePoint& b) {
  if (a.rate_raw != b.rate_raw) return a.rate_raw > b.rate_raw;
  if (a.mu0 != b.mu0) return a.mu0 < b.mu0;
  if (a.nu_th != b.nu_th) return a.nu_th < b.nu_th;
  return a.epsilon < b.epsilon;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

KeyRatePoint scan_mu_index(double distance_km, const OptimizeConfig& cfg,
                           const std::vector<double>& mu_grid,
                           const std::vector<double>& eps_grid, std::size_t index) {
  KeyRatePoint best;
  best.rate_raw = -std::numeric_limits<double>::infinity();
  best.distance_km = distance_km;
  const int nu_cap = std::min(cfg.nu_th_max, cfg.pulses_per_block - 2);
  for (int nu = 0; nu <= nu_cap; ++nu) {
    for (double eps : eps_grid) {
      const KeyRatePoint p = evaluate_point(distance_km, mu_grid[index], nu, eps, cfg);
      if (better(p, best)) best = p;
    }
  }
  return best;
}

}  // namespace

std::vector<double> geometric_grid(const GridSpec& spec) {
  require(spec.points >= 1, "geometric_grid: points must be >= 1");
  require(spec.lo > 0.0 && spec.hi >= spec.lo, "geometric_grid: need 0 < lo <= hi");
  std::vector<double> grid(static_cast<std::size_t>(spec.points));
  if (spec.points == 1) {
    grid[0] = spec.lo;
    return grid;
  }
  const double ratio = std::log(spec.hi / spec.lo);
  for (int i = 0; i < spec.points; ++i) {
    grid[i] = spec.lo * std::exp(ratio * i / (spec.points - 1));
  }
  grid.front() = spec.lo;
  grid.back() = spec.hi;
  return grid;
}

OptimizeConfig OptimizeConfig::defaults(int l_pulses) {
  OptimizeConfig cfg;
  cfg.pulses_per_block = l_pulses;
  cfg.mu_grid = GridSpec{1.28e-2 / l_pulses, 12.8 / l_pulses, 200};
  return cfg;
}

KeyRatePoint evaluate_point(double distance_km, double mu0, int nu_th, double epsilon,
                            const OptimizeConfig& cfg) {
  require(cfg.channel.valid(), "evaluate_point: invalid channel parameters");
  require(mu0 >= 0.0, "evaluate_point: mu0 must be >= 0");
  require(nu_th >= 0, "evaluate_point: nu_th must be >= 0");
  const int l = cfg.pulses_per_block;

  KeyRatePoint point;
  point.distance_km = distance_km;
  point.mu0 = mu0;
  point.nu_th = nu_th;
  point.epsilon = std::holds_alternative<CaseI>(cfg.source_case) ? 0.0 : epsilon;

  const double eta_sy =
      channel_transmittance(distance_km, cfg.channel.alpha_db_per_km) * cfg.channel.eta_d;
  point.q = detection_rate(l, mu0, eta_sy, cfg.channel.p_d);
  if (point.q <= 0.0) return point;  // nothing ever clicks
  point.e_bit = bit_error_rate(l, mu0, eta_sy, cfg.channel.p_d, cfg.channel.e_sym);

  PhaseErrorBound bound;
  if (const auto* case_ii = std::get_if<CaseII>(&cfg.source_case)) {
    const OperatingPoint op{
        .pulses_per_block = l,
        .mu0 = mu0,
        .mu1 = {mu0 * (1.0 - case_ii->spread), mu0 * (1.0 + case_ii->spread)}};
    point.e_src = e_src_case_ii(op, nu_th);
    SourceSpec spec{.pulses_per_block = l,
                    .nu_th = nu_th,
                    .e_src = point.e_src,
                    .mode = BoundedVacuum{vacuum_bounds_case_ii(op)}};
    bound = phase_error_case_ii(spec, epsilon, point.q);
  } else if (const auto* coherent = std::get_if<CoherentCase>(&cfg.source_case)) {
    const CorrelatedCoherent ranges{.mu_min0 = mu0 * (1.0 - coherent->spread0),
                                    .mu_max0 = mu0 * (1.0 + coherent->spread0),
                                    .mu_min1 = mu0 * (1.0 - coherent->spread1),
                                    .mu_max1 = mu0 * (1.0 + coherent->spread1)};
    const double mu_max = std::max(ranges.mu_max0, ranges.mu_max1);
    const double mean = coherent->convention == CoherentMeanConvention::kBlockTotal
                            ? l * mu_max
                            : mu_max;
    point.e_src = poisson_tail(mean, nu_th);
    SourceSpec spec{.pulses_per_block = l,
                    .nu_th = nu_th,
                    .e_src = point.e_src,
                    .mode = ranges};
    bound = phase_error_correlated_coherent(spec, epsilon, point.q,
                                            coherent->convention);
  } else {
    point.e_src = e_src_case_i(l, mu0, nu_th);
    bound = phase_error_case_i(point.e_src, point.q, nu_th, l);
  }

  point.e_ph = bound.e_ph;
  const KeyRate rate = key_rate(point.q, point.e_bit, point.e_ph, cfg.channel.f_ec, l);
  point.rate = rate.reported;
  point.rate_raw = rate.raw;
  point.secure = rate.raw > 0.0;
  return point;
}

KeyRatePoint optimize_point(double distance_km, const OptimizeConfig& cfg) {
  const std::vector<double> mu_grid = geometric_grid(cfg.mu_grid);
  const bool uses_epsilon = !std::holds_alternative<CaseI>(cfg.source_case);
  const std::vector<double> eps_grid =
      uses_epsilon ? geometric_grid(cfg.epsilon_grid) : std::vector<double>{1.0};

  KeyRatePoint best;
  best.rate_raw = -std::numeric_limits<double>::infinity();
  best.distance_km = distance_km;
  std::size_t best_index = 0;

  const int workers =
      std::min<int>(resolve_threads(cfg.threads), static_cast<int>(mu_grid.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
      KeyRatePoint p = scan_mu_index(distance_km, cfg, mu_grid, eps_grid, i);
      if (better(p, best)) {
        best = p;
        best_index = i;
      }
    }
  } else {
    std::vector<KeyRatePoint> local(mu_grid.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= mu_grid.size()) return;
          local[i] = scan_mu_index(distance_km, cfg, mu_grid, eps_grid, i);
        }
      });
    }
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
      if (better(local[i], best)) {
        best = local[i];
        best_index = i;
      }
    }
  }

  // Local golden-section pass on mu around the winning grid point, at the
  // winning nu_th and epsilon. The grid winner is kept when refinement ties.
  if (mu_grid.size() > 1 && std::isfinite(best.rate_raw)) {
    const std::size_t lo_i = best_index == 0 ? 0 : best_index - 1;
    const std::size_t hi_i = std::min(best_index + 1, mu_grid.size() - 1);
    double a = std::log(mu_grid[lo_i]);
    double b = std::log(mu_grid[hi_i]);
    const double eps_star = uses_epsilon ? best.epsilon : eps_grid[0];
    const auto eval_log_mu = [&](double lm) {
      return evaluate_point(distance_km, std::exp(lm), best.nu_th, eps_star, cfg);
    };
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    KeyRatePoint fc = eval_log_mu(c);
    KeyRatePoint fd = eval_log_mu(d);
    while (b - a > 1e-10) {
      if (better(fc, fd)) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = eval_log_mu(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = eval_log_mu(d);
      }
    }
    const KeyRatePoint refined = better(fc, fd) ? fc : fd;
    if (better(refined, best)) best = refined;
  }

  if (!(best.rate_raw > 0.0)) {
    best.rate = 0.0;
    best.secure = false;
  }
  return best;
}

CurveResult curve(std::span<const double> distances, const OptimizeConfig& cfg) {
  require(std::is_sorted(distances.begin(), distances.end()),
          "curve: distances must be sorted ascending");
  CurveResult result;
  result.version = kVersion;
  result.config_hash = config_hash(cfg);
  result.points.reserve(distances.size());
  for (double l : distances) {
    result.points.push_back(optimize_point(l, cfg));
  }
  return result;
}

void write_curve_csv(std::ostream& os, const CurveResult& result) {
  os << "# rrdps " << result.version << "\n";
  os << "# config_hash=" << result.config_hash << "\n";
  os << "l_km,mu0,nu_th,epsilon,Q,e_bit,e_ph,R\n";
  for (const KeyRatePoint& p : result.points) {
    os << format_double(p.distance_km) << ',' << format_double(p.mu0) << ','
       << p.nu_th << ',' << format_double(p.epsilon) << ',' << format_double(p.q)
       << ',' << format_double(p.e_bit) << ',' << format_double(p.e_ph) << ','
       << format_double(p.rate) << '\n';
  }
}

std::string config_hash(const OptimizeConfig& cfg) {
  std::string canon;
  canon += "L=" + std::to_string(cfg.pulses_per_block);
  canon += ";mu=" + format_double(cfg.mu_grid.lo) + ":" + format_double(cfg.mu_grid.hi) +
           ":" + std::to_string(cfg.mu_grid.points);
  canon += ";nu_max=" + std::to_string(cfg.nu_th_max);
  canon += ";eps=" + format_double(cfg.epsilon_grid.lo) + ":" +
           format_double(cfg.epsilon_grid.hi) + ":" +
           std::to_string(cfg.epsilon_grid.points);
  if (const auto* case_ii = std::get_if<CaseII>(&cfg.source_case)) {
    canon += ";case=ii;spread=" + format_double(case_ii->spread);
  } else if (const auto* coh = std::get_if<CoherentCase>(&cfg.source_case)) {
    canon += ";case=coherent;spread0=" + format_double(coh->spread0) +
             ";spread1=" + format_double(coh->spread1) + ";mean=" +
             (coh->convention == CoherentMeanConvention::kBlockTotal ? "block" : "pulse");
  } else {
    canon += ";case=i";
  }
  canon += ";alpha=" + format_double(cfg.channel.alpha_db_per_km);
  canon += ";eta_d=" + format_double(cfg.channel.eta_d);
  canon += ";p_d=" + format_double(cfg.channel.p_d);
  canon += ";e_sym=" + format_double(cfg.channel.e_sym);
  canon += ";f_ec=" + format_double(cfg.channel.f_ec);
  return fnv1a_hex(canon);
}

}  // namespace rrdps
