#include "rrdps/security.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace rrdps {

namespace {

constexpr int kMaxBlockLength = 4096;
constexpr int kMaxPoissonThreshold = 1 << 20;
constexpr int kAverageGridPoints = 50;
constexpr double kBisectTol = 1e-13;

[[noreturn]] void fail_domain(const std::string& msg) { throw std::domain_error(msg); }

[[noreturn]] void fail_config(const std::string& msg) { throw std::invalid_argument(msg); }

void require_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    fail_domain(std::string(name) + " must lie in [0,1]");
  }
}

/// Bernoulli relative entropy D(p||q) in nats, for 0 < q < 1 and q <= p <= 1.
double bernoulli_divergence(double p, double q) {
  if (p >= 1.0) return -std::log(q);
  if (p <= q) return 0.0;
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

/// Bisection with the acceptance predicate evaluated exactly as
/// chernoff_epsilon computes it, so the round trip through the public pair
/// can never overshoot epsilon.
double deviation_bisect_exact(double p, std::int64_t n, double epsilon) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  if (epsilon >= 1.0) return 0.0;
  const auto reached = [&](double t) {
    return std::exp(-bernoulli_divergence(p + t, p) * static_cast<double>(n)) <=
           epsilon;
  };
  double hi = 1.0 - p;
  if (!reached(hi)) return hi;  // even certainty cannot reach epsilon
  double lo = 0.0;
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    if (reached(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Same contract solved in log space with the divergence logs hoisted out of
/// the loop; used on the hot path inside n_vac_upper. Agrees with the exact
/// variant to the bisection tolerance.
double deviation_from_log(double p, std::int64_t n, double log_eps) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  if (log_eps >= 0.0) return 0.0;
  const double need = -log_eps / static_cast<double>(n);
  const double log_q = std::log(p);
  const double log_1q = std::log1p(-p);
  const auto excess = [&](double t) {
    const double v = p + t;
    if (v >= 1.0) return -log_q - need;
    if (v <= p) return -need;
    return v * (std::log(v) - log_q) + (1.0 - v) * (std::log1p(-v) - log_1q) - need;
  };
  double hi = 1.0 - p;
  if (excess(hi) < 0.0) return hi;  // even certainty cannot reach epsilon
  double lo = 0.0;
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Deviation taken conservatively over the admissible averages (0, p_bar]:
/// the bound only caps the true average, so the result is the max of the
/// deviation over a 50-point grid. Grid points where the deviation at p_bar
/// already suffices are skipped with a single divergence evaluation.
double conservative_deviation(double p_bar, std::int64_t n, double log_eps) {
  double best = deviation_from_log(p_bar, n, log_eps);
  if (p_bar <= 0.0 || log_eps >= 0.0) return best;
  const double need = -log_eps / static_cast<double>(n);
  for (int i = 1; i < kAverageGridPoints; ++i) {
    const double p_i = p_bar * i / kAverageGridPoints;
    if (p_i <= 0.0) continue;
    if (p_i + best >= 1.0) continue;  // t(p_i) <= 1 - p_i <= current best
    if (bernoulli_divergence(p_i + best, p_i) >= need) continue;
    best = std::max(best, deviation_from_log(p_i, n, log_eps));
  }
  return best;
}

struct TableKey {
  std::uint64_t p_bits;
  std::uint64_t eps_bits;
  bool operator==(const TableKey&) const = default;
};

struct TableKeyHash {
  std::size_t operator()(const TableKey& k) const {
    std::uint64_t h = k.p_bits * 0x9e3779b97f4a7c15ULL;
    h ^= k.eps_bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// prefix[i] = max over 1 <= k <= i+1 of k * conservative_deviation(k).
struct DeviationTable {
  std::vector<double> prefix;
};

/// Memoized per (p_bar, epsilon); the scan over the slot count is a prefix
/// maximum, so one table serves every photon threshold at the same source.
double max_count_deviation(double p_bar, double epsilon, int max_count) {
  thread_local std::unordered_map<TableKey, DeviationTable, TableKeyHash> tables;
  if (tables.size() > 512) tables.clear();
  TableKey key{};
  std::memcpy(&key.p_bits, &p_bar, sizeof key.p_bits);
  std::memcpy(&key.eps_bits, &epsilon, sizeof key.eps_bits);
  DeviationTable& tab = tables[key];
  const double log_eps = std::log(epsilon);
  double running = tab.prefix.empty() ? 0.0 : tab.prefix.back();
  for (int n = static_cast<int>(tab.prefix.size()) + 1; n <= max_count; ++n) {
    running = std::max(running, n * conservative_deviation(p_bar, n, log_eps));
    tab.prefix.push_back(running);
  }
  return tab.prefix[max_count - 1];
}

PhaseErrorBound assemble_phase_error(double term_src, double q, double numerator,
                                     int l_pulses, double nv, int nu_used) {
  PhaseErrorBound out;
  out.term_src = term_src / q;
  out.n_vac_upper = nv;
  out.nu_th_used = nu_used;
  if (term_src > q) {
    out.e_ph = 0.5;
    out.capped = true;
    return out;
  }
  const double frac = term_src / q;
  const double raw = frac + (1.0 - frac) * numerator / (l_pulses - 1);
  out.e_ph = std::min(raw, 0.5);
  out.capped = raw > 0.5;
  return out;
}

}  // namespace

bool VacuumBounds::valid() const {
  return p_l0 >= 0.0 && p_l0 <= p_u0 && p_u0 <= 1.0 && p_l1 >= 0.0 &&
         p_l1 <= p_u1 && p_u1 <= 1.0;
}

double binary_entropy(double x) {
  require_probability(x, "binary_entropy: x");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double poisson_tail(double mean, int nu_th) {
  if (!(mean >= 0.0)) fail_domain("poisson_tail: mean must be >= 0");
  if (nu_th < 0) fail_domain("poisson_tail: nu_th must be >= 0");
  if (nu_th > kMaxPoissonThreshold) fail_config("poisson_tail: nu_th too large");
  if (mean == 0.0) return 0.0;

  if (mean < nu_th + 1) {
    // Terms are strictly decreasing from the first tail term; sum upward.
    double term = std::exp(-mean + (nu_th + 1) * std::log(mean) - std::lgamma(nu_th + 2.0));
    double sum = 0.0;
    for (std::int64_t n = nu_th + 1; term > 0.0; ) {
      sum += term;
      ++n;
      term *= mean / static_cast<double>(n);
      if (term <= sum * 1e-18) break;
    }
    return std::min(sum, 1.0);
  }

  // Large tail: accumulate the complement in log space and subtract.
  double log_term = -mean;
  double log_cdf = log_term;
  for (int n = 1; n <= nu_th; ++n) {
    log_term += std::log(mean / n);
    const double hi = std::max(log_cdf, log_term);
    log_cdf = hi + std::log1p(std::exp(std::min(log_cdf, log_term) - hi));
  }
  if (log_cdf >= 0.0) return 0.0;
  return std::clamp(-std::expm1(log_cdf), 0.0, 1.0);
}

SuperpositionVacuum superposition_vacuum(double p0, double p1, double d) {
  require_probability(p0, "superposition_vacuum: p0");
  require_probability(p1, "superposition_vacuum: p1");
  if (!(d >= -2.0 && d <= 2.0)) fail_domain("superposition_vacuum: d must lie in [-2,2]");
  if (d == -2.0) fail_domain("superposition_vacuum: d = -2 divides by zero");
  if (d == 2.0 && p0 != p1) {
    fail_domain("superposition_vacuum: d = 2 requires p0 == p1");
  }
  const double s0 = std::sqrt(p0);
  const double s1 = std::sqrt(p1);
  SuperpositionVacuum out;
  out.d = d;
  out.p_plus = (s0 + s1) * (s0 + s1) / (2.0 + d);
  out.p_minus = d == 2.0 ? 0.0 : (s0 - s1) * (s0 - s1) / (2.0 - d);
  return out;
}

double minus_given_vacuum(double p0, double p1) {
  require_probability(p0, "minus_given_vacuum: p0");
  require_probability(p1, "minus_given_vacuum: p1");
  if (p0 + p1 <= 0.0) fail_domain("minus_given_vacuum: p0 + p1 must be positive");
  const double diff = std::sqrt(p0) - std::sqrt(p1);
  return diff * diff / (2.0 * (p0 + p1));
}

double minus_given_vacuum_upper(const VacuumBounds& b) {
  if (!b.valid()) fail_domain("minus_given_vacuum_upper: invalid vacuum bounds");
  bool any = false;
  double best = 0.0;
  for (auto [a, c] : {std::pair{b.p_u0, b.p_l1}, std::pair{b.p_l0, b.p_u1}}) {
    if (a + c <= 0.0) continue;  // 0/0 branch carries no information
    any = true;
    const double diff = std::sqrt(a) - std::sqrt(c);
    best = std::max(best, diff * diff / (a + c));
  }
  if (!any) fail_domain("minus_given_vacuum_upper: all bounds vanish");
  return 0.5 * best;
}

double chernoff_epsilon(double p_ave, double t, std::int64_t n) {
  if (!(p_ave > 0.0 && p_ave < 1.0)) {
    fail_domain("chernoff_epsilon: p_ave must lie in (0,1)");
  }
  if (!(t >= 0.0 && t <= 1.0 - p_ave)) {
    fail_domain("chernoff_epsilon: t must lie in [0, 1-p_ave]");
  }
  if (n < 1) fail_domain("chernoff_epsilon: n must be >= 1");
  return std::exp(-bernoulli_divergence(p_ave + t, p_ave) * static_cast<double>(n));
}

double chernoff_deviation(double p_ave_upper, std::int64_t n, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    fail_domain("chernoff_deviation: epsilon must lie in (0,1]");
  }
  if (n < 1) fail_domain("chernoff_deviation: n must be >= 1");
  if (p_ave_upper < 0.0 || p_ave_upper > 1.0) {
    fail_domain("chernoff_deviation: p_ave_upper must lie in [0,1]");
  }
  // A zero average means the counted outcome never occurs; no slack needed.
  if (p_ave_upper == 0.0) return 0.0;
  return deviation_bisect_exact(p_ave_upper, n, epsilon);
}

double n_vac_upper(const SourceSpec& spec, double epsilon) {
  const auto* bounded = std::get_if<BoundedVacuum>(&spec.mode);
  if (bounded == nullptr) {
    fail_config("n_vac_upper: source mode must be BoundedVacuum");
  }
  const int l_pulses = spec.pulses_per_block;
  if (l_pulses < 2 || l_pulses > kMaxBlockLength) {
    fail_config("n_vac_upper: block length out of range");
  }
  if (spec.nu_th < 0 || spec.nu_th > l_pulses - 2) {
    fail_config("n_vac_upper: need 0 <= nu_th <= L-2");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    fail_domain("n_vac_upper: epsilon must lie in (0,1]");
  }
  const int max_count = l_pulses - 1 - spec.nu_th;
  const double p_bar = minus_given_vacuum_upper(bounded->bounds);
  if (p_bar == 0.0) return 0.0;
  return max_count * p_bar + max_count_deviation(p_bar, epsilon, max_count);
}

PhaseErrorBound phase_error_case_i(double e_src, double q, int nu_th, int l_pulses) {
  require_probability(e_src, "phase_error_case_i: e_src");
  if (!(q > 0.0 && q <= 1.0)) fail_domain("phase_error_case_i: Q must lie in (0,1]");
  if (l_pulses < 2) fail_config("phase_error_case_i: L must be >= 2");
  if (nu_th < 0) fail_config("phase_error_case_i: nu_th must be >= 0");
  return assemble_phase_error(e_src, q, static_cast<double>(nu_th), l_pulses, 0.0, nu_th);
}

PhaseErrorBound phase_error_case_ii(const SourceSpec& spec, double epsilon, double q) {
  require_probability(spec.e_src, "phase_error_case_ii: e_src");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    fail_domain("phase_error_case_ii: epsilon must lie in (0,1]");
  }
  if (!(q > 0.0 && q <= 1.0)) fail_domain("phase_error_case_ii: Q must lie in (0,1]");
  if (!std::holds_alternative<BoundedVacuum>(spec.mode)) {
    fail_config("phase_error_case_ii: source mode must be BoundedVacuum");
  }
  if (spec.pulses_per_block < 2 || spec.pulses_per_block > kMaxBlockLength) {
    fail_config("phase_error_case_ii: block length out of range");
  }
  if (spec.nu_th < 0 || spec.nu_th > spec.pulses_per_block - 2) {
    fail_config("phase_error_case_ii: need 0 <= nu_th <= L-2");
  }
  const double p_err = spec.e_src + epsilon - spec.e_src * epsilon;
  if (p_err > q) {
    PhaseErrorBound out;
    out.e_ph = 0.5;
    out.term_src = p_err / q;
    out.n_vac_upper = 0.0;
    out.nu_th_used = spec.nu_th;
    out.capped = true;
    return out;
  }
  const double nv = n_vac_upper(spec, epsilon);
  return assemble_phase_error(p_err, q, spec.nu_th + nv, spec.pulses_per_block, nv,
                              spec.nu_th);
}

PhaseErrorBound phase_error_correlated_coherent(const SourceSpec& spec, double epsilon,
                                                double q,
                                                CoherentMeanConvention convention) {
  const auto* coherent = std::get_if<CorrelatedCoherent>(&spec.mode);
  if (coherent == nullptr) {
    fail_config("phase_error_correlated_coherent: source mode must be CorrelatedCoherent");
  }
  if (!(coherent->mu_min0 >= 0.0 && coherent->mu_min0 <= coherent->mu_max0 &&
        coherent->mu_min1 >= 0.0 && coherent->mu_min1 <= coherent->mu_max1)) {
    fail_config("phase_error_correlated_coherent: invalid mean photon ranges");
  }
  require_probability(spec.e_src, "phase_error_correlated_coherent: e_src");
  const int l_pulses = spec.pulses_per_block;
  if (l_pulses < 2 || l_pulses > kMaxBlockLength) {
    fail_config("phase_error_correlated_coherent: block length out of range");
  }

  const double mu_max = std::max(coherent->mu_max0, coherent->mu_max1);
  const double mean =
      convention == CoherentMeanConvention::kBlockTotal ? l_pulses * mu_max : mu_max;
  int nu_max = 0;
  while (poisson_tail(mean, nu_max) > spec.e_src) {
    ++nu_max;
    if (nu_max >= l_pulses - 1) {
      fail_config("phase_error_correlated_coherent: photon threshold reaches L-1");
    }
  }

  SourceSpec bounded = spec;
  bounded.nu_th = nu_max;
  bounded.mode = BoundedVacuum{VacuumBounds{
      .p_u0 = std::exp(-coherent->mu_min0),
      .p_l0 = std::exp(-coherent->mu_max0),
      .p_u1 = std::exp(-coherent->mu_min1),
      .p_l1 = std::exp(-coherent->mu_max1),
  }};
  return phase_error_case_ii(bounded, epsilon, q);
}

KeyRate key_rate(double q, double e_bit, double e_ph, double f_ec, int l_pulses) {
  require_probability(q, "key_rate: Q");
  if (!(e_bit >= 0.0 && e_bit <= 0.5)) fail_domain("key_rate: e_bit must lie in [0,0.5]");
  if (!(e_ph >= 0.0 && e_ph <= 0.5)) fail_domain("key_rate: e_ph must lie in [0,0.5]");
  if (!(f_ec >= 1.0)) fail_domain("key_rate: f_EC must be >= 1");
  if (l_pulses < 2) fail_config("key_rate: L must be >= 2");
  KeyRate out;
  out.raw = q * (1.0 - f_ec * binary_entropy(e_bit) - binary_entropy(e_ph)) / l_pulses;
  out.reported = std::max(out.raw, 0.0);
  return out;
}

}  // namespace rrdps
