#pragma once

#include <cstdint>
#include <variant>

namespace rrdps {

/// Upper/lower bounds on the vacuum-emission probability per bit value.
/// Invariant: 0 <= p_La <= p_Ua <= 1 for a in {0,1}.
struct VacuumBounds {
  double p_u0 = 1.0;
  double p_l0 = 1.0;
  double p_u1 = 1.0;
  double p_l1 = 1.0;

  bool valid() const;
};

struct IdenticalVacuum {};

struct BoundedVacuum {
  VacuumBounds bounds;
};

/// Per-pulse mean photon numbers known only up to a range per bit value.
struct CorrelatedCoherent {
  double mu_min0 = 0.0;
  double mu_max0 = 0.0;
  double mu_min1 = 0.0;
  double mu_max1 = 0.0;
};

using SourceMode = std::variant<IdenticalVacuum, BoundedVacuum, CorrelatedCoherent>;

/// What the sender guarantees about one L-pulse block: at most nu_th photons
/// in total except with probability e_src, plus one of three vacuum models.
struct SourceSpec {
  int pulses_per_block = 2;  // L
  int nu_th = 0;
  double e_src = 0.0;
  SourceMode mode = IdenticalVacuum{};
};

/// Vacuum-emission probabilities of the +/- superposition of the two
/// bit-conditioned states, with overlap parameter d in [-2, 2].
struct SuperpositionVacuum {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double d = 0.0;
};

/// One inverted Chernoff query: epsilon = exp(-D(p+t || p) * N) at the
/// returned deviation t.
struct ChernoffQuery {
  double p_ave_upper = 0.0;
  std::int64_t n_vacd = 1;
  double epsilon = 1.0;
  double t = 0.0;
};

/// A fully assembled phase-error-rate bound and its pieces.
struct PhaseErrorBound {
  double e_ph = 0.5;
  double term_src = 0.0;     // e_src/Q (or p_err/Q)
  double n_vac_upper = 0.0;  // 0 in the identical-vacuum case
  int nu_th_used = 0;
  bool capped = false;  // bound saturated at 0.5 (point insecure)
};

/// Key rate per transmitted pulse; `reported` is clamped at zero.
struct KeyRate {
  double reported = 0.0;
  double raw = 0.0;
};

/// Binary entropy in bits, with h(0) = h(1) = 0. Throws std::domain_error
/// outside [0,1].
double binary_entropy(double x);

/// P[N > nu_th] for N ~ Poisson(mean). Stable for tails down to ~1e-300.
double poisson_tail(double mean, int nu_th);

/// p_pm = (sqrt(p0) +- sqrt(p1))^2 / (2 +- d). d = 2 is allowed only when
/// p0 == p1 (p_minus := 0); d = -2 throws.
SuperpositionVacuum superposition_vacuum(double p0, double p1, double d);

/// Probability of the minus outcome conditioned on vacuum emission:
/// (sqrt(p0) - sqrt(p1))^2 / (2 (p0 + p1)). Symmetric, in [0, 1/2].
double minus_given_vacuum(double p0, double p1);

/// Upper bound on minus_given_vacuum over the whole box described by the
/// bounds: half the larger of the two cross ratios. Throws when every bound
/// is zero.
double minus_given_vacuum_upper(const VacuumBounds& b);

/// exp(-D(p_ave + t || p_ave) * N) with D the Bernoulli relative entropy
/// (natural log). Preconditions: 0 < p_ave < 1, 0 <= t <= 1 - p_ave, N >= 1.
double chernoff_epsilon(double p_ave, double t, std::int64_t n);

/// Smallest t in [0, 1 - p_ave_upper] with chernoff_epsilon(..) <= epsilon,
/// by bisection to 1e-12 absolute; returns the full interval width when even
/// the endpoint cannot reach epsilon, and 0 when p_ave_upper == 0 (the minus
/// outcome then never occurs).
double chernoff_deviation(double p_ave_upper, std::int64_t n, double epsilon);

/// Upper bound on the number of vacuum slots measured as minus among the
/// L-1 unannounced pulses:
///   (L-1-nu_th) * p_bar_U + max_N { N * t(N) },  1 <= N <= L-1-nu_th,
/// where p_bar_U = minus_given_vacuum_upper(bounds) and t(N) is the Chernoff
/// deviation at failure probability epsilon, taken conservatively as the max
/// over a 50-point grid of admissible averages in (0, p_bar_U].
/// Requires BoundedVacuum mode, L <= 4096 and nu_th <= L-2.
double n_vac_upper(const SourceSpec& spec, double epsilon);

/// Identical vacuum probabilities for both bits: the vacuum term vanishes.
/// e_ph <= min{ e_src/Q + (1 - e_src/Q) nu_th/(L-1), 1/2 }.
PhaseErrorBound phase_error_case_i(double e_src, double q, int nu_th, int l_pulses);

/// Unequal (bounded) vacuum probabilities. p_err = e_src + eps - e_src*eps;
/// e_ph <= min{ p_err/Q + (1 - p_err/Q)(nu_th + n_vac_upper)/(L-1), 1/2 }.
PhaseErrorBound phase_error_case_ii(const SourceSpec& spec, double epsilon, double q);

/// How the block-level photon-number threshold is derived from the mean
/// photon number range of a correlated coherent source.
enum class CoherentMeanConvention {
  kBlockTotal,  // threshold from Poisson(L * mu_max)
  kPerPulse,    // threshold from Poisson(mu_max)
};

/// Correlated coherent pulses with per-bit mean photon ranges. Derives the
/// photon threshold from e_src, builds vacuum bounds as exp(-mu), and
/// assembles the bound as in the bounded-vacuum case.
PhaseErrorBound phase_error_correlated_coherent(
    const SourceSpec& spec, double epsilon, double q,
    CoherentMeanConvention convention = CoherentMeanConvention::kBlockTotal);

/// R = Q [1 - f_EC h(e_bit) - h(e_ph)] / L.
KeyRate key_rate(double q, double e_bit, double e_ph, double f_ec, int l_pulses);

}  // namespace rrdps
