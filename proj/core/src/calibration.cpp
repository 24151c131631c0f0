#include "rrdps/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rrdps {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

double clamp01(double x, bool& clamped) {
  if (x < 0.0 || x > 1.0) clamped = true;
  return std::clamp(x, 0.0, 1.0);
}

}  // namespace

VacuumInterval decoy_vacuum_bounds(const DecoyRecord& rec) {
  require(rec.eta2 > 0.0 && rec.eta2 < rec.eta1 && rec.eta1 <= 1.0,
          "decoy_vacuum_bounds: need 0 < eta2 < eta1 <= 1");
  require(rec.eta_d > 0.0 && rec.eta_d <= 1.0,
          "decoy_vacuum_bounds: eta_d must lie in (0,1]");
  require(rec.p_d >= 0.0 && rec.p_d < 1.0, "decoy_vacuum_bounds: p_d must lie in [0,1)");
  require(rec.n1 > 0.0 && rec.n2 > 0.0, "decoy_vacuum_bounds: empty record");
  require(rec.n1_vac >= 0.0 && rec.n1_vac <= rec.n1 && rec.n2_vac >= 0.0 &&
              rec.n2_vac <= rec.n2,
          "decoy_vacuum_bounds: vacuum counts out of range");
  require(rec.delta1 >= 0.0 && rec.delta2 >= 0.0,
          "decoy_vacuum_bounds: slack must be >= 0");

  const double a1 = 1.0 - rec.eta_d * rec.eta1;
  const double a2 = 1.0 - rec.eta_d * rec.eta2;
  const double denom = rec.eta_d * (rec.eta2 - rec.eta1) * (1.0 - rec.p_d);

  // Upper bound: a larger no-click count can only raise it, so add the slack.
  const double f1_up = std::min(rec.n1_vac + rec.delta1, rec.n1) / rec.n1;
  const double f2_up = std::min(rec.n2_vac + rec.delta2, rec.n2) / rec.n2;
  const double p_u_raw = std::min(f1_up, f2_up) / (1.0 - rec.p_d);

  // Lower bound: the setting-1 fraction enters with positive weight and the
  // setting-2 fraction with negative weight, so shift them apart.
  const double f1_lo = std::max(rec.n1_vac - rec.delta1, 0.0) / rec.n1;
  const double f2_hi = std::min(rec.n2_vac + rec.delta2, rec.n2) / rec.n2;
  const double p_l_raw = (a1 * f2_hi - a2 * f1_lo) / denom;

  VacuumInterval out;
  out.p_u = clamp01(p_u_raw, out.clamped);
  out.p_l = clamp01(p_l_raw, out.clamped);
  if (out.p_l > out.p_u) {
    throw std::runtime_error(
        "decoy_vacuum_bounds: inconsistent record (lower bound above upper)");
  }
  return out;
}

double finite_size_slack(double n, double confidence_epsilon) {
  require(n >= 1.0, "finite_size_slack: n must be >= 1");
  require(confidence_epsilon > 0.0 && confidence_epsilon < 1.0,
          "finite_size_slack: epsilon must lie in (0,1)");
  return std::sqrt(n * std::log(1.0 / confidence_epsilon) / 2.0);
}

double expected_vacuum_fraction(std::span<const double> pn, double eta_j,
                                double eta_d, double p_d) {
  require(eta_j >= 0.0 && eta_j <= 1.0, "expected_vacuum_fraction: eta_j in [0,1]");
  require(eta_d >= 0.0 && eta_d <= 1.0, "expected_vacuum_fraction: eta_d in [0,1]");
  require(p_d >= 0.0 && p_d <= 1.0, "expected_vacuum_fraction: p_d in [0,1]");
  double total = 0.0;
  for (double p : pn) {
    require(p >= 0.0, "expected_vacuum_fraction: negative probability");
    total += p;
  }
  require(std::abs(total - 1.0) < 1e-12,
          "expected_vacuum_fraction: distribution must sum to 1");
  const double keep = 1.0 - eta_j * eta_d;
  double sum = 0.0;
  double power = 1.0;
  for (double p : pn) {
    sum += p * power;
    power *= keep;
  }
  return (1.0 - p_d) * sum;
}

std::pair<double, double> monitor_bounds_single(
    double eta, std::span<const IntensityInterval> beta) {
  require(eta > 0.0 && eta < 1.0, "monitor_bounds_single: eta must lie in (0,1)");
  require(!beta.empty(), "monitor_bounds_single: no monitored pulses");
  double p_u = 0.0;
  double p_l = 1.0;
  for (const auto& iv : beta) {
    require(iv.lo >= 0.0 && iv.lo <= iv.hi, "monitor_bounds_single: invalid interval");
    p_u = std::max(p_u, std::exp(-eta * iv.lo));
    p_l = std::min(p_l, std::exp(-eta * iv.hi));
  }
  return {p_u, p_l};
}

VacuumBounds monitor_vacuum_bounds(const MonitorRecord& rec) {
  const auto [u0, l0] = monitor_bounds_single(rec.eta, rec.beta0);
  const auto [u1, l1] = monitor_bounds_single(rec.eta, rec.beta1);
  return VacuumBounds{.p_u0 = u0, .p_l0 = l0, .p_u1 = u1, .p_l1 = l1};
}

VacuumBounds tha_adjust(const VacuumBounds& b, double mu_out) {
  require(mu_out >= 0.0, "tha_adjust: mu_out must be >= 0");
  const double f = std::exp(-mu_out);
  return VacuumBounds{
      .p_u0 = f * b.p_u0, .p_l0 = f * b.p_l0, .p_u1 = f * b.p_u1, .p_l1 = f * b.p_l1};
}

VacuumInterval tha_adjust(const VacuumInterval& iv, double mu_out) {
  require(mu_out >= 0.0, "tha_adjust: mu_out must be >= 0");
  const double f = std::exp(-mu_out);
  return VacuumInterval{.p_l = f * iv.p_l, .p_u = f * iv.p_u, .clamped = iv.clamped};
}

}  // namespace rrdps
