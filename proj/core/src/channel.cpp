#include "rrdps/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rrdps {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

bool ChannelParams::valid() const {
  return distance_km >= 0.0 && alpha_db_per_km >= 0.0 && eta_d >= 0.0 &&
         eta_d <= 1.0 && p_d >= 0.0 && p_d <= 1.0 && e_sym >= 0.0 && e_sym <= 0.5 &&
         f_ec >= 1.0;
}

double channel_transmittance(double distance_km, double alpha_db_per_km) {
  require(distance_km >= 0.0, "channel_transmittance: distance must be >= 0");
  require(alpha_db_per_km >= 0.0, "channel_transmittance: alpha must be >= 0");
  return std::pow(10.0, -alpha_db_per_km * distance_km / 10.0);
}

double detection_rate(int l_pulses, double mu0, double eta_sy, double p_d) {
  require(l_pulses >= 1, "detection_rate: L must be >= 1");
  require(mu0 >= 0.0, "detection_rate: mu0 must be >= 0");
  require(eta_sy >= 0.0 && eta_sy <= 1.0, "detection_rate: eta_sy must lie in [0,1]");
  require(p_d >= 0.0 && p_d <= 1.0, "detection_rate: p_d must lie in [0,1]");
  const double x = l_pulses * mu0 * eta_sy;
  return x * std::exp(-x) / 2.0 + l_pulses * p_d;
}

double bit_error_rate(int l_pulses, double mu0, double eta_sy, double p_d,
                      double e_sym) {
  require(e_sym >= 0.0 && e_sym <= 0.5, "bit_error_rate: e_sym must lie in [0,0.5]");
  const double q = detection_rate(l_pulses, mu0, eta_sy, p_d);
  require(q > 0.0, "bit_error_rate: detection rate vanishes");
  const double x = l_pulses * mu0 * eta_sy;
  return (x * std::exp(-x) * e_sym / 2.0 + l_pulses * p_d / 2.0) / q;
}

double e_src_case_i(int l_pulses, double mu, int nu_th) {
  require(l_pulses >= 1, "e_src_case_i: L must be >= 1");
  require(mu >= 0.0, "e_src_case_i: mu must be >= 0");
  return poisson_tail(l_pulses * mu, nu_th);
}

double e_src_case_ii(int l_pulses, double mu0, MuRange mu1, int nu_th) {
  require(mu0 >= 0.0, "e_src_case_ii: mu0 must be >= 0");
  require(mu1.lo >= 0.0 && mu1.lo <= mu1.hi, "e_src_case_ii: invalid mu1 range");
  const double gamma_max = std::max(mu0, mu1.hi);
  return poisson_tail(l_pulses * gamma_max, nu_th);
}

double e_src_case_ii(const OperatingPoint& op, int nu_th) {
  return e_src_case_ii(op.pulses_per_block, op.mu0, op.mu1, nu_th);
}

VacuumBounds vacuum_bounds_case_ii(double mu0, MuRange mu1) {
  require(mu0 >= 0.0, "vacuum_bounds_case_ii: mu0 must be >= 0");
  require(mu1.lo >= 0.0 && mu1.lo <= mu1.hi, "vacuum_bounds_case_ii: invalid mu1 range");
  return VacuumBounds{
      .p_u0 = std::exp(-mu0),
      .p_l0 = std::exp(-mu0),
      .p_u1 = std::exp(-mu1.lo),
      .p_l1 = std::exp(-mu1.hi),
  };
}

VacuumBounds vacuum_bounds_case_ii(const OperatingPoint& op) {
  return vacuum_bounds_case_ii(op.mu0, op.mu1);
}

double tha_phase_error_delta(int l_pulses, double mu_out, const SourceSpec& base,
                             double q) {
  require(mu_out >= 0.0, "tha_phase_error_delta: mu_out must be >= 0");
  const int extra = static_cast<int>(std::ceil(l_pulses * mu_out));
  const PhaseErrorBound before =
      phase_error_case_i(base.e_src, q, base.nu_th, l_pulses);
  const PhaseErrorBound after =
      phase_error_case_i(base.e_src, q, base.nu_th + extra, l_pulses);
  return after.e_ph - before.e_ph;
}

}  // namespace rrdps
