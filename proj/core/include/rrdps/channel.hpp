#pragma once

#include "rrdps/security.hpp"

namespace rrdps {

/// Fibre + detector parameters of the reference link model.
struct ChannelParams {
  double distance_km = 0.0;
  double alpha_db_per_km = 0.2;
  double eta_d = 0.15;     // detector efficiency
  double p_d = 5e-7;       // dark-count probability per gate
  double e_sym = 0.05;     // optical misalignment error
  double f_ec = 1.16;      // error-correction efficiency

  bool valid() const;
};

/// One operating point of the source: block length, signal mean photon
/// number, and the admitted range for the other bit value.
struct MuRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct OperatingPoint {
  int pulses_per_block = 128;
  double mu0 = 0.0;
  MuRange mu1;
};

/// 10^(-alpha l / 10).
double channel_transmittance(double distance_km, double alpha_db_per_km);

/// Q = (L mu0 eta_sy) e^{-L mu0 eta_sy} / 2 + L p_d, with eta_sy the product
/// of channel and detector efficiency supplied by the caller.
double detection_rate(int l_pulses, double mu0, double eta_sy, double p_d);

/// e_bit = (L mu0 eta_sy e^{-L mu0 eta_sy} e_sym / 2 + L p_d / 2) / Q.
double bit_error_rate(int l_pulses, double mu0, double eta_sy, double p_d, double e_sym);

/// Probability that an L-pulse block of mean mu per pulse carries more than
/// nu_th photons in total.
double e_src_case_i(int l_pulses, double mu, int nu_th);

/// Same, with the bit-1 mean only known to lie in mu1. The Poisson upper
/// tail at fixed nu_th grows with the mean, so the worst case is the largest
/// admitted mean.
double e_src_case_ii(int l_pulses, double mu0, MuRange mu1, int nu_th);
double e_src_case_ii(const OperatingPoint& op, int nu_th);

/// Vacuum bounds for a coherent source with exact mu0 and mu1 in a range:
/// exp(-mu) evaluated at the range ends.
VacuumBounds vacuum_bounds_case_ii(double mu0, MuRange mu1);
VacuumBounds vacuum_bounds_case_ii(const OperatingPoint& op);

/// Increase of the identical-vacuum phase-error bound when the photon
/// threshold grows by ceil(L mu_out) to cover light an intruder extracts
/// from the source.
double tha_phase_error_delta(int l_pulses, double mu_out, const SourceSpec& base,
                             double q);

}  // namespace rrdps
