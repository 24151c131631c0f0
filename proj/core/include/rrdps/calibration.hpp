#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rrdps/security.hpp"

namespace rrdps {

/// Click statistics of a two-setting attenuated measurement of one bit
/// value: a beam splitter of transmittance eta1 (then eta2 < eta1) in front
/// of a threshold detector. Counts may be fractional so asymptotic records
/// can be fed in exactly.
struct DecoyRecord {
  double eta1 = 1.0;
  double eta2 = 0.5;
  double n1 = 0.0;       // emitted signals, setting 1
  double n2 = 0.0;       // emitted signals, setting 2
  double n1_vac = 0.0;   // no-click events, setting 1
  double n2_vac = 0.0;   // no-click events, setting 2
  double eta_d = 1.0;    // detector efficiency
  double p_d = 0.0;      // dark-count rate
  double delta1 = 0.0;   // finite-size slack for setting 1
  double delta2 = 0.0;   // finite-size slack for setting 2
};

/// Vacuum-probability interval for one bit value. `clamped` records that a
/// raw estimate fell outside [0,1] and was pulled back in.
struct VacuumInterval {
  double p_l = 0.0;
  double p_u = 1.0;
  bool clamped = false;
};

/// Per-pulse intensity interval from on-line monitoring.
struct IntensityInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Tap-monitor record: transmittance of the tap splitter and the monitored
/// intensity interval of every pulse, per bit value.
struct MonitorRecord {
  double eta = 0.01;
  std::vector<IntensityInterval> beta0;
  std::vector<IntensityInterval> beta1;
};

/// Inverts the two-setting click statistics into a vacuum-probability
/// interval. The slack deltas are applied in the direction that widens the
/// interval. Throws std::runtime_error when the interval is empty after
/// clamping (miscalibrated transmittances or too little data).
VacuumInterval decoy_vacuum_bounds(const DecoyRecord& rec);

/// Hoeffding deviation for a sum of n binary variables at confidence
/// epsilon: sqrt(n ln(1/epsilon) / 2).
double finite_size_slack(double n, double confidence_epsilon);

/// (1 - p_d) sum_n p(n) (1 - eta_j eta_d)^n, the no-click fraction a
/// photon-number distribution produces; used to synthesize decoy records.
double expected_vacuum_fraction(std::span<const double> pn, double eta_j,
                                double eta_d, double p_d);

/// Vacuum bounds for one bit value from monitored intensity intervals:
/// p_U = max_k exp(-eta beta_k^-), p_L = min_k exp(-eta beta_k^+).
/// beta is treated as an intensity; with amplitude readings square first.
std::pair<double, double> monitor_bounds_single(double eta,
                                                std::span<const IntensityInterval> beta);

/// Both bit values of a MonitorRecord assembled into VacuumBounds.
VacuumBounds monitor_vacuum_bounds(const MonitorRecord& rec);

/// Attenuates vacuum bounds by exp(-mu_out) to cover back-reflected probe
/// light of mean photon number mu_out.
VacuumBounds tha_adjust(const VacuumBounds& b, double mu_out);
VacuumInterval tha_adjust(const VacuumInterval& iv, double mu_out);

}  // namespace rrdps
