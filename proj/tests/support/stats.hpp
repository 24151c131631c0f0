#pragma once

// Small statistics helpers for the test suites.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace teststat {

/// Regularized lower incomplete gamma P(a, x), by series. Valid for x < a+1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x), by Lentz continued fraction.
/// Valid for x >= a+1.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

/// Survival function of the chi-square distribution with df degrees of
/// freedom. df == 0 is the degenerate point mass at zero.
inline double chi_square_survival(double chi2, int df) {
  if (df == 0) return chi2 <= 0.0 ? 1.0 : 0.0;
  return gamma_q(df / 2.0, chi2 / 2.0);
}

/// Pearson chi-square statistic against a uniform expectation.
inline double chi_square_uniform(const std::vector<std::int64_t>& counts,
                                 std::int64_t total) {
  const double expected = static_cast<double>(total) / counts.size();
  double chi2 = 0.0;
  for (std::int64_t c : counts) {
    const double d = c - expected;
    chi2 += d * d / expected;
  }
  return chi2;
}

}  // namespace teststat
