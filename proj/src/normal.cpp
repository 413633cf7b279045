#include "normal.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace clpm::normal {

namespace {

// log cdf(x); below -30 erfc is within a few hundred orders of underflow, so
// switch to the Mills-ratio asymptotic series (8 terms is exact to double there).
double log_cdf(double x) {
  if (x > -30.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -static_cast<double>(2 * k - 1) * inv_x2;
    series += term;
  }
  return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

}  // namespace

double cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double upper_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double cdf_diff(double hi, double lo) {
  if (lo > 0.0) return upper_tail(lo) - upper_tail(hi);
  if (hi < 0.0) return cdf(hi) - cdf(lo);
  // Straddles zero: both masses are at least a tail's worth, no cancellation.
  return 1.0 - upper_tail(hi) - cdf(lo);
}

double log_cdf_diff(double hi, double lo) {
  if (!(hi > lo)) return -std::numeric_limits<double>::infinity();
  // Reflect so both arguments sit on the side where the lower CDF is accurate.
  if (lo > 0.0) {
    const double h = -lo;
    const double l = -hi;
    hi = h;
    lo = l;
  }
  if (hi < 0.0) {
    const double a = log_cdf(hi);
    const double b = log_cdf(lo);
    return a + std::log1p(-std::exp(b - a));
  }
  return std::log(cdf_diff(hi, lo));
}

double truncated_log_pdf(double x, double mean, double variance, double lower, double upper) {
  if (!(x >= lower && x <= upper)) return -std::numeric_limits<double>::infinity();
  const double sd = std::sqrt(variance);
  const double z = (x - mean) / sd;
  return -0.5 * z * z - kLogSqrt2Pi - std::log(sd) -
         log_cdf_diff((upper - mean) / sd, (lower - mean) / sd);
}

}  // namespace clpm::normal
