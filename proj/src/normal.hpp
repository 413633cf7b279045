#pragma once

namespace clpm::normal {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Standard normal CDF via erfc.
double cdf(double x);

/// Upper tail 1 - cdf(x), without cancellation for large x.
double upper_tail(double x);

/// cdf(hi) - cdf(lo) for lo <= hi, using whichever tail keeps both terms small.
double cdf_diff(double hi, double lo);

/// log(cdf(hi) - cdf(lo)); stays finite deep in either tail.
double log_cdf_diff(double hi, double lo);

/// Log-density of N(mean, variance) truncated to [lower, upper], evaluated at x.
/// Returns -inf outside the support.
double truncated_log_pdf(double x, double mean, double variance, double lower, double upper);

}  // namespace clpm::normal
