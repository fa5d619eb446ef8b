#ifndef PEERLOC_MATH_UTIL_HPP
#define PEERLOC_MATH_UTIL_HPP

#include <cmath>
#include <limits>
#include <utility>

namespace peerloc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// log(exp(a) + exp(b)); safe when either or both operands are -inf.
inline double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;  // covers the both--inf case as well
  return a + std::log1p(std::exp(b - a));
}

/// Log-density of N(mean, sigma^2) at x.
inline double log_normal_pdf(double x, double mean, double sigma) {
  const double r = (x - mean) / sigma;
  return -0.5 * r * r - std::log(sigma) - kLogSqrt2Pi;
}

/// Standard normal CDF.
inline double ndtr(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

/// log of the standard normal CDF, stable over the whole double range
/// (plain log(ndtr(x)) underflows to -inf below x ~ -37).
double log_ndtr(double x);

}  // namespace peerloc

#endif  // PEERLOC_MATH_UTIL_HPP
