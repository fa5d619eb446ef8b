#include "peerloc/math_util.hpp"

namespace peerloc {

double log_ndtr(double x) {
  if (x >= 0.0) {
    // Phi(x) in [0.5, 1]; go through the complementary tail for accuracy
    // near 1.
    return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
  }
  if (x > -25.0) {
    // erfc stays comfortably above the smallest normal double here.
    return std::log(0.5 * std::erfc(-x * kInvSqrt2));
  }
  // Deep lower tail: asymptotic expansion of the Mills ratio,
  //   Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8),
  // relative truncation error below 1e-11 for x <= -25.
  const double inv_x2 = 1.0 / (x * x);
  const double series =
      1.0 + inv_x2 * (-1.0 + inv_x2 * (3.0 + inv_x2 * (-15.0 + inv_x2 * 105.0)));
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

}  // namespace peerloc
