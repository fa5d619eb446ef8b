#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "peerloc/math_util.hpp"
#include "support/quadrature.hpp"

using namespace peerloc;

TEST_CASE("log_sum_exp basics and edge cases") {
  CHECK(log_sum_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
  CHECK(log_sum_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(log_sum_exp(kNegInf, 1.5) == 1.5);
  CHECK(log_sum_exp(1.5, kNegInf) == 1.5);
  CHECK(log_sum_exp(kNegInf, kNegInf) == kNegInf);
  // Huge magnitudes must not overflow.
  CHECK(log_sum_exp(-1e308, -1e308) == doctest::Approx(-1e308));
  CHECK(log_sum_exp(700.0, 600.0) == doctest::Approx(700.0));
}

TEST_CASE("log_normal_pdf matches the closed form") {
  // 1 / (0.05 sqrt(2 pi)) at the mean, and the 3-sigma point.
  CHECK(std::exp(log_normal_pdf(1.0, 1.0, 0.05)) ==
        doctest::Approx(7.9788456080286536).epsilon(1e-14));
  CHECK(std::exp(log_normal_pdf(1.15, 1.0, 0.05)) ==
        doctest::Approx(0.088636968238760144).epsilon(1e-14));
}

TEST_CASE("log_ndtr against high-precision reference values") {
  // Reference values computed with arbitrary-precision arithmetic.
  const struct {
    double x;
    double expected;
  } table[] = {
      {-50.0, -1254.8313611394199},
      {-37.0, -689.03058557689059},
      {-30.0, -454.32124395634320},
      {-26.0, -342.17850892992783},
      {-25.0, -316.63940800802026},
      {-20.0, -203.91715537109726},
      {-10.0, -53.231285150512471},
      {-5.0, -15.064998393988726},
      {-1.0, -1.8410216450092635},
      {-0.01, -0.70115789344437010},
      {0.0, -0.69314718055994531},
      {0.5, -0.36894641528865639},
      {1.0, -0.17275377902344989},
      {5.0, -2.8665161296376359e-7},
      {10.0, -7.6198530241605261e-24},
  };
  for (const auto& row : table) {
    CAPTURE(row.x);
    CHECK(log_ndtr(row.x) == doctest::Approx(row.expected).epsilon(1e-12));
  }
}

TEST_CASE("log_ndtr is continuous across the deep-tail branch switch") {
  const double below = log_ndtr(-25.0000001);
  const double above = log_ndtr(-24.9999999);
  CHECK(std::abs(below - above) < 1e-5);
  CHECK(below < above);  // monotone
}

TEST_CASE("ndtr integrates the standard normal density") {
  const auto phi = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
  };
  for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    const double tail = peerloc::test::integrate(phi, -12.0, x, 1e-12);
    CHECK(ndtr(x) == doctest::Approx(tail).epsilon(1e-9));
  }
}
