#ifndef PEERLOC_METRICS_HPP
#define PEERLOC_METRICS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "peerloc/mixture_model.hpp"

namespace peerloc {

/// Fraction of errors <= each threshold. Thresholds may be in any order;
/// the result is parallel to them. Throws on an empty error list.
std::vector<double> error_cdf(std::span<const double> errors,
                              std::span<const double> thresholds);

struct DetectionStats {
  std::optional<double> p_d;           ///< P(detected LOS | true LOS); absent without true-LOS events
  std::optional<double> false_alarm;   ///< P(detected LOS | true NLOS)
  std::int64_t true_los = 0;
  std::int64_t true_nlos = 0;
};

/// Detection probability of the LOS state plus the companion false-alarm
/// rate, over aligned truth/detection streams (one entry per pair-step with a
/// measurement).
DetectionStats detection_probability(std::span<const LosIndicator> truth,
                                     std::span<const LosIndicator> detected);

double mean(std::span<const double> values);

/// Least-squares polynomial y ~ poly(u), u = (x - offset) * scale; the
/// abscissa normalization keeps the normal equations well conditioned for
/// the degrees used here.
struct PolyFit {
  std::vector<double> coefficients;  ///< ascending powers of u
  double offset = 0.0;
  double scale = 1.0;

  double operator()(double x) const;
};

PolyFit polyfit(std::span<const double> xs, std::span<const double> ys, int degree);

}  // namespace peerloc

#endif  // PEERLOC_METRICS_HPP
