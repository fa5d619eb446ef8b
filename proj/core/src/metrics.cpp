#include "peerloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace peerloc {

std::vector<double> error_cdf(std::span<const double> errors,
                              std::span<const double> thresholds) {
  if (errors.empty()) {
    throw std::invalid_argument("error_cdf: empty error list");
  }
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (double th : thresholds) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), th);
    out.push_back(static_cast<double>(it - sorted.begin()) /
                  static_cast<double>(sorted.size()));
  }
  return out;
}

DetectionStats detection_probability(std::span<const LosIndicator> truth,
                                     std::span<const LosIndicator> detected) {
  if (truth.size() != detected.size()) {
    throw std::invalid_argument("detection_probability: stream length mismatch");
  }
  DetectionStats stats;
  std::int64_t hits = 0;
  std::int64_t alarms = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == LosIndicator::kLos) {
      ++stats.true_los;
      if (detected[i] == LosIndicator::kLos) ++hits;
    } else {
      ++stats.true_nlos;
      if (detected[i] == LosIndicator::kLos) ++alarms;
    }
  }
  if (stats.true_los > 0) {
    stats.p_d = static_cast<double>(hits) / static_cast<double>(stats.true_los);
  }
  if (stats.true_nlos > 0) {
    stats.false_alarm =
        static_cast<double>(alarms) / static_cast<double>(stats.true_nlos);
  }
  return stats;
}

double mean(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("mean of empty range");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double PolyFit::operator()(double x) const {
  const double u = (x - offset) * scale;
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    acc = acc * u + *it;
  }
  return acc;
}

PolyFit polyfit(std::span<const double> xs, std::span<const double> ys, int degree) {
  if (degree < 0) throw std::invalid_argument("polyfit: negative degree");
  if (xs.size() != ys.size() || xs.size() <= static_cast<std::size_t>(degree)) {
    throw std::invalid_argument("polyfit: need more points than the degree");
  }
  PolyFit fit;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  fit.offset = 0.5 * (*lo + *hi);
  fit.scale = *hi > *lo ? 2.0 / (*hi - *lo) : 1.0;

  // Normal equations on the normalized abscissa; fine for degree <= ~10.
  const int n = degree + 1;
  std::vector<double> gram(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> rhs(n, 0.0);
  std::vector<double> powers(2 * degree + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = (xs[i] - fit.offset) * fit.scale;
    double p = 1.0;
    for (int j = 0; j <= 2 * degree; ++j) {
      powers[j] = p;
      p *= u;
    }
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) gram[r * n + c] += powers[r + c];
      rhs[r] += powers[r] * ys[i];
    }
  }

  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(gram[r * n + col]) > std::abs(gram[pivot * n + col])) pivot = r;
    }
    if (std::abs(gram[pivot * n + col]) < 1e-12) {
      throw std::runtime_error("polyfit: singular normal equations");
    }
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(gram[pivot * n + c], gram[col * n + c]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = gram[r * n + col] / gram[col * n + col];
      for (int c = col; c < n; ++c) gram[r * n + c] -= f * gram[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  fit.coefficients.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= gram[r * n + c] * fit.coefficients[c];
    fit.coefficients[r] = acc / gram[r * n + r];
  }
  return fit;
}

}  // namespace peerloc
