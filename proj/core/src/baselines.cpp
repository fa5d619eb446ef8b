#include "peerloc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "peerloc/math_util.hpp"

namespace peerloc {

namespace {

/// Piecewise-linear table of the per-neighbor log-mixture as a function of
/// distance; lets the coarse lattice pass reuse evaluations across candidate
/// positions. The step resolves the LOS ridge (sigma_los / 4).
struct RangeTable {
  double d0 = 0.0;
  double inv_step = 0.0;
  std::vector<double> values;

  double eval(double d) const {
    const double u = (d - d0) * inv_step;
    if (u <= 0.0) return values.front();
    const auto i = static_cast<std::size_t>(u);
    if (i + 1 >= values.size()) return values.back();
    const double f = u - static_cast<double>(i);
    return values[i] + f * (values[i + 1] - values[i]);
  }
};

double log_mixture(const ObservationModel& model, double log_alpha,
                   double log_beta, double theta, double d) {
  return log_sum_exp(log_alpha + model.log_los(theta, d),
                     log_beta + model.log_nlos(theta, d));
}

struct BestCandidate {
  double objective = kNegInf;
  double tie_d2 = std::numeric_limits<double>::infinity();
  Vec2 position;

  void consider(const Vec2& p, double obj, const Vec2& tie_ref) {
    const double d2 = squared_distance(p, tie_ref);
    if (obj > objective || (obj == objective && d2 < tie_d2)) {
      objective = obj;
      tie_d2 = d2;
      position = p;
    }
  }
};

std::optional<Vec2> trilaterate(const NeighborRange& a, const NeighborRange& b,
                                const NeighborRange& c) {
  const double a11 = 2.0 * (b.position.x - a.position.x);
  const double a12 = 2.0 * (b.position.y - a.position.y);
  const double a21 = 2.0 * (c.position.x - a.position.x);
  const double a22 = 2.0 * (c.position.y - a.position.y);
  const double na = squared_norm(a.position);
  const double r1 = a.theta * a.theta - na;
  const double b1 = b.theta * b.theta - squared_norm(b.position) - r1;
  const double b2 = c.theta * c.theta - squared_norm(c.position) - r1;
  const double det = a11 * a22 - a12 * a21;
  if (std::abs(det) < 1e-9) return std::nullopt;  // collinear sample
  // Note the sign: moving the squared-range terms across gives
  //   A p = [|pb|^2 - |pa|^2 + ra^2 - rb^2, ...], folded into b1/b2 above.
  return Vec2{(-b1 * a22 + b2 * a12) / det, (-b2 * a11 + b1 * a21) / det};
}

}  // namespace

void MlConfig::validate() const {
  if (!(grid_resolution > 0.0)) {
    throw std::invalid_argument("grid_resolution must be positive");
  }
  if (!(search_half_width >= grid_resolution)) {
    throw std::invalid_argument("search_half_width must cover the resolution");
  }
  if (refine_rounds < 0) {
    throw std::invalid_argument("refine_rounds must be >= 0");
  }
}

double ml_objective(const Vec2& p, const std::vector<NeighborRange>& ranges,
                    const MixtureParams& params) {
  const ObservationModel model(params);
  const double log_alpha = std::log(params.alpha);
  const double log_beta = std::log1p(-params.alpha);
  double sum = 0.0;
  for (const NeighborRange& r : ranges) {
    sum += log_mixture(model, log_alpha, log_beta, r.theta, distance(p, r.position));
  }
  return sum;
}

Vec2 ml_grid_search(const std::vector<NeighborRange>& ranges,
                    const MixtureParams& params, const Vec2& center,
                    const Vec2& tie_reference, const MlConfig& config) {
  config.validate();
  if (ranges.empty()) return center;
  const ObservationModel model(params);
  const double log_alpha = std::log(params.alpha);
  const double log_beta = std::log1p(-params.alpha);

  // Coarse lattice with tabulated per-neighbor profiles.
  const double half = config.search_half_width;
  const double reach = half * 1.4142135623730951 + 1e-9;
  const double table_step = std::min(params.sigma_los / 4.0, config.grid_resolution);
  std::vector<RangeTable> tables(ranges.size());
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    const double dc = distance(center, ranges[j].position);
    RangeTable& tab = tables[j];
    tab.d0 = std::max(0.0, dc - reach - 2.0 * table_step);
    tab.inv_step = 1.0 / table_step;
    const double d1 = dc + reach + 2.0 * table_step;
    const auto count = static_cast<std::size_t>((d1 - tab.d0) / table_step) + 2;
    tab.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      tab.values[i] = log_mixture(model, log_alpha, log_beta, ranges[j].theta,
                                  tab.d0 + static_cast<double>(i) * table_step);
    }
  }

  BestCandidate best;
  const int n = static_cast<int>(std::ceil(half / config.grid_resolution));
  for (int iy = -n; iy <= n; ++iy) {
    for (int ix = -n; ix <= n; ++ix) {
      const Vec2 p{center.x + ix * config.grid_resolution,
                   center.y + iy * config.grid_resolution};
      double obj = 0.0;
      for (std::size_t j = 0; j < ranges.size(); ++j) {
        obj += tables[j].eval(distance(p, ranges[j].position));
      }
      best.consider(p, obj, tie_reference);
    }
  }
  // The winning coarse cell is re-scored exactly so refinement rounds compare
  // against the true objective.
  best.objective = ml_objective(best.position, ranges, params);

  double res = config.grid_resolution;
  for (int round = 0; round < config.refine_rounds; ++round) {
    const Vec2 c = best.position;
    const double fine = res / 5.0;
    for (int iy = -10; iy <= 10; ++iy) {
      for (int ix = -10; ix <= 10; ++ix) {
        if (ix == 0 && iy == 0) continue;  // center already scored
        const Vec2 p{c.x + ix * fine, c.y + iy * fine};
        best.consider(p, ml_objective(p, ranges, params), tie_reference);
      }
    }
    res = fine;
  }
  return best.position;
}

MlEstimate genie_ml_estimate(const std::vector<NeighborRange>& ranges,
                             const Vec2& dead_reckoned, const MixtureParams& params,
                             const MlConfig& config) {
  params.validate();
  if (ranges.empty()) {
    return {dead_reckoned, false};
  }
  return {ml_grid_search(ranges, params, dead_reckoned, dead_reckoned, config), true};
}

void RansacConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(inlier_threshold_sigmas > 0.0)) {
    throw std::invalid_argument("inlier_threshold_sigmas must be positive");
  }
  if (refine_iterations < 0) {
    throw std::invalid_argument("refine_iterations must be >= 0");
  }
}

std::optional<RansacEstimate> ransac_estimate(
    const std::vector<NeighborRange>& ranges, const MixtureParams& params,
    const RansacConfig& config, Rng& rng) {
  params.validate();
  config.validate();
  const int n = static_cast<int>(ranges.size());
  if (n < 3) return std::nullopt;

  const double threshold = config.inlier_threshold_sigmas * params.sigma_los;
  const auto inlier_stats = [&](const Vec2& p) {
    int count = 0;
    double ssr = 0.0;
    for (const NeighborRange& r : ranges) {
      const double resid = distance(p, r.position) - r.theta;
      if (std::abs(resid) < threshold) {
        ++count;
        ssr += resid * resid;
      }
    }
    return std::pair<int, double>(count, ssr);
  };

  bool found = false;
  Vec2 best_pos{};
  int best_count = -1;
  double best_ssr = std::numeric_limits<double>::infinity();
  for (int it = 0; it < config.iterations; ++it) {
    int i0 = rng.uniform_int(0, n - 1);
    int i1 = rng.uniform_int(0, n - 2);
    if (i1 >= i0) ++i1;
    int i2 = rng.uniform_int(0, n - 3);
    if (i2 >= std::min(i0, i1)) ++i2;
    if (i2 >= std::max(i0, i1)) ++i2;
    const auto candidate = trilaterate(ranges[i0], ranges[i1], ranges[i2]);
    if (!candidate) continue;
    const auto [count, ssr] = inlier_stats(*candidate);
    if (count > best_count || (count == best_count && ssr < best_ssr)) {
      best_count = count;
      best_ssr = ssr;
      best_pos = *candidate;
      found = true;
    }
  }
  if (!found) return std::nullopt;

  // Gauss-Newton refit on the consensus set.
  Vec2 p = best_pos;
  for (int it = 0; it < config.refine_iterations; ++it) {
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
    for (const NeighborRange& r : ranges) {
      const double d = distance(p, r.position);
      if (d < 1e-9) continue;
      const double resid = d - r.theta;
      if (std::abs(resid) >= threshold) continue;
      const double gx = (p.x - r.position.x) / d;
      const double gy = (p.y - r.position.y) / d;
      jtj00 += gx * gx;
      jtj01 += gx * gy;
      jtj11 += gy * gy;
      jtr0 += gx * resid;
      jtr1 += gy * resid;
    }
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    if (std::abs(det) < 1e-12) break;
    const double dx = (-jtr0 * jtj11 + jtr1 * jtj01) / det;
    const double dy = (-jtr1 * jtj00 + jtr0 * jtj01) / det;
    p.x += dx;
    p.y += dy;
    if (dx * dx + dy * dy < 1e-20) break;
  }
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return std::nullopt;
  return RansacEstimate{p, inlier_stats(p).first};
}

}  // namespace peerloc
