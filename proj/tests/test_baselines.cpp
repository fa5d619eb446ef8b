#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "peerloc/baselines.hpp"

using namespace peerloc;

namespace {

MixtureParams params(double alpha = 0.3) {
  MixtureParams p;
  p.alpha = alpha;
  p.sigma_los = 0.05;
  p.sigma_nlos = 5.0;
  return p;
}

std::vector<NeighborRange> exact_ranges(const Vec2& truth,
                                        const std::vector<Vec2>& anchors) {
  std::vector<NeighborRange> out;
  for (const Vec2& a : anchors) out.push_back({distance(truth, a), a});
  return out;
}

}  // namespace

TEST_CASE("genie ML: noiseless trilateration recovers the position") {
  const Vec2 truth{4.3, 2.7};
  const auto ranges =
      exact_ranges(truth, {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}});
  const MlConfig cfg;
  const MlEstimate est =
      genie_ml_estimate(ranges, {4.0, 3.0}, params(1.0), cfg);
  CHECK(est.had_neighbors);
  // Final lattice resolution after three 5x refinements of 0.05 m.
  CHECK(distance(est.position, truth) < 0.05 / 125.0 * 2.0);
}

TEST_CASE("genie ML: mixture likelihood with NLOS-majority readings") {
  const Vec2 truth{5.0, 3.0};
  std::vector<NeighborRange> ranges =
      exact_ranges(truth, {{0.0, 0.0}, {10.0, 0.0}, {0.0, 8.0}, {10.0, 8.0}});
  // Two extra NLOS readings with large positive excess.
  ranges.push_back({distance(truth, {2.0, 6.0}) + 4.0, {2.0, 6.0}});
  ranges.push_back({distance(truth, {8.0, 6.0}) + 7.5, {8.0, 6.0}});
  const MlEstimate est = genie_ml_estimate(ranges, {4.6, 3.4}, params(0.5), MlConfig{});
  CHECK(distance(est.position, truth) < 0.05);
}

TEST_CASE("genie ML: single neighbor pins the range circle") {
  const Vec2 anchor{2.0, 1.0};
  const std::vector<NeighborRange> ranges{{4.0, anchor}};
  const MlEstimate est =
      genie_ml_estimate(ranges, {5.5, 1.5}, params(1.0), MlConfig{});
  // The maximizer must sit on the circle of radius theta around the anchor.
  CHECK(std::abs(distance(est.position, anchor) - 4.0) < 0.05);
}

TEST_CASE("genie ML: no neighbors falls back to dead reckoning") {
  const MlEstimate est = genie_ml_estimate({}, {1.5, -0.5}, params(), MlConfig{});
  CHECK_FALSE(est.had_neighbors);
  CHECK(est.position == Vec2{1.5, -0.5});
}

TEST_CASE("grid search tie-break prefers the tie reference") {
  // Two collinear anchors: the objective is mirror symmetric about their
  // line, so both reflections are exact maxima on a symmetric lattice.
  const Vec2 truth{3.0, 2.0};
  const Vec2 mirrored{3.0, -2.0};
  const auto ranges = exact_ranges(truth, {{0.0, 0.0}, {6.0, 0.0}});
  MlConfig cfg;
  cfg.search_half_width = 3.0;
  cfg.grid_resolution = 0.5;  // lattice around (3, 0) hits +-2 exactly
  cfg.refine_rounds = 0;
  const MixtureParams p = params(1.0);

  const Vec2 up = ml_grid_search(ranges, p, {3.0, 0.0}, {3.0, 0.4}, cfg);
  CHECK(up == truth);
  const Vec2 down = ml_grid_search(ranges, p, {3.0, 0.0}, {3.0, -0.4}, cfg);
  CHECK(down == mirrored);
  // Sanity: the two candidates really scored identically.
  CHECK(ml_objective(truth, ranges, p) == ml_objective(mirrored, ranges, p));
}

TEST_CASE("ML objective at the returned point dominates the truth point") {
  const Vec2 truth{4.1, 3.3};
  const auto ranges = exact_ranges(
      truth, {{0.0, 0.0}, {9.0, 1.0}, {2.0, 8.0}, {7.0, 7.0}});
  const MixtureParams p = params(0.7);
  const MlEstimate est = genie_ml_estimate(ranges, {4.0, 3.0}, p, MlConfig{});
  // Quantization slack: curvature is bounded by n/sigma_los^2, lattice step
  // after refinement is 4e-4.
  const double slack =
      ranges.size() * (4e-4) * (4e-4) / (p.sigma_los * p.sigma_los);
  CHECK(ml_objective(est.position, ranges, p) >=
        ml_objective(truth, ranges, p) - slack);
}

TEST_CASE("ml config validation") {
  MlConfig cfg;
  cfg.grid_resolution = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = MlConfig{};
  cfg.search_half_width = 0.01;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = MlConfig{};
  cfg.refine_rounds = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("RANSAC: all-LOS zero-noise readings give the exact position") {
  const Vec2 truth{6.0, 4.0};
  const auto ranges = exact_ranges(
      truth, {{0.0, 0.0}, {12.0, 0.0}, {0.0, 9.0}, {12.0, 9.0}, {6.0, 0.0}});
  Rng rng(1, StreamTag::kTest);
  const auto est = ransac_estimate(ranges, params(1.0), RansacConfig{}, rng);
  REQUIRE(est.has_value());
  CHECK(distance(est->position, truth) < 1e-6);
  CHECK(est->inlier_count == 5);
}

TEST_CASE("RANSAC: fewer than three neighbors yields no estimate") {
  const Vec2 truth{6.0, 4.0};
  const auto ranges = exact_ranges(truth, {{0.0, 0.0}, {12.0, 0.0}});
  Rng rng(2, StreamTag::kTest);
  CHECK_FALSE(ransac_estimate(ranges, params(), RansacConfig{}, rng).has_value());
}

TEST_CASE("RANSAC: tolerates a minority of NLOS outliers") {
  const Vec2 truth{6.0, 4.0};
  auto ranges = exact_ranges(
      truth, {{0.0, 0.0}, {12.0, 0.0}, {0.0, 9.0}, {12.0, 9.0}, {6.0, 9.0}});
  ranges.push_back({distance(truth, {3.0, 3.0}) + 6.0, {3.0, 3.0}});
  ranges.push_back({distance(truth, {9.0, 5.0}) + 2.5, {9.0, 5.0}});
  Rng rng(3, StreamTag::kTest);
  const auto est = ransac_estimate(ranges, params(), RansacConfig{}, rng);
  REQUIRE(est.has_value());
  CHECK(distance(est->position, truth) < 0.01);
  CHECK(est->inlier_count == 5);
}

TEST_CASE("RANSAC: NLOS-majority readings wreck the consensus") {
  // 2 clean readings out of 10; minimal samples almost never hit an
  // all-clean triple, and the refit chases NLOS-consistent points.
  const Vec2 truth{6.0, 4.0};
  std::vector<NeighborRange> ranges;
  Rng noise(4, StreamTag::kTest);
  const std::vector<Vec2> anchors{{0, 0}, {12, 0}, {0, 9}, {12, 9}, {6, 0},
                                  {6, 9}, {1, 4}, {11, 4}, {3, 8}, {9, 1}};
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    double theta = distance(truth, anchors[i]);
    if (i >= 2) theta += 2.0 + noise.exponential(5.0);  // clearly off-support
    ranges.push_back({theta, anchors[i]});
  }
  Rng rng(5, StreamTag::kTest);
  const auto est = ransac_estimate(ranges, params(0.15), RansacConfig{}, rng);
  REQUIRE(est.has_value());
  CHECK(distance(est->position, truth) > 0.5);
}

TEST_CASE("RANSAC: degenerate collinear-only geometry returns nothing") {
  std::vector<NeighborRange> ranges{
      {1.0, {0.0, 0.0}}, {2.0, {1.0, 0.0}}, {3.0, {2.0, 0.0}}};
  Rng rng(6, StreamTag::kTest);
  CHECK_FALSE(ransac_estimate(ranges, params(), RansacConfig{}, rng).has_value());
}
