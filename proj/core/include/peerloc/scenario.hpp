#ifndef PEERLOC_SCENARIO_HPP
#define PEERLOC_SCENARIO_HPP

#include <cstdint>
#include <vector>

#include "peerloc/geometry.hpp"
#include "peerloc/mixture_model.hpp"
#include "peerloc/rng.hpp"

namespace peerloc {

enum class NodeKind : int { kMobile = 0, kAnchor = 1 };

enum class AnchorLayoutKind : int { kTwoRows = 0, kGrid = 1, kExplicit = 2 };

/// Where the static anchors sit. kTwoRows spreads them evenly along the two
/// horizontal grid edges, kGrid on a near-square lattice over the whole grid,
/// kExplicit takes the positions verbatim.
struct AnchorLayout {
  AnchorLayoutKind kind = AnchorLayoutKind::kTwoRows;
  std::vector<Vec2> positions;  // used when kind == kExplicit

  friend bool operator==(const AnchorLayout&, const AnchorLayout&) = default;
};

/// Full description of one synthetic world. Node ids 0..n_mobile-1 are the
/// vehicles, n_mobile..n_mobile+n_anchor-1 the anchors. Steps are unit time;
/// positions exist for t = 0..n_steps, measurements and INS readings for
/// t = 1..n_steps.
struct ScenarioConfig {
  int n_mobile = 20;
  int n_anchor = 26;
  double grid_width = 150.0;       ///< [m]
  double grid_height = 30.0;       ///< [m]
  double comm_radius = 10.0;       ///< ranging works strictly inside this [m]
  double velocity_per_step = 0.2;  ///< horizontal advance per step [m]
  int n_steps = 750;
  MixtureParams params;
  double p01 = -1.0;            ///< NLOS->LOS entry probability; < 0 -> alpha/2
  double curve_amplitude = 2.0; ///< vertical sinusoid amplitude [m]
  double curve_period = 200.0;  ///< vertical sinusoid period [steps]
  std::uint64_t seed = 1;
  int particle_count = 900;     ///< default filter cloud size for this scenario
  AnchorLayout anchor_layout;

  int n_nodes() const { return n_mobile + n_anchor; }
  bool is_mobile(int node) const { return node < n_mobile; }
  double effective_p01() const { return p01 < 0.0 ? params.alpha / 2.0 : p01; }
  LosTransition transition() const {
    return transition_from_alpha(params.alpha, effective_p01());
  }
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Unordered node pair, stored with k < m.
struct NodePair {
  int k = 0;
  int m = 0;

  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// One pairwise range reading; both endpoints observe the same value.
struct RangingMeasurement {
  int t = 0;
  int k = 0;  ///< lower node id of the pair
  int m = 0;  ///< higher node id of the pair
  double theta = 0.0;  ///< measured range [m]

  friend bool operator==(const RangingMeasurement&, const RangingMeasurement&) = default;
};

/// Noisy displacement of mobile node k over the step (t-1, t].
struct InsReading {
  int t = 0;
  int k = 0;
  double dx = 0.0;
  double dy = 0.0;

  friend bool operator==(const InsReading&, const InsReading&) = default;
};

/// Synthesized truth: trajectories, node kinds and the hidden LOS/NLOS chain
/// of every pair with at least one mobile endpoint. Chains evolve every step
/// whether or not the pair is in range.
struct GroundTruth {
  ScenarioConfig config;
  std::vector<NodeKind> kinds;  ///< [node]
  std::vector<Vec2> positions;  ///< [t * n_nodes + node], t = 0..n_steps
  std::vector<NodePair> pairs;  ///< lexicographically sorted
  std::vector<std::uint8_t> z;  ///< [pair_index * n_steps + (t-1)], t >= 1

  const Vec2& position(int t, int node) const {
    return positions[static_cast<std::size_t>(t) * config.n_nodes() + node];
  }
  /// Index into pairs for (k, m) in either order; -1 when not tracked.
  int pair_index(int k, int m) const;
  LosIndicator z_state(int pair_idx, int t) const {
    return static_cast<LosIndicator>(
        z[static_cast<std::size_t>(pair_idx) * config.n_steps + (t - 1)]);
  }

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Ground truth plus the materialized measurement and INS streams, so a run
/// can be replayed from file without regeneration.
struct Scenario {
  GroundTruth truth;
  std::vector<std::vector<RangingMeasurement>> measurements;  ///< [t-1], sorted by (k, m)
  std::vector<std::vector<InsReading>> ins;                   ///< [t-1], by mobile id

  const ScenarioConfig& config() const { return truth.config; }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Anchor positions for a layout; deterministic, no randomness involved.
std::vector<Vec2> anchor_positions(const ScenarioConfig& config);

/// Node positions for t = 0..n_steps. Mobile starts are seeded uniformly over
/// the left 5% of the grid; each then advances horizontally at the configured
/// velocity with a sinusoidal vertical offset, clamped to the grid.
std::vector<Vec2> generate_trajectories(const ScenarioConfig& config);

/// All unordered pairs with at least one mobile endpoint, sorted.
std::vector<NodePair> mobile_pairs(const ScenarioConfig& config);

/// Hidden LOS/NLOS chains for the given pairs; each chain starts from the
/// stationary distribution and evolves independently per step.
std::vector<std::uint8_t> evolve_z_chains(const ScenarioConfig& config,
                                          const std::vector<NodePair>& pairs);

/// Range readings at step t: one per pair strictly within comm_radius, noise
/// drawn per the pair's current LOS state. Sorted by (k, m).
std::vector<RangingMeasurement> generate_measurements(const GroundTruth& truth,
                                                      int t);

/// INS reading of mobile k over (t-1, t]: true displacement plus independent
/// N(0, sigma_ins^2) per axis. Throws for anchor nodes.
InsReading generate_ins(const GroundTruth& truth, int k, int t);

GroundTruth generate_ground_truth(const ScenarioConfig& config);
Scenario generate_scenario(const ScenarioConfig& config);

}  // namespace peerloc

#endif  // PEERLOC_SCENARIO_HPP
