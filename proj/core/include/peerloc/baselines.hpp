#ifndef PEERLOC_BASELINES_HPP
#define PEERLOC_BASELINES_HPP

#include <optional>
#include <vector>

#include "peerloc/geometry.hpp"
#include "peerloc/mixture_model.hpp"
#include "peerloc/rng.hpp"

namespace peerloc {

/// One range reading paired with the position of its far endpoint
/// (true position for the genie ML baseline, broadcast estimate for RANSAC).
struct NeighborRange {
  double theta = 0.0;
  Vec2 position;
};

struct MlConfig {
  double search_half_width = 3.0;  ///< grid extent around the dead-reckoned center [m]
  double grid_resolution = 0.05;   ///< coarse lattice spacing [m]
  int refine_rounds = 3;           ///< shrinking refinement passes after the coarse pass

  void validate() const;

  friend bool operator==(const MlConfig&, const MlConfig&) = default;
};

struct MlEstimate {
  Vec2 position;
  bool had_neighbors = false;  ///< false -> position is the dead-reckoned fallback
};

/// Mixture log-likelihood of candidate position p given the neighbor ranges.
double ml_objective(const Vec2& p, const std::vector<NeighborRange>& ranges,
                    const MixtureParams& params);

/// Maximize ml_objective over a lattice centered on `center`, then refine with
/// shrinking sub-lattices. Exact objective ties go to the candidate closer to
/// tie_reference.
Vec2 ml_grid_search(const std::vector<NeighborRange>& ranges,
                    const MixtureParams& params, const Vec2& center,
                    const Vec2& tie_reference, const MlConfig& config);

/// Per-step local maximum-likelihood position: grid search around the
/// dead-reckoned position. With no neighbors in range the dead-reckoned
/// position is returned with had_neighbors = false.
MlEstimate genie_ml_estimate(const std::vector<NeighborRange>& ranges,
                             const Vec2& dead_reckoned, const MixtureParams& params,
                             const MlConfig& config);

struct RansacConfig {
  int iterations = 200;
  double inlier_threshold_sigmas = 3.0;  ///< residual gate in units of sigma_los
  int refine_iterations = 10;            ///< Gauss-Newton passes on the consensus set

  void validate() const;

  friend bool operator==(const RansacConfig&, const RansacConfig&) = default;
};

struct RansacEstimate {
  Vec2 position;
  int inlier_count = 0;
};

/// Trilateration from random 3-subsets with consensus counting and a
/// least-squares refit on the best inlier set. Returns nothing when fewer
/// than three neighbors are available or no minimal sample is solvable.
std::optional<RansacEstimate> ransac_estimate(
    const std::vector<NeighborRange>& ranges, const MixtureParams& params,
    const RansacConfig& config, Rng& rng);

}  // namespace peerloc

#endif  // PEERLOC_BASELINES_HPP
