#ifndef PEERLOC_PARTICLE_FILTER_HPP
#define PEERLOC_PARTICLE_FILTER_HPP

#include <stdexcept>
#include <vector>

#include "peerloc/geometry.hpp"
#include "peerloc/mixture_model.hpp"
#include "peerloc/rng.hpp"
#include "peerloc/scenario.hpp"

namespace peerloc {

/// Tuning parameters for one per-node filter.
struct FilterConfig {
  int particle_count = 900;
  double ess_threshold = 0.5;         ///< resample when ESS < threshold * K
  int reset_distinct_threshold = 0;   ///< reset below this many distinct positions; 0 -> K/20
  double reset_radius = 1.0;          ///< [m]
  double init_spread = 1.0;           ///< [m]
  int belief_drop_gap = 50;           ///< drop a neighbor belief unused for more steps than this
  bool weighted_detection = true;     ///< importance-weighted LOS detection sums

  int effective_reset_threshold() const {
    return reset_distinct_threshold > 0 ? reset_distinct_threshold
                                        : std::max(2, particle_count / 20);
  }
  void validate() const;

  friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

/// Forward state of the LOS indicator chain for one (particle, neighbor)
/// pair, kept in log domain. After every measurement update the two
/// components are rescaled to sum to one; the discarded scale factor is
/// exactly the particle's weight increment for that neighbor.
struct NeighborBelief {
  double log_nlos = 0.0;
  double log_los = 0.0;
};

struct Particle {
  Vec2 position;
  double log_weight = 0.0;               ///< normalized across the cloud
  std::vector<NeighborBelief> beliefs;   ///< parallel to FilterState::neighbors
};

/// Bookkeeping for one tracked neighbor.
struct NeighborSlot {
  int node_id = -1;
  int last_update_step = 0;
};

struct FilterState {
  int node_id = -1;
  int step = 0;  ///< last completed epoch
  std::vector<Particle> particles;
  std::vector<NeighborSlot> neighbors;
  Vec2 estimate;
  /// Log normalization constant of the last measurement update, i.e. the
  /// incremental log marginal likelihood of that epoch's observations.
  double last_update_log_norm = 0.0;

  int slot_of(int neighbor_id) const;
};

/// Every particle weight reached zero during a measurement update; the
/// caller is expected to reset the filter around its last estimate.
class TotalDegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One range reading delivered to a node, with the sender's broadcast
/// position attached (previous-step estimate for vehicles, exact for anchors).
struct NeighborObservation {
  int neighbor_id = -1;
  double theta = 0.0;
  Vec2 neighbor_position;
};

/// K particles uniform in a disc of radius init_spread around the prior,
/// uniform weights, no neighbor beliefs yet.
FilterState init_filter(int node_id, const Vec2& prior, const FilterConfig& config,
                        Rng& rng);

/// K particles uniform over a rectangle (cold start without a prior).
FilterState init_filter_uniform(int node_id, const Vec2& lo, const Vec2& hi,
                                const FilterConfig& config, Rng& rng);

/// Motion update: every particle moves by the INS displacement plus fresh
/// N(0, sigma_ins^2) per axis. Weights are untouched (the proposal equals
/// the motion prior, so the factors cancel).
void predict(FilterState& state, const InsReading& ins, const MixtureParams& params,
             Rng& rng);

/// One forward step of the indicator chain for a single (particle, neighbor)
/// pair: transition mixing followed by the observation factor. Returns the
/// unnormalized updated pair; log_sum_exp of the two components is the
/// marginal likelihood increment.
NeighborBelief update_belief(const NeighborBelief& belief, double theta,
                             const Vec2& particle_pos, const Vec2& neighbor_est,
                             const LosTransition& trans, const MixtureParams& params);

/// The same chain step given precomputed observation log-likelihoods.
NeighborBelief belief_forward_step(const NeighborBelief& belief, double log_l_nlos,
                                   double log_l_los, const LosTransition& trans);

/// Propagate a belief through the transition matrix (no observation); used
/// when a neighbor was out of range for some steps.
NeighborBelief belief_mix_step(const NeighborBelief& belief, const LosTransition& trans);

/// Absorb one epoch of measurements: per neighbor, run the belief recursion
/// for every particle and add the marginal likelihood increment to the
/// particle log-weight; then normalize weights across the cloud. First-time
/// neighbors start from the stationary prior; neighbors unseen for more than
/// belief_drop_gap steps are dropped. Throws TotalDegeneracyError when all
/// weights vanish.
void measurement_update(FilterState& state, int t,
                        std::vector<NeighborObservation> observations,
                        const LosTransition& trans, const MixtureParams& params,
                        const FilterConfig& config);

/// LOS/NLOS decision for a tracked neighbor: compares the (optionally
/// importance-weighted) particle sums of the two belief components; an exact
/// tie is declared NLOS. Throws for an unknown neighbor.
LosIndicator detect_z(const FilterState& state, int neighbor_id, bool weighted = true);

/// Posterior mean position.
Vec2 estimate_position(const FilterState& state);

/// 1 / sum of squared normalized weights.
double effective_sample_size(const FilterState& state);

/// Number of exactly distinct particle positions.
int distinct_position_count(const FilterState& state);

/// Systematic resampling to uniform weights when the effective sample size
/// drops below ess_threshold * K. Beliefs travel with their particles.
/// Returns true when a resample happened.
bool maybe_resample(FilterState& state, const FilterConfig& config, Rng& rng);

/// Redraw the cloud uniformly in a disc of reset_radius around the current
/// estimate when fewer than the threshold particle positions are distinct.
/// Weights become uniform and neighbor beliefs restart from the stationary
/// prior. Returns true when a reset happened.
bool maybe_reset(FilterState& state, const FilterConfig& config,
                 const MixtureParams& params, Rng& rng);

/// Unconditional reset around an explicit center (degeneracy recovery).
void force_reset(FilterState& state, const Vec2& center, const FilterConfig& config,
                 const MixtureParams& params, Rng& rng);

}  // namespace peerloc

#endif  // PEERLOC_PARTICLE_FILTER_HPP
