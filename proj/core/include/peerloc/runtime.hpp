#ifndef PEERLOC_RUNTIME_HPP
#define PEERLOC_RUNTIME_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "peerloc/baselines.hpp"
#include "peerloc/neighbor_index.hpp"
#include "peerloc/particle_filter.hpp"
#include "peerloc/scenario.hpp"

namespace peerloc {

enum class Estimator : int { kParticleFilter = 0, kGenieMl = 1, kRansac = 2 };

const char* estimator_name(Estimator e);
std::optional<Estimator> estimator_from_name(std::string_view name);

/// A node as the runtime sees it: anchors carry a known position, vehicles a
/// particle filter.
struct NodeHandle {
  int id = -1;
  NodeKind kind = NodeKind::kAnchor;
  Vec2 anchor_position;
  std::optional<FilterState> filter;  ///< engaged for mobiles only
};

struct BroadcastMessage {
  int sender = -1;
  int t = 0;  ///< step the payload was produced at
  Vec2 position;
};

/// Broadcast transport between nodes: estimates published at the end of one
/// epoch become visible at the next. The in-process implementation below is
/// the default; a lossy or delayed channel can be substituted.
class MessageBus {
 public:
  virtual ~MessageBus() = default;
  virtual void broadcast(const BroadcastMessage& message) = 0;
  /// Messages visible at step t (published at t - 1).
  virtual std::vector<BroadcastMessage> collect(int t) = 0;
};

/// Lossless instant bus. A drop hook simulates message loss; extra delay
/// holds messages back additional epochs beyond the inherent one-step lag.
class InProcessBus : public MessageBus {
 public:
  void broadcast(const BroadcastMessage& message) override;
  std::vector<BroadcastMessage> collect(int t) override;
  void set_drop_hook(std::function<bool(const BroadcastMessage&)> drop);
  void set_extra_delay(int epochs);

 private:
  std::vector<BroadcastMessage> pending_;
  std::function<bool(const BroadcastMessage&)> drop_;
  int extra_delay_ = 0;
};

struct ZDetectionRecord {
  int observer = -1;
  int neighbor = -1;
  LosIndicator z_true = LosIndicator::kNlos;
  LosIndicator z_detected = LosIndicator::kNlos;
};

struct NodeEstimateRecord {
  int node = -1;
  Vec2 true_position;
  Vec2 estimate;

  double error() const { return distance(true_position, estimate); }
};

/// Everything recorded about one epoch.
struct EpochLog {
  int t = 0;
  std::vector<Vec2> true_positions;  ///< all nodes
  /// One list per active estimator (RunConfig::estimators order), one record
  /// per mobile node.
  std::vector<std::vector<NodeEstimateRecord>> estimates;
  std::vector<ZDetectionRecord> detections;  ///< particle filter, sorted (observer, neighbor)
  std::vector<Vec2> broadcast_snapshot;      ///< estimates consumed this epoch, per mobile
  int measurement_count = 0;
  int reset_count = 0;
  int degeneracy_count = 0;
};

enum class Bootstrap : int {
  kTruePositionPrior = 0,  ///< particles seeded around the true start position
  kUniformGrid = 1,        ///< cold start, uniform over the whole grid
};

struct RunConfig {
  FilterConfig filter;  ///< particle_count 0 inherits the scenario's count
  MlConfig ml;
  RansacConfig ransac;
  std::vector<Estimator> estimators = {Estimator::kParticleFilter};
  int workers = 1;
  Bootstrap bootstrap = Bootstrap::kTruePositionPrior;
  /// Seed for run-side randomness (filter init, prediction noise, RANSAC);
  /// defaults to the scenario seed so a saved scenario replays identically.
  std::optional<std::uint64_t> seed_override;

  RunConfig() { filter.particle_count = 0; }

  int estimator_index(Estimator e) const;  ///< -1 when inactive
};

/// Steps the peer-to-peer protocol over a scenario: broadcast collection,
/// measurement delivery, per-node filtering and logging, with phase barriers
/// between them. Node filters within an epoch run in parallel when
/// config.workers > 1; results are identical for any worker count.
class Runner {
 public:
  Runner(const Scenario& scenario, const RunConfig& config);
  Runner(const Scenario& scenario, const RunConfig& config,
         std::unique_ptr<MessageBus> bus);

  /// Epoch t (must be called in order, t = 1, 2, ...).
  EpochLog step_epoch(int t);

  /// All epochs 1..n_steps.
  std::vector<EpochLog> run();

  const FilterState& filter_state(int mobile) const;
  const FilterConfig& filter_config() const { return filter_config_; }

 private:
  const Scenario& scenario_;
  RunConfig config_;
  FilterConfig filter_config_;
  LosTransition trans_;
  std::uint64_t run_seed_;
  std::unique_ptr<MessageBus> bus_;
  std::vector<NodeHandle> nodes_;
  std::vector<Rng> filter_rngs_;    ///< per mobile
  std::vector<Vec2> ml_previous_;   ///< per mobile, genie-ML track
  std::vector<Vec2> ransac_previous_;
  int next_t_ = 1;

  void publish_epoch(int t);
};

std::vector<EpochLog> run_scenario(const Scenario& scenario, const RunConfig& config);

}  // namespace peerloc

#endif  // PEERLOC_RUNTIME_HPP
