#include "peerloc/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "peerloc/parallel.hpp"

namespace peerloc {

const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::kParticleFilter: return "pf";
    case Estimator::kGenieMl: return "genie-ml";
    case Estimator::kRansac: return "ransac";
  }
  return "?";
}

std::optional<Estimator> estimator_from_name(std::string_view name) {
  if (name == "pf") return Estimator::kParticleFilter;
  if (name == "genie-ml") return Estimator::kGenieMl;
  if (name == "ransac") return Estimator::kRansac;
  return std::nullopt;
}

void InProcessBus::broadcast(const BroadcastMessage& message) {
  if (drop_ && drop_(message)) return;
  pending_.push_back(message);
}

std::vector<BroadcastMessage> InProcessBus::collect(int t) {
  const int due = t - 1 - extra_delay_;
  std::vector<BroadcastMessage> visible;
  std::vector<BroadcastMessage> keep;
  for (const BroadcastMessage& m : pending_) {
    if (m.t == due) {
      visible.push_back(m);
    } else if (m.t > due) {
      keep.push_back(m);
    }
    // anything older has expired
  }
  pending_ = std::move(keep);
  return visible;
}

void InProcessBus::set_drop_hook(std::function<bool(const BroadcastMessage&)> drop) {
  drop_ = std::move(drop);
}

void InProcessBus::set_extra_delay(int epochs) {
  extra_delay_ = epochs < 0 ? 0 : epochs;
}

int RunConfig::estimator_index(Estimator e) const {
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    if (estimators[i] == e) return static_cast<int>(i);
  }
  return -1;
}

Runner::Runner(const Scenario& scenario, const RunConfig& config)
    : Runner(scenario, config, std::make_unique<InProcessBus>()) {}

Runner::Runner(const Scenario& scenario, const RunConfig& config,
               std::unique_ptr<MessageBus> bus)
    : scenario_(scenario), config_(config), bus_(std::move(bus)) {
  const ScenarioConfig& sc = scenario.config();
  sc.validate();
  if (config_.estimators.empty()) {
    throw std::invalid_argument("at least one estimator required");
  }
  filter_config_ = config_.filter;
  if (filter_config_.particle_count <= 0) {
    filter_config_.particle_count = sc.particle_count;
  }
  filter_config_.validate();
  config_.ml.validate();
  config_.ransac.validate();
  if (config_.workers < 1) config_.workers = 1;
  trans_ = sc.transition();
  run_seed_ = config_.seed_override.value_or(sc.seed);

  nodes_.resize(sc.n_nodes());
  for (int id = 0; id < sc.n_nodes(); ++id) {
    nodes_[id].id = id;
    nodes_[id].kind = scenario.truth.kinds[id];
    if (nodes_[id].kind == NodeKind::kAnchor) {
      nodes_[id].anchor_position = scenario.truth.position(0, id);
    }
  }
  ml_previous_.resize(sc.n_mobile);
  ransac_previous_.resize(sc.n_mobile);
  filter_rngs_.reserve(sc.n_mobile);
  for (int k = 0; k < sc.n_mobile; ++k) {
    filter_rngs_.emplace_back(run_seed_, StreamTag::kFilter,
                              static_cast<std::uint64_t>(k));
    Rng init_rng(run_seed_, StreamTag::kFilterInit, static_cast<std::uint64_t>(k));
    const Vec2 start = scenario.truth.position(0, k);
    if (config_.bootstrap == Bootstrap::kTruePositionPrior) {
      nodes_[k].filter = init_filter(k, start, filter_config_, init_rng);
    } else {
      nodes_[k].filter = init_filter_uniform(
          k, {0.0, 0.0}, {sc.grid_width, sc.grid_height}, filter_config_, init_rng);
    }
    ml_previous_[k] = start;
    ransac_previous_[k] = start;
  }
  publish_epoch(0);
}

void Runner::publish_epoch(int t) {
  const ScenarioConfig& sc = scenario_.config();
  for (int k = 0; k < sc.n_mobile; ++k) {
    bus_->broadcast({k, t, nodes_[k].filter->estimate});
  }
  for (int a = sc.n_mobile; a < sc.n_nodes(); ++a) {
    bus_->broadcast({a, t, nodes_[a].anchor_position});
  }
}

const FilterState& Runner::filter_state(int mobile) const {
  if (mobile < 0 || mobile >= scenario_.config().n_mobile) {
    throw std::out_of_range("not a mobile node");
  }
  return *nodes_[mobile].filter;
}

EpochLog Runner::step_epoch(int t) {
  const ScenarioConfig& sc = scenario_.config();
  if (t != next_t_) {
    throw std::logic_error("epochs must be stepped in order");
  }
  if (t < 1 || t > sc.n_steps) {
    throw std::out_of_range("epoch out of range");
  }
  const int n_mobile = sc.n_mobile;
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

  // Phase 1: collect last epoch's broadcasts.
  std::vector<Vec2> snapshot(sc.n_nodes(), Vec2{kNan, kNan});
  std::vector<char> snapshot_valid(sc.n_nodes(), 0);
  for (const BroadcastMessage& m : bus_->collect(t)) {
    snapshot[m.sender] = m.position;
    snapshot_valid[m.sender] = 1;
  }

  // Phase 2: this epoch's measurements and INS readings (immutable).
  const std::vector<RangingMeasurement>& measurements = scenario_.measurements[t - 1];
  const std::vector<InsReading>& ins = scenario_.ins[t - 1];

  // Broadcast estimates are one epoch old while the fleet keeps moving, so
  // receivers advance vehicle estimates by the published nominal per-step
  // displacement (horizontal speed plus the common curve profile) before
  // ranging against them; sigma_los is small enough that skipping this would
  // bias every vehicle-to-vehicle reading by several sigma.
  Vec2 nominal_advance{sc.velocity_per_step, 0.0};
  if (sc.curve_amplitude != 0.0) {
    nominal_advance.y = sc.curve_amplitude *
                        (std::sin(kTwoPi * t / sc.curve_period) -
                         std::sin(kTwoPi * (t - 1) / sc.curve_period));
  }

  // Group the observations each mobile node sees this epoch.
  std::vector<std::vector<NeighborObservation>> pf_obs(n_mobile);
  std::vector<std::vector<NeighborRange>> genie_ranges(n_mobile);
  std::vector<std::vector<NeighborRange>> ransac_ranges(n_mobile);
  const bool want_ml = config_.estimator_index(Estimator::kGenieMl) >= 0;
  const bool want_ransac = config_.estimator_index(Estimator::kRansac) >= 0;
  for (const RangingMeasurement& m : measurements) {
    for (const auto& [self, other] : {std::pair{m.k, m.m}, std::pair{m.m, m.k}}) {
      if (!sc.is_mobile(self)) continue;
      const bool other_anchor = !sc.is_mobile(other);
      if (other_anchor || snapshot_valid[other]) {
        const Vec2 pos = other_anchor ? nodes_[other].anchor_position
                                      : snapshot[other] + nominal_advance;
        pf_obs[self].push_back({other, m.theta, pos});
      }
      if (want_ml) {
        genie_ranges[self].push_back({m.theta, scenario_.truth.position(t, other)});
      }
      if (want_ransac) {
        const Vec2 pos = other_anchor
                             ? nodes_[other].anchor_position
                             : ransac_previous_[other] + nominal_advance;
        ransac_ranges[self].push_back({m.theta, pos});
      }
    }
  }

  // Phase 3: every node filter advances independently.
  EpochLog log;
  log.t = t;
  log.measurement_count = static_cast<int>(measurements.size());
  log.estimates.assign(config_.estimators.size(), {});
  for (auto& v : log.estimates) v.resize(n_mobile);
  log.broadcast_snapshot.assign(snapshot.begin(), snapshot.begin() + n_mobile);

  std::vector<std::vector<ZDetectionRecord>> detections(n_mobile);
  std::vector<Vec2> ml_next(ml_previous_);
  std::vector<Vec2> ransac_next(ransac_previous_);
  std::vector<char> reset_flags(n_mobile, 0);
  std::vector<char> degen_flags(n_mobile, 0);

  parallel_for(n_mobile, config_.workers, [&](int k) {
    const InsReading& reading = ins[k];
    for (std::size_t e = 0; e < config_.estimators.size(); ++e) {
      switch (config_.estimators[e]) {
        case Estimator::kParticleFilter: {
          FilterState& state = *nodes_[k].filter;
          Rng& rng = filter_rngs_[k];
          predict(state, reading, sc.params, rng);
          try {
            measurement_update(state, t, pf_obs[k], trans_, sc.params,
                               filter_config_);
          } catch (const TotalDegeneracyError&) {
            force_reset(state, state.estimate, filter_config_, sc.params, rng);
            degen_flags[k] = 1;
          }
          maybe_resample(state, filter_config_, rng);
          if (maybe_reset(state, filter_config_, sc.params, rng)) {
            reset_flags[k] = 1;
          }
          state.estimate = estimate_position(state);
          log.estimates[e][k] = {k, scenario_.truth.position(t, k), state.estimate};
          for (const NeighborObservation& o : pf_obs[k]) {
            const int pair = scenario_.truth.pair_index(k, o.neighbor_id);
            detections[k].push_back(
                {k, o.neighbor_id, scenario_.truth.z_state(pair, t),
                 detect_z(state, o.neighbor_id, filter_config_.weighted_detection)});
          }
          std::sort(detections[k].begin(), detections[k].end(),
                    [](const ZDetectionRecord& a, const ZDetectionRecord& b) {
                      return a.neighbor < b.neighbor;
                    });
          break;
        }
        case Estimator::kGenieMl: {
          const Vec2 dr = ml_previous_[k] + Vec2{reading.dx, reading.dy};
          ml_next[k] =
              genie_ml_estimate(genie_ranges[k], dr, sc.params, config_.ml).position;
          log.estimates[e][k] = {k, scenario_.truth.position(t, k), ml_next[k]};
          break;
        }
        case Estimator::kRansac: {
          const Vec2 dr = ransac_previous_[k] + Vec2{reading.dx, reading.dy};
          Rng rng(run_seed_, StreamTag::kRansac, static_cast<std::uint64_t>(k),
                  static_cast<std::uint64_t>(t));
          const auto est =
              ransac_estimate(ransac_ranges[k], sc.params, config_.ransac, rng);
          Vec2 next = est ? est->position : dr;
          // A diverged consensus (near-collinear minimal samples on mostly
          // NLOS data) can land arbitrarily far away; keep the track inside
          // the arena so it stays usable as a baseline instead of spiraling.
          const double margin = 2.0 * sc.comm_radius;
          if (!std::isfinite(next.x) || !std::isfinite(next.y)) next = dr;
          next.x = std::clamp(next.x, -margin, sc.grid_width + margin);
          next.y = std::clamp(next.y, -margin, sc.grid_height + margin);
          ransac_next[k] = next;
          log.estimates[e][k] = {k, scenario_.truth.position(t, k), next};
          break;
        }
      }
    }
  });

  // Phase 4: log assembly and next-epoch broadcasts (single writer).
  log.true_positions.reserve(sc.n_nodes());
  for (int id = 0; id < sc.n_nodes(); ++id) {
    log.true_positions.push_back(scenario_.truth.position(t, id));
  }
  for (int k = 0; k < n_mobile; ++k) {
    log.detections.insert(log.detections.end(), detections[k].begin(),
                          detections[k].end());
    log.reset_count += reset_flags[k];
    log.degeneracy_count += degen_flags[k];
  }
  ml_previous_ = std::move(ml_next);
  ransac_previous_ = std::move(ransac_next);
  publish_epoch(t);
  ++next_t_;
  return log;
}

std::vector<EpochLog> Runner::run() {
  std::vector<EpochLog> logs;
  logs.reserve(scenario_.config().n_steps);
  for (int t = 1; t <= scenario_.config().n_steps; ++t) {
    logs.push_back(step_epoch(t));
  }
  return logs;
}

std::vector<EpochLog> run_scenario(const Scenario& scenario, const RunConfig& config) {
  Runner runner(scenario, config);
  return runner.run();
}

}  // namespace peerloc
