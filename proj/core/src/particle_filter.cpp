#include "peerloc/particle_filter.hpp"

#include <algorithm>
#include <cmath>

namespace peerloc {

namespace {

struct LogTransition {
  double p11;
  double p01;
  double p10;
  double p00;

  explicit LogTransition(const LosTransition& t)
      : p11(std::log(t.p11)),
        p01(std::log(t.p01)),
        p10(std::log(1.0 - t.p11)),
        p00(std::log(1.0 - t.p01)) {}
};

NeighborBelief forward_step(const NeighborBelief& b, double log_l_nlos,
                            double log_l_los, const LogTransition& lt) {
  return {log_l_nlos + log_sum_exp(lt.p10 + b.log_los, lt.p00 + b.log_nlos),
          log_l_los + log_sum_exp(lt.p11 + b.log_los, lt.p01 + b.log_nlos)};
}

NeighborBelief stationary_prior(const MixtureParams& params) {
  return {std::log1p(-params.alpha), std::log(params.alpha)};
}

/// Mix a belief through g transition steps without observations, using the
/// closed form of the two-state matrix power: with lambda = p11 - p01,
///   P^g(i -> LOS) = pi_los + lambda^g * (1{i = LOS} - pi_los).
NeighborBelief mix_steps(const NeighborBelief& b, const LosTransition& t, int g) {
  if (g <= 0) return b;
  if (t.p01 == 0.0 && t.p11 == 1.0) return b;  // both states absorbing
  const double pi_los = stationary_distribution(t).second;
  const double decay = std::pow(t.p11 - t.p01, g);
  const double from_los = pi_los + decay * (1.0 - pi_los);  // P^g(1 -> 1)
  const double from_nlos = pi_los * (1.0 - decay);          // P^g(0 -> 1)
  const double log_los = log_sum_exp(std::log(from_los) + b.log_los,
                                     std::log(from_nlos) + b.log_nlos);
  const double log_nlos = log_sum_exp(std::log1p(-from_los) + b.log_los,
                                      std::log1p(-from_nlos) + b.log_nlos);
  return {log_nlos, log_los};
}

void redraw_cloud(FilterState& state, const Vec2& center, double radius,
                  const NeighborBelief& prior, Rng& rng) {
  const double log_uniform = -std::log(static_cast<double>(state.particles.size()));
  for (Particle& p : state.particles) {
    p.position = radius > 0.0 ? rng.in_disc(center, radius) : center;
    p.log_weight = log_uniform;
    std::fill(p.beliefs.begin(), p.beliefs.end(), prior);
  }
}

}  // namespace

void FilterConfig::validate() const {
  if (particle_count < 1) {
    throw std::invalid_argument("particle_count must be >= 1");
  }
  if (!(ess_threshold > 0.0) || !(ess_threshold <= 1.0)) {
    throw std::invalid_argument("ess_threshold must be in (0, 1]");
  }
  if (!(reset_radius > 0.0)) {
    throw std::invalid_argument("reset_radius must be positive");
  }
  if (!(init_spread >= 0.0)) {
    throw std::invalid_argument("init_spread must be >= 0");
  }
  if (belief_drop_gap < 1) {
    throw std::invalid_argument("belief_drop_gap must be >= 1");
  }
}

int FilterState::slot_of(int neighbor_id) const {
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    if (neighbors[i].node_id == neighbor_id) return static_cast<int>(i);
  }
  return -1;
}

FilterState init_filter(int node_id, const Vec2& prior, const FilterConfig& config,
                        Rng& rng) {
  config.validate();
  FilterState state;
  state.node_id = node_id;
  state.particles.resize(config.particle_count);
  const double log_uniform = -std::log(static_cast<double>(config.particle_count));
  for (Particle& p : state.particles) {
    p.position = config.init_spread > 0.0 ? rng.in_disc(prior, config.init_spread)
                                          : prior;
    p.log_weight = log_uniform;
  }
  state.estimate = estimate_position(state);
  return state;
}

FilterState init_filter_uniform(int node_id, const Vec2& lo, const Vec2& hi,
                                const FilterConfig& config, Rng& rng) {
  config.validate();
  FilterState state;
  state.node_id = node_id;
  state.particles.resize(config.particle_count);
  const double log_uniform = -std::log(static_cast<double>(config.particle_count));
  for (Particle& p : state.particles) {
    p.position = {rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    p.log_weight = log_uniform;
  }
  state.estimate = estimate_position(state);
  return state;
}

void predict(FilterState& state, const InsReading& ins, const MixtureParams& params,
             Rng& rng) {
  params.validate();
  std::normal_distribution<double> noise(0.0, params.sigma_ins);
  for (Particle& p : state.particles) {
    p.position.x += ins.dx + noise(rng.engine());
    p.position.y += ins.dy + noise(rng.engine());
  }
}

NeighborBelief belief_forward_step(const NeighborBelief& belief, double log_l_nlos,
                                   double log_l_los, const LosTransition& trans) {
  return forward_step(belief, log_l_nlos, log_l_los, LogTransition(trans));
}

NeighborBelief belief_mix_step(const NeighborBelief& belief,
                               const LosTransition& trans) {
  return mix_steps(belief, trans, 1);
}

NeighborBelief update_belief(const NeighborBelief& belief, double theta,
                             const Vec2& particle_pos, const Vec2& neighbor_est,
                             const LosTransition& trans, const MixtureParams& params) {
  const ObservationModel model(params);
  const double d = distance(particle_pos, neighbor_est);
  return forward_step(belief, model.log_nlos(theta, d), model.log_los(theta, d),
                      LogTransition(trans));
}

void measurement_update(FilterState& state, int t,
                        std::vector<NeighborObservation> observations,
                        const LosTransition& trans, const MixtureParams& params,
                        const FilterConfig& config) {
  const ObservationModel model(params);
  const LogTransition lt(trans);
  const NeighborBelief prior = stationary_prior(params);

  std::sort(observations.begin(), observations.end(),
            [](const NeighborObservation& a, const NeighborObservation& b) {
              return a.neighbor_id < b.neighbor_id;
            });

  for (const NeighborObservation& obs : observations) {
    int slot = state.slot_of(obs.neighbor_id);
    if (slot < 0) {
      slot = static_cast<int>(state.neighbors.size());
      state.neighbors.push_back({obs.neighbor_id, t});
      for (Particle& p : state.particles) p.beliefs.push_back(prior);
    } else if (t - state.neighbors[slot].last_update_step > config.belief_drop_gap) {
      // Out of range long enough that the old belief is discarded.
      for (Particle& p : state.particles) p.beliefs[slot] = prior;
    } else {
      const int mix = t - state.neighbors[slot].last_update_step - 1;
      if (mix > 0) {
        for (Particle& p : state.particles) {
          p.beliefs[slot] = mix_steps(p.beliefs[slot], trans, mix);
        }
      }
    }

    for (Particle& p : state.particles) {
      const double d = distance(p.position, obs.neighbor_position);
      const NeighborBelief updated =
          forward_step(p.beliefs[slot], model.log_nlos(obs.theta, d),
                       model.log_los(obs.theta, d), lt);
      const double increment = log_sum_exp(updated.log_nlos, updated.log_los);
      p.log_weight += increment;
      if (increment == kNegInf) {
        p.beliefs[slot] = prior;  // weight is gone; keep the belief well formed
      } else {
        p.beliefs[slot] = {updated.log_nlos - increment,
                           updated.log_los - increment};
      }
    }
    state.neighbors[slot].last_update_step = t;
  }

  // Drop beliefs of neighbors unseen for longer than the configured gap.
  std::vector<int> keep;
  for (std::size_t i = 0; i < state.neighbors.size(); ++i) {
    if (t - state.neighbors[i].last_update_step <= config.belief_drop_gap) {
      keep.push_back(static_cast<int>(i));
    }
  }
  if (keep.size() != state.neighbors.size()) {
    std::vector<NeighborSlot> slots;
    slots.reserve(keep.size());
    for (int i : keep) slots.push_back(state.neighbors[i]);
    state.neighbors = std::move(slots);
    for (Particle& p : state.particles) {
      std::vector<NeighborBelief> kept;
      kept.reserve(keep.size());
      for (int i : keep) kept.push_back(p.beliefs[i]);
      p.beliefs = std::move(kept);
    }
  }

  state.step = t;
  state.last_update_log_norm = 0.0;
  if (observations.empty()) return;  // weights already normalized

  double max_lw = kNegInf;
  for (const Particle& p : state.particles) max_lw = std::max(max_lw, p.log_weight);
  if (max_lw == kNegInf) {
    throw TotalDegeneracyError("all particle weights vanished at step " +
                               std::to_string(t));
  }
  double sum = 0.0;
  for (const Particle& p : state.particles) sum += std::exp(p.log_weight - max_lw);
  const double log_norm = max_lw + std::log(sum);
  for (Particle& p : state.particles) p.log_weight -= log_norm;
  state.last_update_log_norm = log_norm;
}

LosIndicator detect_z(const FilterState& state, int neighbor_id, bool weighted) {
  const int slot = state.slot_of(neighbor_id);
  if (slot < 0) {
    throw std::invalid_argument("detect_z: unknown neighbor " +
                                std::to_string(neighbor_id));
  }
  double los = 0.0;
  double nlos = 0.0;
  for (const Particle& p : state.particles) {
    const double w = weighted ? std::exp(p.log_weight) : 1.0;
    los += w * std::exp(p.beliefs[slot].log_los);
    nlos += w * std::exp(p.beliefs[slot].log_nlos);
  }
  return los > nlos ? LosIndicator::kLos : LosIndicator::kNlos;
}

Vec2 estimate_position(const FilterState& state) {
  Vec2 mean{};
  for (const Particle& p : state.particles) {
    const double w = std::exp(p.log_weight);
    mean.x += w * p.position.x;
    mean.y += w * p.position.y;
  }
  return mean;
}

double effective_sample_size(const FilterState& state) {
  double sum_sq = 0.0;
  for (const Particle& p : state.particles) {
    const double w = std::exp(p.log_weight);
    sum_sq += w * w;
  }
  return 1.0 / sum_sq;
}

int distinct_position_count(const FilterState& state) {
  std::vector<Vec2> pos;
  pos.reserve(state.particles.size());
  for (const Particle& p : state.particles) pos.push_back(p.position);
  std::sort(pos.begin(), pos.end(), [](const Vec2& a, const Vec2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  int distinct = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i == 0 || !(pos[i] == pos[i - 1])) ++distinct;
  }
  return distinct;
}

bool maybe_resample(FilterState& state, const FilterConfig& config, Rng& rng) {
  const int k = static_cast<int>(state.particles.size());
  if (effective_sample_size(state) >= config.ess_threshold * k) return false;

  // Systematic resampling: one uniform offset, K evenly spaced pointers.
  const double u0 = rng.uniform() / k;
  std::vector<Particle> resampled;
  resampled.reserve(k);
  double cumulative = std::exp(state.particles[0].log_weight);
  int i = 0;
  const double log_uniform = -std::log(static_cast<double>(k));
  for (int j = 0; j < k; ++j) {
    const double u = u0 + static_cast<double>(j) / k;
    while (cumulative < u && i + 1 < k) {
      ++i;
      cumulative += std::exp(state.particles[i].log_weight);
    }
    resampled.push_back(state.particles[i]);
    resampled.back().log_weight = log_uniform;
  }
  state.particles = std::move(resampled);
  return true;
}

bool maybe_reset(FilterState& state, const FilterConfig& config,
                 const MixtureParams& params, Rng& rng) {
  if (distinct_position_count(state) >= config.effective_reset_threshold()) {
    return false;
  }
  const Vec2 center = estimate_position(state);
  redraw_cloud(state, center, config.reset_radius, stationary_prior(params), rng);
  return true;
}

void force_reset(FilterState& state, const Vec2& center, const FilterConfig& config,
                 const MixtureParams& params, Rng& rng) {
  redraw_cloud(state, center, config.reset_radius, stationary_prior(params), rng);
}

}  // namespace peerloc
