#include "peerloc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace peerloc {

void ScenarioConfig::validate() const {
  if (n_mobile < 0 || n_anchor < 0) {
    throw std::invalid_argument("node counts must be >= 0");
  }
  if (!(grid_width > 0.0) || !(grid_height > 0.0)) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (!(comm_radius > 0.0)) {
    throw std::invalid_argument("comm_radius must be positive");
  }
  if (n_steps < 1) {
    throw std::invalid_argument("n_steps must be >= 1");
  }
  if (!(velocity_per_step >= 0.0)) {
    throw std::invalid_argument("velocity_per_step must be >= 0");
  }
  if (curve_amplitude != 0.0 && !(curve_period > 0.0)) {
    throw std::invalid_argument("curve_period must be positive");
  }
  if (particle_count < 1) {
    throw std::invalid_argument("particle_count must be >= 1");
  }
  params.validate();
  transition();  // throws when p01 is unsolvable for alpha
  if (anchor_layout.kind == AnchorLayoutKind::kExplicit &&
      static_cast<int>(anchor_layout.positions.size()) != n_anchor) {
    throw std::invalid_argument("explicit anchor layout size != n_anchor");
  }
}

int GroundTruth::pair_index(int k, int m) const {
  const NodePair key{std::min(k, m), std::max(k, m)};
  const auto it = std::lower_bound(pairs.begin(), pairs.end(), key);
  if (it == pairs.end() || !(*it == key)) return -1;
  return static_cast<int>(it - pairs.begin());
}

std::vector<Vec2> anchor_positions(const ScenarioConfig& config) {
  const int m = config.n_anchor;
  std::vector<Vec2> out;
  out.reserve(m);
  switch (config.anchor_layout.kind) {
    case AnchorLayoutKind::kExplicit:
      return config.anchor_layout.positions;
    case AnchorLayoutKind::kTwoRows: {
      const int bottom = (m + 1) / 2;
      const int top = m - bottom;
      const auto spread = [&](int count, double y) {
        for (int j = 0; j < count; ++j) {
          const double x = count > 1
                               ? config.grid_width * j / (count - 1)
                               : config.grid_width / 2.0;
          out.push_back({x, y});
        }
      };
      spread(bottom, 0.0);
      spread(top, config.grid_height);
      return out;
    }
    case AnchorLayoutKind::kGrid: {
      if (m == 0) return out;
      const double aspect = config.grid_width / config.grid_height;
      const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(m * aspect))));
      const int rows = (m + cols - 1) / cols;
      for (int i = 0; i < m; ++i) {
        const int r = i / cols;
        const int c = i % cols;
        out.push_back({config.grid_width * (c + 0.5) / cols,
                       config.grid_height * (r + 0.5) / rows});
      }
      return out;
    }
  }
  throw std::logic_error("unknown anchor layout");
}

std::vector<Vec2> generate_trajectories(const ScenarioConfig& config) {
  config.validate();
  const int n = config.n_nodes();
  const int t_max = config.n_steps;
  std::vector<Vec2> pos(static_cast<std::size_t>(t_max + 1) * n);

  const std::vector<Vec2> anchors = anchor_positions(config);
  for (int a = 0; a < config.n_anchor; ++a) {
    for (int t = 0; t <= t_max; ++t) {
      pos[static_cast<std::size_t>(t) * n + config.n_mobile + a] = anchors[a];
    }
  }

  for (int k = 0; k < config.n_mobile; ++k) {
    Rng rng(config.seed, StreamTag::kTrajectory, static_cast<std::uint64_t>(k));
    const double x0 = rng.uniform(0.0, 0.05 * config.grid_width);
    const double y0 = rng.uniform(0.0, config.grid_height);
    for (int t = 0; t <= t_max; ++t) {
      double x = x0 + config.velocity_per_step * t;
      double y = y0;
      if (config.curve_amplitude != 0.0) {
        y += config.curve_amplitude * std::sin(kTwoPi * t / config.curve_period);
      }
      pos[static_cast<std::size_t>(t) * n + k] = {
          std::clamp(x, 0.0, config.grid_width),
          std::clamp(y, 0.0, config.grid_height)};
    }
  }
  return pos;
}

std::vector<NodePair> mobile_pairs(const ScenarioConfig& config) {
  std::vector<NodePair> pairs;
  const int n = config.n_nodes();
  for (int k = 0; k < config.n_mobile; ++k) {
    for (int m = k + 1; m < n; ++m) {
      pairs.push_back({k, m});
    }
  }
  return pairs;  // construction order is already lexicographic
}

std::vector<std::uint8_t> evolve_z_chains(const ScenarioConfig& config,
                                          const std::vector<NodePair>& pairs) {
  const LosTransition trans = config.transition();
  const double pi_los = stationary_distribution(trans).second;
  const int t_max = config.n_steps;

  std::vector<std::uint8_t> z(pairs.size() * static_cast<std::size_t>(t_max));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    Rng rng(config.seed, StreamTag::kZChain,
            static_cast<std::uint64_t>(pairs[p].k),
            static_cast<std::uint64_t>(pairs[p].m));
    std::uint8_t state = rng.uniform() < pi_los ? 1 : 0;
    z[p * t_max] = state;
    for (int t = 2; t <= t_max; ++t) {
      const double p_los = state ? trans.p11 : trans.p01;
      state = rng.uniform() < p_los ? 1 : 0;
      z[p * t_max + (t - 1)] = state;
    }
  }
  return z;
}

std::vector<RangingMeasurement> generate_measurements(const GroundTruth& truth,
                                                      int t) {
  const ScenarioConfig& config = truth.config;
  const double r2 = config.comm_radius * config.comm_radius;
  std::vector<RangingMeasurement> out;
  for (std::size_t p = 0; p < truth.pairs.size(); ++p) {
    const auto [k, m] = truth.pairs[p];
    const double d2 = squared_distance(truth.position(t, k), truth.position(t, m));
    if (!(d2 < r2)) continue;  // strictly inside the communication radius
    const double d = std::sqrt(d2);
    Rng rng(config.seed, StreamTag::kMeasurement,
            static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(m),
            static_cast<std::uint64_t>(t));
    double theta = d;
    if (truth.z_state(static_cast<int>(p), t) == LosIndicator::kNlos) {
      theta += rng.exponential(config.params.sigma_nlos);
    }
    theta += rng.gaussian(0.0, config.params.sigma_los);
    out.push_back({t, k, m, theta});
  }
  return out;  // pair order is lexicographic already
}

InsReading generate_ins(const GroundTruth& truth, int k, int t) {
  const ScenarioConfig& config = truth.config;
  if (!config.is_mobile(k)) {
    throw std::invalid_argument("anchors produce no INS readings");
  }
  if (t < 1 || t > config.n_steps) {
    throw std::invalid_argument("INS step out of range");
  }
  const Vec2 delta = truth.position(t, k) - truth.position(t - 1, k);
  Rng rng(config.seed, StreamTag::kIns, static_cast<std::uint64_t>(k),
          static_cast<std::uint64_t>(t));
  return {t, k, delta.x + rng.gaussian(0.0, config.params.sigma_ins),
          delta.y + rng.gaussian(0.0, config.params.sigma_ins)};
}

GroundTruth generate_ground_truth(const ScenarioConfig& config) {
  config.validate();
  GroundTruth truth;
  truth.config = config;
  truth.kinds.resize(config.n_nodes());
  for (int i = 0; i < config.n_nodes(); ++i) {
    truth.kinds[i] = config.is_mobile(i) ? NodeKind::kMobile : NodeKind::kAnchor;
  }
  truth.positions = generate_trajectories(config);
  truth.pairs = mobile_pairs(config);
  truth.z = evolve_z_chains(config, truth.pairs);
  return truth;
}

Scenario generate_scenario(const ScenarioConfig& config) {
  Scenario s;
  s.truth = generate_ground_truth(config);
  s.measurements.resize(config.n_steps);
  s.ins.resize(config.n_steps);
  for (int t = 1; t <= config.n_steps; ++t) {
    s.measurements[t - 1] = generate_measurements(s.truth, t);
    s.ins[t - 1].reserve(config.n_mobile);
    for (int k = 0; k < config.n_mobile; ++k) {
      s.ins[t - 1].push_back(generate_ins(s.truth, k, t));
    }
  }
  return s;
}

}  // namespace peerloc
