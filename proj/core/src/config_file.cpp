#include "peerloc/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace peerloc {

namespace {

constexpr std::string_view kHeader = "# peerloc config v1";

[[noreturn]] void bad(std::string_view key, const std::string& what) {
  throw std::invalid_argument("config key '" + std::string(key) + "': " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, "expected a number");
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, "expected an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key, "expected true/false");
}

std::vector<std::string_view> split_list(std::string_view v, char sep) {
  std::vector<std::string_view> out;
  while (!v.empty()) {
    const std::size_t i = v.find(sep);
    out.push_back(trim(v.substr(0, i)));
    if (i == std::string_view::npos) break;
    v.remove_prefix(i + 1);
  }
  return out;
}

}  // namespace

void apply_override(ExperimentSpec& spec, std::string_view key,
                    std::string_view value) {
  key = trim(key);
  value = trim(value);
  ScenarioConfig& sc = spec.scenario;

  if (key == "scenario.n_mobile") sc.n_mobile = to_int(key, value);
  else if (key == "scenario.n_anchor") sc.n_anchor = to_int(key, value);
  else if (key == "scenario.grid_width") sc.grid_width = to_double(key, value);
  else if (key == "scenario.grid_height") sc.grid_height = to_double(key, value);
  else if (key == "scenario.comm_radius") sc.comm_radius = to_double(key, value);
  else if (key == "scenario.velocity_per_step") sc.velocity_per_step = to_double(key, value);
  else if (key == "scenario.n_steps") sc.n_steps = to_int(key, value);
  else if (key == "scenario.alpha") sc.params.alpha = to_double(key, value);
  else if (key == "scenario.sigma_los") sc.params.sigma_los = to_double(key, value);
  else if (key == "scenario.sigma_nlos") sc.params.sigma_nlos = to_double(key, value);
  else if (key == "scenario.sigma_ins") sc.params.sigma_ins = to_double(key, value);
  else if (key == "scenario.p01") sc.p01 = to_double(key, value);
  else if (key == "scenario.curve_amplitude") sc.curve_amplitude = to_double(key, value);
  else if (key == "scenario.curve_period") sc.curve_period = to_double(key, value);
  else if (key == "scenario.particle_count") sc.particle_count = to_int(key, value);
  else if (key == "scenario.anchor_layout") {
    if (value == "two-rows") sc.anchor_layout.kind = AnchorLayoutKind::kTwoRows;
    else if (value == "grid") sc.anchor_layout.kind = AnchorLayoutKind::kGrid;
    else if (value == "explicit") sc.anchor_layout.kind = AnchorLayoutKind::kExplicit;
    else bad(key, "expected two-rows | grid | explicit");
  } else if (key == "scenario.anchor_positions") {
    sc.anchor_layout.positions.clear();
    for (std::string_view entry : split_list(value, ';')) {
      const auto xy = split_list(entry, ',');
      if (xy.size() != 2) bad(key, "expected x,y;x,y;...");
      sc.anchor_layout.positions.push_back(
          {to_double(key, xy[0]), to_double(key, xy[1])});
    }
  }

  else if (key == "filter.particle_count") spec.run.filter.particle_count = to_int(key, value);
  else if (key == "filter.ess_threshold") spec.run.filter.ess_threshold = to_double(key, value);
  else if (key == "filter.reset_distinct_threshold") spec.run.filter.reset_distinct_threshold = to_int(key, value);
  else if (key == "filter.reset_radius") spec.run.filter.reset_radius = to_double(key, value);
  else if (key == "filter.init_spread") spec.run.filter.init_spread = to_double(key, value);
  else if (key == "filter.belief_drop_gap") spec.run.filter.belief_drop_gap = to_int(key, value);
  else if (key == "filter.weighted_detection") spec.run.filter.weighted_detection = to_bool(key, value);

  else if (key == "run.estimators") {
    spec.run.estimators.clear();
    for (std::string_view name : split_list(value, ',')) {
      const auto est = estimator_from_name(name);
      if (!est) bad(key, "unknown estimator '" + std::string(name) + "'");
      spec.run.estimators.push_back(*est);
    }
    if (spec.run.estimators.empty()) bad(key, "estimator list is empty");
  } else if (key == "run.workers") {
    spec.run.workers = to_int(key, value);
  } else if (key == "run.bootstrap") {
    if (value == "true-prior") spec.run.bootstrap = Bootstrap::kTruePositionPrior;
    else if (value == "uniform-grid") spec.run.bootstrap = Bootstrap::kUniformGrid;
    else bad(key, "expected true-prior | uniform-grid");
  }

  else if (key == "ml.search_half_width") spec.run.ml.search_half_width = to_double(key, value);
  else if (key == "ml.grid_resolution") spec.run.ml.grid_resolution = to_double(key, value);
  else if (key == "ml.refine_rounds") spec.run.ml.refine_rounds = to_int(key, value);

  else if (key == "ransac.iterations") spec.run.ransac.iterations = to_int(key, value);
  else if (key == "ransac.inlier_threshold_sigmas") spec.run.ransac.inlier_threshold_sigmas = to_double(key, value);
  else if (key == "ransac.refine_iterations") spec.run.ransac.refine_iterations = to_int(key, value);

  else if (key == "experiment.alphas") {
    spec.sweep.alphas.clear();
    for (std::string_view a : split_list(value, ',')) {
      spec.sweep.alphas.push_back(to_double(key, a));
    }
  } else if (key == "experiment.anchors") {
    spec.sweep.anchors.clear();
    for (std::string_view a : split_list(value, ',')) {
      spec.sweep.anchors.push_back(to_int(key, a));
    }
  } else if (key == "experiment.mobiles") {
    spec.sweep.mobiles.clear();
    for (std::string_view a : split_list(value, ',')) {
      spec.sweep.mobiles.push_back(to_int(key, a));
    }
  }
  else if (key == "experiment.replications") spec.replications = to_int(key, value);
  else if (key == "experiment.burn_in") spec.burn_in = to_int(key, value);
  else if (key == "experiment.output_dir") spec.output_dir = std::string(value);
  else if (key == "experiment.poly_degree") spec.poly_degree = to_int(key, value);
  else if (key == "experiment.cdf_max") spec.cdf_max = to_double(key, value);
  else if (key == "experiment.cdf_step") spec.cdf_step = to_double(key, value);
  else if (key == "experiment.jobs") spec.jobs = to_int(key, value);
  else if (key == "experiment.write_raw_logs") spec.write_raw_logs = to_bool(key, value);

  else bad(key, "unknown key");
}

ExperimentSpec parse_config(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kHeader) {
    throw std::runtime_error("not a peerloc config file (first line must be '" +
                             std::string(kHeader) + "')");
  }
  ExperimentSpec spec;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    apply_override(spec, sv.substr(0, eq), sv.substr(eq + 1));
  }
  return spec;
}

ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace peerloc
