#include "peerloc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "peerloc/parallel.hpp"

namespace peerloc {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string opt_str(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string("-");
}

std::optional<double> parse_opt(const std::string& tok) {
  if (tok == "-") return std::nullopt;
  return std::stod(tok);
}

constexpr std::string_view kSummaryHeader = "# peerloc summary v1";

}  // namespace

void ExperimentSpec::validate() const {
  scenario.validate();
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
  if (burn_in >= scenario.n_steps) {
    throw std::invalid_argument("burn_in must leave at least one scored step");
  }
  if (!(cdf_max > 0.0) || !(cdf_step > 0.0)) {
    throw std::invalid_argument("cdf grid must be positive");
  }
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (run.estimators.empty()) {
    throw std::invalid_argument("at least one estimator required");
  }
  for (double a : sweep.alphas) {
    if (!(a > 0.0) || !(a <= 1.0)) throw std::invalid_argument("sweep alpha out of range");
  }
  for (int m : sweep.anchors) {
    if (m < 0) throw std::invalid_argument("sweep anchor count out of range");
  }
  for (int n : sweep.mobiles) {
    if (n < 0) throw std::invalid_argument("sweep mobile count out of range");
  }
}

std::vector<SweepPoint> sweep_points(const ExperimentSpec& spec) {
  const std::vector<double> alphas =
      spec.sweep.alphas.empty() ? std::vector<double>{spec.scenario.params.alpha}
                                : spec.sweep.alphas;
  const std::vector<int> anchors =
      spec.sweep.anchors.empty() ? std::vector<int>{spec.scenario.n_anchor}
                                 : spec.sweep.anchors;
  const std::vector<int> mobiles =
      spec.sweep.mobiles.empty() ? std::vector<int>{spec.scenario.n_mobile}
                                 : spec.sweep.mobiles;
  std::vector<SweepPoint> points;
  for (double a : alphas) {
    for (int m : anchors) {
      for (int n : mobiles) {
        points.push_back({a, m, n});
      }
    }
  }
  return points;
}

ScenarioConfig scenario_for_point(const ExperimentSpec& spec, const SweepPoint& point,
                                  int replication) {
  ScenarioConfig config = spec.scenario;
  config.params.alpha = point.alpha;
  config.n_anchor = point.n_anchor;
  config.n_mobile = point.n_mobile;
  config.seed = spec.scenario.seed + static_cast<std::uint64_t>(replication);
  if (config.anchor_layout.kind == AnchorLayoutKind::kExplicit &&
      static_cast<int>(config.anchor_layout.positions.size()) != config.n_anchor) {
    throw std::invalid_argument("anchor sweep incompatible with explicit layout");
  }
  return config;
}

std::string point_tag(const SweepPoint& point) {
  std::ostringstream os;
  os << 'a' << fmt_short(point.alpha) << "_m" << point.n_anchor << "_n"
     << point.n_mobile;
  return os.str();
}

std::vector<RunSummary> summarize_run(const std::vector<EpochLog>& logs,
                                      const std::vector<Estimator>& estimators,
                                      int burn_in) {
  std::vector<RunSummary> out;
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    RunSummary s;
    s.estimator = estimators[e];
    for (const EpochLog& log : logs) {
      if (log.t <= burn_in) continue;
      for (const NodeEstimateRecord& rec : log.estimates[e]) {
        s.sorted_errors.push_back(rec.error());
      }
    }
    std::sort(s.sorted_errors.begin(), s.sorted_errors.end());
    s.error_count = static_cast<std::int64_t>(s.sorted_errors.size());
    s.mean_error = s.sorted_errors.empty() ? 0.0 : mean(s.sorted_errors);
    if (estimators[e] == Estimator::kParticleFilter) {
      std::vector<LosIndicator> truth;
      std::vector<LosIndicator> detected;
      for (const EpochLog& log : logs) {
        if (log.t <= burn_in) continue;
        for (const ZDetectionRecord& d : log.detections) {
          truth.push_back(d.z_true);
          detected.push_back(d.z_detected);
        }
      }
      const DetectionStats stats = detection_probability(truth, detected);
      s.p_d = stats.p_d;
      s.false_alarm = stats.false_alarm;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<RunSummary> summarize_log_data(const LogData& data, int burn_in) {
  std::vector<RunSummary> out;
  for (std::size_t e = 0; e < data.estimators.size(); ++e) {
    RunSummary s;
    const auto est = estimator_from_name(data.estimators[e]);
    if (!est) throw std::runtime_error("unknown estimator in log: " + data.estimators[e]);
    s.estimator = *est;
    for (const LogData::NodeRow& row : data.rows) {
      if (row.estimator != static_cast<int>(e) || row.t <= burn_in) continue;
      s.sorted_errors.push_back(row.error);
    }
    std::sort(s.sorted_errors.begin(), s.sorted_errors.end());
    s.error_count = static_cast<std::int64_t>(s.sorted_errors.size());
    s.mean_error = s.sorted_errors.empty() ? 0.0 : mean(s.sorted_errors);
    if (*est == Estimator::kParticleFilter) {
      std::vector<LosIndicator> truth;
      std::vector<LosIndicator> detected;
      for (const LogData::DetectionRow& d : data.detections) {
        if (d.t <= burn_in) continue;
        truth.push_back(static_cast<LosIndicator>(d.z_true));
        detected.push_back(static_cast<LosIndicator>(d.z_detected));
      }
      const DetectionStats stats = detection_probability(truth, detected);
      s.p_d = stats.p_d;
      s.false_alarm = stats.false_alarm;
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary(const std::vector<RunSummary>& summaries, std::ostream& out) {
  out << kSummaryHeader << '\n';
  out << "# columns: alpha anchors mobiles replication seed estimator"
         " mean_error error_count p_d false_alarm\n";
  for (const RunSummary& s : summaries) {
    out << fmt(s.point.alpha) << ' ' << s.point.n_anchor << ' '
        << s.point.n_mobile << ' ' << s.replication << ' ' << s.seed << ' '
        << estimator_name(s.estimator) << ' ' << fmt(s.mean_error) << ' '
        << s.error_count << ' ' << opt_str(s.p_d) << ' '
        << opt_str(s.false_alarm) << '\n';
  }
}

std::vector<RunSummary> parse_summary(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) {
    throw std::runtime_error("not a peerloc summary file (bad header)");
  }
  std::vector<RunSummary> out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    RunSummary s;
    std::string est, p_d, fa;
    is >> s.point.alpha >> s.point.n_anchor >> s.point.n_mobile >>
        s.replication >> s.seed >> est >> s.mean_error >> s.error_count >>
        p_d >> fa;
    if (!is) throw std::runtime_error("bad summary row: " + line);
    const auto e = estimator_from_name(est);
    if (!e) throw std::runtime_error("unknown estimator in summary: " + est);
    s.estimator = *e;
    s.p_d = parse_opt(p_d);
    s.false_alarm = parse_opt(fa);
    out.push_back(std::move(s));
  }
  return out;
}

void write_trajectory_file(const std::vector<EpochLog>& logs,
                           const std::vector<Estimator>& estimators,
                           Estimator which, int burn_in, int poly_degree,
                           const std::string& path) {
  int index = -1;
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    if (estimators[e] == which) index = static_cast<int>(e);
  }
  if (index < 0) throw std::invalid_argument("estimator not in run");

  std::ostringstream out;
  out << "# peerloc trajectory v1\n";
  out << "# estimator: " << estimator_name(which) << '\n';
  out << "# columns: t node true_x true_y est_x est_y smooth_x smooth_y\n";

  // Collect per-node series first so the smoothing fit sees the whole run.
  const int n_mobile =
      logs.empty() ? 0 : static_cast<int>(logs.front().estimates[index].size());
  for (int k = 0; k < n_mobile; ++k) {
    std::vector<double> ts, ex, ey;
    for (const EpochLog& log : logs) {
      if (log.t <= burn_in) continue;
      ts.push_back(log.t);
      ex.push_back(log.estimates[index][k].estimate.x);
      ey.push_back(log.estimates[index][k].estimate.y);
    }
    const bool smooth =
        poly_degree >= 0 && static_cast<int>(ts.size()) > poly_degree;
    PolyFit fx, fy;
    if (smooth) {
      fx = polyfit(ts, ex, poly_degree);
      fy = polyfit(ts, ey, poly_degree);
    }
    std::size_t i = 0;
    for (const EpochLog& log : logs) {
      if (log.t <= burn_in) continue;
      const NodeEstimateRecord& rec = log.estimates[index][k];
      const double sx = smooth ? fx(ts[i]) : rec.estimate.x;
      const double sy = smooth ? fy(ts[i]) : rec.estimate.y;
      out << log.t << ' ' << k << ' ' << fmt(rec.true_position.x) << ' '
          << fmt(rec.true_position.y) << ' ' << fmt(rec.estimate.x) << ' '
          << fmt(rec.estimate.y) << ' ' << fmt(sx) << ' ' << fmt(sy) << '\n';
      ++i;
    }
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file << out.str();
}

void emit_plot_data(const ExperimentSpec& spec,
                    const std::vector<RunSummary>& summaries) {
  namespace fs = std::filesystem;
  std::vector<double> thresholds;
  for (double th = 0.0; th <= spec.cdf_max + 1e-12; th += spec.cdf_step) {
    thresholds.push_back(th);
  }

  // CDF per (point, estimator), errors pooled over replications.
  for (const SweepPoint& point : sweep_points(spec)) {
    for (Estimator est : spec.run.estimators) {
      std::vector<double> pooled;
      int reps = 0;
      for (const RunSummary& s : summaries) {
        if (s.estimator != est || point_tag(s.point) != point_tag(point)) continue;
        pooled.insert(pooled.end(), s.sorted_errors.begin(), s.sorted_errors.end());
        ++reps;
      }
      if (pooled.empty()) continue;
      std::sort(pooled.begin(), pooled.end());
      const std::vector<double> cdf = error_cdf(pooled, thresholds);
      const fs::path path = fs::path(spec.output_dir) /
                            ("cdf_" + point_tag(point) + "_" +
                             estimator_name(est) + ".txt");
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
      out << "# peerloc cdf v1\n";
      out << "# point: alpha=" << fmt_short(point.alpha)
          << " anchors=" << point.n_anchor << " mobiles=" << point.n_mobile
          << " estimator=" << estimator_name(est) << " replications=" << reps
          << '\n';
      out << "# columns: threshold fraction\n";
      for (std::size_t i = 0; i < thresholds.size(); ++i) {
        out << fmt(thresholds[i]) << ' ' << fmt(cdf[i]) << '\n';
      }
    }
  }

  // Sweep table per estimator: replication means aggregated per point.
  for (Estimator est : spec.run.estimators) {
    const fs::path path = fs::path(spec.output_dir) /
                          (std::string("sweep_") + estimator_name(est) + ".txt");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "# peerloc sweep v1\n";
    out << "# estimator: " << estimator_name(est) << '\n';
    out << "# columns: alpha anchors mobiles replications mean_error stderr\n";
    for (const SweepPoint& point : sweep_points(spec)) {
      std::vector<double> means;
      for (const RunSummary& s : summaries) {
        if (s.estimator == est && point_tag(s.point) == point_tag(point)) {
          means.push_back(s.mean_error);
        }
      }
      if (means.empty()) continue;
      const double m = mean(means);
      double se = 0.0;
      if (means.size() > 1) {
        double var = 0.0;
        for (double v : means) var += (v - m) * (v - m);
        var /= static_cast<double>(means.size() - 1);
        se = std::sqrt(var / static_cast<double>(means.size()));
      }
      out << fmt(point.alpha) << ' ' << point.n_anchor << ' ' << point.n_mobile
          << ' ' << means.size() << ' ' << fmt(m) << ' ' << fmt(se) << '\n';
    }
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  namespace fs = std::filesystem;
  spec.validate();
  if (spec.output_dir.empty()) {
    throw std::invalid_argument("output_dir required");
  }
  fs::create_directories(spec.output_dir);
  fs::create_directories(fs::path(spec.output_dir) / "runs");

  const std::vector<SweepPoint> points = sweep_points(spec);
  struct Job {
    SweepPoint point;
    int replication;
  };
  std::vector<Job> jobs;
  for (const SweepPoint& p : points) {
    for (int r = 0; r < spec.replications; ++r) jobs.push_back({p, r});
  }

  std::vector<std::vector<RunSummary>> job_summaries(jobs.size());
  std::vector<std::string> job_failures(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), spec.jobs, [&](int j) {
    const Job& job = jobs[j];
    try {
      const auto start = std::chrono::steady_clock::now();
      const ScenarioConfig config = scenario_for_point(spec, job.point, job.replication);
      const Scenario scenario = generate_scenario(config);
      Runner runner(scenario, spec.run);
      const std::vector<EpochLog> logs = runner.run();
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();

      const std::string tag = point_tag(job.point);
      if (spec.write_raw_logs) {
        const fs::path dir = fs::path(spec.output_dir) / "runs" /
                             (tag + "_r" + std::to_string(job.replication));
        fs::create_directories(dir);
        write_epoch_log(logs, spec.run.estimators, (dir / "epochs.log").string());
      }
      if (job.replication == 0) {
        for (Estimator est : spec.run.estimators) {
          const fs::path path =
              fs::path(spec.output_dir) /
              ("traj_" + tag + "_" + estimator_name(est) + ".txt");
          write_trajectory_file(logs, spec.run.estimators, est, spec.burn_in,
                                spec.poly_degree, path.string());
        }
      }

      std::vector<RunSummary> summaries =
          summarize_run(logs, spec.run.estimators, spec.burn_in);
      for (RunSummary& s : summaries) {
        s.point = job.point;
        s.replication = job.replication;
        s.seed = config.seed;
        s.runtime_seconds = seconds;
      }
      job_summaries[j] = std::move(summaries);
    } catch (const std::exception& ex) {
      job_failures[j] = point_tag(job.point) + " rep " +
                        std::to_string(job.replication) + ": " + ex.what();
    }
  });

  ExperimentResult result;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!job_failures[j].empty()) {
      result.failures.push_back(job_failures[j]);
    }
    for (RunSummary& s : job_summaries[j]) {
      result.summaries.push_back(std::move(s));
    }
  }

  {
    std::ofstream out(fs::path(spec.output_dir) / "summary.txt");
    if (!out) throw std::runtime_error("cannot write summary.txt");
    write_summary(result.summaries, out);
  }
  {
    // Wall times live outside summary.txt so result files stay reproducible.
    std::ofstream out(fs::path(spec.output_dir) / "timings.txt");
    out << "# peerloc timings v1\n";
    out << "# columns: alpha anchors mobiles replication estimator seconds\n";
    for (const RunSummary& s : result.summaries) {
      out << fmt_short(s.point.alpha) << ' ' << s.point.n_anchor << ' '
          << s.point.n_mobile << ' ' << s.replication << ' '
          << estimator_name(s.estimator) << ' ' << fmt_short(s.runtime_seconds)
          << '\n';
    }
  }
  emit_plot_data(spec, result.summaries);
  return result;
}

}  // namespace peerloc
