#ifndef PEERLOC_EXPERIMENT_HPP
#define PEERLOC_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "peerloc/epoch_log_io.hpp"
#include "peerloc/metrics.hpp"
#include "peerloc/runtime.hpp"

namespace peerloc {

/// Sweep axes; an empty axis means "use the base scenario value".
struct SweepAxes {
  std::vector<double> alphas;
  std::vector<int> anchors;
  std::vector<int> mobiles;
};

struct ExperimentSpec {
  ScenarioConfig scenario;  ///< base configuration; seed comes from the CLI
  RunConfig run;
  SweepAxes sweep;
  int replications = 1;
  int burn_in = 20;        ///< steps excluded from every error metric
  std::string output_dir;
  int poly_degree = 5;     ///< trajectory smoothing for plot files; < 0 disables
  double cdf_max = 5.0;    ///< CDF threshold grid upper end [m]
  double cdf_step = 0.025; ///< CDF threshold spacing [m]
  int jobs = 1;            ///< sweep jobs run in parallel
  bool write_raw_logs = true;

  void validate() const;
};

struct SweepPoint {
  double alpha = 0.3;
  int n_anchor = 0;
  int n_mobile = 0;
};

/// Metrics of one (sweep point, replication, estimator) run.
struct RunSummary {
  SweepPoint point;
  int replication = 0;
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::kParticleFilter;
  double mean_error = 0.0;
  std::int64_t error_count = 0;
  std::vector<double> sorted_errors;  ///< post burn-in, ascending
  std::optional<double> p_d;
  std::optional<double> false_alarm;
  double runtime_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<RunSummary> summaries;
  std::vector<std::string> failures;  ///< one message per failed job

  bool all_ok() const { return failures.empty(); }
};

/// Cartesian product of the sweep axes (base values for empty axes).
std::vector<SweepPoint> sweep_points(const ExperimentSpec& spec);

/// Scenario for one sweep point and replication; replication r runs with
/// seed base_seed + r.
ScenarioConfig scenario_for_point(const ExperimentSpec& spec, const SweepPoint& point,
                                  int replication);

/// Per-estimator metrics from in-memory epoch logs (post burn-in).
std::vector<RunSummary> summarize_run(const std::vector<EpochLog>& logs,
                                      const std::vector<Estimator>& estimators,
                                      int burn_in);

/// The same metrics recomputed from a parsed epoch-log file.
std::vector<RunSummary> summarize_log_data(const LogData& data, int burn_in);

/// Generate + run + summarize every sweep point x replication, writing the
/// epoch logs, summary, CDF, trajectory and sweep-table files under
/// output_dir. Failed jobs are recorded and do not stop the rest.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// File name tag for a sweep point ("a0.05_m26_n20").
std::string point_tag(const SweepPoint& point);

void write_summary(const std::vector<RunSummary>& summaries, std::ostream& out);
std::vector<RunSummary> parse_summary(std::istream& in);

/// CDF curves (pooled over replications) and per-estimator sweep tables.
void emit_plot_data(const ExperimentSpec& spec,
                    const std::vector<RunSummary>& summaries);

/// True-vs-estimated trace of one run for plotting; row count is
/// n_mobile x (n_steps - burn_in). The smoothing columns hold a per-node
/// polynomial fit of the estimates (the raw metrics never use it).
void write_trajectory_file(const std::vector<EpochLog>& logs,
                           const std::vector<Estimator>& estimators,
                           Estimator which, int burn_in, int poly_degree,
                           const std::string& path);

}  // namespace peerloc

#endif  // PEERLOC_EXPERIMENT_HPP
