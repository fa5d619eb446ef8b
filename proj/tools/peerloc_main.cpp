// Command line driver: scenario generation, experiment runs, sweeps and
// metric recomputation from recorded logs.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "peerloc/config_file.hpp"
#include "peerloc/epoch_log_io.hpp"
#include "peerloc/experiment.hpp"
#include "peerloc/scenario_io.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
};

peerloc::ExperimentSpec load_spec(const CommonOptions& opts) {
  peerloc::ExperimentSpec spec;
  if (!opts.config_path.empty()) {
    spec = peerloc::parse_config_file(opts.config_path);
  }
  for (const std::string& kv : opts.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    }
    peerloc::apply_override(spec, std::string_view(kv).substr(0, eq),
                            std::string_view(kv).substr(eq + 1));
  }
  spec.scenario.seed = opts.seed;
  return spec;
}

void print_summaries(const std::vector<peerloc::RunSummary>& summaries) {
  std::printf("%-10s %7s %7s %4s %12s %10s %8s %8s\n", "estimator", "alpha",
              "anchors", "rep", "mean_err[m]", "records", "P_d", "P_fa");
  for (const peerloc::RunSummary& s : summaries) {
    std::printf("%-10s %7g %7d %4d %12.4f %10lld %8s %8s\n",
                peerloc::estimator_name(s.estimator), s.point.alpha,
                s.point.n_anchor, s.replication, s.mean_error,
                static_cast<long long>(s.error_count),
                s.p_d ? std::to_string(*s.p_d).substr(0, 6).c_str() : "-",
                s.false_alarm ? std::to_string(*s.false_alarm).substr(0, 6).c_str()
                              : "-");
  }
}

int run_experiment_command(const peerloc::ExperimentSpec& spec) {
  const peerloc::ExperimentResult result = peerloc::run_experiment(spec);
  print_summaries(result.summaries);
  if (!result.all_ok()) {
    for (const std::string& f : result.failures) {
      std::cerr << "FAILED: " << f << '\n';
    }
    return 1;
  }
  std::cout << "wrote " << spec.output_dir << "/summary.txt\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peer-to-peer cooperative localization simulator"};
  app.require_subcommand(1);

  CommonOptions common;
  const auto add_common = [&](CLI::App* cmd, bool need_seed) {
    cmd->add_option("--config", common.config_path, "experiment config file");
    auto* seed = cmd->add_option("--seed", common.seed,
                                 "master seed (replication r runs with seed+r)");
    if (need_seed) seed->required();
    cmd->add_option("--set", common.overrides,
                    "override a config key, e.g. --set scenario.alpha=0.15");
  };

  // generate: synthesize a scenario file.
  auto* generate = app.add_subcommand("generate", "synthesize a scenario file");
  std::string generate_out;
  add_common(generate, true);
  generate->add_option("--out", generate_out, "scenario file path")->required();

  // run: single experiment point (optionally from a saved scenario).
  auto* run = app.add_subcommand("run", "run one experiment");
  std::string run_out;
  std::string run_scenario_path;
  add_common(run, false);
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--scenario", run_scenario_path,
                  "replay a saved scenario instead of generating one");
  int run_workers = 0;
  run->add_option("--workers", run_workers, "filter worker threads");

  // sweep: all sweep points x replications.
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  std::string sweep_out;
  add_common(sweep, false);
  sweep->add_option("--out", sweep_out, "output directory")->required();
  int sweep_jobs = 0;
  sweep->add_option("--jobs", sweep_jobs, "parallel sweep jobs");

  // report: recompute metrics from a recorded epoch log.
  auto* report = app.add_subcommand("report", "recompute metrics from a log");
  std::string report_log;
  int report_burn_in = 20;
  report->add_option("--log", report_log, "epochs.log path")->required();
  report->add_option("--burn-in", report_burn_in, "steps to exclude");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const peerloc::ExperimentSpec spec = load_spec(common);
      spec.scenario.validate();
      const peerloc::Scenario scenario = peerloc::generate_scenario(spec.scenario);
      peerloc::save_scenario(scenario, generate_out);
      std::size_t n_meas = 0;
      for (const auto& step : scenario.measurements) n_meas += step.size();
      std::cout << "wrote " << generate_out << " (" << n_meas
                << " measurements over " << spec.scenario.n_steps << " steps)\n";
      return 0;
    }

    if (run->parsed()) {
      // --seed is required unless a saved scenario supplies one.
      if (run_scenario_path.empty() && run->count("--seed") == 0) {
        std::cerr << "run: --seed is required (or pass --scenario)\n";
        return 2;
      }
      peerloc::ExperimentSpec spec = load_spec(common);
      spec.output_dir = run_out;
      spec.sweep = {};       // run executes exactly one point
      spec.replications = 1;
      if (run_workers > 0) spec.run.workers = run_workers;

      if (!run_scenario_path.empty()) {
        const peerloc::Scenario scenario = peerloc::load_scenario(run_scenario_path);
        spec.scenario = scenario.config();
        if (run->count("--seed") > 0) {
          spec.run.seed_override = common.seed;
        }
        spec.validate();
        std::filesystem::create_directories(spec.output_dir);
        peerloc::Runner runner(scenario, spec.run);
        const std::vector<peerloc::EpochLog> logs = runner.run();
        peerloc::write_epoch_log(logs, spec.run.estimators,
                                 spec.output_dir + "/epochs.log");
        std::vector<peerloc::RunSummary> summaries =
            peerloc::summarize_run(logs, spec.run.estimators, spec.burn_in);
        for (peerloc::RunSummary& s : summaries) {
          s.point = {scenario.config().params.alpha, scenario.config().n_anchor,
                     scenario.config().n_mobile};
          s.seed = scenario.config().seed;
        }
        std::ofstream out(spec.output_dir + "/summary.txt");
        peerloc::write_summary(summaries, out);
        print_summaries(summaries);
        return 0;
      }
      return run_experiment_command(spec);
    }

    if (sweep->parsed()) {
      if (sweep->count("--seed") == 0) {
        std::cerr << "sweep: --seed is required\n";
        return 2;
      }
      peerloc::ExperimentSpec spec = load_spec(common);
      spec.output_dir = sweep_out;
      if (sweep_jobs > 0) spec.jobs = sweep_jobs;
      return run_experiment_command(spec);
    }

    if (report->parsed()) {
      const peerloc::LogData data = peerloc::read_epoch_log(report_log);
      const std::vector<peerloc::RunSummary> summaries =
          peerloc::summarize_log_data(data, report_burn_in);
      print_summaries(summaries);
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
