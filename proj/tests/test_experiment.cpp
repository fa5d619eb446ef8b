#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "peerloc/config_file.hpp"
#include "peerloc/experiment.hpp"

using namespace peerloc;
namespace fs = std::filesystem;

namespace {

ExperimentSpec tiny_spec(const std::string& outdir) {
  ExperimentSpec spec;
  spec.scenario.n_mobile = 3;
  spec.scenario.n_anchor = 4;
  spec.scenario.n_steps = 25;
  spec.scenario.grid_width = 30.0;
  spec.scenario.grid_height = 15.0;
  spec.scenario.particle_count = 60;
  spec.scenario.seed = 5;
  spec.burn_in = 5;
  spec.replications = 2;
  spec.output_dir = outdir;
  spec.poly_degree = 3;
  return spec;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "peerloc_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config file parses into an experiment spec") {
  std::stringstream in(R"(# peerloc config v1
# fleet-scale setup
scenario.n_mobile = 20
scenario.n_anchor = 26
scenario.alpha = 0.05
scenario.sigma_los = 0.05
scenario.particle_count = 900
scenario.anchor_layout = grid
filter.ess_threshold = 0.4
run.estimators = pf,genie-ml
run.workers = 4
ml.refine_rounds = 2
experiment.alphas = 0.05, 0.15, 0.3
experiment.replications = 3
experiment.burn_in = 20
experiment.output_dir = /tmp/out
)");
  const ExperimentSpec spec = parse_config(in);
  CHECK(spec.scenario.n_mobile == 20);
  CHECK(spec.scenario.params.alpha == 0.05);
  CHECK(spec.scenario.anchor_layout.kind == AnchorLayoutKind::kGrid);
  CHECK(spec.run.filter.ess_threshold == 0.4);
  REQUIRE(spec.run.estimators.size() == 2);
  CHECK(spec.run.estimators[1] == Estimator::kGenieMl);
  CHECK(spec.run.workers == 4);
  CHECK(spec.run.ml.refine_rounds == 2);
  REQUIRE(spec.sweep.alphas.size() == 3);
  CHECK(spec.sweep.alphas[1] == 0.15);
  CHECK(spec.replications == 3);
  CHECK(spec.output_dir == "/tmp/out");
}

TEST_CASE("config file rejects unknown keys and bad headers") {
  std::stringstream bad_key("# peerloc config v1\nscenario.bogus = 1\n");
  CHECK_THROWS_AS(parse_config(bad_key), std::invalid_argument);
  std::stringstream bad_header("scenario.n_mobile = 3\n");
  CHECK_THROWS_AS(parse_config(bad_header), std::runtime_error);
  std::stringstream bad_value("# peerloc config v1\nscenario.n_mobile = abc\n");
  CHECK_THROWS_AS(parse_config(bad_value), std::invalid_argument);
}

TEST_CASE("explicit anchor positions parse") {
  ExperimentSpec spec;
  apply_override(spec, "scenario.anchor_layout", "explicit");
  apply_override(spec, "scenario.anchor_positions", "0,0; 10,0; 5,8");
  apply_override(spec, "scenario.n_anchor", "3");
  REQUIRE(spec.scenario.anchor_layout.positions.size() == 3);
  CHECK(spec.scenario.anchor_layout.positions[2] == Vec2{5.0, 8.0});
  spec.scenario.n_steps = 10;
  spec.scenario.n_mobile = 1;
  spec.scenario.validate();
}

TEST_CASE("overrides win over file values") {
  std::stringstream in("# peerloc config v1\nscenario.n_mobile = 20\n");
  ExperimentSpec spec = parse_config(in);
  apply_override(spec, "scenario.n_mobile", "7");
  CHECK(spec.scenario.n_mobile == 7);
}

TEST_CASE("sweep points are the cartesian product with base fallbacks") {
  ExperimentSpec spec = tiny_spec("unused");
  CHECK(sweep_points(spec).size() == 1);
  spec.sweep.alphas = {0.1, 0.2};
  spec.sweep.anchors = {4, 8, 12};
  const auto points = sweep_points(spec);
  REQUIRE(points.size() == 6);
  CHECK(points[0].alpha == 0.1);
  CHECK(points[0].n_anchor == 4);
  CHECK(points[0].n_mobile == 3);  // base value
  CHECK(points[5].alpha == 0.2);
  CHECK(points[5].n_anchor == 12);
}

TEST_CASE("replication seeds are base + r") {
  const ExperimentSpec spec = tiny_spec("unused");
  CHECK(scenario_for_point(spec, {0.4, 4, 3}, 0).seed == 5);
  CHECK(scenario_for_point(spec, {0.4, 4, 3}, 2).seed == 7);
  CHECK(scenario_for_point(spec, {0.4, 4, 3}, 0).params.alpha == 0.4);
}

TEST_CASE("run_experiment writes the full output set") {
  const fs::path dir = fresh_dir("full_outputs");
  ExperimentSpec spec = tiny_spec(dir.string());
  spec.sweep.alphas = {0.3, 0.6};
  spec.run.estimators = {Estimator::kParticleFilter, Estimator::kGenieMl};
  const ExperimentResult result = run_experiment(spec);
  CHECK(result.all_ok());
  // points x estimators x replications summaries.
  CHECK(result.summaries.size() == 2 * 2 * 2);

  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(fs::exists(dir / "timings.txt"));
  for (const char* tag : {"a0.3_m4_n3", "a0.6_m4_n3"}) {
    CHECK(fs::exists(dir / ("cdf_" + std::string(tag) + "_pf.txt")));
    CHECK(fs::exists(dir / ("traj_" + std::string(tag) + "_pf.txt")));
    CHECK(fs::exists(dir / "runs" / (std::string(tag) + "_r0") / "epochs.log"));
    CHECK(fs::exists(dir / "runs" / (std::string(tag) + "_r1") / "epochs.log"));
  }
  CHECK(fs::exists(dir / "sweep_pf.txt"));
  CHECK(fs::exists(dir / "sweep_genie-ml.txt"));
}

TEST_CASE("single point, single replication yields one summary per estimator") {
  const fs::path dir = fresh_dir("single_point");
  ExperimentSpec spec = tiny_spec(dir.string());
  spec.replications = 1;
  const ExperimentResult result = run_experiment(spec);
  CHECK(result.all_ok());
  CHECK(result.summaries.size() == 1);
  CHECK(result.summaries[0].estimator == Estimator::kParticleFilter);
  CHECK(result.summaries[0].error_count == 3 * (25 - 5));
}

TEST_CASE("identical spec and seed produce byte-identical result files") {
  const fs::path dir_a = fresh_dir("repeat_a");
  const fs::path dir_b = fresh_dir("repeat_b");
  ExperimentSpec spec = tiny_spec(dir_a.string());
  spec.sweep.alphas = {0.3, 0.6};
  REQUIRE(run_experiment(spec).all_ok());
  spec.output_dir = dir_b.string();
  REQUIRE(run_experiment(spec).all_ok());
  for (const char* name :
       {"summary.txt", "cdf_a0.3_m4_n3_pf.txt", "traj_a0.6_m4_n3_pf.txt",
        "sweep_pf.txt", "runs/a0.3_m4_n3_r1/epochs.log"}) {
    CAPTURE(name);
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }
}

TEST_CASE("summary round-trips through its text form") {
  const fs::path dir = fresh_dir("roundtrip");
  ExperimentSpec spec = tiny_spec(dir.string());
  const ExperimentResult result = run_experiment(spec);
  std::ifstream in(dir / "summary.txt");
  REQUIRE(in);
  const std::vector<RunSummary> parsed = parse_summary(in);
  REQUIRE(parsed.size() == result.summaries.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].mean_error == result.summaries[i].mean_error);
    CHECK(parsed[i].error_count == result.summaries[i].error_count);
    CHECK(parsed[i].seed == result.summaries[i].seed);
    CHECK(parsed[i].replication == result.summaries[i].replication);
    CHECK(parsed[i].p_d.has_value() == result.summaries[i].p_d.has_value());
    if (parsed[i].p_d) CHECK(*parsed[i].p_d == *result.summaries[i].p_d);
  }
}

TEST_CASE("report recompute matches the run summary") {
  const fs::path dir = fresh_dir("report_match");
  ExperimentSpec spec = tiny_spec(dir.string());
  spec.replications = 1;
  const ExperimentResult result = run_experiment(spec);
  const LogData data = read_epoch_log((dir / "runs/a0.3_m4_n3_r0/epochs.log").string());
  const std::vector<RunSummary> recomputed = summarize_log_data(data, spec.burn_in);
  REQUIRE(recomputed.size() == 1);
  CHECK(recomputed[0].mean_error ==
        doctest::Approx(result.summaries[0].mean_error).epsilon(1e-15));
  CHECK(recomputed[0].error_count == result.summaries[0].error_count);
  CHECK(recomputed[0].p_d.has_value());
  CHECK(*recomputed[0].p_d == *result.summaries[0].p_d);
}

TEST_CASE("cdf files have monotone columns; trajectory row counts match") {
  const fs::path dir = fresh_dir("plot_checks");
  ExperimentSpec spec = tiny_spec(dir.string());
  REQUIRE(run_experiment(spec).all_ok());

  std::ifstream cdf(dir / "cdf_a0.3_m4_n3_pf.txt");
  REQUIRE(cdf);
  std::string line;
  double prev_threshold = -1.0;
  double prev_fraction = -1.0;
  while (std::getline(cdf, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    double threshold = 0.0, fraction = 0.0;
    is >> threshold >> fraction;
    CHECK(threshold > prev_threshold);  // strictly increasing first column
    CHECK(fraction >= prev_fraction);
    prev_threshold = threshold;
    prev_fraction = fraction;
  }
  CHECK(prev_fraction <= 1.0);

  std::ifstream traj(dir / "traj_a0.3_m4_n3_pf.txt");
  REQUIRE(traj);
  int rows = 0;
  while (std::getline(traj, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  CHECK(rows == 3 * (25 - 5));  // n_mobile x (n_steps - burn_in)
}

TEST_CASE("a failing sweep point is reported and does not stop the rest") {
  const fs::path dir = fresh_dir("partial_failure");
  ExperimentSpec spec = tiny_spec(dir.string());
  spec.scenario.anchor_layout.kind = AnchorLayoutKind::kExplicit;
  spec.scenario.anchor_layout.positions = {
      {0.0, 0.0}, {30.0, 0.0}, {0.0, 15.0}, {30.0, 15.0}};
  spec.replications = 1;
  spec.sweep.anchors = {4, 8};  // 8 is incompatible with the explicit layout
  const ExperimentResult result = run_experiment(spec);
  CHECK_FALSE(result.all_ok());
  REQUIRE(result.failures.size() == 1);
  CHECK(result.summaries.size() == 1);  // the good point still ran
  CHECK(fs::exists(dir / "summary.txt"));
}

TEST_CASE("experiment spec validation") {
  ExperimentSpec spec = tiny_spec("x");
  spec.replications = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec("x");
  spec.burn_in = 25;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec("x");
  spec.sweep.alphas = {1.5};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
