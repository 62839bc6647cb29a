#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "dro/harness.hpp"
#include "dro/io.hpp"

using namespace dro;

namespace {

ExperimentConfig tiny_grid() {
  ExperimentConfig cfg;
  cfg.s_values = {2};
  cfg.n_values = {8, 12};
  cfg.sigma_values = {0.5};
  cfg.repeats = 3;
  cfg.methods = {"dasgd", "erm1", "erm2", "saa"};
  cfg.dasgd.T = 200;
  cfg.n_test = 200;
  cfg.erm.iterations = 300;
  cfg.seed = 5;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("one record per method, cell and repeat") {
  ExperimentConfig cfg = tiny_grid();
  cfg.methods = {"erm1"};
  cfg.repeats = 1;
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.trials.size() == 2);
  CHECK(r.summary.size() == 2);
  for (const TrialRecord& t : r.trials) CHECK(t.status == "ok");

  cfg = tiny_grid();
  CHECK(run_experiment(cfg).trials.size() == 4 * 2 * 3);
}

TEST_CASE("experiments are reproducible and thread-count independent") {
  ExperimentConfig cfg = tiny_grid();
  const std::string a = trials_to_csv(run_experiment(cfg).trials);
  cfg.threads = 1;
  const std::string b = trials_to_csv(run_experiment(cfg).trials);
  CHECK(a == b);
  cfg.seed = 6;
  CHECK(trials_to_csv(run_experiment(cfg).trials) != a);
}

TEST_CASE("all methods in a trial share one dataset") {
  const ExperimentResult r = run_experiment(tiny_grid());
  std::map<std::tuple<Index, int>, std::set<std::string>> hashes;
  for (const TrialRecord& t : r.trials) hashes[{t.n, t.repeat}].insert(t.data_hash);
  CHECK(hashes.size() == 6);
  std::set<std::string> distinct;
  for (const auto& [key, h] : hashes) {
    CHECK(h.size() == 1);
    distinct.insert(*h.begin());
  }
  CHECK(distinct.size() == 6);
}

TEST_CASE("summary statistics recompute from trials.csv") {
  namespace fs = std::filesystem;
  ExperimentConfig cfg = tiny_grid();
  cfg.out_dir = (fs::temp_directory_path() / "dro_harness_summary").string();
  fs::remove_all(cfg.out_dir);
  const ExperimentResult r = run_experiment(cfg);
  const std::vector<TrialRecord> back = parse_trials_csv(io::read_file(cfg.out_dir + "/trials.csv"));
  REQUIRE(back.size() == r.trials.size());
  CHECK(trials_to_csv(back) == trials_to_csv(r.trials));
  CHECK(fs::exists(cfg.out_dir + "/timings.csv"));
  CHECK(fs::exists(cfg.out_dir + "/summary.csv"));

  for (const SummaryRow& row : r.summary) {
    std::vector<double> costs;
    for (const TrialRecord& t : back) {
      if (t.method == row.method && t.s == row.s && t.n == row.n && t.sigma == row.sigma) {
        costs.push_back(t.out_of_sample_cost);
      }
    }
    REQUIRE(costs.size() == 3);
    double mean = 0;
    for (double c : costs) mean += c;
    mean /= 3;
    double var = 0;
    for (double c : costs) var += (c - mean) * (c - mean);
    var /= 2;
    CHECK(row.count == 3);
    CHECK(row.mean_cost == doctest::Approx(mean).epsilon(1e-12));
    CHECK(row.var_cost == doctest::Approx(var).epsilon(1e-9));
  }
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("a failing trial is recorded, not fatal") {
  ExperimentConfig cfg = tiny_grid();
  cfg.methods = {"dasgd"};
  cfg.repeats = 1;
  cfg.n_values = {1};
  const ExperimentResult r = run_experiment(cfg);
  REQUIRE(r.trials.size() == 1);
  CHECK(r.trials[0].status != "ok");
  CHECK(std::isnan(r.trials[0].out_of_sample_cost));
  CHECK(r.summary[0].failures == 1);
}

TEST_CASE("regret against the learner's own frozen iterate is exactly zero") {
  OnlineConfig oc;
  oc.s = 2;
  oc.T = 200;
  oc.comparator_n = 100;
  oc.seed = 3;
  const OnlineSetup setup = online_setup(oc);
  const TrainState init = initial_state(2, setup.cfg, setup.params);
  const RegretTrace tr = online_regret(setup.holdout, setup.cfg, setup.box, setup.params, init, init, false);
  CHECK(tr.cumulative.size() == 100);
  for (double v : tr.cumulative) CHECK(v == 0.0);
}

TEST_CASE("online run writes one regret row per step") {
  OnlineConfig oc;
  oc.s = 2;
  oc.T = 150;
  oc.comparator_n = 50;
  oc.comparator_T = 500;
  oc.seed = 4;
  const RegretTrace a = run_online(oc), b = run_online(oc);
  CHECK(a.cumulative.size() == 150);
  CHECK(regret_to_csv(a) == regret_to_csv(b));
  CHECK(regret_to_csv(a).rfind("t,cumulative_regret\n1,", 0) == 0);
}

TEST_CASE("timing study reports every (s, n) cell") {
  ExperimentConfig cfg = tiny_grid();
  cfg.repeats = 1;
  std::vector<TrialRecord> trials;
  const std::vector<TimingRow> rows = timing_study(cfg, &trials);
  CHECK(rows.size() == 2);
  for (const TimingRow& r : rows) {
    CHECK(r.runs == 1);
    CHECK(r.mean_seconds > 0);
  }
  CHECK(trials.size() == 2);
  cfg.methods = {"erm1"};
  CHECK(timing_study(cfg).empty());
}

TEST_CASE("JSON configs round trip and reject unknown keys") {
  ExperimentConfig cfg = tiny_grid();
  cfg.rho = 0.2;
  cfg.dasgd.kappa = 3;
  cfg.dasgd.curvature_floor = true;
  const ExperimentConfig back = experiment_config_from_json(to_json(cfg));
  CHECK(back.n_values == cfg.n_values);
  CHECK(back.rho == cfg.rho);
  CHECK(back.dasgd.kappa == 3.0);
  CHECK(back.dasgd.T == 200);
  CHECK(back.dasgd.curvature_floor);
  CHECK(to_json(back) == to_json(cfg));

  CHECK(std::isinf(experiment_config_from_json(nlohmann::json{{"dasgd", {{"kappa", "inf"}}}}).dasgd.kappa));
  CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json{{"repeat", 3}}), std::invalid_argument);
  CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json{{"repeats", "three"}}), std::invalid_argument);
  CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json{{"methods", {"rf"}}}), std::invalid_argument);
  CHECK_THROWS_AS(online_config_from_json(nlohmann::json{{"dasgd", {{"etaa", 1}}}}), std::invalid_argument);
  CHECK(online_config_from_json(nlohmann::json{{"T", 10}}).T == 10);
}
