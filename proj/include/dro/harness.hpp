#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dro/baselines.hpp"
#include "dro/core.hpp"
#include "dro/dasgd.hpp"
#include "dro/datagen.hpp"

namespace dro {

// Method identifiers used in configs and output files.
inline constexpr std::string_view kDaSgd = "dasgd";
inline constexpr std::string_view kErm1 = "erm1";
inline constexpr std::string_view kErm2 = "erm2";
inline constexpr std::string_view kSaa = "saa";

struct ExperimentConfig {
  std::vector<Index> s_values{10, 50};
  std::vector<Index> n_values{10, 50, 100};
  std::vector<double> sigma_values{0.5, 1.0};
  int repeats = 20;
  std::vector<std::string> methods{"dasgd", "erm1", "erm2"};

  /// T, K, eta, step scales and clamps for DA-SGD; rho and seed are set per trial.
  DroConfig dasgd;
  /// Fixed radius for every cell; unset calibrates rho from n, q and the data diameter.
  std::optional<double> rho;
  double q = 0.95;
  double box_inflate = 1.0;
  /// Smoothing half-width; unset uses default_delta of the training labels.
  std::optional<double> delta;
  bool warm_start = false;

  ErmConfig erm;
  double erm2_l1_weight = 0.01;

  double c_b = 1.0;
  double c_h = 0.2;
  Index n_test = 10000;
  FeatureDist feature_dist = FeatureDist::Uniform;

  std::string out_dir;
  std::uint64_t seed = 0;
  /// 0 uses the hardware concurrency.
  int threads = 0;

  void validate() const;
};

struct TrialRecord {
  std::string method;
  Index s = 0;
  Index n = 0;
  double sigma = 0;
  int repeat = 0;
  double out_of_sample_cost = 0;
  double train_seconds = 0;
  double eval_seconds = 0;
  double rho = 0;
  double final_gamma = 0;
  /// FNV-1a of the train and test data the trial consumed.
  std::string data_hash;
  /// "ok", or the failure message.
  std::string status = "ok";
};

struct SummaryRow {
  std::string method;
  Index s = 0;
  Index n = 0;
  double sigma = 0;
  int count = 0;
  int failures = 0;
  double mean_cost = 0;
  /// Sample variance (n - 1 denominator) of the per-repeat costs.
  double var_cost = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<SummaryRow> summary;
};

/// Every method sees the same generated train/test split in each trial.
/// Writes trials.csv, timings.csv and summary.csv when cfg.out_dir is set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Single trial of one grid cell; exposed for the timing study and tests.
std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, Index s, Index n, double sigma, int repeat,
                                   std::uint64_t trial_seed);

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& trials);

/// trials.csv holds the deterministic fields; wall-clock goes to timings.csv.
std::string trials_to_csv(const std::vector<TrialRecord>& trials);
std::vector<TrialRecord> parse_trials_csv(std::string_view text);
std::string timings_to_csv(const std::vector<TrialRecord>& trials);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

struct OnlineConfig {
  Index s = 5;
  double sigma = 0.5;
  FeatureDist feature_dist = FeatureDist::Uniform;
  std::int64_t T = 16000;
  /// rho is fixed in advance: the stream length is unknown to the learner.
  DroConfig dasgd = [] {
    DroConfig c;
    c.rho = 0.1;
    return c;
  }();
  Index comparator_n = 20000;
  std::int64_t comparator_T = 200000;
  double c_b = 1.0;
  double c_h = 0.2;
  std::optional<double> delta;
  std::uint64_t seed = 0;
  std::string out_path;

  void validate() const;
};

struct RegretTrace {
  /// cumulative[t-1] = sum over the first t steps.
  std::vector<double> cumulative;
  TrainState comparator;
  TrainState final_state;
};

/// Runs DA-SGD over `stream` in order and accumulates
/// h(theta_t, gamma_t; xi_t, xi*_t) - h(theta*, gamma*; xi_t, xi*), each term
/// at its own adversarial point. With learn = false the iterate stays at `init`.
RegretTrace online_regret(const Dataset& stream, const DroConfig& cfg, const SupportBox& box,
                          const NewsvendorParams& p, TrainState init, const TrainState& comparator,
                          bool learn = true);

/// Comparator from a long offline run on held-out data, then a streamed run
/// of length cfg.T. Writes regret.csv to cfg.out_path when set.
RegretTrace run_online(const OnlineConfig& cfg);

/// The pieces run_online builds from its config, exposed for reuse.
struct OnlineSetup {
  Dataset holdout;
  SupportBox box;
  NewsvendorParams params;
  DroConfig cfg;
};
OnlineSetup online_setup(const OnlineConfig& cfg);
TrainState online_comparator(const OnlineConfig& cfg, const OnlineSetup& setup);

std::string regret_to_csv(const RegretTrace& trace);

struct TimingRow {
  Index s = 0;
  Index n = 0;
  int runs = 0;
  double mean_seconds = 0;
};

/// Mean DA-SGD train+evaluate wall-clock per (s, n), pooled over sigmas and
/// repeats; trials run one at a time. Empty when DA-SGD is not a method.
std::vector<TimingRow> timing_study(const ExperimentConfig& cfg, std::vector<TrialRecord>* trials = nullptr);
std::string timing_to_csv(const std::vector<TimingRow>& rows, const ExperimentConfig& cfg);

// JSON config files. Missing keys keep their defaults; unknown keys are errors.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
OnlineConfig online_config_from_json(const nlohmann::json& j);
void apply_dro_json(const nlohmann::json& j, DroConfig& cfg);

}  // namespace dro
