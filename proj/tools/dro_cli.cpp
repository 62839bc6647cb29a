// Command-line front end: data generation, single-model training and
// evaluation, and the experiment / online / timing studies.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dro/baselines.hpp"
#include "dro/calibration.hpp"
#include "dro/dasgd.hpp"
#include "dro/datagen.hpp"
#include "dro/harness.hpp"
#include "dro/io.hpp"

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  try {
    return json::parse(dro::io::read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

json model_to_json(const std::string& method, const dro::TrainState& st, const dro::NewsvendorParams& p, double rho) {
  return {{"method", method},
          {"s", st.dim()},
          {"theta", std::vector<double>(st.theta.begin(), st.theta.end())},
          {"gamma", st.gamma},
          {"t", st.t},
          {"rho", rho},
          {"c_b", p.c_b},
          {"c_h", p.c_h},
          {"delta", p.delta}};
}

dro::TrainState model_from_json(const json& j) {
  const auto theta = j.at("theta").get<std::vector<double>>();
  if (theta.empty()) throw std::invalid_argument("model: empty theta");
  dro::TrainState st;
  st.theta = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  st.gamma = j.value("gamma", 0.0);
  st.t = j.value("t", std::int64_t{0});
  return st;
}

void write_json(const std::string& path, const json& j) { dro::io::write_file(path, j.dump(2) + "\n"); }

struct DroFlags {
  std::int64_t T = 20000;
  int K = 20;
  double eta = 0.1;
  double alpha0 = 1.0;
  double beta0 = 1.0;
  double kappa = std::numeric_limits<double>::infinity();
  double grad_tol = 0;
  double gamma_min = 0.0;
  double gamma_max = 1e6;
  bool curvature_floor = false;

  void add(CLI::App* app) {
    app->add_option("--T", T, "Outer iterations")->capture_default_str();
    app->add_option("--K", K, "Max inner ascent steps")->capture_default_str();
    app->add_option("--eta", eta, "Inner ascent step size")->capture_default_str();
    app->add_option("--alpha0", alpha0, "Policy step scale (alpha = alpha0/sqrt(T))")->capture_default_str();
    app->add_option("--beta0", beta0, "Dual step scale (beta = beta0/sqrt(T))")->capture_default_str();
    app->add_option("--kappa", kappa, "Label transport weight (inf freezes labels)");
    app->add_option("--grad-tol", grad_tol, "Inner stopping tolerance (0 = adaptive)");
    app->add_option("--gamma-min", gamma_min)->capture_default_str();
    app->add_option("--gamma-max", gamma_max)->capture_default_str();
    app->add_flag("--curvature-floor", curvature_floor, "Keep gamma above the smoothed-cost curvature bound");
  }

  dro::DroConfig config() const {
    dro::DroConfig c;
    c.T = T;
    c.K = K;
    c.eta = eta;
    c.alpha0 = alpha0;
    c.beta0 = beta0;
    c.kappa = kappa;
    if (grad_tol > 0) c.grad_tol = grad_tol;
    c.gamma_min = gamma_min;
    c.gamma_max = gamma_max;
    c.curvature_floor = curvature_floor;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein distributionally robust newsvendor: DA-SGD training, baselines and studies"};
  app.require_subcommand(1);

  // generate
  dro::GenSpec gen;
  std::string gen_dist = "uniform", gen_train = "train.csv", gen_test = "test.csv";
  auto* cmd_gen = app.add_subcommand("generate", "Draw a synthetic linear-demand train/test split");
  cmd_gen->add_option("--s", gen.s, "Feature dimension")->capture_default_str();
  cmd_gen->add_option("--n-train", gen.n_train)->capture_default_str();
  cmd_gen->add_option("--n-test", gen.n_test)->capture_default_str();
  cmd_gen->add_option("--sigma", gen.sigma, "Noise standard deviation")->capture_default_str();
  cmd_gen->add_option("--features", gen_dist, "uniform | gaussian")->capture_default_str();
  cmd_gen->add_option("--seed", gen.seed)->capture_default_str();
  cmd_gen->add_option("--train-out", gen_train)->capture_default_str();
  cmd_gen->add_option("--test-out", gen_test)->capture_default_str();

  // train
  std::string tr_data, tr_method = "dasgd", tr_model = "model.json", tr_trace;
  double tr_rho = -1, tr_q = 0.95, tr_delta = 0, tr_cb = 1.0, tr_ch = 0.2, tr_l1 = 0.01, tr_inflate = 1.0;
  std::uint64_t tr_seed = 0;
  bool tr_warm = false;
  DroFlags tr_flags;
  auto* cmd_train = app.add_subcommand("train", "Fit one policy on a dataset CSV");
  cmd_train->add_option("--data", tr_data, "Training CSV")->required();
  cmd_train->add_option("--method", tr_method, "dasgd | erm1 | erm2 | saa")->capture_default_str();
  cmd_train->add_option("--rho", tr_rho, "Wasserstein radius (default: calibrated from --q)");
  cmd_train->add_option("--q", tr_q, "Confidence level for the calibrated radius")->capture_default_str();
  cmd_train->add_option("--delta", tr_delta, "Smoothing half-width (default: 0.1 * sd(y))");
  cmd_train->add_option("--cb", tr_cb, "Unit back-order cost")->capture_default_str();
  cmd_train->add_option("--ch", tr_ch, "Unit holding cost")->capture_default_str();
  cmd_train->add_option("--l1", tr_l1, "L1 weight for erm2")->capture_default_str();
  cmd_train->add_option("--box-inflate", tr_inflate, "Support box scale about the data box")->capture_default_str();
  cmd_train->add_option("--seed", tr_seed)->capture_default_str();
  cmd_train->add_flag("--warm-start", tr_warm, "Least-squares initial policy");
  cmd_train->add_option("--model-out", tr_model)->capture_default_str();
  cmd_train->add_option("--trace-out", tr_trace, "Per-iteration CSV trace (dasgd)");
  tr_flags.add(cmd_train);

  // evaluate
  std::string ev_model, ev_data, ev_out;
  double ev_cb = std::nan(""), ev_ch = std::nan("");
  auto* cmd_eval = app.add_subcommand("evaluate", "Mean newsvendor cost of a model on a dataset CSV");
  cmd_eval->add_option("--model", ev_model)->required();
  cmd_eval->add_option("--data", ev_data)->required();
  cmd_eval->add_option("--cb", ev_cb, "Override the model's back-order cost");
  cmd_eval->add_option("--ch", ev_ch, "Override the model's holding cost");
  cmd_eval->add_option("--out", ev_out, "Write the result as JSON");

  // experiment / timing share the config
  std::string ex_config, ex_out;
  int ex_repeats = 0, ex_threads = -1;
  std::int64_t ex_seed = -1;
  auto add_experiment_flags = [&](CLI::App* c) {
    c->add_option("--config", ex_config, "JSON experiment config");
    c->add_option("--out-dir", ex_out, "Output directory");
    c->add_option("--repeats", ex_repeats, "Override repeats");
    c->add_option("--seed", ex_seed, "Override master seed");
    c->add_option("--threads", ex_threads, "Worker threads (0 = hardware)");
  };
  auto* cmd_exp = app.add_subcommand("experiment", "Run the method comparison grid");
  add_experiment_flags(cmd_exp);
  auto* cmd_timing = app.add_subcommand("timing", "DA-SGD wall-clock per (s, n) cell");
  add_experiment_flags(cmd_timing);

  // online
  std::string on_config, on_out;
  std::int64_t on_T = 0, on_seed = -1;
  auto* cmd_online = app.add_subcommand("online", "Streamed DA-SGD with cumulative regret");
  cmd_online->add_option("--config", on_config, "JSON online config");
  cmd_online->add_option("--T", on_T, "Override stream length");
  cmd_online->add_option("--seed", on_seed, "Override seed");
  cmd_online->add_option("--out", on_out, "regret.csv path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_gen->parsed()) {
      gen.feature_dist = gen_dist == "gaussian" ? dro::FeatureDist::Gaussian : dro::FeatureDist::Uniform;
      if (gen_dist != "gaussian" && gen_dist != "uniform") throw std::invalid_argument("--features: unknown value");
      const auto data = dro::generate(gen);
      dro::io::save_dataset(gen_train, data.train);
      dro::io::save_dataset(gen_test, data.test);
      std::cout << "wrote " << data.train.size() << " train and " << data.test.size() << " test samples\n";
    } else if (cmd_train->parsed()) {
      const dro::Dataset data = dro::io::load_dataset(tr_data);
      if (data.empty()) throw std::invalid_argument("training data is empty");
      const dro::NewsvendorParams p{tr_cb, tr_ch, tr_delta > 0 ? tr_delta : dro::default_delta(data.labels)};
      p.validate();
      dro::TrainState st;
      double rho = 0;
      if (tr_method == "dasgd") {
        dro::DroConfig c = tr_flags.config();
        c.seed = tr_seed;
        const dro::SupportBox box = dro::bounding_box(data, tr_inflate);
        c.rho = tr_rho >= 0 ? tr_rho
                            : dro::radius_for_confidence(data.size(), dro::Confidence(tr_q),
                                                         dro::support_diameter(box, c.cost()));
        if (dro::radius_exceeds_diameter(c.rho, dro::support_diameter(box, c.cost()))) {
          std::cerr << "warning: rho=" << c.rho << " is not below the support diameter; coverage bound lapses\n";
        }
        rho = c.rho;
        dro::TrainState init = tr_warm ? dro::least_squares_state(data, c, p) : dro::initial_state(data.dim(), c, p);
        dro::SampleSource src = dro::SampleSource::bootstrap(data, c.seed);
        auto res = dro::train(src, c, box, p, std::move(init));
        st = std::move(res.state);
        if (!tr_trace.empty()) {
          std::ostringstream os;
          dro::io::write_trace(os, res.metrics);
          dro::io::write_file(tr_trace, os.str());
        }
      } else if (tr_method == "erm1" || tr_method == "erm2") {
        dro::ErmConfig ec;
        ec.l1_weight = tr_method == "erm1" ? 0.0 : tr_l1;
        ec.seed = tr_seed;
        st = dro::erm_train(data, p, ec);
      } else if (tr_method == "saa") {
        st = dro::TrainState::zeros(data.dim(), 0.0);
        st.theta(data.dim()) = dro::saa_quantile({data.labels.begin(), data.labels.end()}, p);
      } else {
        throw std::invalid_argument("--method: unknown method '" + tr_method + "'");
      }
      write_json(tr_model, model_to_json(tr_method, st, p, rho));
      std::cout << "wrote " << tr_model << "\n";
    } else if (cmd_eval->parsed()) {
      const json model = load_json(ev_model);
      const dro::TrainState st = model_from_json(model);
      const dro::Dataset data = dro::io::load_dataset(ev_data);
      const dro::NewsvendorParams p{std::isnan(ev_cb) ? model.value("c_b", 1.0) : ev_cb,
                                    std::isnan(ev_ch) ? model.value("c_h", 0.2) : ev_ch, model.value("delta", 0.1)};
      p.validate();
      const double cost = dro::evaluate_policy(st, data, p);
      std::cout << "mean_cost " << dro::io::format_double(cost) << "\n";
      if (!ev_out.empty()) {
        write_json(ev_out, {{"mean_cost", cost}, {"n", data.size()}, {"c_b", p.c_b}, {"c_h", p.c_h}});
      }
    } else if (cmd_exp->parsed() || cmd_timing->parsed()) {
      dro::ExperimentConfig cfg = ex_config.empty() ? dro::ExperimentConfig{}
                                                     : dro::experiment_config_from_json(load_json(ex_config));
      if (!ex_out.empty()) cfg.out_dir = ex_out;
      if (ex_repeats > 0) cfg.repeats = ex_repeats;
      if (ex_seed >= 0) cfg.seed = static_cast<std::uint64_t>(ex_seed);
      if (ex_threads >= 0) cfg.threads = ex_threads;
      if (cfg.out_dir.empty()) cfg.out_dir = cmd_exp->parsed() ? "experiment_out" : "timing_out";
      cfg.validate();
      if (cmd_exp->parsed()) {
        const auto result = dro::run_experiment(cfg);
        std::cout << dro::summary_to_csv(result.summary);
      } else {
        std::vector<dro::TrialRecord> trials;
        const auto rows = dro::timing_study(cfg, &trials);
        std::filesystem::create_directories(cfg.out_dir);
        const std::filesystem::path dir(cfg.out_dir);
        dro::io::write_file((dir / "timing.csv").string(), dro::timing_to_csv(rows, cfg));
        dro::io::write_file((dir / "trials.csv").string(), dro::trials_to_csv(trials));
        std::cout << dro::timing_to_csv(rows, cfg);
      }
    } else if (cmd_online->parsed()) {
      dro::OnlineConfig cfg = on_config.empty() ? dro::OnlineConfig{} : dro::online_config_from_json(load_json(on_config));
      if (on_T > 0) cfg.T = on_T;
      if (on_seed >= 0) cfg.seed = static_cast<std::uint64_t>(on_seed);
      if (!on_out.empty()) cfg.out_path = on_out;
      if (cfg.out_path.empty()) cfg.out_path = "regret.csv";
      const auto trace = dro::run_online(cfg);
      std::cout << "T " << trace.cumulative.size() << " cumulative_regret "
                << dro::io::format_double(trace.cumulative.empty() ? 0.0 : trace.cumulative.back()) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
