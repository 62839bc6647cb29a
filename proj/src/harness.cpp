#include "dro/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "dro/calibration.hpp"
#include "dro/io.hpp"

namespace dro {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kDaSgdSeedStream = 0xda;
constexpr std::uint64_t kHoldoutStream = 11;
constexpr std::uint64_t kOnlineStream = 12;
constexpr std::uint64_t kComparatorSeedStream = 13;

const std::set<std::string_view> kKnownMethods{kDaSgd, kErm1, kErm2, kSaa};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::uint64_t hash_dataset(const Dataset& d, std::uint64_t h) {
  auto feed = [&](const double* p, Index count) {
    const std::string_view bytes(reinterpret_cast<const char*>(p), static_cast<std::size_t>(count) * sizeof(double));
    h = mix64(h ^ io::fnv1a(bytes));
  };
  feed(d.features.data(), d.features.size());
  feed(d.labels.data(), d.labels.size());
  return h;
}

std::string sanitize(std::string msg) {
  for (char& c : msg) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return msg;
}

std::uint64_t trial_seed(std::uint64_t master, Index s, Index n, double sigma, int repeat) {
  return seeded(master)
      .split(static_cast<std::uint64_t>(s))
      .split(static_cast<std::uint64_t>(n))
      .split(std::bit_cast<std::uint64_t>(sigma))
      .split(static_cast<std::uint64_t>(repeat))
      .key();
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

std::string feature_dist_name(FeatureDist d) { return d == FeatureDist::Uniform ? "uniform" : "gaussian"; }

FeatureDist parse_feature_dist(const std::string& s) {
  if (s == "uniform") return FeatureDist::Uniform;
  if (s == "gaussian") return FeatureDist::Gaussian;
  throw std::invalid_argument("feature_dist must be 'uniform' or 'gaussian', got '" + s + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (repeats < 1) throw std::invalid_argument("experiment: repeats must be >= 1");
  if (methods.empty()) throw std::invalid_argument("experiment: method list is empty");
  for (const auto& m : methods) {
    if (!kKnownMethods.contains(m)) throw std::invalid_argument("experiment: unknown method '" + m + "'");
  }
  if (s_values.empty() || n_values.empty() || sigma_values.empty()) {
    throw std::invalid_argument("experiment: every grid axis needs at least one value");
  }
  for (Index s : s_values)
    if (s < 0) throw std::invalid_argument("experiment: s must be >= 0");
  for (Index n : n_values)
    if (n < 1) throw std::invalid_argument("experiment: n must be >= 1");
  for (double sg : sigma_values)
    if (!(sg >= 0)) throw std::invalid_argument("experiment: sigma must be >= 0");
  if (!(q > 0 && q < 1)) throw std::invalid_argument("experiment: q must lie in (0, 1)");
  if (rho && !(*rho >= 0)) throw std::invalid_argument("experiment: rho must be >= 0");
  if (delta && !(*delta > 0)) throw std::invalid_argument("experiment: delta must be > 0");
  if (!(c_b > 0 && c_h > 0)) throw std::invalid_argument("experiment: c_b and c_h must be > 0");
  if (n_test < 1) throw std::invalid_argument("experiment: n_test must be >= 1");
  if (!(box_inflate >= 1)) throw std::invalid_argument("experiment: box_inflate must be >= 1");
  if (!(erm2_l1_weight >= 0)) throw std::invalid_argument("experiment: erm2_l1_weight must be >= 0");
  dasgd.validate();
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, Index s, Index n, double sigma, int repeat,
                                   std::uint64_t seed) {
  GenSpec spec;
  spec.s = s;
  spec.n_train = n;
  spec.n_test = cfg.n_test;
  spec.sigma = sigma;
  spec.feature_dist = cfg.feature_dist;
  spec.seed = seed;
  const GeneratedData data = generate(spec);
  const std::string hash = io::hex64(hash_dataset(data.test, hash_dataset(data.train, 0)));
  const NewsvendorParams params{cfg.c_b, cfg.c_h, cfg.delta ? *cfg.delta : default_delta(data.train.labels)};

  std::vector<TrialRecord> out;
  for (const auto& method : cfg.methods) {
    TrialRecord rec;
    rec.method = method;
    rec.s = s;
    rec.n = n;
    rec.sigma = sigma;
    rec.repeat = repeat;
    rec.data_hash = hash;
    try {
      TrainState state;
      auto t0 = Clock::now();
      if (method == kDaSgd) {
        DroConfig dc = cfg.dasgd;
        dc.seed = seeded(seed).split(kDaSgdSeedStream).key();
        const SupportBox box = bounding_box(data.train, cfg.box_inflate);
        dc.rho = cfg.rho ? *cfg.rho : radius_for_confidence(n, Confidence(cfg.q), support_diameter(box, dc.cost()));
        TrainState init = cfg.warm_start ? least_squares_state(data.train, dc, params) : initial_state(s, dc, params);
        SampleSource source = SampleSource::bootstrap(data.train, dc.seed);
        state = train(source, dc, box, params, std::move(init)).state;
        rec.rho = dc.rho;
        rec.final_gamma = state.gamma;
      } else if (method == kErm1 || method == kErm2) {
        ErmConfig ec = cfg.erm;
        ec.l1_weight = method == kErm1 ? 0.0 : cfg.erm2_l1_weight;
        state = erm_train(data.train, params, ec);
      } else {
        state = TrainState::zeros(s, 0.0);
        state.theta(s) = saa_quantile({data.train.labels.begin(), data.train.labels.end()}, params);
      }
      rec.train_seconds = seconds_since(t0);
      t0 = Clock::now();
      rec.out_of_sample_cost = evaluate_policy(state, data.test, params);
      rec.eval_seconds = seconds_since(t0);
    } catch (const std::exception& e) {
      rec.status = sanitize(e.what());
      rec.out_of_sample_cost = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& trials) {
  std::map<std::tuple<Index, Index, double, std::string>, std::pair<std::vector<double>, int>> groups;
  for (const auto& r : trials) {
    auto& g = groups[{r.s, r.n, r.sigma, r.method}];
    if (r.status == "ok") {
      g.first.push_back(r.out_of_sample_cost);
    } else {
      ++g.second;
    }
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, g] : groups) {
    SummaryRow row;
    std::tie(row.s, row.n, row.sigma, row.method) = key;
    const auto& costs = g.first;
    row.count = static_cast<int>(costs.size());
    row.failures = g.second;
    if (costs.empty()) {
      row.mean_cost = row.var_cost = std::numeric_limits<double>::quiet_NaN();
    } else {
      double mean = 0;
      for (double c : costs) mean += c;
      mean /= double(costs.size());
      double ss = 0;
      for (double c : costs) ss += (c - mean) * (c - mean);
      row.mean_cost = mean;
      row.var_cost = costs.size() > 1 ? ss / double(costs.size() - 1) : 0.0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Task {
    Index s, n;
    double sigma;
    int repeat;
  };
  std::vector<Task> tasks;
  for (Index s : cfg.s_values)
    for (Index n : cfg.n_values)
      for (double sigma : cfg.sigma_values)
        for (int r = 0; r < cfg.repeats; ++r) tasks.push_back({s, n, sigma, r});

  std::vector<std::vector<TrialRecord>> results(tasks.size());
  parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
    const Task& t = tasks[i];
    results[i] = run_trial(cfg, t.s, t.n, t.sigma, t.repeat, trial_seed(cfg.seed, t.s, t.n, t.sigma, t.repeat));
  });

  ExperimentResult out;
  for (auto& r : results)
    for (auto& rec : r) out.trials.push_back(std::move(rec));
  out.summary = summarize(out.trials);

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);
    io::write_file((dir / "trials.csv").string(), trials_to_csv(out.trials));
    io::write_file((dir / "timings.csv").string(), timings_to_csv(out.trials));
    io::write_file((dir / "summary.csv").string(), summary_to_csv(out.summary));
  }
  return out;
}

std::string trials_to_csv(const std::vector<TrialRecord>& trials) {
  std::ostringstream os;
  os << "method,s,n,sigma,repeat,out_of_sample_cost,rho,final_gamma,data_hash,status\n";
  for (const auto& r : trials) {
    os << r.method << ',' << r.s << ',' << r.n << ',' << io::format_double(r.sigma) << ',' << r.repeat << ','
       << io::format_double(r.out_of_sample_cost) << ',' << io::format_double(r.rho) << ','
       << io::format_double(r.final_gamma) << ',' << r.data_hash << ',' << r.status << '\n';
  }
  return os.str();
}

std::vector<TrialRecord> parse_trials_csv(std::string_view text) {
  std::vector<TrialRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("method,s,n,sigma,repeat", 0) != 0) {
    throw std::invalid_argument("trials csv: bad header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = io::split_csv_line(line);
    if (f.size() != 10) throw std::invalid_argument("trials csv: expected 10 fields");
    TrialRecord r;
    r.method = std::string(f[0]);
    r.s = static_cast<Index>(io::parse_double(f[1]));
    r.n = static_cast<Index>(io::parse_double(f[2]));
    r.sigma = io::parse_double(f[3]);
    r.repeat = static_cast<int>(io::parse_double(f[4]));
    r.out_of_sample_cost = io::parse_double(f[5]);
    r.rho = io::parse_double(f[6]);
    r.final_gamma = io::parse_double(f[7]);
    r.data_hash = std::string(f[8]);
    r.status = std::string(f[9]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string timings_to_csv(const std::vector<TrialRecord>& trials) {
  std::ostringstream os;
  os << "method,s,n,sigma,repeat,train_seconds,eval_seconds\n";
  for (const auto& r : trials) {
    os << r.method << ',' << r.s << ',' << r.n << ',' << io::format_double(r.sigma) << ',' << r.repeat << ','
       << io::format_double(r.train_seconds) << ',' << io::format_double(r.eval_seconds) << '\n';
  }
  return os.str();
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "method,s,n,sigma,count,failures,mean_cost,var_cost\n";
  for (const auto& r : rows) {
    os << r.method << ',' << r.s << ',' << r.n << ',' << io::format_double(r.sigma) << ',' << r.count << ','
       << r.failures << ',' << io::format_double(r.mean_cost) << ',' << io::format_double(r.var_cost) << '\n';
  }
  return os.str();
}

void OnlineConfig::validate() const {
  if (s < 0) throw std::invalid_argument("online: s must be >= 0");
  if (!(sigma >= 0)) throw std::invalid_argument("online: sigma must be >= 0");
  if (T < 1) throw std::invalid_argument("online: T must be >= 1");
  if (comparator_n < 2 || comparator_T < 1) throw std::invalid_argument("online: comparator needs n >= 2, T >= 1");
  if (!(c_b > 0 && c_h > 0)) throw std::invalid_argument("online: c_b and c_h must be > 0");
  if (delta && !(*delta > 0)) throw std::invalid_argument("online: delta must be > 0");
  dasgd.validate();
}

RegretTrace online_regret(const Dataset& stream, const DroConfig& cfg, const SupportBox& box,
                          const NewsvendorParams& p, TrainState init, const TrainState& comparator, bool learn) {
  if (comparator.dim() != stream.dim() || comparator.theta.size() == 0) {
    throw std::invalid_argument("online_regret: comparator missing or of wrong dimension");
  }
  DroConfig run = cfg;
  run.T = stream.size();
  run.validate();
  RegretTrace trace{{}, comparator, std::move(init)};
  if (stream.empty()) return trace;
  const StepSchedule steps = default_steps(run);
  trace.cumulative.reserve(static_cast<std::size_t>(stream.size()));
  double total = 0;
  for (Index t = 0; t < stream.size(); ++t) {
    const Sample xi = stream.sample(t);
    const double learner_h = learn ? dasgd_step(trace.final_state, xi, run, box, p, steps).adversarial.h_value
                                   : perturb(trace.final_state, xi, run, box, p).h_value;
    total += learner_h - perturb(comparator, xi, run, box, p).h_value;
    trace.cumulative.push_back(total);
  }
  return trace;
}

OnlineSetup online_setup(const OnlineConfig& cfg) {
  cfg.validate();
  GenSpec spec;
  spec.s = cfg.s;
  spec.sigma = cfg.sigma;
  spec.feature_dist = cfg.feature_dist;
  spec.seed = cfg.seed;
  OnlineSetup setup;
  setup.holdout = generate_stream(spec, cfg.comparator_n, kHoldoutStream);
  setup.box = bounding_box(setup.holdout);
  setup.params = {cfg.c_b, cfg.c_h, cfg.delta ? *cfg.delta : default_delta(setup.holdout.labels)};
  setup.cfg = cfg.dasgd;
  setup.cfg.T = cfg.T;
  return setup;
}

TrainState online_comparator(const OnlineConfig& cfg, const OnlineSetup& setup) {
  DroConfig c = setup.cfg;
  c.T = cfg.comparator_T;
  c.seed = seeded(cfg.seed).split(kComparatorSeedStream).key();
  SampleSource source = SampleSource::bootstrap(setup.holdout, c.seed);
  return train(source, c, setup.box, setup.params, initial_state(cfg.s, c, setup.params)).state;
}

RegretTrace run_online(const OnlineConfig& cfg) {
  const OnlineSetup setup = online_setup(cfg);
  const TrainState comparator = online_comparator(cfg, setup);
  GenSpec spec;
  spec.s = cfg.s;
  spec.sigma = cfg.sigma;
  spec.feature_dist = cfg.feature_dist;
  spec.seed = cfg.seed;
  const Dataset stream = generate_stream(spec, static_cast<Index>(cfg.T), kOnlineStream);
  RegretTrace trace = online_regret(stream, setup.cfg, setup.box, setup.params,
                                    initial_state(cfg.s, setup.cfg, setup.params), comparator);
  if (!cfg.out_path.empty()) io::write_file(cfg.out_path, regret_to_csv(trace));
  return trace;
}

std::string regret_to_csv(const RegretTrace& trace) {
  std::ostringstream os;
  os << "t,cumulative_regret\n";
  for (std::size_t t = 0; t < trace.cumulative.size(); ++t) {
    os << (t + 1) << ',' << io::format_double(trace.cumulative[t]) << '\n';
  }
  return os.str();
}

std::vector<TimingRow> timing_study(const ExperimentConfig& cfg, std::vector<TrialRecord>* trials) {
  if (std::find(cfg.methods.begin(), cfg.methods.end(), kDaSgd) == cfg.methods.end()) return {};
  ExperimentConfig only = cfg;
  only.methods = {std::string(kDaSgd)};
  only.validate();
  std::vector<TimingRow> rows;
  for (Index s : only.s_values) {
    for (Index n : only.n_values) {
      TimingRow row{s, n, 0, 0.0};
      for (double sigma : only.sigma_values) {
        for (int r = 0; r < only.repeats; ++r) {
          for (auto& rec : run_trial(only, s, n, sigma, r, trial_seed(only.seed, s, n, sigma, r))) {
            if (rec.status == "ok") {
              row.mean_seconds += rec.train_seconds + rec.eval_seconds;
              ++row.runs;
            }
            if (trials) trials->push_back(std::move(rec));
          }
        }
      }
      if (row.runs > 0) row.mean_seconds /= row.runs;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string timing_to_csv(const std::vector<TimingRow>& rows, const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "s,n,T,K,runs,mean_seconds\n";
  for (const auto& r : rows) {
    os << r.s << ',' << r.n << ',' << cfg.dasgd.T << ',' << cfg.dasgd.K << ',' << r.runs << ','
       << io::format_double(r.mean_seconds) << '\n';
  }
  return os.str();
}

// --- JSON configs ------------------------------------------------------------

namespace {

class Reader {
 public:
  Reader(const nlohmann::json& j, std::string context) : j_(j), ctx_(std::move(context)) {
    if (!j_.is_object()) throw std::invalid_argument(ctx_ + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (auto it = j_.find(key); it != j_.end()) {
      seen_.insert(key);
      try {
        out = it->get<T>();
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(ctx_ + "." + key + ": " + e.what());
      }
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    if (auto it = j_.find(key); it != j_.end()) {
      if (it->is_null()) {
        seen_.insert(key);
        out.reset();
        return;
      }
      T v{};
      get(key, v);
      out = v;
    }
  }

  /// Numbers, or the strings "inf"/"infinity".
  void get_extended(const char* key, double& out) {
    if (auto it = j_.find(key); it != j_.end()) {
      seen_.insert(key);
      if (it->is_string() && (*it == "inf" || *it == "infinity")) {
        out = std::numeric_limits<double>::infinity();
      } else if (it->is_number()) {
        out = it->get<double>();
      } else {
        throw std::invalid_argument(ctx_ + "." + key + ": expected a number or \"inf\"");
      }
    }
  }

  const nlohmann::json* child(const char* key) {
    if (auto it = j_.find(key); it != j_.end()) {
      seen_.insert(key);
      return &*it;
    }
    return nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) throw std::invalid_argument(ctx_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string ctx_;
  std::set<std::string> seen_;
};

}  // namespace

void apply_dro_json(const nlohmann::json& j, DroConfig& cfg) {
  Reader r(j, "dasgd");
  r.get("rho", cfg.rho);
  r.get_extended("kappa", cfg.kappa);
  r.get("T", cfg.T);
  r.get("K", cfg.K);
  r.get("eta", cfg.eta);
  r.get("alpha0", cfg.alpha0);
  r.get("beta0", cfg.beta0);
  r.get("grad_tol", cfg.grad_tol);
  r.get("gamma_min", cfg.gamma_min);
  r.get("gamma_max", cfg.gamma_max);
  r.get("curvature_floor", cfg.curvature_floor);
  r.get("gamma_margin", cfg.gamma_margin);
  r.get("mu_floor", cfg.mu_floor);
  r.get("seed", cfg.seed);
  r.finish();
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  Reader r(j, "experiment");
  r.get("s_values", cfg.s_values);
  r.get("n_values", cfg.n_values);
  r.get("sigma_values", cfg.sigma_values);
  r.get("repeats", cfg.repeats);
  r.get("methods", cfg.methods);
  if (const auto* d = r.child("dasgd")) apply_dro_json(*d, cfg.dasgd);
  r.get("rho", cfg.rho);
  r.get("q", cfg.q);
  r.get("box_inflate", cfg.box_inflate);
  r.get("delta", cfg.delta);
  r.get("warm_start", cfg.warm_start);
  if (const auto* e = r.child("erm")) {
    Reader er(*e, "erm");
    er.get("iterations", cfg.erm.iterations);
    er.get("step_scale", cfg.erm.step_scale);
    er.get("seed", cfg.erm.seed);
    er.finish();
  }
  r.get("erm2_l1_weight", cfg.erm2_l1_weight);
  r.get("c_b", cfg.c_b);
  r.get("c_h", cfg.c_h);
  r.get("n_test", cfg.n_test);
  std::string dist = feature_dist_name(cfg.feature_dist);
  r.get("feature_dist", dist);
  cfg.feature_dist = parse_feature_dist(dist);
  r.get("out_dir", cfg.out_dir);
  r.get("seed", cfg.seed);
  r.get("threads", cfg.threads);
  r.finish();
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json d = {{"T", cfg.dasgd.T},
                      {"K", cfg.dasgd.K},
                      {"eta", cfg.dasgd.eta},
                      {"alpha0", cfg.dasgd.alpha0},
                      {"beta0", cfg.dasgd.beta0},
                      {"gamma_min", cfg.dasgd.gamma_min},
                      {"gamma_max", cfg.dasgd.gamma_max},
                      {"curvature_floor", cfg.dasgd.curvature_floor},
                      {"gamma_margin", cfg.dasgd.gamma_margin},
                      {"mu_floor", cfg.dasgd.mu_floor}};
  d["kappa"] = std::isinf(cfg.dasgd.kappa) ? nlohmann::json("inf") : nlohmann::json(cfg.dasgd.kappa);
  d["grad_tol"] = cfg.dasgd.grad_tol ? nlohmann::json(*cfg.dasgd.grad_tol) : nlohmann::json(nullptr);
  return {{"s_values", cfg.s_values},
          {"n_values", cfg.n_values},
          {"sigma_values", cfg.sigma_values},
          {"repeats", cfg.repeats},
          {"methods", cfg.methods},
          {"dasgd", d},
          {"rho", cfg.rho ? nlohmann::json(*cfg.rho) : nlohmann::json(nullptr)},
          {"q", cfg.q},
          {"box_inflate", cfg.box_inflate},
          {"delta", cfg.delta ? nlohmann::json(*cfg.delta) : nlohmann::json(nullptr)},
          {"warm_start", cfg.warm_start},
          {"erm", {{"iterations", cfg.erm.iterations}, {"step_scale", cfg.erm.step_scale}, {"seed", cfg.erm.seed}}},
          {"erm2_l1_weight", cfg.erm2_l1_weight},
          {"c_b", cfg.c_b},
          {"c_h", cfg.c_h},
          {"n_test", cfg.n_test},
          {"feature_dist", feature_dist_name(cfg.feature_dist)},
          {"out_dir", cfg.out_dir},
          {"seed", cfg.seed},
          {"threads", cfg.threads}};
}

OnlineConfig online_config_from_json(const nlohmann::json& j) {
  OnlineConfig cfg;
  Reader r(j, "online");
  r.get("s", cfg.s);
  r.get("sigma", cfg.sigma);
  std::string dist = feature_dist_name(cfg.feature_dist);
  r.get("feature_dist", dist);
  cfg.feature_dist = parse_feature_dist(dist);
  r.get("T", cfg.T);
  if (const auto* d = r.child("dasgd")) apply_dro_json(*d, cfg.dasgd);
  r.get("comparator_n", cfg.comparator_n);
  r.get("comparator_T", cfg.comparator_T);
  r.get("c_b", cfg.c_b);
  r.get("c_h", cfg.c_h);
  r.get("delta", cfg.delta);
  r.get("seed", cfg.seed);
  r.get("out_path", cfg.out_path);
  r.finish();
  cfg.validate();
  return cfg;
}

}  // namespace dro
