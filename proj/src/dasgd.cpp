#include "dro/dasgd.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace dro {

SampleSource SampleSource::bootstrap(Dataset data, std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("bootstrap source: empty dataset");
  const Index s = data.dim();
  return {Bootstrap{std::make_shared<const Dataset>(std::move(data))}, s, seed};
}

SampleSource SampleSource::stream(Dataset data) {
  const Index s = data.dim();
  return {Sequence{std::make_shared<const Dataset>(std::move(data))}, s, 0};
}

SampleSource SampleSource::generator(Generator gen, Index dim, std::uint64_t seed) {
  if (!gen) throw std::invalid_argument("generator source: empty generator");
  return {Synthetic{std::move(gen)}, dim, seed};
}

Sample SampleSource::draw() {
  const auto t = static_cast<std::uint64_t>(draws_);
  Sample out = std::visit(
      [&](auto& k) -> Sample {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Bootstrap>) {
          Stream sub = root_.split(t);
          return k.data->sample(static_cast<Index>(sub.below(static_cast<std::uint64_t>(k.data->size()))));
        } else if constexpr (std::is_same_v<K, Sequence>) {
          if (draws_ >= k.data->size()) throw std::out_of_range("stream source exhausted");
          return k.data->sample(static_cast<Index>(t));
        } else {
          Stream sub = root_.split(t);
          return k.gen(sub);
        }
      },
      kind_);
  ++draws_;
  return out;
}

StepSchedule default_steps(const DroConfig& cfg) {
  if (cfg.T < 1) throw std::invalid_argument("default_steps: T must be >= 1");
  const double root = std::sqrt(static_cast<double>(cfg.T));
  return {cfg.alpha0 / root, cfg.beta0 / root};
}

double gamma_floor(const TrainState& state, const DroConfig& cfg, const NewsvendorParams& p) {
  if (!cfg.curvature_floor) return cfg.gamma_min;
  return std::max(cfg.gamma_min, lipschitz_xx(state, p) + cfg.gamma_margin);
}

double clamp_gamma(double gamma, const TrainState& state, const DroConfig& cfg, const NewsvendorParams& p) {
  return std::min(cfg.gamma_max, std::max(gamma, gamma_floor(state, cfg, p)));
}

TrainState initial_state(Index s, const DroConfig& cfg, const NewsvendorParams& p) {
  TrainState st = TrainState::zeros(s, 0.0);
  st.gamma = std::min(cfg.gamma_max, gamma_floor(st, cfg, p) + 1.0);
  return st;
}

TrainState least_squares_state(const Dataset& data, const DroConfig& cfg, const NewsvendorParams& p) {
  if (data.empty()) throw std::invalid_argument("least_squares_state: empty dataset");
  MatrixX<double> design(data.size(), data.dim() + 1);
  design.leftCols(data.dim()) = data.features;
  design.col(data.dim()).setOnes();
  TrainState st{design.colPivHouseholderQr().solve(data.labels), 0.0, 0};
  st.gamma = std::min(cfg.gamma_max, gamma_floor(st, cfg, p) + 1.0);
  return st;
}

StepOutcome dasgd_step(TrainState& state, const Sample& xi, const DroConfig& cfg, const SupportBox& box,
                       const NewsvendorParams& p, const StepSchedule& steps) {
  StepOutcome out{{}, perturb(state, xi, cfg, box, p)};
  const PerturbResult& adv = out.adversarial;

  const VectorX<double> g_theta = grad_theta_cost(state, adv.xi_star, p);
  const double g_gamma = cfg.rho - transport_distance(adv.xi_star, xi, cfg.cost());

  state.theta -= steps.alpha * g_theta;
  state.gamma = clamp_gamma(state.gamma - steps.beta * g_gamma, state, cfg, p);
  ++state.t;
  if (!state.theta.allFinite() || !std::isfinite(state.gamma)) {
    throw std::runtime_error("dasgd: iterate became non-finite at t=" + std::to_string(state.t));
  }

  out.record = {g_theta.squaredNorm(), g_gamma * g_gamma, adv.h_value, adv.steps, state.gamma};
  return out;
}

TrainResult train(SampleSource& source, const DroConfig& cfg, const SupportBox& box, const NewsvendorParams& p,
                  TrainState init, const TrainObserver& observer) {
  cfg.validate();
  p.validate();
  box.validate();
  if (init.dim() != source.dim() || box.dim() != source.dim()) {
    throw std::invalid_argument("train: dimension mismatch between state, source and support");
  }
  if (!(init.gamma >= cfg.gamma_min && init.gamma <= cfg.gamma_max)) {
    throw std::invalid_argument("train: initial gamma outside [gamma_min, gamma_max]");
  }

  TrainResult result{std::move(init), {}};
  if (cfg.T == 0) return result;

  const auto start = std::chrono::steady_clock::now();
  const StepSchedule steps = default_steps(cfg);
  result.metrics.iterations.reserve(static_cast<std::size_t>(cfg.T));
  for (std::int64_t t = 0; t < cfg.T; ++t) {
    if (observer) observer(result.state);
    const Sample xi = source.draw();
    result.metrics.iterations.push_back(dasgd_step(result.state, xi, cfg, box, p, steps).record);
  }
  result.metrics.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

DualEstimate dual_estimate(const TrainState& state, const Dataset& data, const DroConfig& cfg, const SupportBox& box,
                           const NewsvendorParams& p) {
  if (data.empty()) throw std::invalid_argument("dual_estimate: empty dataset");
  DualEstimate est{0.0, VectorX<double>::Zero(state.theta.size()), 0.0, 0.0};
  double mean_distance = 0;
  for (Index i = 0; i < data.size(); ++i) {
    const Sample xi = data.sample(i);
    const PerturbResult adv = perturb(state, xi, cfg, box, p);
    est.value += adv.h_value;
    est.grad_theta += grad_theta_cost(state, adv.xi_star, p);
    mean_distance += transport_distance(adv.xi_star, xi, cfg.cost());
  }
  const auto n = static_cast<double>(data.size());
  est.value /= n;
  est.grad_theta /= n;
  est.grad_gamma = cfg.rho - mean_distance / n;

  const bool at_floor = state.gamma <= gamma_floor(state, cfg, p);
  const bool at_ceiling = state.gamma >= cfg.gamma_max;
  const bool blocked = (at_floor && est.grad_gamma > 0) || (at_ceiling && est.grad_gamma < 0);
  est.grad_gamma_projected = blocked ? 0.0 : est.grad_gamma;
  return est;
}

}  // namespace dro
