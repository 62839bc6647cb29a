#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <variant>

#include "dro/core.hpp"
#include "dro/inner_max.hpp"
#include "dro/policy_cost.hpp"
#include "dro/rng.hpp"

namespace dro {

/// Where each outer iteration gets its nominal sample.
///  - bootstrap: uniform draw with replacement from a dataset
///  - stream:    the dataset rows in order, each exactly once (online mode)
///  - generator: a synthetic model called with a per-draw substream
/// Draw t depends only on (seed, t).
class SampleSource {
 public:
  using Generator = std::function<Sample(Stream&)>;

  static SampleSource bootstrap(Dataset data, std::uint64_t seed);
  static SampleSource stream(Dataset data);
  static SampleSource generator(Generator gen, Index dim, std::uint64_t seed);

  Sample draw();
  std::int64_t draws() const { return draws_; }
  Index dim() const { return dim_; }

 private:
  struct Bootstrap {
    std::shared_ptr<const Dataset> data;
  };
  struct Sequence {
    std::shared_ptr<const Dataset> data;
  };
  struct Synthetic {
    Generator gen;
  };

  SampleSource(std::variant<Bootstrap, Sequence, Synthetic> kind, Index dim, std::uint64_t seed)
      : kind_(std::move(kind)), dim_(dim), root_(seeded(seed)) {}

  std::variant<Bootstrap, Sequence, Synthetic> kind_;
  Index dim_;
  Stream root_;
  std::int64_t draws_ = 0;
};

struct StepSchedule {
  double alpha = 0;
  double beta = 0;
};

/// Constant-over-run steps alpha = alpha0 / sqrt(T), beta = beta0 / sqrt(T).
StepSchedule default_steps(const DroConfig& cfg);

/// Lower end of the dual-variable clamp: gamma_min, raised to L_xx(theta) + margin
/// when cfg.curvature_floor is set.
double gamma_floor(const TrainState& state, const DroConfig& cfg, const NewsvendorParams& p);

/// min(gamma_max, max(gamma, gamma_floor)).
double clamp_gamma(double gamma, const TrainState& state, const DroConfig& cfg, const NewsvendorParams& p);

/// Zero policy with gamma at the clamp floor plus one.
TrainState initial_state(Index s, const DroConfig& cfg, const NewsvendorParams& p);

/// Zero-noise least-squares fit of y on (x, 1), gamma as in initial_state.
TrainState least_squares_state(const Dataset& data, const DroConfig& cfg, const NewsvendorParams& p);

struct StepOutcome {
  IterationRecord record;
  PerturbResult adversarial;
};

/// One outer iteration on the nominal sample `xi`: perturb, then
/// theta -= alpha * grad_theta c(adversarial point), gamma -= beta * (rho - d), clamp gamma.
StepOutcome dasgd_step(TrainState& state, const Sample& xi, const DroConfig& cfg, const SupportBox& box,
                       const NewsvendorParams& p, const StepSchedule& steps);

struct TrainResult {
  TrainState state;
  RunMetrics metrics;
};

/// Called with the iterate before each update.
using TrainObserver = std::function<void(const TrainState&)>;

TrainResult train(SampleSource& source, const DroConfig& cfg, const SupportBox& box, const NewsvendorParams& p,
                  TrainState init, const TrainObserver& observer = {});

/// Empirical dual objective H(theta, gamma) over `data` and its gradient,
/// each term evaluated at the sample's adversarial point. grad_gamma_projected
/// zeroes the gamma component when it pushes against an active clamp.
struct DualEstimate {
  double value = 0;
  VectorX<double> grad_theta;
  double grad_gamma = 0;
  double grad_gamma_projected = 0;

  double stationarity_sq() const { return grad_theta.squaredNorm() + grad_gamma_projected * grad_gamma_projected; }
};

DualEstimate dual_estimate(const TrainState& state, const Dataset& data, const DroConfig& cfg, const SupportBox& box,
                           const NewsvendorParams& p);

}  // namespace dro
