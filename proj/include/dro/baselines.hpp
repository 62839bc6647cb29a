#pragma once

#include <cstdint>
#include <vector>

#include "dro/core.hpp"
#include "dro/policy_cost.hpp"

namespace dro {

/// Empirical risk minimization of the kinked newsvendor cost with a linear
/// policy; l1_weight = 0 is plain ERM, > 0 adds l1_weight * ||theta||_1
/// (intercept unpenalized).
struct ErmConfig {
  double l1_weight = 0.0;
  /// 0 selects max(20 n (s + 1), 1000) full-batch subgradient steps.
  std::int64_t iterations = 0;
  double step_scale = 1.0;
  std::uint64_t seed = 0;
};

/// Averaged subgradient descent (soft-thresholding for the l1 term) with steps step_scale * scale(y) / sqrt(t),
/// started from theta = 0 with the intercept at the label median; returns
/// the average of the second half of the iterates.
TrainState erm_train(const Dataset& data, const NewsvendorParams& p, const ErmConfig& cfg = {});

/// Empirical c_b / (c_b + c_h) quantile, lower (type-1) convention: the
/// ceil(r n)-th order statistic.
double saa_quantile(std::vector<double> ys, const NewsvendorParams& p);

/// Mean kinked cost of the policy over the dataset.
double evaluate_policy(const TrainState& state, const Dataset& test, const NewsvendorParams& p);

}  // namespace dro
