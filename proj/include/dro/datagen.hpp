#pragma once

#include <cstdint>
#include <optional>

#include "dro/core.hpp"
#include "dro/policy_cost.hpp"
#include "dro/rng.hpp"

namespace dro {

enum class FeatureDist { Uniform, Gaussian };

/// Linear demand y = theta' x + theta0 + eps, eps ~ N(0, sigma^2).
struct GenSpec {
  Index s = 10;
  Index n_train = 100;
  Index n_test = 10000;
  double sigma = 1.0;
  /// s coefficients then the intercept; unset selects default_theta_true(s, seed).
  std::optional<VectorX<double>> theta_true;
  FeatureDist feature_dist = FeatureDist::Uniform;
  /// Gaussian features only; unset selects mean 0.5 and covariance 0.5^|i-j|.
  std::optional<VectorX<double>> mean;
  std::optional<MatrixX<double>> covariance;
  std::uint64_t seed = 0;

  void validate() const;
  VectorX<double> resolved_theta() const;
};

/// Coefficients Uniform(0, 1) / s drawn once per seed, intercept 1.
VectorX<double> default_theta_true(Index s, std::uint64_t seed);

/// Draws single samples from a GenSpec demand model; cheap to copy.
class DemandModel {
 public:
  explicit DemandModel(const GenSpec& spec);
  Sample operator()(Stream& rng) const;
  Index dim() const { return theta_.size() - 1; }
  const VectorX<double>& theta() const { return theta_; }

 private:
  VectorX<double> theta_;
  double sigma_;
  FeatureDist dist_;
  VectorX<double> mean_;
  MatrixX<double> factor_;  // covariance = factor * factor'
};

struct GeneratedData {
  Dataset train;
  Dataset test;
};

/// Train and test come from disjoint substreams of spec.seed.
GeneratedData generate(const GenSpec& spec);

/// Draw n samples from substream `stream_id` of spec.seed.
Dataset generate_stream(const GenSpec& spec, Index n, std::uint64_t stream_id);

/// Inverse of the standard normal CDF.
double normal_quantile(double p);

/// Monte-Carlo expected kinked cost of the conditional-quantile oracle
/// z(x) = theta' x + theta0 + sigma * Phi^{-1}(c_b / (c_b + c_h)).
double truth_optimal_cost(const GenSpec& spec, const NewsvendorParams& p, Index n_mc);

}  // namespace dro
