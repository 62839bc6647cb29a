#include "dro/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dro {

namespace {

double label_scale(const VectorX<double>& y) {
  const double mean = y.mean();
  const double sd = y.size() > 1 ? std::sqrt((y.array() - mean).square().sum() / double(y.size() - 1)) : 0.0;
  return std::max({sd, y.cwiseAbs().mean(), 1e-3});
}

double median(VectorX<double> y) {
  std::sort(y.data(), y.data() + y.size());
  const Index n = y.size();
  return n % 2 ? y(n / 2) : 0.5 * (y(n / 2 - 1) + y(n / 2));
}

}  // namespace

TrainState erm_train(const Dataset& data, const NewsvendorParams& p, const ErmConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("erm_train: empty dataset");
  if (!(cfg.l1_weight >= 0)) throw std::invalid_argument("erm_train: l1_weight must be >= 0");
  if (!(cfg.step_scale > 0)) throw std::invalid_argument("erm_train: step_scale must be > 0");

  const Index n = data.size(), s = data.dim();
  const std::int64_t iters =
      cfg.iterations > 0 ? cfg.iterations : std::max<std::int64_t>(20 * n * (s + 1), 1000);
  const double base_step = cfg.step_scale * label_scale(data.labels) / std::max(p.c_b, p.c_h);

  VectorX<double> theta = VectorX<double>::Zero(s + 1);
  theta(s) = median(data.labels);
  VectorX<double> avg = VectorX<double>::Zero(s + 1);
  VectorX<double> grad(s + 1);
  VectorX<double> slope(n);
  const std::int64_t burn_in = iters / 2;

  for (std::int64_t t = 1; t <= iters; ++t) {
    const VectorX<double> z = (data.features * theta.head(s)).array() + theta(s);
    for (Index i = 0; i < n; ++i) {
      const double u = z(i) - data.labels(i);
      slope(i) = u < 0 ? -p.c_b : (u > 0 ? p.c_h : 0.0);
    }
    grad.head(s) = data.features.transpose() * slope / double(n);
    grad(s) = slope.mean();
    const double step = base_step / std::sqrt(double(t));
    theta -= step * grad;
    if (cfg.l1_weight > 0) {
      const double shrink = step * cfg.l1_weight;
      theta.head(s) = theta.head(s).unaryExpr(
          [shrink](double v) { return std::copysign(std::max(std::abs(v) - shrink, 0.0), v); });
    }
    if (!theta.allFinite()) throw std::runtime_error("erm_train: iterate became non-finite");
    if (t > burn_in) avg += (theta - avg) / double(t - burn_in);
  }
  return {avg, 0.0, iters};
}

double saa_quantile(std::vector<double> ys, const NewsvendorParams& p) {
  if (ys.empty()) throw std::invalid_argument("saa_quantile: empty input");
  const auto n = static_cast<double>(ys.size());
  // Guard against r * n landing a rounding error above an integer.
  auto k = static_cast<std::size_t>(std::ceil(p.critical_ratio() * n - 1e-9 * n));
  k = std::clamp<std::size_t>(k, 1, ys.size());
  std::nth_element(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(k - 1), ys.end());
  return ys[k - 1];
}

double evaluate_policy(const TrainState& state, const Dataset& test, const NewsvendorParams& p) {
  if (test.empty()) throw std::invalid_argument("evaluate_policy: empty test set");
  if (test.dim() != state.dim()) throw std::invalid_argument("evaluate_policy: dimension mismatch");
  const VectorX<double> z = (test.features * state.coefficients()).array() + state.intercept();
  double total = 0;
  for (Index i = 0; i < test.size(); ++i) total += cost_kinked(z(i), test.labels(i), p);
  return total / double(test.size());
}

}  // namespace dro
