#pragma once

#include <cmath>
#include <stdexcept>

#include "dro/core.hpp"

namespace dro {

/// Newsvendor cost c(z; y) = c_b (y - z)^+ + c_h (z - y)^+ and its C^1
/// smoothing, which replaces the kink by a quadratic on (y - delta, y + delta).
template <typename Scalar>
struct NewsvendorParamsT {
  Scalar c_b{1};
  Scalar c_h{0.2};
  Scalar delta{0.1};

  void validate() const {
    if (!(c_b > 0) || !(c_h > 0) || !(delta > 0)) {
      throw std::invalid_argument("newsvendor: c_b, c_h and delta must be positive");
    }
  }

  /// Critical ratio c_b / (c_b + c_h): the optimal order quantile.
  Scalar critical_ratio() const { return c_b / (c_b + c_h); }
};

/// Quadratic piece a1 z^2 + a2 z + a3 in absolute order coordinates.
template <typename Scalar>
struct SmoothCoeffsT {
  Scalar a1{0};
  Scalar a2{0};
  Scalar a3{0};

  Scalar operator()(Scalar z) const { return (a1 * z + a2) * z + a3; }
};

using NewsvendorParams = NewsvendorParamsT<double>;
using SmoothCoeffs = SmoothCoeffsT<double>;

template <typename Scalar, typename Derived>
Scalar policy_eval(const TrainStateT<Scalar>& state, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != state.dim()) throw std::invalid_argument("policy_eval: dimension mismatch");
  return state.coefficients().dot(x) + state.intercept();
}

template <typename Scalar>
Scalar cost_kinked(Scalar z, Scalar y, const NewsvendorParamsT<Scalar>& p) {
  return z < y ? p.c_b * (y - z) : p.c_h * (z - y);
}

template <typename Scalar>
SmoothCoeffsT<Scalar> smooth_coeffs(Scalar y, const NewsvendorParamsT<Scalar>& p) {
  const Scalar d = p.delta;
  return {(p.c_b + p.c_h) / (4 * d), -(p.c_b * (y + d) + p.c_h * (y - d)) / (2 * d),
          p.c_b * d + (p.c_b * (y + 3 * d) + p.c_h * (y - d)) * (y - d) / (4 * d)};
}

// The quadratic piece depends on z - y only. Evaluating it in the centred
// variable u = z - y, as (c_b+c_h)/(4 delta) u^2 + (c_h-c_b)/2 u + (c_b+c_h) delta/4,
// avoids the cancellation the absolute-coordinate coefficients suffer for large |y|.

template <typename Scalar>
Scalar cost_smoothed(Scalar z, Scalar y, const NewsvendorParamsT<Scalar>& p) {
  const Scalar u = z - y;
  if (u <= -p.delta) return -p.c_b * u;
  if (u >= p.delta) return p.c_h * u;
  const Scalar s = p.c_b + p.c_h;
  return (s / (4 * p.delta) * u + (p.c_h - p.c_b) / 2) * u + s * p.delta / 4;
}

/// d/dz of cost_smoothed; d/dy is its negative.
template <typename Scalar>
Scalar cost_smoothed_dz(Scalar z, Scalar y, const NewsvendorParamsT<Scalar>& p) {
  const Scalar u = z - y;
  if (u <= -p.delta) return -p.c_b;
  if (u >= p.delta) return p.c_h;
  return (p.c_b + p.c_h) / (2 * p.delta) * u + (p.c_h - p.c_b) / 2;
}

/// Order that minimizes cost_smoothed for a known label: y + delta (c_b - c_h)/(c_b + c_h).
template <typename Scalar>
Scalar smoothed_minimizer(Scalar y, const NewsvendorParamsT<Scalar>& p) {
  return y + p.delta * (p.c_b - p.c_h) / (p.c_b + p.c_h);
}

/// Gradient of the smoothed cost with respect to theta (coefficients, then intercept).
template <typename Scalar>
VectorX<Scalar> grad_theta_cost(const TrainStateT<Scalar>& state, const SampleT<Scalar>& sample,
                                const NewsvendorParamsT<Scalar>& p) {
  const Scalar slope = cost_smoothed_dz(policy_eval(state, sample.x), sample.y, p);
  VectorX<Scalar> g(state.theta.size());
  g.head(state.dim()) = slope * sample.x;
  g(state.dim()) = slope;
  return g;
}

template <typename Scalar>
VectorX<Scalar> grad_x_cost(const TrainStateT<Scalar>& state, const SampleT<Scalar>& sample,
                            const NewsvendorParamsT<Scalar>& p) {
  const Scalar slope = cost_smoothed_dz(policy_eval(state, sample.x), sample.y, p);
  return slope * state.coefficients();
}

/// Curvature bound of x -> cost_smoothed(theta'x + theta0, y):
/// (c_b + c_h) ||theta||^2 / (2 delta), intercept excluded.
template <typename Scalar>
Scalar lipschitz_xx(const TrainStateT<Scalar>& state, const NewsvendorParamsT<Scalar>& p) {
  return (p.c_b + p.c_h) * state.coefficients().squaredNorm() / (2 * p.delta);
}

/// Default smoothing half-width: a tenth of the label standard deviation
/// (0.1 when the labels are constant).
template <typename Scalar>
Scalar default_delta(const VectorX<Scalar>& labels) {
  if (labels.size() < 2) return Scalar(0.1);
  using std::sqrt;
  const Scalar mean = labels.mean();
  const Scalar var = (labels.array() - mean).square().sum() / Scalar(labels.size() - 1);
  const Scalar sd = sqrt(var);
  return sd > 0 ? Scalar(0.1) * sd : Scalar(0.1);
}

}  // namespace dro
