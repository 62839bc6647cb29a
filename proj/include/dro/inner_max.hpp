#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dro/core.hpp"
#include "dro/policy_cost.hpp"

namespace dro {

// Adversarial augmentation: approximately solve
//   max_{xi' in box}  c(f(theta; x'); y') - gamma d(xi', xi) + gamma rho
// by projected gradient ascent started at xi.

template <typename Scalar>
struct PerturbResultT {
  SampleT<Scalar> xi_star;
  Scalar h_value{0};
  Scalar grad_norm{0};
  int steps = 0;
  bool hit_step_cap = false;
};

using PerturbResult = PerturbResultT<double>;

template <typename Scalar>
Scalar h_eval(const TrainStateT<Scalar>& state, const SampleT<Scalar>& base, const SampleT<Scalar>& cand,
              const DroConfig& cfg, const NewsvendorParamsT<Scalar>& p) {
  const Scalar d = transport_distance(cand, base, TransportCostT<Scalar>{Scalar(cfg.kappa)});
  if (!std::isfinite(static_cast<double>(d))) {
    throw std::domain_error("h_eval: infinite transport distance (label moved under frozen labels)");
  }
  const Scalar rho = Scalar(cfg.rho);
  return cost_smoothed(policy_eval(state, cand.x), cand.y, p) - state.gamma * d + state.gamma * rho;
}

namespace detail {

// Minimum-norm element of v - r * (unit ball): the steepest ascent direction of
// <v, .> - r ||.|| at the origin.
template <typename Scalar, typename Derived>
VectorX<Scalar> shrink(const Eigen::MatrixBase<Derived>& v, Scalar r) {
  const Scalar n = v.norm();
  if (n <= r) return VectorX<Scalar>::Zero(v.size());
  return v * (Scalar(1) - r / n);
}

}  // namespace detail

/// Ascent direction of h in (x', y'). Away from the base point this is the
/// gradient; at the base point, where the transport term is not
/// differentiable, it is the minimum-norm element of the superdifferential.
/// The label component is zero when labels are frozen.
template <typename Scalar>
SampleT<Scalar> h_ascent_direction(const TrainStateT<Scalar>& state, const SampleT<Scalar>& base,
                                   const SampleT<Scalar>& cand, const DroConfig& cfg,
                                   const NewsvendorParamsT<Scalar>& p) {
  const Scalar slope = cost_smoothed_dz(policy_eval(state, cand.x), cand.y, p);
  const Scalar gamma = state.gamma;
  SampleT<Scalar> g;
  const VectorX<Scalar> dx = cand.x - base.x;
  const Scalar r = dx.norm();
  if (r > 0) {
    g.x = slope * state.coefficients() - gamma * dx / r;
  } else {
    g.x = detail::shrink<Scalar>(slope * state.coefficients(), gamma);
  }
  if (std::isinf(cfg.kappa)) {
    g.y = 0;
  } else {
    const Scalar kappa = Scalar(cfg.kappa);
    const Scalar dy = cand.y - base.y;
    const Scalar w = -slope;
    if (dy != 0) {
      g.y = w - gamma * kappa * (dy > 0 ? Scalar(1) : Scalar(-1));
    } else {
      using std::abs;
      g.y = abs(w) <= gamma * kappa ? Scalar(0) : w - gamma * kappa * (w > 0 ? Scalar(1) : Scalar(-1));
    }
  }
  return g;
}

/// Stopping tolerance on the ascent gradient norm when the config does not
/// fix one. With mu = max(gamma - L_xx, mu_floor) and L_tx the theta/xi
/// cross-Lipschitz estimate over the box, targets an
/// eps = mu / ((L_tx^2 + 1) sqrt(T)) maximizer and returns sqrt(2 mu eps).
template <typename Scalar>
Scalar inner_tolerance(const TrainStateT<Scalar>& state, const DroConfig& cfg, const SupportBoxT<Scalar>& box,
                       const NewsvendorParamsT<Scalar>& p) {
  if (cfg.grad_tol) return Scalar(*cfg.grad_tol);
  using std::max;
  using std::sqrt;
  const Scalar mu = max(state.gamma - lipschitz_xx(state, p), Scalar(cfg.mu_floor));
  const VectorX<Scalar> far = box.x_lo.cwiseAbs().cwiseMax(box.x_hi.cwiseAbs());
  const Scalar feature_norm = sqrt(far.squaredNorm() + Scalar(1));
  const Scalar l_tx = (p.c_b + p.c_h) * state.coefficients().norm() * feature_norm / (2 * p.delta);
  const Scalar eps = mu / ((l_tx * l_tx + 1) * sqrt(Scalar(std::max<std::int64_t>(cfg.T, 1))));
  return sqrt(2 * mu * eps);
}

template <typename Scalar>
PerturbResultT<Scalar> perturb(const TrainStateT<Scalar>& state, const SampleT<Scalar>& base, const DroConfig& cfg,
                               const SupportBoxT<Scalar>& box, const NewsvendorParamsT<Scalar>& p, Scalar tol) {
  if (base.dim() != state.dim() || box.dim() != state.dim()) {
    throw std::invalid_argument("perturb: dimension mismatch");
  }
  const bool frozen = std::isinf(cfg.kappa);
  const Scalar eta = Scalar(cfg.eta);

  auto project = [&](SampleT<Scalar> q) {
    q = project_to_support(q, box);
    if (frozen) q.y = base.y;
    return q;
  };
  // One projected ascent step from `at`, and the gradient-mapping norm ||next - at|| / eta.
  auto advance = [&](const SampleT<Scalar>& at) {
    const SampleT<Scalar> g = h_ascent_direction(state, base, at, cfg, p);
    if (!g.x.allFinite() || !std::isfinite(static_cast<double>(g.y))) {
      throw std::runtime_error("perturb: non-finite gradient (inner step size too large?)");
    }
    SampleT<Scalar> next = project({at.x + eta * g.x, at.y + eta * g.y});
    if (!next.x.allFinite() || !std::isfinite(static_cast<double>(next.y))) {
      throw std::runtime_error("perturb: ascent step left the finite range (inner step size too large?)");
    }
    using std::sqrt;
    const Scalar norm = sqrt((next.x - at.x).squaredNorm() + (next.y - at.y) * (next.y - at.y)) / eta;
    return std::pair{std::move(next), norm};
  };

  SampleT<Scalar> cur = project(base);
  auto [next, gnorm] = advance(cur);

  PerturbResultT<Scalar> best{cur, h_eval(state, base, cur, cfg, p), gnorm, 0, false};
  int k = 0;
  while (gnorm > tol && k < cfg.K) {
    cur = std::move(next);
    ++k;
    const Scalar h = h_eval(state, base, cur, cfg, p);
    std::tie(next, gnorm) = advance(cur);
    if (h > best.h_value) {
      best.xi_star = cur;
      best.h_value = h;
      best.grad_norm = gnorm;
    }
  }
  best.steps = k;
  best.hit_step_cap = gnorm > tol;
  return best;
}

template <typename Scalar>
PerturbResultT<Scalar> perturb(const TrainStateT<Scalar>& state, const SampleT<Scalar>& base, const DroConfig& cfg,
                               const SupportBoxT<Scalar>& box, const NewsvendorParamsT<Scalar>& p) {
  return perturb(state, base, cfg, box, p, inner_tolerance(state, cfg, box, p));
}

/// Exhaustive maximization of h over a regular grid on the box (both
/// endpoints of every axis included, spacing at most grid_step). The label
/// axis joins the grid only for finite kappa. At most 3 grid axes.
template <typename Scalar>
std::pair<SampleT<Scalar>, Scalar> oracle_grid_max(const TrainStateT<Scalar>& state, const SampleT<Scalar>& base,
                                                   const DroConfig& cfg, const SupportBoxT<Scalar>& box,
                                                   const NewsvendorParamsT<Scalar>& p, Scalar grid_step) {
  if (!(grid_step > 0)) throw std::invalid_argument("oracle_grid_max: grid step must be positive");
  const bool frozen = std::isinf(cfg.kappa);
  const Index s = state.dim();
  const Index axes = s + (frozen ? 0 : 1);
  if (axes > 3) throw std::invalid_argument("oracle_grid_max: at most 3 grid axes supported");

  std::vector<Scalar> lo(static_cast<std::size_t>(axes)), width(lo.size());
  std::vector<long> cells(lo.size());
  for (Index a = 0; a < axes; ++a) {
    const auto i = static_cast<std::size_t>(a);
    lo[i] = a < s ? box.x_lo(a) : box.y_lo;
    width[i] = (a < s ? box.x_hi(a) : box.y_hi) - lo[i];
    using std::ceil;
    cells[i] = width[i] > 0 ? static_cast<long>(ceil(static_cast<double>(width[i] / grid_step))) : 0;
  }

  SampleT<Scalar> cand{VectorX<Scalar>(s), base.y};
  SampleT<Scalar> arg;
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  std::vector<long> idx(lo.size(), 0);
  for (;;) {
    for (Index a = 0; a < axes; ++a) {
      const auto i = static_cast<std::size_t>(a);
      const Scalar v = cells[i] == 0 ? lo[i] : lo[i] + width[i] * Scalar(idx[i]) / Scalar(cells[i]);
      if (a < s) {
        cand.x(a) = v;
      } else {
        cand.y = v;
      }
    }
    const Scalar h = h_eval(state, base, cand, cfg, p);
    if (h > best) {
      best = h;
      arg = cand;
    }
    std::size_t a = 0;
    for (; a < idx.size(); ++a) {
      if (++idx[a] <= cells[a]) break;
      idx[a] = 0;
    }
    if (a == idx.size()) break;
  }
  return {arg, best};
}

}  // namespace dro
