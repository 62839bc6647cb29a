#include <doctest.h>

#include <cmath>

#include "dro/policy_cost.hpp"
#include "dro/rng.hpp"

using namespace dro;

namespace {

const NewsvendorParams kParams{1.0, 0.2, 0.1};

TrainState state_of(std::initializer_list<double> coef, double intercept) {
  TrainState st = TrainState::zeros(static_cast<Index>(coef.size()), 1.0);
  Index i = 0;
  for (double c : coef) st.theta(i++) = c;
  st.theta(st.dim()) = intercept;
  return st;
}

// Coefficients recovered by solving value and slope matching at y - delta and
// slope matching at y + delta: a linear 3x3 system, independent of the closed form.
SmoothCoeffs solve_boundary_conditions(double y, const NewsvendorParams& p) {
  const double lo = y - p.delta, hi = y + p.delta;
  Eigen::Matrix3d m;
  Eigen::Vector3d rhs;
  m << lo * lo, lo, 1, 2 * lo, 1, 0, 2 * hi, 1, 0;
  rhs << p.c_b * p.delta, -p.c_b, p.c_h;
  const Eigen::Vector3d a = m.fullPivLu().solve(rhs);
  return {a(0), a(1), a(2)};
}

}  // namespace

TEST_CASE("policy_eval examples") {
  CHECK(policy_eval(state_of({0, 0}, 0), Eigen::Vector2d(3, 4)) == 0.0);
  CHECK(policy_eval(state_of({1, 2}, 0.5), Eigen::Vector2d(1, 1)) == doctest::Approx(3.5));
  CHECK(policy_eval(state_of({1, 0}, 0), Eigen::Vector2d(1, 0)) == 1.0);
  CHECK_THROWS_AS(policy_eval(state_of({1, 0}, 0), Eigen::Vector3d(1, 0, 0)), std::invalid_argument);
}

TEST_CASE("cost_kinked examples") {
  CHECK(cost_kinked(1.0, 1.0, kParams) == 0.0);
  CHECK(cost_kinked(0.5, 1.0, kParams) == doctest::Approx(0.5));
  CHECK(cost_kinked(1.5, 1.0, kParams) == doctest::Approx(0.1));
}

TEST_CASE("smooth_coeffs examples") {
  const SmoothCoeffs a = smooth_coeffs(1.0, kParams);
  CHECK(a.a1 == doctest::Approx(3.0));
  CHECK(a.a2 == doctest::Approx(-6.4));
  CHECK(a.a3 == doctest::Approx(3.43));
  const SmoothCoeffs oracle = solve_boundary_conditions(1.0, kParams);
  CHECK(a.a1 == doctest::Approx(oracle.a1).epsilon(1e-12));
  CHECK(a.a2 == doctest::Approx(oracle.a2).epsilon(1e-12));
  CHECK(a.a3 == doctest::Approx(oracle.a3).epsilon(1e-12));
  CHECK(a(0.9) == doctest::Approx(0.1));
  CHECK(2 * a.a1 * 1.1 + a.a2 == doctest::Approx(0.2));
}

TEST_CASE("smooth_coeffs satisfy the boundary conditions for random parameters") {
  Stream rng = seeded(21);
  for (int i = 0; i < 1000; ++i) {
    const NewsvendorParams p{rng.uniform(0.05, 5), rng.uniform(0.05, 5), rng.uniform(0.01, 1)};
    const double y = rng.uniform(-5, 5);
    const SmoothCoeffs a = smooth_coeffs(y, p);
    const SmoothCoeffs o = solve_boundary_conditions(y, p);
    const double scale = std::abs(o.a3) + std::abs(o.a2) + o.a1 + 1;
    CHECK(std::abs(a.a1 - o.a1) <= 1e-9 * scale);
    CHECK(std::abs(a.a2 - o.a2) <= 1e-9 * scale);
    CHECK(std::abs(a.a3 - o.a3) <= 1e-9 * scale);
  }
}

TEST_CASE("cost_smoothed examples") {
  CHECK(cost_smoothed(0.9, 1.0, kParams) == doctest::Approx(cost_kinked(0.9, 1.0, kParams)));
  CHECK(cost_smoothed(1.0, 1.0, kParams) == doctest::Approx(0.03));
  CHECK(cost_smoothed(7.0, 1.0, kParams) == cost_kinked(7.0, 1.0, kParams));
  CHECK(cost_smoothed_dz(-4.0, 1.0, kParams) == -1.0);
  CHECK(cost_smoothed_dz(4.0, 1.0, kParams) == doctest::Approx(0.2));
}

TEST_CASE("centred evaluation agrees with the absolute-coordinate quadratic") {
  Stream rng = seeded(22);
  for (int i = 0; i < 1000; ++i) {
    const NewsvendorParams p{rng.uniform(0.1, 3), rng.uniform(0.1, 3), rng.uniform(0.05, 1)};
    const double y = rng.uniform(-3, 3);
    const double z = y + rng.uniform(-0.999, 0.999) * p.delta;
    CHECK(cost_smoothed(z, y, p) == doctest::Approx(smooth_coeffs(y, p)(z)).epsilon(1e-8));
  }
}

TEST_CASE("smoothed and kinked costs agree outside the band and stay within the error bound") {
  Stream rng = seeded(23);
  for (int i = 0; i < 1000; ++i) {
    const NewsvendorParams p{rng.uniform(0.1, 3), rng.uniform(0.1, 3), rng.uniform(0.01, 1)};
    const double y = rng.uniform(-3, 3);
    const double bound = (p.c_b + p.c_h) * p.delta / 4;
    const double out_left = y - p.delta - rng.uniform(0, 5);
    const double out_right = y + p.delta + rng.uniform(0, 5);
    CHECK(std::abs(cost_smoothed(out_left, y, p) - cost_kinked(out_left, y, p)) <= 1e-12 * (1 + std::abs(out_left)));
    CHECK(std::abs(cost_smoothed(out_right, y, p) - cost_kinked(out_right, y, p)) <=
          1e-12 * (1 + std::abs(out_right)));
    const double z = y + rng.uniform(-2, 2) * p.delta;
    CHECK(std::abs(cost_smoothed(z, y, p) - cost_kinked(z, y, p)) <= bound + 1e-12);
    CHECK(cost_smoothed(y, y, p) - cost_kinked(y, y, p) == doctest::Approx(bound).epsilon(1e-12));
  }
}

TEST_CASE("cost_smoothed is convex") {
  Stream rng = seeded(24);
  for (int i = 0; i < 2000; ++i) {
    const NewsvendorParams p{rng.uniform(0.1, 3), rng.uniform(0.1, 3), rng.uniform(0.01, 1)};
    const double y = rng.uniform(-1, 1);
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), lam = rng.uniform();
    const double mid = lam * a + (1 - lam) * b;
    CHECK(cost_smoothed(mid, y, p) <= lam * cost_smoothed(a, y, p) + (1 - lam) * cost_smoothed(b, y, p) + 1e-12);
  }
}

TEST_CASE("gradient examples") {
  const TrainState st = state_of({1, 1}, 0);
  const Sample left{Eigen::Vector2d(0.1, 0.2), 10.0};
  const VectorX<double> g = grad_theta_cost(st, left, kParams);
  CHECK(g(0) == doctest::Approx(-0.1));
  CHECK(g(1) == doctest::Approx(-0.2));
  CHECK(g(2) == doctest::Approx(-1.0));
  CHECK(grad_x_cost(state_of({0, 0}, 0.3), left, kParams).isZero());
}

TEST_CASE("gradients match long-double central differences") {
  Stream rng = seeded(25);
  constexpr long double h = 1e-6L;
  int checked = 0;
  while (checked < 1000) {
    const Index s = 1 + static_cast<Index>(rng.below(4));
    TrainState st = TrainState::zeros(s, 1.0);
    for (Index j = 0; j <= s; ++j) st.theta(j) = rng.uniform(-2, 2);
    Sample smp{VectorX<double>(s), rng.uniform(-2, 2)};
    for (Index j = 0; j < s; ++j) smp.x(j) = rng.uniform(-1, 1);
    const NewsvendorParams p{rng.uniform(0.2, 2), rng.uniform(0.2, 2), rng.uniform(0.05, 0.5)};
    const double u = policy_eval(st, smp.x) - smp.y;
    const double margin = 1e-6 * (1 + st.theta.lpNorm<1>() + smp.x.lpNorm<1>()) * 10;
    if (std::abs(std::abs(u) - p.delta) < margin) continue;
    ++checked;

    const NewsvendorParamsT<long double> pl{p.c_b, p.c_h, p.delta};
    const TrainStateT<long double> sl{st.theta.cast<long double>(), st.gamma, 0};
    const VectorX<long double> xl = smp.x.cast<long double>();
    auto cost_at = [&](const TrainStateT<long double>& t, const VectorX<long double>& x) {
      return cost_smoothed<long double>(policy_eval(t, x), smp.y, pl);
    };
    const VectorX<double> gt = grad_theta_cost(st, smp, p);
    for (Index j = 0; j <= s; ++j) {
      auto plus = sl, minus = sl;
      plus.theta(j) += h;
      minus.theta(j) -= h;
      const long double fd = (cost_at(plus, xl) - cost_at(minus, xl)) / (2 * h);
      CHECK(std::abs(gt(j) - static_cast<double>(fd)) <= 1e-5 * std::max(1.0, std::abs(gt(j))));
    }
    const VectorX<double> gx = grad_x_cost(st, smp, p);
    for (Index j = 0; j < s; ++j) {
      VectorX<long double> xp = xl, xm = xl;
      xp(j) += h;
      xm(j) -= h;
      const long double fd = (cost_at(sl, xp) - cost_at(sl, xm)) / (2 * h);
      CHECK(std::abs(gx(j) - static_cast<double>(fd)) <= 1e-5 * std::max(1.0, std::abs(gx(j))));
    }
  }
}

TEST_CASE("lipschitz_xx examples") {
  CHECK(lipschitz_xx(state_of({0, 0}, 5), kParams) == 0.0);
  CHECK(lipschitz_xx(state_of({1}, 0), kParams) == doctest::Approx(6.0));
  const double one = lipschitz_xx(state_of({0.3, -0.4}, 0), kParams);
  CHECK(lipschitz_xx(state_of({0.6, -0.8}, 0), kParams) == doctest::Approx(4 * one));
}

TEST_CASE("lipschitz_xx bounds the x-curvature of the smoothed cost") {
  Stream rng = seeded(26);
  for (int i = 0; i < 500; ++i) {
    const TrainState st = state_of({rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(-1, 1));
    const Sample a{Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(-1, 1)};
    const Sample b{Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1)), a.y};
    const double dg = (grad_x_cost(st, a, kParams) - grad_x_cost(st, b, kParams)).norm();
    CHECK(dg <= lipschitz_xx(st, kParams) * (a.x - b.x).norm() + 1e-12);
  }
}

TEST_CASE("default_delta tracks label scale") {
  CHECK(default_delta(VectorX<double>(Eigen::Vector3d(1, 2, 3))) == doctest::Approx(0.1));
  CHECK(default_delta(VectorX<double>(Eigen::Vector3d(10, 20, 30))) == doctest::Approx(1.0));
  CHECK(default_delta(VectorX<double>(Eigen::Vector2d(4, 4))) == 0.1);
}
