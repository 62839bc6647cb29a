#include <doctest.h>

#include <cmath>

#include "dro/dasgd.hpp"
#include "dro/datagen.hpp"

using namespace dro;

namespace {

Dataset small_data(Index n, Index s, std::uint64_t seed) {
  GenSpec spec;
  spec.s = s;
  spec.n_train = n;
  spec.n_test = 1;
  spec.sigma = 0.5;
  spec.seed = seed;
  return generate(spec).train;
}

DroConfig quick_cfg(std::int64_t T, double rho) {
  DroConfig c;
  c.T = T;
  c.rho = rho;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("default_steps examples") {
  DroConfig c;
  c.alpha0 = 1;
  c.T = 10000;
  CHECK(default_steps(c).alpha == doctest::Approx(0.01));
  CHECK(default_steps(c).beta == doctest::Approx(0.01));
  c.T = 1;
  CHECK(default_steps(c).alpha == 1.0);
  c.T = 400;
  const double a = default_steps(c).alpha;
  c.T = 800;
  CHECK(a / default_steps(c).alpha == doctest::Approx(std::sqrt(2.0)));
  c.T = 0;
  CHECK_THROWS(default_steps(c));
}

TEST_CASE("clamp_gamma enforces the bounds and the optional curvature floor") {
  const NewsvendorParams p{1.0, 0.2, 0.1};
  TrainState st = TrainState::zeros(1, 0);
  st.theta << 1, 0;  // L_xx = 6
  DroConfig c;
  CHECK(clamp_gamma(0.5, st, c, p) == 0.5);
  CHECK(clamp_gamma(-1.0, st, c, p) == 0.0);
  c.curvature_floor = true;
  CHECK(clamp_gamma(0.5, st, c, p) == doctest::Approx(6.01));
  CHECK(clamp_gamma(8.0, st, c, p) == 8.0);
  c.gamma_max = 7;
  CHECK(clamp_gamma(100, st, c, p) == 7.0);
  c.gamma_min = 6.5;
  CHECK(clamp_gamma(0, st, c, p) == 6.5);
}

TEST_CASE("T = 0 returns the initial state") {
  const Dataset d = small_data(10, 2, 1);
  const DroConfig c = quick_cfg(0, 0.1);
  const NewsvendorParams p{1.0, 0.2, 0.1};
  SampleSource src = SampleSource::bootstrap(d, c.seed);
  const TrainState init = initial_state(2, c, p);
  const TrainResult r = train(src, c, bounding_box(d), p, init);
  CHECK(r.state.theta == init.theta);
  CHECK(r.state.gamma == init.gamma);
  CHECK(r.metrics.iterations.empty());
  CHECK(src.draws() == 0);
}

TEST_CASE("a single pinned sample drives the order to its demand") {
  const NewsvendorParams p{1.0, 0.2, 0.05};
  const Dataset d = Dataset::from_samples({Sample{VectorX<double>::Constant(1, 0.5), 1.0}}, 1);
  DroConfig c = quick_cfg(5000, 0.0);
  c.alpha0 = 0.5;
  c.gamma_min = 1e4;
  c.gamma_max = 1e4;
  SampleSource src = SampleSource::bootstrap(d, c.seed);
  const SupportBox box{VectorX<double>::Zero(1), VectorX<double>::Ones(1), 0, 2};
  TrainState init = initial_state(1, c, p);
  const TrainResult r = train(src, c, box, p, init);
  const double order = policy_eval(r.state, Eigen::Matrix<double, 1, 1>(0.5));
  CHECK(std::abs(order - 1.0) <= 0.05);
  CHECK(std::abs(order - smoothed_minimizer(1.0, p)) <= 0.01);
}

TEST_CASE("training is deterministic and records every iteration") {
  const Dataset d = small_data(20, 3, 2);
  const DroConfig c = quick_cfg(500, 0.1);
  const NewsvendorParams p{1.0, 0.2, 0.1};
  const SupportBox box = bounding_box(d);
  auto run = [&] {
    SampleSource src = SampleSource::bootstrap(d, c.seed);
    return train(src, c, box, p, initial_state(3, c, p));
  };
  const TrainResult a = run(), b = run();
  CHECK(a.state.theta == b.state.theta);
  CHECK(a.state.gamma == b.state.gamma);
  CHECK(a.state.t == 500);
  CHECK(a.metrics.iterations.size() == 500);
  for (const IterationRecord& rec : a.metrics.iterations) {
    CHECK(rec.gamma >= c.gamma_min);
    CHECK(rec.gamma <= c.gamma_max);
    CHECK(rec.inner_steps <= c.K);
  }
}

TEST_CASE("gamma stays inside the clamp after every update") {
  const Dataset d = small_data(30, 2, 3);
  const DroConfig c = quick_cfg(300, 0.2);
  const NewsvendorParams p{1.0, 0.2, 0.1};
  SampleSource src = SampleSource::bootstrap(d, c.seed);
  const SupportBox box = bounding_box(d);
  int observed = 0;
  train(src, c, box, p, initial_state(2, c, p), [&](const TrainState& st) {
    if (st.t > 0) {
      CHECK(st.gamma >= gamma_floor(st, c, p) - 1e-12);
      CHECK(st.gamma <= c.gamma_max);
    }
    ++observed;
  });
  CHECK(observed == 300);
}

TEST_CASE("stream source yields each sample once and then fails") {
  const Dataset d = small_data(5, 1, 4);
  SampleSource src = SampleSource::stream(d);
  for (Index i = 0; i < 5; ++i) CHECK(src.draw() == d.sample(i));
  CHECK_THROWS_AS(src.draw(), std::out_of_range);

  const DroConfig c = quick_cfg(6, 0.1);
  const NewsvendorParams p{1.0, 0.2, 0.1};
  SampleSource short_src = SampleSource::stream(d);
  CHECK_THROWS_AS(train(short_src, c, bounding_box(d), p, initial_state(1, c, p)), std::out_of_range);
}

TEST_CASE("bootstrap draws are uniform over the dataset") {
  const Dataset d = small_data(4, 1, 5);
  SampleSource src = SampleSource::bootstrap(d, 9);
  std::vector<int> hits(4, 0);
  for (int i = 0; i < 40000; ++i) {
    const Sample s = src.draw();
    for (Index j = 0; j < 4; ++j) {
      if (s == d.sample(j)) ++hits[static_cast<std::size_t>(j)];
    }
  }
  for (int h : hits) CHECK(std::abs(h - 10000) < 400);
}

TEST_CASE("generator source passes independent substreams") {
  GenSpec spec;
  spec.s = 2;
  spec.seed = 3;
  const DemandModel model(spec);
  SampleSource a = SampleSource::generator(model, 2, 11), b = SampleSource::generator(model, 2, 11);
  for (int i = 0; i < 5; ++i) CHECK(a.draw() == b.draw());
}

TEST_CASE("least_squares_state recovers the generator intercept") {
  const Dataset d = small_data(50, 3, 6);
  const NewsvendorParams p{1.0, 0.2, 0.1};
  const DroConfig c = quick_cfg(50, 0.05);
  const TrainState ls = least_squares_state(d, c, p);
  // Noise is 0.5, so the least-squares intercept should be near the generator's 1.
  CHECK(std::abs(ls.intercept() - 1.0) < 0.6);
  CHECK(ls.gamma >= gamma_floor(ls, c, p));
}

TEST_CASE("dual_estimate reduces to the empirical smoothed cost when gamma pins the adversary") {
  const Dataset d = small_data(10, 2, 8);
  const NewsvendorParams p{1.0, 0.2, 0.1};
  DroConfig c = quick_cfg(100, 0.0);
  TrainState st = TrainState::zeros(2, 1e5);
  st.theta << 0.2, 0.1, 0.9;
  const DualEstimate e = dual_estimate(st, d, c, bounding_box(d), p);
  double mean = 0;
  VectorX<double> g = VectorX<double>::Zero(3);
  for (Index i = 0; i < d.size(); ++i) {
    mean += cost_smoothed(policy_eval(st, d.sample(i).x), d.labels(i), p);
    g += grad_theta_cost(st, d.sample(i), p);
  }
  CHECK(e.value == doctest::Approx(mean / 10));
  CHECK((e.grad_theta - g / 10).norm() < 1e-12);
  CHECK(e.grad_gamma == 0.0);
}
