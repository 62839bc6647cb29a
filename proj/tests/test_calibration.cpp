#include <doctest.h>

#include <cmath>

#include "dro/calibration.hpp"
#include "dro/rng.hpp"

using namespace dro;

TEST_CASE("radius_for_confidence examples") {
  CHECK(radius_for_confidence(100, Confidence(0.95), 1.0) == doctest::Approx(0.34616).epsilon(1e-4));
  CHECK(radius_for_confidence(100, Confidence(0.95), 0.5) == doctest::Approx(0.17308).epsilon(1e-4));
  CHECK(radius_for_confidence(100, Confidence(1e-300), 1.0) < 1e-100);
  CHECK_THROWS(Confidence(1.0));
  CHECK_THROWS(Confidence(0.0));
  CHECK_THROWS(radius_for_confidence(0, Confidence(0.5), 1.0));
}

TEST_CASE("coverage_probability examples") {
  CHECK(coverage_probability(100, 0.0, 1.0) == 0.0);
  CHECK(coverage_probability(100, 0.34616, 1.0) == doctest::Approx(0.95).epsilon(1e-4));
  CHECK(coverage_probability(100000000, 0.1, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(coverage_probability(100, 1.0, 1.0), std::domain_error);
  CHECK(radius_exceeds_diameter(1.0, 1.0));
  CHECK_FALSE(radius_exceeds_diameter(0.5, 1.0));
}

TEST_CASE("coverage inverts the radius") {
  Stream rng = seeded(41);
  int tested = 0;
  while (tested < 1000) {
    const auto n = static_cast<std::int64_t>(1 + rng.below(100000));
    const double q = rng.uniform(0.01, 0.99);
    const double d = rng.uniform(0.05, 20);
    const double rho = radius_for_confidence(n, Confidence(q), d);
    if (rho >= d) continue;
    ++tested;
    CHECK(std::abs(coverage_probability(n, rho, d) - q) <= 1e-10);
  }
}

TEST_CASE("radius decreases in n and increases in q") {
  for (double d : {0.3, 1.0, 4.0}) {
    for (double q : {0.5, 0.9, 0.99}) {
      double prev = INFINITY;
      for (std::int64_t n : {1, 10, 100, 1000, 10000}) {
        const double r = radius_for_confidence(n, Confidence(q), d);
        CHECK(r < prev);
        prev = r;
      }
    }
    for (std::int64_t n : {5, 500}) {
      double prev = 0;
      for (double q : {0.1, 0.5, 0.9, 0.99}) {
        const double r = radius_for_confidence(n, Confidence(q), d);
        CHECK(r > prev);
        prev = r;
      }
    }
  }
}

TEST_CASE("estimate_diameter examples") {
  const TransportCost frozen{};
  const Dataset two = Dataset::from_samples(
      {Sample{VectorX<double>::Constant(1, 0), 1}, Sample{VectorX<double>::Constant(1, 1), 1}}, 1);
  CHECK(estimate_diameter(two, frozen) == doctest::Approx(1.0));

  std::vector<Sample> corners;
  for (double a : {0.0, 1.0}) {
    for (double b : {0.0, 0.5, 1.0}) corners.push_back({Eigen::Vector2d(a, b), 0.3});
  }
  CHECK(estimate_diameter(Dataset::from_samples(corners, 2), frozen) == doctest::Approx(std::sqrt(2.0)));

  const Dataset dup = Dataset::from_samples(
      {Sample{VectorX<double>::Constant(1, 0.4), 1}, Sample{VectorX<double>::Constant(1, 0.4), 1}}, 1);
  CHECK_THROWS(estimate_diameter(dup, frozen));
  const Dataset one = Dataset::from_samples({Sample{VectorX<double>::Constant(1, 0.4), 1}}, 1);
  CHECK_THROWS(estimate_diameter(one, frozen));
}
