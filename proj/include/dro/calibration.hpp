#pragma once

#include <cstdint>
#include <stdexcept>

#include "dro/core.hpp"

namespace dro {

/// Probability level in the open interval (0, 1).
class Confidence {
 public:
  explicit Confidence(double q) : q_(q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
  double value() const { return q_; }

 private:
  double q_;
};

/// Smallest Wasserstein radius whose ball around the n-sample empirical
/// distribution contains the truth with probability at least q, for a
/// support of transport diameter d_diam:
///   sqrt(-ln(1-q) * 2 (1 + D^2) / n)   if D >= 1
///   2 D sqrt(-ln(1-q) / n)             if D <  1
/// The coverage bound assumes rho < D; see radius_exceeds_diameter().
double radius_for_confidence(std::int64_t n, Confidence q, double d_diam);

bool radius_exceeds_diameter(double rho, double d_diam);

/// Lower bound on P(W(P_true, P_n) <= rho). Throws std::domain_error when
/// rho >= D, where the bound does not apply.
double coverage_probability(std::int64_t n, double rho, double d_diam);

/// Transport diameter of the data bounding box (needs two distinct samples).
double estimate_diameter(const Dataset& data, const TransportCost& cost);

}  // namespace dro
