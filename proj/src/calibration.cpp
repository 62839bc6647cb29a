#include "dro/calibration.hpp"

#include <cmath>

namespace dro {

namespace {

void check_inputs(std::int64_t n, double d_diam) {
  if (n < 1) throw std::invalid_argument("calibration: sample count must be >= 1");
  if (!(d_diam > 0) || !std::isfinite(d_diam)) throw std::invalid_argument("calibration: diameter must be positive");
}

}  // namespace

double radius_for_confidence(std::int64_t n, Confidence q, double d_diam) {
  check_inputs(n, d_diam);
  const double rate = -std::log1p(-q.value()) / static_cast<double>(n);
  if (d_diam >= 1.0) return std::sqrt(rate * 2.0 * (1.0 + d_diam * d_diam));
  return 2.0 * d_diam * std::sqrt(rate);
}

bool radius_exceeds_diameter(double rho, double d_diam) { return rho >= d_diam; }

double coverage_probability(std::int64_t n, double rho, double d_diam) {
  check_inputs(n, d_diam);
  if (!(rho >= 0)) throw std::invalid_argument("coverage_probability: rho must be >= 0");
  if (radius_exceeds_diameter(rho, d_diam)) {
    throw std::domain_error("coverage_probability: bound requires rho < support diameter");
  }
  const double scale = d_diam >= 1.0 ? 2.0 * (1.0 + d_diam * d_diam) : 4.0 * d_diam * d_diam;
  return -std::expm1(-static_cast<double>(n) * rho * rho / scale);
}

double estimate_diameter(const Dataset& data, const TransportCost& cost) {
  if (data.size() < 2) throw std::invalid_argument("estimate_diameter: need at least two samples");
  return support_diameter(bounding_box(data), cost);
}

}  // namespace dro
