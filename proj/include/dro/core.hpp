#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dro {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// A feature/label pair xi = (x, y).
template <typename Scalar>
struct SampleT {
  VectorX<Scalar> x;
  Scalar y{0};

  Index dim() const { return x.size(); }

  bool operator==(const SampleT& o) const { return y == o.y && x.size() == o.x.size() && x == o.x; }
};

/// Row-major view of n samples: features is n x s, labels has n entries.
template <typename Scalar>
struct DatasetT {
  MatrixX<Scalar> features;
  VectorX<Scalar> labels;

  DatasetT() = default;
  DatasetT(MatrixX<Scalar> f, VectorX<Scalar> l) : features(std::move(f)), labels(std::move(l)) {
    if (features.rows() != labels.size()) {
      throw std::invalid_argument("dataset: feature rows and label count differ");
    }
  }

  Index size() const { return labels.size(); }
  Index dim() const { return features.cols(); }
  bool empty() const { return labels.size() == 0; }

  SampleT<Scalar> sample(Index i) const { return {features.row(i).transpose(), labels(i)}; }

  static DatasetT from_samples(const std::vector<SampleT<Scalar>>& samples, Index s) {
    MatrixX<Scalar> f(static_cast<Index>(samples.size()), s);
    VectorX<Scalar> l(static_cast<Index>(samples.size()));
    for (Index i = 0; i < l.size(); ++i) {
      const auto& smp = samples[static_cast<std::size_t>(i)];
      if (smp.dim() != s) throw std::invalid_argument("dataset: sample dimension mismatch");
      f.row(i) = smp.x.transpose();
      l(i) = smp.y;
    }
    return {std::move(f), std::move(l)};
  }
};

/// d(xi, xi') = ||x - x'||_2 + kappa |y - y'|. kappa = +inf freezes labels.
template <typename Scalar>
struct TransportCostT {
  Scalar kappa{std::numeric_limits<Scalar>::infinity()};

  static TransportCostT frozen_labels() { return {}; }
  bool labels_frozen() const { return std::isinf(kappa); }
};

template <typename Scalar>
struct SupportBoxT {
  VectorX<Scalar> x_lo;
  VectorX<Scalar> x_hi;
  Scalar y_lo{0};
  Scalar y_hi{0};

  Index dim() const { return x_lo.size(); }

  void validate() const {
    if (x_lo.size() != x_hi.size()) throw std::invalid_argument("support box: bound dimensions differ");
    if ((x_lo.array() > x_hi.array()).any() || y_lo > y_hi) {
      throw std::invalid_argument("support box: lower bound exceeds upper bound");
    }
  }

  bool contains(const SampleT<Scalar>& p) const {
    return (p.x.array() >= x_lo.array()).all() && (p.x.array() <= x_hi.array()).all() && p.y >= y_lo &&
           p.y <= y_hi;
  }
};

/// theta holds s coefficients followed by the intercept.
template <typename Scalar>
struct TrainStateT {
  VectorX<Scalar> theta;
  Scalar gamma{0};
  std::int64_t t{0};

  Index dim() const { return theta.size() - 1; }
  auto coefficients() const { return theta.head(theta.size() - 1); }
  Scalar intercept() const { return theta(theta.size() - 1); }

  static TrainStateT zeros(Index s, Scalar gamma) { return {VectorX<Scalar>::Zero(s + 1), gamma, 0}; }
};

using Sample = SampleT<double>;
using Dataset = DatasetT<double>;
using TransportCost = TransportCostT<double>;
using SupportBox = SupportBoxT<double>;
using TrainState = TrainStateT<double>;

/// Knobs of the robust training loop. Unset grad_tol selects the adaptive
/// tolerance derived from the outer iteration budget.
struct DroConfig {
  double rho = 0.0;
  double kappa = std::numeric_limits<double>::infinity();
  std::int64_t T = 20000;
  int K = 20;
  double eta = 0.1;
  double alpha0 = 1.0;
  double beta0 = 1.0;
  std::optional<double> grad_tol;
  double gamma_min = 0.0;
  double gamma_max = 1e6;
  /// Also keep gamma >= L_xx(theta) + gamma_margin. Off by default: with the
  /// unsquared transport norm it pins every perturbation to its base point.
  bool curvature_floor = false;
  double gamma_margin = 1e-2;
  double mu_floor = 1e-3;
  std::uint64_t seed = 0;

  TransportCost cost() const { return {kappa}; }

  void validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("config: ") + what); };
    if (!(rho >= 0) || !std::isfinite(rho)) fail("rho must be finite and >= 0");
    if (!(kappa > 0)) fail("kappa must be > 0");
    if (T < 0) fail("T must be >= 0");
    if (K < 1) fail("K must be >= 1");
    if (!(eta > 0)) fail("eta must be > 0");
    if (!(alpha0 > 0) || !(beta0 > 0)) fail("alpha0 and beta0 must be > 0");
    if (grad_tol && !(*grad_tol > 0)) fail("grad_tol must be > 0");
    if (!(gamma_min >= 0) || !(gamma_min <= gamma_max)) fail("need 0 <= gamma_min <= gamma_max");
    if (!(gamma_margin >= 0) || !(mu_floor > 0)) fail("gamma_margin >= 0 and mu_floor > 0 required");
  }
};

struct IterationRecord {
  double grad_theta_norm_sq = 0;
  double grad_gamma_sq = 0;
  double h_value = 0;
  int inner_steps = 0;
  double gamma = 0;
};

struct RunMetrics {
  std::vector<IterationRecord> iterations;
  double train_seconds = 0;
  double eval_seconds = 0;
};

template <typename Scalar>
Scalar transport_distance(const SampleT<Scalar>& a, const SampleT<Scalar>& b, const TransportCostT<Scalar>& cost) {
  if (a.dim() != b.dim()) throw std::invalid_argument("transport_distance: dimension mismatch");
  const Scalar dx = (a.x - b.x).norm();
  if (cost.labels_frozen()) {
    return a.y == b.y ? dx : std::numeric_limits<Scalar>::infinity();
  }
  using std::abs;
  return dx + cost.kappa * abs(a.y - b.y);
}

template <typename Scalar>
SampleT<Scalar> project_to_support(const SampleT<Scalar>& p, const SupportBoxT<Scalar>& box) {
  if (p.dim() != box.dim()) throw std::invalid_argument("project_to_support: dimension mismatch");
  return {p.x.cwiseMax(box.x_lo).cwiseMin(box.x_hi), std::clamp(p.y, box.y_lo, box.y_hi)};
}

/// Transport-cost diameter of the box; the label extent is ignored when labels are frozen.
template <typename Scalar>
Scalar support_diameter(const SupportBoxT<Scalar>& box, const TransportCostT<Scalar>& cost) {
  box.validate();
  Scalar d = (box.x_hi - box.x_lo).norm();
  if (!cost.labels_frozen()) d += cost.kappa * (box.y_hi - box.y_lo);
  if (!(d > 0)) throw std::invalid_argument("support_diameter: degenerate support box");
  return d;
}

/// Bounding box of the data, scaled about its center by `inflate`.
template <typename Scalar>
SupportBoxT<Scalar> bounding_box(const DatasetT<Scalar>& data, Scalar inflate = Scalar(1)) {
  if (data.empty()) throw std::invalid_argument("bounding_box: empty dataset");
  if (!(inflate >= 1)) throw std::invalid_argument("bounding_box: inflation factor must be >= 1");
  VectorX<Scalar> lo = data.features.colwise().minCoeff().transpose();
  VectorX<Scalar> hi = data.features.colwise().maxCoeff().transpose();
  VectorX<Scalar> mid = (lo + hi) / Scalar(2);
  VectorX<Scalar> half = (hi - lo) / Scalar(2) * inflate;
  const Scalar ymin = data.labels.minCoeff(), ymax = data.labels.maxCoeff();
  const Scalar ymid = (ymin + ymax) / Scalar(2), yhalf = (ymax - ymin) / Scalar(2) * inflate;
  return {(mid - half).cwiseMin(lo), (mid + half).cwiseMax(hi), std::min(ymid - yhalf, ymin),
          std::max(ymid + yhalf, ymax)};
}

}  // namespace dro
