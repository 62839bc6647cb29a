#include "dro/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dro {

namespace {

constexpr std::uint64_t kThetaStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kTestStream = 3;
constexpr std::uint64_t kMonteCarloStream = 4;

}  // namespace

void GenSpec::validate() const {
  if (s < 0 || n_train < 0 || n_test < 0) throw std::invalid_argument("gen spec: negative size");
  if (!(sigma >= 0) || !std::isfinite(sigma)) throw std::invalid_argument("gen spec: sigma must be >= 0");
  if (theta_true && theta_true->size() != s + 1) {
    throw std::invalid_argument("gen spec: theta_true needs s coefficients plus an intercept");
  }
  if (mean && mean->size() != s) throw std::invalid_argument("gen spec: mean dimension mismatch");
  if (covariance && (covariance->rows() != s || covariance->cols() != s)) {
    throw std::invalid_argument("gen spec: covariance dimension mismatch");
  }
}

VectorX<double> GenSpec::resolved_theta() const { return theta_true ? *theta_true : default_theta_true(s, seed); }

VectorX<double> default_theta_true(Index s, std::uint64_t seed) {
  Stream rng = seeded(seed).split(kThetaStream);
  VectorX<double> theta(s + 1);
  for (Index j = 0; j < s; ++j) theta(j) = rng.uniform() / double(s);
  theta(s) = 1.0;
  return theta;
}

DemandModel::DemandModel(const GenSpec& spec)
    : theta_(spec.resolved_theta()), sigma_(spec.sigma), dist_(spec.feature_dist) {
  spec.validate();
  if (dist_ != FeatureDist::Gaussian) return;
  const Index s = spec.s;
  mean_ = spec.mean ? *spec.mean : VectorX<double>::Constant(s, 0.5);
  MatrixX<double> cov(s, s);
  if (spec.covariance) {
    cov = *spec.covariance;
  } else {
    for (Index i = 0; i < s; ++i)
      for (Index j = 0; j < s; ++j) cov(i, j) = std::pow(0.5, double(std::abs(i - j)));
  }
  if (!cov.isApprox(cov.transpose())) throw std::invalid_argument("gen spec: covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixX<double>> eig(cov);
  const VectorX<double>& ev = eig.eigenvalues();
  const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (s > 0 && ev.minCoeff() < -tol) {
    throw std::invalid_argument("gen spec: covariance is not positive semidefinite");
  }
  factor_ = eig.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Sample DemandModel::operator()(Stream& rng) const {
  const Index s = dim();
  Sample out{VectorX<double>(s), 0.0};
  if (dist_ == FeatureDist::Uniform) {
    for (Index j = 0; j < s; ++j) out.x(j) = rng.uniform();
  } else {
    VectorX<double> z(s);
    for (Index j = 0; j < s; ++j) z(j) = rng.normal();
    out.x = mean_ + factor_ * z;
  }
  out.y = theta_.head(s).dot(out.x) + theta_(s) + sigma_ * rng.normal();
  return out;
}

Dataset generate_stream(const GenSpec& spec, Index n, std::uint64_t stream_id) {
  const DemandModel model(spec);
  const Stream root = seeded(spec.seed).split(stream_id);
  MatrixX<double> f(n, spec.s);
  VectorX<double> y(n);
  for (Index i = 0; i < n; ++i) {
    Stream sub = root.split(static_cast<std::uint64_t>(i));
    const Sample smp = model(sub);
    f.row(i) = smp.x.transpose();
    y(i) = smp.y;
  }
  return {std::move(f), std::move(y)};
}

GeneratedData generate(const GenSpec& spec) {
  spec.validate();
  return {generate_stream(spec, spec.n_train, kTrainStream), generate_stream(spec, spec.n_test, kTestStream)};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation (rel. error ~1e-9), then one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x = 0;
  if (p < p_low) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - p_low) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

double truth_optimal_cost(const GenSpec& spec, const NewsvendorParams& p, Index n_mc) {
  if (n_mc < 1) throw std::invalid_argument("truth_optimal_cost: need at least one draw");
  const DemandModel model(spec);
  const VectorX<double>& theta = model.theta();
  const Index s = spec.s;
  const double offset = spec.sigma * normal_quantile(p.critical_ratio());
  const Stream root = seeded(spec.seed).split(kMonteCarloStream);
  double total = 0;
  for (Index i = 0; i < n_mc; ++i) {
    Stream sub = root.split(static_cast<std::uint64_t>(i));
    const Sample smp = model(sub);
    const double z = theta.head(s).dot(smp.x) + theta(s) + offset;
    total += cost_kinked(z, smp.y, p);
  }
  return total / double(n_mc);
}

}  // namespace dro
