#include "erlab/oracle.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>


namespace erlab {

QuadratureScheme::QuadratureScheme(int order) {
  if (order < 1) throw InvalidParameter("quad_order", "quadrature order must be >= 1");
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, static_cast<std::size_t>(order),
                                  0.0, 1.0, 0.0, 0.0),
      &gsl_integration_fixed_free);
  if (!ws) throw std::runtime_error("failed to build Gauss-Hermite tables");
  const double* x = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  nodes_.assign(x, x + order);
  weights_.assign(w, w + order);
}

GaussianMomentumAmplitude GaussianMomentumAmplitude::normalized(const PacketSpec& spec) {
  validate(spec);
  return {spec, std::sqrt(spec.width * std::sqrt(2.0 / std::numbers::pi))};
}

double GaussianMomentumAmplitude::axis_factor(double k, double center) const {
  const double d = (k - center) * spec.width;
  return normalization * std::exp(-d * d);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MomentSums {
  double norm = 0.0;
  Vec3 mean_k{};
  Vec3 var_k{};
  Vec3 mean_v{};
  Vec3 second_v{};
  Vec3 var_v{};
};

void check_dimension(int dimension) {
  if (dimension != 1 && dimension != 3) throw InvalidParameter("dim", "dimension must be 1 or 3");
}

// Momentum samples k = center + u / (sqrt(2) sigma) on each integrated axis.
std::vector<double> axis_samples(const QuadratureScheme& scheme, double center, double width) {
  const double scale = 1.0 / (std::numbers::sqrt2 * width);
  std::vector<double> k;
  k.reserve(scheme.nodes().size());
  for (double u : scheme.nodes()) k.push_back(center + u * scale);
  return k;
}

MomentSums integrate_line(const GaussianMomentumAmplitude& amp, const QuadratureScheme& scheme) {
  const auto& spec = amp.spec;
  const double center = norm(spec.momentum);
  const auto k = axis_samples(scheme, center, spec.width);
  const auto w = scheme.weights();
  const double scale = amp.normalization * amp.normalization / (std::numbers::sqrt2 * spec.width);

  MomentSums s;
  double sk = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double wt = w[i] * scale;
    s.norm += wt;
    sk += wt * k[i];
    sv += wt * k[i] / std::hypot(k[i], spec.mass);
  }
  const double mk = sk / s.norm, mv = sv / s.norm;
  double vk = 0.0, vv = 0.0, v2 = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double wt = w[i] * scale;
    const double vel = k[i] / std::hypot(k[i], spec.mass);
    vk += wt * (k[i] - mk) * (k[i] - mk);
    vv += wt * (vel - mv) * (vel - mv);
    v2 += wt * vel * vel;
  }
  s.mean_k = {kNaN, kNaN, mk};
  s.var_k = {kNaN, kNaN, vk / s.norm};
  s.mean_v = {kNaN, kNaN, mv};
  s.var_v = {kNaN, kNaN, vv / s.norm};
  s.second_v = {kNaN, kNaN, v2 / s.norm};
  return s;
}

MomentSums integrate_space(const GaussianMomentumAmplitude& amp, const QuadratureScheme& scheme) {
  const auto& spec = amp.spec;
  std::array<std::vector<double>, 3> k;
  for (std::size_t a = 0; a < 3; ++a) k[a] = axis_samples(scheme, spec.momentum[a], spec.width);
  const auto w = scheme.weights();
  const std::size_t n = w.size();
  const double axis_scale =
      amp.normalization * amp.normalization / (std::numbers::sqrt2 * spec.width);
  const double scale = axis_scale * axis_scale * axis_scale;
  const double m = spec.mass;

  MomentSums s;
  Vec3 sk{}, sv{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) {
        const double wt = w[i] * w[j] * w[l] * scale;
        const Vec3 kk{k[0][i], k[1][j], k[2][l]};
        const double e = std::hypot(std::hypot(kk[0], kk[1], kk[2]), m);
        s.norm += wt;
        for (std::size_t a = 0; a < 3; ++a) {
          sk[a] += wt * kk[a];
          sv[a] += wt * kk[a] / e;
        }
      }
  for (std::size_t a = 0; a < 3; ++a) {
    s.mean_k[a] = sk[a] / s.norm;
    s.mean_v[a] = sv[a] / s.norm;
  }

  Vec3 vk{}, vv{}, v2{};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) {
        const double wt = w[i] * w[j] * w[l] * scale;
        const Vec3 kk{k[0][i], k[1][j], k[2][l]};
        const double e = std::hypot(std::hypot(kk[0], kk[1], kk[2]), m);
        for (std::size_t a = 0; a < 3; ++a) {
          const double dk = kk[a] - s.mean_k[a];
          const double vel = kk[a] / e;
          const double dv = vel - s.mean_v[a];
          vk[a] += wt * dk * dk;
          vv[a] += wt * dv * dv;
          v2[a] += wt * vel * vel;
        }
      }
  for (std::size_t a = 0; a < 3; ++a) {
    s.var_k[a] = vk[a] / s.norm;
    s.var_v[a] = vv[a] / s.norm;
    s.second_v[a] = v2[a] / s.norm;
  }
  return s;
}

MomentSums integrate(const GaussianMomentumAmplitude& amp, const QuadratureScheme& scheme,
                     int dimension) {
  check_dimension(dimension);
  validate(amp.spec);
  return dimension == 1 ? integrate_line(amp, scheme) : integrate_space(amp, scheme);
}

// Largest change between two quadrature orders. Means are compared on the
// scale of the spread so that parity zeros do not count as relative noise.
double max_change(const MomentSums& lo, const MomentSums& hi) {
  double worst = std::abs(lo.norm - hi.norm) / std::abs(hi.norm);
  for (std::size_t a = 0; a < 3; ++a) {
    if (std::isnan(hi.var_v[a])) continue;
    const double spread = std::sqrt(hi.var_v[a]);
    const double mean_scale = std::max({std::abs(hi.mean_v[a]), spread,
                                        std::numeric_limits<double>::min()});
    worst = std::max(worst, std::abs(lo.mean_v[a] - hi.mean_v[a]) / mean_scale);
    worst = std::max(worst, std::abs(lo.var_v[a] - hi.var_v[a]) / std::abs(hi.var_v[a]));
    worst = std::max(worst, std::abs(lo.second_v[a] - hi.second_v[a]) / std::abs(hi.second_v[a]));
  }
  return worst;
}

VelocityMoments to_velocity(const MomentSums& s, double change, double rtol) {
  return {s.mean_v, s.second_v, s.var_v, change <= rtol, change};
}

}  // namespace

double normalization_integral(const GaussianMomentumAmplitude& amp, const QuadratureScheme& scheme,
                              int dimension) {
  return integrate(amp, scheme, dimension).norm;
}

Vec3 mean_momentum(const GaussianMomentumAmplitude& amp, const QuadratureScheme& scheme,
                   int dimension) {
  return integrate(amp, scheme, dimension).mean_k;
}

VelocityMoments velocity_moments(const GaussianMomentumAmplitude& amp,
                                 const QuadratureScheme& scheme, int dimension, double rtol) {
  const auto lo = integrate(amp, scheme, dimension);
  const auto hi = integrate(amp, QuadratureScheme(2 * scheme.order()), dimension);
  return to_velocity(lo, max_change(lo, hi), rtol);
}

MomentOracle::MomentOracle(const GaussianMomentumAmplitude& amp, const OracleOptions& options)
    : amp_(amp), dimension_(options.dimension) {
  check_dimension(dimension_);
  if (options.order < 2) throw InvalidParameter("quad_order", "quadrature order must be >= 2");
  const QuadratureScheme scheme(options.order);
  const auto lo = integrate(amp_, scheme, dimension_);
  const auto hi = integrate(amp_, QuadratureScheme(2 * options.order), dimension_);
  norm_ = lo.norm;
  mean_momentum_ = lo.mean_k;
  momentum_variance_ = lo.var_k;
  velocity_ = to_velocity(lo, max_change(lo, hi), options.convergence_rtol);
}

MomentOracle::MomentOracle(const PacketSpec& spec, const OracleOptions& options)
    : MomentOracle(GaussianMomentumAmplitude::normalized(spec), options) {}

ExactMoments MomentOracle::exact_moments(double t) const {
  const double s2 = amp_.spec.width * amp_.spec.width;
  ExactMoments out{};
  out.time = t;
  out.norm = norm_;
  out.converged = velocity_.converged;
  out.dimension = dimension_;
  out.mean_momentum = mean_momentum_;
  out.mean_velocity = velocity_.mean;
  out.velocity_second_moment = velocity_.second;
  for (std::size_t a = 0; a < 3; ++a) {
    out.mean_position[a] = t * velocity_.mean[a];
    out.growth[a] = t * t * velocity_.variance[a];
    out.sigma_sq[a] = 4.0 * s2 * s2 * momentum_variance_[a] + out.growth[a];
  }
  return out;
}

ConvergenceStudy convergence_order_check(const PacketSpec& spec_base, double t,
                                         const OracleOptions& options) {
  validate(spec_base);
  if (!(t != 0.0) || !std::isfinite(t))
    throw InvalidParameter("t", "convergence check needs a finite nonzero time");
  PacketSpec spec = spec_base;
  spec.momentum = {0.0, 0.0, norm(spec_base.momentum)};

  ConvergenceStudy study{};
  study.measurable = true;
  for (std::size_t i = 0; i < 3; ++i) {
    spec.width = std::ldexp(spec_base.width, static_cast<int>(i));
    const MomentOracle oracle(spec, options);
    const auto at_t = oracle.exact_moments(t);
    const auto at_0 = oracle.exact_moments(0.0);
    const double coefficient = (at_t.sigma_sq[kLineAxis] - at_0.sigma_sq[kLineAxis]) / (t * t);
    const double g = derive_kinematics(spec).gamma;
    const double ms = spec.mass * spec.width;
    const double closed = 1.0 / (4.0 * std::pow(g, 6) * ms * ms);
    study.sigma_m[i] = spec.width * spec.mass;
    study.relative_error[i] = std::abs(coefficient - closed) / closed;
    if (study.relative_error[i] < kConvergenceNoiseFloor) study.measurable = false;
  }

  // Least-squares slope of log(error) against log(sigma m).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double x = std::log(study.sigma_m[i]);
    const double y = std::log(std::max(study.relative_error[i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
  study.exponent = -slope;
  return study;
}

}  // namespace erlab
