// Exact packet moments by Gauss-Hermite quadrature in momentum space.
//
// For the Newton-Wigner amplitude Phi_t(k) = Phi(k) exp(-i t E_k) the position
// operator acts as i d/dk, so with a real initial Phi
//
//   X_j(t)       = t <k_j / E_k>
//   sigma_j^2(t) = 4 sigma^4 Var(k_j) + t^2 Var(k_j / E_k)
//
// where averages are taken under |Phi|^2. No expansion of E_k is made. The
// amplitude carries no chirp; a position-momentum correlated initial state
// would add a term linear in t and is not representable here.

#pragma once

#include <span>
#include <vector>

#include "erlab/model.hpp"
#include "erlab/moments.hpp"

namespace erlab {

/// Gauss-Hermite rule for weight exp(-u^2). Tables are immutable once built.
class QuadratureScheme {
 public:
  explicit QuadratureScheme(int order);

  int order() const noexcept { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Phi(k) = prod_j M exp(-(k_j - p_j)^2 sigma^2).
struct GaussianMomentumAmplitude {
  PacketSpec spec;
  double normalization;  // M

  /// M^2 = sigma sqrt(2 / pi), so each axis factor has unit norm.
  static GaussianMomentumAmplitude normalized(const PacketSpec& spec);

  double axis_factor(double k, double center) const;
};

// In one dimension the packet lives on the line through p: E_k = sqrt(k^2 + m^2)
// with k centred on |p|. One-dimensional results occupy index 2 of every Vec3
// and the other two entries are NaN.

struct OracleOptions {
  int order = 40;
  int dimension = 3;
  double convergence_rtol = 1e-9;
};

struct VelocityMoments {
  Vec3 mean;      // <k_j / E>
  Vec3 second;    // <(k_j / E)^2>
  Vec3 variance;  // Var(k_j / E)
  bool converged;
  double max_relative_change;  // order n vs 2n
};

struct ExactMoments {
  double time;
  Vec3 mean_position;
  Vec3 sigma_sq;
  Vec3 growth;  // sigma_sq - sigma_sq(t = 0), i.e. t^2 Var(k_j / E)
  Vec3 mean_momentum;
  Vec3 mean_velocity;
  Vec3 velocity_second_moment;
  double norm;
  bool converged;
  int dimension;
};

double normalization_integral(const GaussianMomentumAmplitude& amp, const QuadratureScheme& scheme,
                              int dimension = 3);

Vec3 mean_momentum(const GaussianMomentumAmplitude& amp, const QuadratureScheme& scheme,
                   int dimension = 3);

/// Flags non-convergence (converged == false) when doubling the order moves
/// any output by more than `rtol`.
VelocityMoments velocity_moments(const GaussianMomentumAmplitude& amp,
                                 const QuadratureScheme& scheme, int dimension = 3,
                                 double rtol = 1e-9);

/// Quadrature is done once at construction; exact_moments(t) is then O(1).
class MomentOracle {
 public:
  MomentOracle(const GaussianMomentumAmplitude& amp, const OracleOptions& options);
  MomentOracle(const PacketSpec& spec, const OracleOptions& options = {});

  const PacketSpec& spec() const noexcept { return amp_.spec; }
  int dimension() const noexcept { return dimension_; }
  double norm() const noexcept { return norm_; }
  const Vec3& mean_momentum() const noexcept { return mean_momentum_; }
  const Vec3& momentum_variance() const noexcept { return momentum_variance_; }
  const VelocityMoments& velocity() const noexcept { return velocity_; }

  ExactMoments exact_moments(double t) const;

 private:
  GaussianMomentumAmplitude amp_;
  int dimension_;
  double norm_;
  Vec3 mean_momentum_;
  Vec3 momentum_variance_;
  VelocityMoments velocity_;
};

struct ConvergenceStudy {
  std::array<double, 3> sigma_m;
  std::array<double, 3> relative_error;  // t^2 coefficient of sigma_3^2 vs closed form
  double exponent;                       // fitted decay order in sigma*m
  bool measurable;                       // false if any error sits at the noise floor
};

inline constexpr double kConvergenceNoiseFloor = 1e-11;

/// Rotates p onto axis 3 and compares the oracle's longitudinal spreading
/// coefficient with the closed form at sigma, 2 sigma and 4 sigma.
ConvergenceStudy convergence_order_check(const PacketSpec& spec_base, double t,
                                         const OracleOptions& options = {});

}  // namespace erlab
