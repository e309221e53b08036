// Helpers shared by the test binaries: ulp distance, seeded random specs and
// brute-force reference integrals that do not touch the library's quadrature.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "erlab/model.hpp"

namespace erlab::testing {

inline std::int64_t ordered_bits(double x) {
  const auto b = std::bit_cast<std::int64_t>(x);
  return b < 0 ? std::numeric_limits<std::int64_t>::min() - b : b;
}

inline std::int64_t ulp_distance(double a, double b) {
  const auto d = ordered_bits(a) - ordered_bits(b);
  return d < 0 ? -d : d;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// m in [0.1, 10], sigma m in [3, 100], v in [0.1, 0.99], p along a random direction.
inline PacketSpec random_spec(std::mt19937_64& rng, bool along_z = false) {
  std::uniform_real_distribution<double> logm(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> sm(3.0, 100.0);
  std::uniform_real_distribution<double> vel(0.1, 0.99);
  std::normal_distribution<double> dir(0.0, 1.0);
  const double m = std::exp(logm(rng));
  const double v = vel(rng);
  const double p = m * v / std::sqrt(1.0 - v * v);
  Vec3 n{0.0, 0.0, 1.0};
  if (!along_z) {
    n = {dir(rng), dir(rng), dir(rng)};
    n = scaled(n, 1.0 / norm(n));
  }
  return PacketSpec{m, sm(rng) / m, scaled(n, p)};
}

/// Trapezoid rule over [-L, L] in u = k' sigma with step h; spectrally accurate
/// for the Gaussian weight, and independent of the Gauss-Hermite tables.
/// Returns mean and variance of k/sqrt(k^2 + mass^2) along a line through p.
struct LineVelocityMoments {
  double norm;
  double mean;
  double variance;
};

inline LineVelocityMoments brute_line_velocity(double mass, double width, double p,
                                               double extent = 9.0, int steps = 4000) {
  const double h = 2.0 * extent / steps;
  const double m2 = width * std::sqrt(2.0 / std::numbers::pi);
  double w0 = 0.0, w1 = 0.0, w2 = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double u = -extent + i * h;
    const double k = p + u / width;
    const double weight = m2 * std::exp(-2.0 * u * u) * h / width;
    const double v = k / std::sqrt(k * k + mass * mass);
    w0 += weight;
    w1 += weight * v;
    w2 += weight * v * v;
  }
  const double mean = w1 / w0;
  return {w0, mean, w2 / w0 - mean * mean};
}

}  // namespace erlab::testing
