// Closed-form moments of the Gaussian packet under the quadratic expansion of
// sqrt((p - k')^2 + m^2) about k' = 0.
//
// All functions work in the lab frame; internally they use the packet frame
// whose third axis is the direction of p (or +z for a packet at rest).

#pragma once

#include <complex>

#include "erlab/model.hpp"

namespace erlab {

/// Orthonormal frame with `axis[2]` along p. The transverse pair is arbitrary
/// but deterministic.
struct PacketFrame {
  std::array<Vec3, 3> axis;
};

PacketFrame packet_frame(const PacketSpec& spec);

enum class AxisKind { longitudinal, transverse };

/// sigma^2 + t^2 / (4 m^2 sigma^2); the momentum of `spec` is ignored.
double rest_dispersion(const PacketSpec& spec, double t);

/// Variance along p: sigma^2 + t^2 / (4 gamma^6 m^2 sigma^2).
double longitudinal_dispersion(const PacketSpec& spec, double t);

/// Variance across p: sigma^2 + t^2 / (4 gamma^2 m^2 sigma^2).
double transverse_dispersion(const PacketSpec& spec, double t);

// Same quantities written with v and E, sigma^2 + t^2 (1 - v^2)^2 / (4 E^2
// sigma^2) and sigma^2 + t^2 / (4 E^2 sigma^2). Used to cross-check the gamma
// forms above; they lose accuracy as v -> 1.
double longitudinal_dispersion_velocity_form(const PacketSpec& spec, double t);
double transverse_dispersion_velocity_form(const PacketSpec& spec, double t);

/// Packet centre t * v * p_hat (zero for a packet at rest).
Vec3 mean_position(const PacketSpec& spec, double t);

struct ClosedFormMoments {
  double time;
  Vec3 mean_position;
  double sigma_sq_longitudinal;
  double sigma_sq_transverse_1;
  double sigma_sq_transverse_2;
  Vec3 frame_axis;
};

ClosedFormMoments closed_form_moments(const PacketSpec& spec, double t);

/// Complex Gaussian widths a_j^2 of the factorised evolution integrals, in the
/// packet frame: a_1^2 = a_2^2 = sigma^2 + i t / 2E, a_3^2 = sigma^2 + i t (1 - v^2) / 2E.
struct QuadraticExpansionFactors {
  std::complex<double> a1_sq;
  std::complex<double> a2_sq;
  std::complex<double> a3_sq;
  Vec3 axis_velocity;  // (0, 0, v)
};

QuadraticExpansionFactors expansion_factors(const PacketSpec& spec, double t);

/// Rest-frame time at which the rest dispersion equals the moving dispersion:
/// t / gamma^3 along p, t / gamma across it. Throws InvalidParameter for gamma < 1.
double retarded_time(double t, double gamma, AxisKind axis);

/// Exact energy sqrt(|p - k'|^2 + m^2) minus its second-order expansion
/// E [1 - p.k'/E^2 + (|k'|^2 - (v.k')^2) / 2E^2]. `kprime` is in the lab frame;
/// with p along axis 3 the bracket is the familiar
/// [k'_1^2 + k'_2^2 + (1 - v^2) k'_3^2] / 2E^2. Leading order is cubic in k'.
double dispersion_relation_residual(const PacketSpec& spec, const Vec3& kprime);

}  // namespace erlab
