#include "erlab/analytic.hpp"

#include <cmath>

namespace erlab {

PacketFrame packet_frame(const PacketSpec& spec) {
  const double p = norm(spec.momentum);
  const Vec3 e3 = p > 0.0 ? scaled(spec.momentum, 1.0 / p) : Vec3{0.0, 0.0, 1.0};
  // Seed the transverse pair with the lab axis least aligned with e3.
  std::size_t least = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(e3[i]) < std::abs(e3[least])) least = i;
  Vec3 seed{0.0, 0.0, 0.0};
  seed[least] = 1.0;
  const double proj = dot(seed, e3);
  Vec3 e1{seed[0] - proj * e3[0], seed[1] - proj * e3[1], seed[2] - proj * e3[2]};
  e1 = scaled(e1, 1.0 / norm(e1));
  const Vec3 e2{e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2],
                e3[0] * e1[1] - e3[1] * e1[0]};
  return PacketFrame{{e1, e2, e3}};
}

namespace {

double spread(const PacketSpec& spec, double rest_time) {
  const double s2 = spec.width * spec.width;
  const double m = spec.mass;
  return s2 + rest_time * rest_time / (4.0 * m * m * s2);
}

}  // namespace

double rest_dispersion(const PacketSpec& spec, double t) {
  validate(spec);
  return spread(spec, t);
}

double longitudinal_dispersion(const PacketSpec& spec, double t) {
  const double g = derive_kinematics(spec).gamma;
  return spread(spec, t / (g * g * g));
}

double transverse_dispersion(const PacketSpec& spec, double t) {
  const double g = derive_kinematics(spec).gamma;
  return spread(spec, t / g);
}

double longitudinal_dispersion_velocity_form(const PacketSpec& spec, double t) {
  const auto kin = derive_kinematics(spec);
  const double s2 = spec.width * spec.width;
  const double contraction = (1.0 - kin.speed) * (1.0 + kin.speed);
  return s2 + t * t * contraction * contraction / (4.0 * kin.energy * kin.energy * s2);
}

double transverse_dispersion_velocity_form(const PacketSpec& spec, double t) {
  const auto kin = derive_kinematics(spec);
  const double s2 = spec.width * spec.width;
  return s2 + t * t / (4.0 * kin.energy * kin.energy * s2);
}

Vec3 mean_position(const PacketSpec& spec, double t) {
  const auto kin = derive_kinematics(spec);
  // v p_hat = p / E, which is also the right answer (zero) at rest.
  return scaled(spec.momentum, t / kin.energy);
}

ClosedFormMoments closed_form_moments(const PacketSpec& spec, double t) {
  const double trans = transverse_dispersion(spec, t);
  return ClosedFormMoments{
      .time = t,
      .mean_position = mean_position(spec, t),
      .sigma_sq_longitudinal = longitudinal_dispersion(spec, t),
      .sigma_sq_transverse_1 = trans,
      .sigma_sq_transverse_2 = trans,
      .frame_axis = packet_frame(spec).axis[2],
  };
}

QuadraticExpansionFactors expansion_factors(const PacketSpec& spec, double t) {
  const auto kin = derive_kinematics(spec);
  const double s2 = spec.width * spec.width;
  const double transverse_im = t / (2.0 * kin.energy);
  const double longitudinal_im = transverse_im / (kin.gamma * kin.gamma);
  return QuadraticExpansionFactors{
      .a1_sq = {s2, transverse_im},
      .a2_sq = {s2, transverse_im},
      .a3_sq = {s2, longitudinal_im},
      .axis_velocity = {0.0, 0.0, kin.speed},
  };
}

double retarded_time(double t, double gamma, AxisKind axis) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma))
    throw InvalidParameter("gamma", "Lorentz factor must be finite and >= 1");
  return axis == AxisKind::longitudinal ? t / (gamma * gamma * gamma) : t / gamma;
}

double dispersion_relation_residual(const PacketSpec& spec, const Vec3& kprime) {
  const auto kin = derive_kinematics(spec);
  const double m = spec.mass;
  const double e = kin.energy;
  const Vec3 diff{spec.momentum[0] - kprime[0], spec.momentum[1] - kprime[1],
                  spec.momentum[2] - kprime[2]};
  const double exact = std::hypot(norm(diff), m);

  const double pk = dot(spec.momentum, kprime);
  const double vk = pk / e;
  const double k2 = dot(kprime, kprime);
  const double approx = e * (1.0 - pk / (e * e) + (k2 - vk * vk) / (2.0 * e * e));
  return exact - approx;
}

}  // namespace erlab
