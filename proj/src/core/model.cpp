#include "erlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace erlab {

double norm(const Vec3& a) { return std::hypot(a[0], a[1], a[2]); }

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 scaled(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

InvalidParameter::InvalidParameter(std::string field, const std::string& what)
    : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

void validate(const PacketSpec& spec) {
  if (!std::isfinite(spec.mass) || spec.mass <= 0.0)
    throw InvalidParameter("m", "mass must be finite and > 0");
  if (!std::isfinite(spec.width) || spec.width <= 0.0)
    throw InvalidParameter("sigma", "width must be finite and > 0");
  for (double c : spec.momentum)
    if (!std::isfinite(c)) throw InvalidParameter("p", "momentum components must be finite");
}

DerivedKinematics derive_kinematics(const PacketSpec& spec) {
  validate(spec);
  const double p = norm(spec.momentum);
  const double energy = std::hypot(p, spec.mass);
  // |p|/E rounds to 1 once |p| >> m; keep v strictly subluminal.
  const double speed = std::min(p / energy, std::nextafter(1.0, 0.0));
  return DerivedKinematics{
      .energy = energy,
      .speed = speed,
      .gamma = energy / spec.mass,
      .compton_wavelength = 1.0 / spec.mass,
      .sigma_m_product = spec.width * spec.mass,
  };
}

ValidityVerdict check_validity(const PacketSpec& spec) {
  validate(spec);
  const double sm = spec.width * spec.mass;
  if (sm > kValidSigmaM) return {Validity::valid, sm};
  if (sm > kInvalidSigmaM) return {Validity::marginal, sm};
  return {Validity::invalid, sm};
}

std::string_view to_string(Validity v) {
  switch (v) {
    case Validity::valid: return "valid";
    case Validity::marginal: return "marginal";
    case Validity::invalid: return "invalid";
  }
  return "unknown";
}

}  // namespace erlab
