// Physical parameters of a free Gaussian Klein-Gordon packet.
//
// Natural units throughout: hbar = c = 1. Momentum and energy share a unit,
// length and time share the reciprocal unit, velocities are dimensionless.

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace erlab {

using Vec3 = std::array<double, 3>;

double norm(const Vec3& a);
double dot(const Vec3& a, const Vec3& b);
Vec3 scaled(const Vec3& a, double s);

/// Raised when a packet or configuration value is outside its physical domain.
/// `field()` names the offending input so front ends can report it.
class InvalidParameter : public std::invalid_argument {
 public:
  InvalidParameter(std::string field, const std::string& what);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Gaussian packet: per-axis amplitude M exp(-(k_j - p_j)^2 sigma^2).
/// `width` is sigma, so the initial per-axis position variance is sigma^2.
struct PacketSpec {
  double mass = 1.0;
  double width = 5.0;
  Vec3 momentum{0.0, 0.0, 0.0};
};

/// Throws InvalidParameter unless mass > 0, width > 0 and everything is finite.
void validate(const PacketSpec& spec);

struct DerivedKinematics {
  double energy;              // sqrt(|p|^2 + m^2)
  double speed;               // |p| / E, in [0, 1)
  double gamma;               // E / m
  double compton_wavelength;  // 1 / m
  double sigma_m_product;     // sigma * m
};

DerivedKinematics derive_kinematics(const PacketSpec& spec);

enum class Validity { valid, marginal, invalid };

struct ValidityVerdict {
  Validity level;
  double sigma_m;
};

// Thresholds on sigma*m for the quadratic expansion of the dispersion
// relation: valid above 3 Compton wavelengths, invalid at or below one.
inline constexpr double kValidSigmaM = 3.0;
inline constexpr double kInvalidSigmaM = 1.0;

ValidityVerdict check_validity(const PacketSpec& spec);

std::string_view to_string(Validity v);

}  // namespace erlab
