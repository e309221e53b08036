// Spectral evolution of the packet on a momentum grid.
//
// The amplitude is sampled on a regular momentum grid centred on p, evolved
// by the exact phase exp(-i t sqrt(k^2 + m^2)), and synthesised into position
// space with (2 pi)^{-d/2} int d^dk exp(i k x). Moments are then read off the
// Newton-Wigner density |Psi(x, t)|^2 by plain grid sums, independent of the
// momentum-space identities the oracle relies on.

#pragma once

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "erlab/model.hpp"
#include "erlab/moments.hpp"

namespace erlab {

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Density reached the box faces, so the periodic images overlap.
class WrapAroundError : public GridError {
 public:
  using GridError::GridError;
};

inline constexpr double kMinHalfwidthSigma = 5.0;  // exp(-25) ~ 1.4e-11 at the cut
inline constexpr double kBoxMarginSigmas = 8.0;
inline constexpr double kWrapThreshold = 1e-10;    // face density relative to peak
inline constexpr double kGridNormTolerance = 1e-8;

struct GridOptions {
  int dimension = 1;
  int points_per_axis = 128;
  double halfwidth_sigma = 6.0;  // k_halfwidth * sigma
};

/// Regular grid k = k_center + (n - N/2) dk, n = 0..N-1, on each axis.
/// The reciprocal position grid has spacing dx = 2 pi / (N dk).
class MomentumGrid {
 public:
  /// Throws GridError unless N is a power of two and k_halfwidth * sigma >= 5.
  MomentumGrid(const PacketSpec& spec, const GridOptions& options);

  int dimension() const noexcept { return dimension_; }
  int points() const noexcept { return points_; }
  std::size_t size() const noexcept;
  const Vec3& k_center() const noexcept { return k_center_; }
  double k_halfwidth() const noexcept { return k_halfwidth_; }
  double dk() const noexcept { return dk_; }
  double dx() const noexcept { return dx_; }
  double box_length() const noexcept { return dx_ * points_; }

  double k(std::size_t axis, int index) const noexcept {
    return k_center_[axis] + (index - points_ / 2) * dk_;
  }
  /// Lab axes carried by the grid: {0, 1, 2} in 3D, {2} on the line.
  std::vector<std::size_t> axes() const;

  /// Throws GridError if the box cannot hold the packet at |t| <= t_max with
  /// an 8 sigma margin around the predicted centre.
  void check_box(const PacketSpec& spec, double t_max) const;

 private:
  int dimension_;
  int points_;
  Vec3 k_center_;
  double k_halfwidth_;
  double dk_;
  double dx_;
};

struct EvolvedGridState {
  PacketSpec spec;
  MomentumGrid grid;
  std::vector<std::complex<double>> initial;    // Phi_0 samples
  std::vector<std::complex<double>> amplitude;  // Phi_t samples
  double time = 0.0;

  /// sum |Phi_t|^2 dk^d
  double discrete_norm() const;
};

EvolvedGridState init_packet_on_grid(const PacketSpec& spec, const MomentumGrid& grid);

/// Advances by `dt`. Phases are composed additively in time, so evolving by
/// t1 then t2 reproduces evolving by t1 + t2.
EvolvedGridState evolve(const EvolvedGridState& state, double dt);

struct DensityField {
  int dimension = 1;
  int points = 0;
  double dx = 0.0;
  double time = 0.0;
  Vec3 center{};  // box centre, placed at the predicted packet centre
  std::vector<double> rho;
  double peak = 0.0;
  bool wrapped = false;

  double position(std::size_t axis, int index) const noexcept {
    return center[axis] + (index - points / 2) * dx;
  }
  /// sum rho dx^d
  double integral() const;
  /// Density along `axis` through the central grid point (the whole field in 1D).
  std::vector<double> slice(std::size_t axis) const;
};

DensityField to_position_density(const EvolvedGridState& state);

/// Throws WrapAroundError if the field is flagged as wrapped.
MomentSet grid_moments(const DensityField& density);

struct Snapshot {
  double time;
  double norm;
  double peak;
  bool wrapped;
  MomentSet moments;  // unset (zeros) when wrapped
};

std::vector<Snapshot> snapshot_series(const PacketSpec& spec, const GridOptions& options,
                                      const std::vector<double>& times);

/// CSV with header `axis,x,rho`, one block per grid axis (slices through the
/// box centre in 3D).
void write_density_csv(std::ostream& out, const DensityField& density);

/// Whitespace-delimited `x rho` pairs for one axis slice.
void write_density_slice(std::ostream& out, const DensityField& density, std::size_t axis);

}  // namespace erlab
