#include "erlab/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>

#include "erlab/analytic.hpp"
#include "erlab/report_io.hpp"

namespace erlab {

namespace {

using cplx = std::complex<double>;

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double line_momentum(const PacketSpec& spec) { return norm(spec.momentum); }

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::oracle: return "oracle";
    case Method::grid: return "grid";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "analytic") return Method::analytic;
  if (name == "oracle") return Method::oracle;
  if (name == "grid") return Method::grid;
  throw InvalidParameter("method", "unknown method '" + std::string(name) +
                                       "' (expected analytic, oracle or grid)");
}

MomentumGrid::MomentumGrid(const PacketSpec& spec, const GridOptions& options)
    : dimension_(options.dimension), points_(options.points_per_axis) {
  validate(spec);
  if (dimension_ != 1 && dimension_ != 3) throw GridError("grid dimension must be 1 or 3");
  if (points_ < 4 || !std::has_single_bit(static_cast<unsigned>(points_)))
    throw GridError("grid points per axis must be a power of two >= 4");
  if (!(options.halfwidth_sigma >= kMinHalfwidthSigma) || !std::isfinite(options.halfwidth_sigma))
    throw GridError("momentum half-width times sigma must be >= 5 to cover the Gaussian support");
  k_halfwidth_ = options.halfwidth_sigma / spec.width;
  k_center_ = dimension_ == 3 ? spec.momentum : Vec3{0.0, 0.0, line_momentum(spec)};
  dk_ = 2.0 * k_halfwidth_ / points_;
  dx_ = 2.0 * std::numbers::pi / (points_ * dk_);
}

std::size_t MomentumGrid::size() const noexcept {
  std::size_t n = 1;
  for (int d = 0; d < dimension_; ++d) n *= static_cast<std::size_t>(points_);
  return n;
}

std::vector<std::size_t> MomentumGrid::axes() const {
  if (dimension_ == 3) return {0, 1, 2};
  return {kLineAxis};
}

void MomentumGrid::check_box(const PacketSpec& spec, double t_max) const {
  const double t = std::abs(t_max);
  double widest = longitudinal_dispersion(spec, t);
  if (dimension_ == 3) widest = std::max(widest, transverse_dispersion(spec, t));
  const double needed = kBoxMarginSigmas * std::sqrt(widest);
  if (box_length() / 2.0 < needed)
    throw GridError("position box half-length " + format_number(box_length() / 2.0) +
                    " is smaller than the required " + format_number(needed) +
                    "; increase grid points");
}

double EvolvedGridState::discrete_norm() const {
  double sum = 0.0;
  for (const auto& a : amplitude) sum += std::norm(a);
  return sum * std::pow(grid.dk(), grid.dimension());
}

EvolvedGridState init_packet_on_grid(const PacketSpec& spec, const MomentumGrid& grid) {
  validate(spec);
  if (!(grid.k_halfwidth() * spec.width >= kMinHalfwidthSigma * (1.0 - 1e-12)))
    throw GridError("grid does not cover the packet's momentum support");
  const int n = grid.points();
  const double amp = std::sqrt(spec.width * std::sqrt(2.0 / std::numbers::pi));  // M
  const auto axis_values = [&](std::size_t axis) {
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double d = (grid.k(axis, i) - grid.k_center()[axis]) * spec.width;
      f[static_cast<std::size_t>(i)] = amp * std::exp(-d * d);
    }
    return f;
  };

  EvolvedGridState state{spec, grid, {}, {}, 0.0};
  state.initial.resize(grid.size());
  if (grid.dimension() == 1) {
    const auto f = axis_values(kLineAxis);
    std::copy(f.begin(), f.end(), state.initial.begin());
  } else {
    const auto f0 = axis_values(0), f1 = axis_values(1), f2 = axis_values(2);
    std::size_t idx = 0;
    for (double a : f0)
      for (double b : f1)
        for (double c : f2) state.initial[idx++] = a * b * c;
  }
  state.amplitude = state.initial;
  const double nrm = state.discrete_norm();
  if (std::abs(nrm - 1.0) > kGridNormTolerance)
    throw GridError("discrete norm " + format_number(nrm) + " is not within 1e-8 of 1");
  return state;
}

EvolvedGridState evolve(const EvolvedGridState& state, double dt) {
  EvolvedGridState out = state;
  out.time = state.time + dt;
  if (out.time == 0.0) {
    out.amplitude = out.initial;
    return out;
  }
  const auto& g = state.grid;
  const int n = g.points();
  const double m = state.spec.mass;
  const double t = out.time;
  if (g.dimension() == 1) {
    for (int i = 0; i < n; ++i) {
      const double e = std::hypot(g.k(kLineAxis, i), m);
      const auto u = static_cast<std::size_t>(i);
      out.amplitude[u] = out.initial[u] * std::polar(1.0, -t * e);
    }
    return out;
  }
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l, ++idx) {
        const double e = std::hypot(std::hypot(g.k(0, i), g.k(1, j), g.k(2, l)), m);
        out.amplitude[idx] = out.initial[idx] * std::polar(1.0, -t * e);
      }
  return out;
}

DensityField to_position_density(const EvolvedGridState& state) {
  const auto& g = state.grid;
  const int n = g.points();
  const int d = g.dimension();

  DensityField field;
  field.dimension = d;
  field.points = n;
  field.dx = g.dx();
  field.time = state.time;
  field.center = d == 3 ? mean_position(state.spec, state.time)
                        : Vec3{0.0, 0.0, state.time * derive_kinematics(state.spec).speed};

  // Shift the synthesis onto the box centred at `center`: with
  // k_n = k0 + (n - N/2) dk and x_j = c + (j - N/2) dx the kernel exp(i k_n x_j)
  // factors into a per-j phase (irrelevant for |Psi|^2), exp(i (n - N/2) dk c),
  // (-1)^n and the plain DFT kernel exp(2 pi i n j / N).
  std::array<std::vector<cplx>, 3> twiddle;
  for (std::size_t axis : g.axes()) {
    auto& tw = twiddle[axis];
    tw.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      tw[static_cast<std::size_t>(i)] = sign * std::polar(1.0, (i - n / 2) * g.dk() * field.center[axis]);
    }
  }

  std::vector<cplx> work(state.amplitude);
  if (d == 1) {
    const auto& tw = twiddle[kLineAxis];
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= tw[i];
  } else {
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l, ++idx)
          work[idx] *= twiddle[0][static_cast<std::size_t>(i)] *
                       twiddle[1][static_cast<std::size_t>(j)] *
                       twiddle[2][static_cast<std::size_t>(l)];
  }

  auto* data = reinterpret_cast<fftw_complex*>(work.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = d == 1 ? fftw_plan_dft_1d(n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE)
                  : fftw_plan_dft_3d(n, n, n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double scale = std::pow(g.dk() / std::sqrt(2.0 * std::numbers::pi), d);
  field.rho.resize(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    field.rho[i] = std::norm(work[i] * scale);
    field.peak = std::max(field.peak, field.rho[i]);
  }

  double face = 0.0;
  if (d == 1) {
    face = std::max(field.rho.front(), field.rho.back());
  } else {
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l, ++idx) {
          const bool on_face = i == 0 || j == 0 || l == 0 || i == n - 1 || j == n - 1 || l == n - 1;
          if (on_face) face = std::max(face, field.rho[idx]);
        }
  }
  field.wrapped = face > kWrapThreshold * field.peak;
  return field;
}

double DensityField::integral() const {
  double sum = 0.0;
  for (double r : rho) sum += r;
  return sum * std::pow(dx, dimension);
}

std::vector<double> DensityField::slice(std::size_t axis) const {
  if (dimension == 1) return rho;
  const auto un = static_cast<std::size_t>(points);
  const std::size_t mid = un / 2;
  std::vector<double> out(un);
  for (std::size_t i = 0; i < un; ++i) {
    std::array<std::size_t, 3> ix{mid, mid, mid};
    ix[axis] = i;
    out[i] = rho[(ix[0] * un + ix[1]) * un + ix[2]];
  }
  return out;
}

MomentSet grid_moments(const DensityField& density) {
  if (density.wrapped)
    throw WrapAroundError("density reaches the box faces at t = " + format_number(density.time));
  const auto un = static_cast<std::size_t>(density.points);

  // Marginal density along each carried axis.
  std::array<std::vector<double>, 3> marginal;
  std::vector<std::size_t> axes;
  if (density.dimension == 1) {
    axes = {kLineAxis};
    marginal[kLineAxis] = density.rho;
  } else {
    axes = {0, 1, 2};
    for (auto& mgl : marginal) mgl.assign(un, 0.0);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < un; ++i)
      for (std::size_t j = 0; j < un; ++j)
        for (std::size_t l = 0; l < un; ++l, ++idx) {
          const double r = density.rho[idx];
          marginal[0][i] += r;
          marginal[1][j] += r;
          marginal[2][l] += r;
        }
  }

  MomentSet out;
  out.time = density.time;
  out.method = Method::grid;
  out.dimension = density.dimension;
  if (density.dimension == 1) {
    out.mean_position = {kNaN, kNaN, 0.0};
    out.sigma_sq = {kNaN, kNaN, 0.0};
  }
  for (std::size_t axis : axes) {
    const auto& mgl = marginal[axis];
    double total = 0.0, first = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      total += mgl[i];
      first += mgl[i] * density.position(axis, static_cast<int>(i));
    }
    const double mean = first / total;
    double second = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      const double dxv = density.position(axis, static_cast<int>(i)) - mean;
      second += mgl[i] * dxv * dxv;
    }
    out.mean_position[axis] = mean;
    out.sigma_sq[axis] = second / total;
  }
  return out;
}

std::vector<Snapshot> snapshot_series(const PacketSpec& spec, const GridOptions& options,
                                      const std::vector<double>& times) {
  const MomentumGrid grid(spec, options);
  double t_max = 0.0;
  for (double t : times) t_max = std::max(t_max, std::abs(t));
  grid.check_box(spec, t_max);
  const auto initial = init_packet_on_grid(spec, grid);

  std::vector<Snapshot> out;
  out.reserve(times.size());
  for (double t : times) {
    const auto density = to_position_density(evolve(initial, t));
    Snapshot snap{t, density.integral(), density.peak, density.wrapped, {}};
    snap.moments.time = t;
    snap.moments.method = Method::grid;
    snap.moments.dimension = options.dimension;
    if (!density.wrapped) snap.moments = grid_moments(density);
    out.push_back(snap);
  }
  return out;
}

void write_density_csv(std::ostream& out, const DensityField& density) {
  out << "axis,x,rho\n";
  const std::vector<std::size_t> axes =
      density.dimension == 1 ? std::vector<std::size_t>{kLineAxis}
                             : std::vector<std::size_t>{0, 1, 2};
  for (std::size_t axis : axes) {
    const auto values = density.slice(axis);
    for (int i = 0; i < density.points; ++i)
      out << axis + 1 << ',' << format_number(density.position(axis, i)) << ','
          << format_number(values[static_cast<std::size_t>(i)]) << '\n';
  }
}

void write_density_slice(std::ostream& out, const DensityField& density, std::size_t axis) {
  const auto values = density.slice(axis);
  for (int i = 0; i < density.points; ++i)
    out << format_number(density.position(axis, i)) << ' '
        << format_number(values[static_cast<std::size_t>(i)]) << '\n';
}

}  // namespace erlab
