#include "erlab/erlab.h"

#include <cmath>
#include <exception>
#include <new>
#include <sstream>
#include <string>

#include "erlab/analytic.hpp"
#include "erlab/harness.hpp"
#include "erlab/model.hpp"
#include "erlab/oracle.hpp"
#include "erlab/propagator.hpp"
#include "erlab/report_io.hpp"

struct erlab_oracle {
  erlab::MomentOracle impl;
};

struct erlab_grid_state {
  erlab::EvolvedGridState impl;
};

struct erlab_density {
  erlab::DensityField impl;
};

struct erlab_sweep {
  erlab::SweepConfig config;
  std::string json;
};

struct erlab_report {
  erlab::RetardationReport impl;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_field;

erlab_status fail(erlab_status code, std::string message, std::string field = {}) {
  last_error = std::move(message);
  last_field = std::move(field);
  return code;
}

template <class F>
erlab_status guarded(F&& body) {
  last_error.clear();
  last_field.clear();
  try {
    body();
    return ERLAB_OK;
  } catch (const erlab::InvalidParameter& e) {
    return fail(ERLAB_ERROR_INVALID_ARGUMENT, e.what(), e.field());
  } catch (const erlab::DegenerateFrameError& e) {
    return fail(ERLAB_ERROR_DEGENERATE_FRAME, e.what());
  } catch (const erlab::WrapAroundError& e) {
    return fail(ERLAB_ERROR_WRAP_AROUND, e.what());
  } catch (const erlab::GridError& e) {
    return fail(ERLAB_ERROR_GRID, e.what());
  } catch (const erlab::IoError& e) {
    return fail(ERLAB_ERROR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ERLAB_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ERLAB_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(ERLAB_ERROR_INTERNAL, "unknown error");
  }
}

#define ERLAB_REQUIRE(ptr)                                                   \
  do {                                                                       \
    if ((ptr) == nullptr) return fail(ERLAB_ERROR_NULL_POINTER, #ptr " is NULL"); \
  } while (0)

erlab::PacketSpec to_spec(const erlab_packet_spec& s) {
  return {s.mass, s.width, {s.momentum[0], s.momentum[1], s.momentum[2]}};
}

erlab::GridOptions to_grid(const erlab_grid_options& o) {
  return {o.dimension, o.points_per_axis, o.halfwidth_sigma};
}

void copy3(const erlab::Vec3& v, double* out) {
  for (std::size_t i = 0; i < 3; ++i) out[i] = v[i];
}

erlab_moments to_c(const erlab::MomentSet& m) {
  erlab_moments out{};
  out.time = m.time;
  copy3(m.mean_position, out.mean_position);
  copy3(m.sigma_sq, out.sigma_sq);
  out.method = static_cast<int>(m.method);
  out.dimension = m.dimension;
  return out;
}

}  // namespace

extern "C" {

const char* erlab_last_error(void) { return last_error.c_str(); }
const char* erlab_last_error_field(void) { return last_field.c_str(); }
const char* erlab_version(void) { return "0.1.0"; }

erlab_status erlab_derive_kinematics(const erlab_packet_spec* spec, erlab_kinematics* out) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(out);
  return guarded([&] {
    const auto k = erlab::derive_kinematics(to_spec(*spec));
    *out = {k.energy, k.speed, k.gamma, k.compton_wavelength, k.sigma_m_product};
  });
}

erlab_status erlab_check_validity(const erlab_packet_spec* spec, erlab_validity* level,
                                  double* sigma_m) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(level);
  return guarded([&] {
    const auto v = erlab::check_validity(to_spec(*spec));
    *level = static_cast<erlab_validity>(v.level);
    if (sigma_m) *sigma_m = v.sigma_m;
  });
}

erlab_status erlab_rest_dispersion(const erlab_packet_spec* spec, double t, double* out) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(out);
  return guarded([&] { *out = erlab::rest_dispersion(to_spec(*spec), t); });
}

erlab_status erlab_longitudinal_dispersion(const erlab_packet_spec* spec, double t, double* out) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(out);
  return guarded([&] { *out = erlab::longitudinal_dispersion(to_spec(*spec), t); });
}

erlab_status erlab_transverse_dispersion(const erlab_packet_spec* spec, double t, double* out) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(out);
  return guarded([&] { *out = erlab::transverse_dispersion(to_spec(*spec), t); });
}

erlab_status erlab_mean_position(const erlab_packet_spec* spec, double t, double out[3]) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(out);
  return guarded([&] { copy3(erlab::mean_position(to_spec(*spec), t), out); });
}

erlab_status erlab_expansion_factors_at(const erlab_packet_spec* spec, double t,
                                        erlab_expansion_factors* out) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(out);
  return guarded([&] {
    const auto f = erlab::expansion_factors(to_spec(*spec), t);
    const std::complex<double> a[3] = {f.a1_sq, f.a2_sq, f.a3_sq};
    for (int i = 0; i < 3; ++i) {
      out->a_sq_re[i] = a[i].real();
      out->a_sq_im[i] = a[i].imag();
    }
    copy3(f.axis_velocity, out->axis_velocity);
  });
}

erlab_status erlab_retarded_time(double t, double gamma, erlab_axis_kind axis, double* out) {
  ERLAB_REQUIRE(out);
  if (axis != ERLAB_LONGITUDINAL && axis != ERLAB_TRANSVERSE)
    return fail(ERLAB_ERROR_INVALID_ARGUMENT, "axis must be longitudinal or transverse", "axis");
  return guarded([&] {
    *out = erlab::retarded_time(t, gamma,
                                axis == ERLAB_LONGITUDINAL ? erlab::AxisKind::longitudinal
                                                           : erlab::AxisKind::transverse);
  });
}

erlab_status erlab_dispersion_relation_residual(const erlab_packet_spec* spec,
                                                const double kprime[3], double* out) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(kprime);
  ERLAB_REQUIRE(out);
  return guarded([&] {
    *out = erlab::dispersion_relation_residual(to_spec(*spec), {kprime[0], kprime[1], kprime[2]});
  });
}

erlab_status erlab_oracle_create(const erlab_packet_spec* spec, int order, int dimension,
                                 erlab_oracle** out) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    erlab::OracleOptions opts;
    opts.order = order;
    opts.dimension = dimension;
    *out = new erlab_oracle{erlab::MomentOracle(to_spec(*spec), opts)};
  });
}

void erlab_oracle_destroy(erlab_oracle* oracle) { delete oracle; }

erlab_status erlab_oracle_info_get(const erlab_oracle* oracle, erlab_oracle_info* out) {
  ERLAB_REQUIRE(oracle);
  ERLAB_REQUIRE(out);
  return guarded([&] {
    const auto& o = oracle->impl;
    out->norm = o.norm();
    copy3(o.mean_momentum(), out->mean_momentum);
    copy3(o.velocity().mean, out->mean_velocity);
    copy3(o.velocity().variance, out->velocity_variance);
    out->converged = o.velocity().converged ? 1 : 0;
    out->max_relative_change = o.velocity().max_relative_change;
  });
}

erlab_status erlab_oracle_moments(const erlab_oracle* oracle, double t, erlab_moments* out) {
  ERLAB_REQUIRE(oracle);
  ERLAB_REQUIRE(out);
  return guarded([&] {
    const auto em = oracle->impl.exact_moments(t);
    erlab::MomentSet m;
    m.time = em.time;
    m.mean_position = em.mean_position;
    m.sigma_sq = em.sigma_sq;
    m.method = erlab::Method::oracle;
    m.dimension = em.dimension;
    *out = to_c(m);
  });
}

erlab_status erlab_convergence_order_check(const erlab_packet_spec* spec, double t, int order,
                                           erlab_convergence* out) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(out);
  return guarded([&] {
    erlab::OracleOptions opts;
    opts.order = order;
    const auto s = erlab::convergence_order_check(to_spec(*spec), t, opts);
    for (std::size_t i = 0; i < 3; ++i) {
      out->sigma_m[i] = s.sigma_m[i];
      out->relative_error[i] = s.relative_error[i];
    }
    out->exponent = s.exponent;
    out->measurable = s.measurable ? 1 : 0;
  });
}

erlab_grid_options erlab_grid_options_default(void) {
  const erlab::GridOptions d;
  return {d.dimension, d.points_per_axis, d.halfwidth_sigma};
}

erlab_status erlab_grid_create(const erlab_packet_spec* spec, const erlab_grid_options* options,
                               double t_max, erlab_grid_state** out) {
  ERLAB_REQUIRE(spec);
  ERLAB_REQUIRE(options);
  ERLAB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const auto s = to_spec(*spec);
    const erlab::MomentumGrid grid(s, to_grid(*options));
    grid.check_box(s, t_max);
    *out = new erlab_grid_state{erlab::init_packet_on_grid(s, grid)};
  });
}

void erlab_grid_destroy(erlab_grid_state* state) { delete state; }

erlab_status erlab_grid_evolve(const erlab_grid_state* state, double dt, erlab_grid_state** out) {
  ERLAB_REQUIRE(state);
  ERLAB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new erlab_grid_state{erlab::evolve(state->impl, dt)}; });
}

erlab_status erlab_grid_time(const erlab_grid_state* state, double* out) {
  ERLAB_REQUIRE(state);
  ERLAB_REQUIRE(out);
  *out = state->impl.time;
  return ERLAB_OK;
}

erlab_status erlab_grid_norm(const erlab_grid_state* state, double* out) {
  ERLAB_REQUIRE(state);
  ERLAB_REQUIRE(out);
  return guarded([&] { *out = state->impl.discrete_norm(); });
}

erlab_status erlab_grid_density(const erlab_grid_state* state, erlab_density** out) {
  ERLAB_REQUIRE(state);
  ERLAB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new erlab_density{erlab::to_position_density(state->impl)}; });
}

void erlab_density_destroy(erlab_density* density) { delete density; }

erlab_status erlab_density_integral(const erlab_density* density, double* out) {
  ERLAB_REQUIRE(density);
  ERLAB_REQUIRE(out);
  *out = density->impl.integral();
  return ERLAB_OK;
}

erlab_status erlab_density_peak(const erlab_density* density, double* out) {
  ERLAB_REQUIRE(density);
  ERLAB_REQUIRE(out);
  *out = density->impl.peak;
  return ERLAB_OK;
}

erlab_status erlab_density_wrapped(const erlab_density* density, int* out) {
  ERLAB_REQUIRE(density);
  ERLAB_REQUIRE(out);
  *out = density->impl.wrapped ? 1 : 0;
  return ERLAB_OK;
}

erlab_status erlab_density_moments(const erlab_density* density, erlab_moments* out) {
  ERLAB_REQUIRE(density);
  ERLAB_REQUIRE(out);
  return guarded([&] { *out = to_c(erlab::grid_moments(density->impl)); });
}

erlab_status erlab_density_write_csv(const erlab_density* density, const char* path) {
  ERLAB_REQUIRE(density);
  ERLAB_REQUIRE(path);
  return guarded([&] {
    std::ostringstream s;
    erlab::write_density_csv(s, density->impl);
    erlab::write_file_atomic(path, s.str());
  });
}

erlab_status erlab_fit_retardation_exponent(const double* times, const double* sigma_sq,
                                            size_t count, double rest_coefficient, double gamma,
                                            double* alpha, double* residual) {
  ERLAB_REQUIRE(times);
  ERLAB_REQUIRE(sigma_sq);
  ERLAB_REQUIRE(alpha);
  return guarded([&] {
    std::vector<erlab::CurveSample> curve;
    for (size_t i = 0; i < count; ++i) curve.push_back({times[i], sigma_sq[i]});
    const auto fit = erlab::fit_retardation_exponent(curve, rest_coefficient, gamma);
    *alpha = fit.alpha;
    if (residual) *residual = fit.residual;
  });
}

erlab_status erlab_sweep_create(erlab_sweep** out) {
  ERLAB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new erlab_sweep{}; });
}

void erlab_sweep_destroy(erlab_sweep* sweep) { delete sweep; }

erlab_status erlab_sweep_set_packet(erlab_sweep* sweep, double mass, double width) {
  ERLAB_REQUIRE(sweep);
  return guarded([&] {
    erlab::validate(erlab::PacketSpec{mass, width, {}});
    sweep->config.mass = mass;
    sweep->config.width = width;
  });
}

erlab_status erlab_sweep_set_momenta(erlab_sweep* sweep, const double* momenta, size_t count) {
  ERLAB_REQUIRE(sweep);
  if (count > 0) ERLAB_REQUIRE(momenta);
  return guarded([&] { sweep->config.momenta.assign(momenta, momenta + count); });
}

erlab_status erlab_sweep_set_times(erlab_sweep* sweep, const double* times, size_t count) {
  ERLAB_REQUIRE(sweep);
  if (count > 0) ERLAB_REQUIRE(times);
  return guarded([&] { sweep->config.times.assign(times, times + count); });
}

erlab_status erlab_sweep_set_methods(erlab_sweep* sweep, const int* methods, size_t count) {
  ERLAB_REQUIRE(sweep);
  if (count > 0) ERLAB_REQUIRE(methods);
  std::vector<erlab::Method> out;
  for (size_t i = 0; i < count; ++i) {
    if (methods[i] < ERLAB_METHOD_ANALYTIC || methods[i] > ERLAB_METHOD_GRID)
      return fail(ERLAB_ERROR_INVALID_ARGUMENT, "unknown method code", "method");
    out.push_back(static_cast<erlab::Method>(methods[i]));
  }
  sweep->config.methods = std::move(out);
  return ERLAB_OK;
}

erlab_status erlab_sweep_set_quad_order(erlab_sweep* sweep, int order) {
  ERLAB_REQUIRE(sweep);
  if (order < 2) return fail(ERLAB_ERROR_INVALID_ARGUMENT, "quadrature order must be >= 2", "quad_order");
  sweep->config.oracle.order = order;
  return ERLAB_OK;
}

erlab_status erlab_sweep_set_grid(erlab_sweep* sweep, const erlab_grid_options* options) {
  ERLAB_REQUIRE(sweep);
  ERLAB_REQUIRE(options);
  sweep->config.grid = to_grid(*options);
  return ERLAB_OK;
}

erlab_status erlab_sweep_set_verdict_tolerance(erlab_sweep* sweep, double tolerance) {
  ERLAB_REQUIRE(sweep);
  if (!(tolerance > 0.0) || !std::isfinite(tolerance))
    return fail(ERLAB_ERROR_INVALID_ARGUMENT, "verdict tolerance must be finite and > 0",
                "verdict_tol");
  sweep->config.verdict_tolerance = tolerance;
  return ERLAB_OK;
}

erlab_status erlab_sweep_config_json(erlab_sweep* sweep, const char** out) {
  ERLAB_REQUIRE(sweep);
  ERLAB_REQUIRE(out);
  return guarded([&] {
    sweep->json = erlab::config_to_json(sweep->config).dump(2);
    *out = sweep->json.c_str();
  });
}

erlab_status erlab_sweep_run(const erlab_sweep* sweep, erlab_report** out) {
  ERLAB_REQUIRE(sweep);
  ERLAB_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new erlab_report{erlab::compare_methods(sweep->config)}; });
}

void erlab_report_destroy(erlab_report* report) { delete report; }

erlab_status erlab_report_point_count(const erlab_report* report, size_t* out) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(out);
  *out = report->impl.points.size();
  return ERLAB_OK;
}

erlab_status erlab_report_point(const erlab_report* report, size_t index, erlab_point* out) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(out);
  if (index >= report->impl.points.size()) return fail(ERLAB_ERROR_OUT_OF_RANGE, "point index out of range");
  const auto& p = report->impl.points[index];
  *out = {p.p, p.gamma, p.validity.sigma_m, static_cast<int>(p.validity.level)};
  return ERLAB_OK;
}

erlab_status erlab_report_exponent_count(const erlab_report* report, size_t* out) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(out);
  *out = report->impl.exponents.size();
  return ERLAB_OK;
}

erlab_status erlab_report_exponent(const erlab_report* report, size_t index, erlab_exponent* out) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(out);
  if (index >= report->impl.exponents.size())
    return fail(ERLAB_ERROR_OUT_OF_RANGE, "exponent index out of range");
  const auto& e = report->impl.exponents[index];
  *out = {e.p,       e.gamma,     static_cast<int>(e.axis), static_cast<int>(e.method),
          e.alpha,   e.residual,  e.quadratic ? 1 : 0,     static_cast<int>(e.verdict)};
  return ERLAB_OK;
}

erlab_status erlab_report_delta_count(const erlab_report* report, size_t* out) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(out);
  *out = report->impl.deltas.size();
  return ERLAB_OK;
}

erlab_status erlab_report_delta(const erlab_report* report, size_t index, erlab_method_delta* out) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(out);
  if (index >= report->impl.deltas.size()) return fail(ERLAB_ERROR_OUT_OF_RANGE, "delta index out of range");
  const auto& d = report->impl.deltas[index];
  *out = {static_cast<int>(d.reference), static_cast<int>(d.candidate), d.dimension,
          d.max_relative_delta};
  return ERLAB_OK;
}

erlab_status erlab_report_row_count(const erlab_report* report, size_t* out) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(out);
  *out = report->impl.rows.size();
  return ERLAB_OK;
}

erlab_status erlab_report_failure_count(const erlab_report* report, size_t* out) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(out);
  *out = report->impl.failures.size();
  return ERLAB_OK;
}

erlab_status erlab_report_failure(const erlab_report* report, size_t index, const char** out) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(out);
  if (index >= report->impl.failures.size())
    return fail(ERLAB_ERROR_OUT_OF_RANGE, "failure index out of range");
  *out = report->impl.failures[index].c_str();
  return ERLAB_OK;
}

erlab_status erlab_report_write_csv(const erlab_report* report, const char* path) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(path);
  return guarded([&] {
    std::ostringstream s;
    erlab::write_report_csv(s, report->impl);
    erlab::write_file_atomic(path, s.str());
  });
}

erlab_status erlab_report_write_json(const erlab_report* report, const char* path) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(path);
  return guarded([&] {
    erlab::write_file_atomic(path, erlab::report_to_json(report->impl).dump(2) + "\n");
  });
}

erlab_status erlab_report_write_plotdata(const erlab_report* report, const char* dir,
                                         const char* tag, size_t* written) {
  ERLAB_REQUIRE(report);
  ERLAB_REQUIRE(dir);
  ERLAB_REQUIRE(tag);
  return guarded([&] {
    const auto files = erlab::emit_plotdata(report->impl, dir, tag);
    if (written) *written = files.size();
  });
}

}  // extern "C"
