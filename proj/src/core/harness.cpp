#include "erlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <set>

#include "erlab/analytic.hpp"
#include "erlab/report_io.hpp"

namespace erlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::array<ReportAxis, 3> kAllAxes{ReportAxis::longitudinal, ReportAxis::transverse_1,
                                             ReportAxis::transverse_2};

// Dispersion curves for one (method, momentum) pair, indexed by lab axis.
struct Curves {
  std::array<std::vector<CurveSample>, 3> by_axis;
  std::vector<ReportAxis> axes;
};

PacketSpec spec_for(const SweepConfig& config, double p) {
  return PacketSpec{config.mass, config.width, {0.0, 0.0, p}};
}

Curves analytic_curves(const PacketSpec& spec, const std::vector<double>& times) {
  Curves c;
  c.axes.assign(kAllAxes.begin(), kAllAxes.end());
  for (double t : times) {
    const auto cf = closed_form_moments(spec, t);
    c.by_axis[lab_index(ReportAxis::longitudinal)].push_back({t, cf.sigma_sq_longitudinal});
    c.by_axis[lab_index(ReportAxis::transverse_1)].push_back({t, cf.sigma_sq_transverse_1});
    c.by_axis[lab_index(ReportAxis::transverse_2)].push_back({t, cf.sigma_sq_transverse_2});
  }
  return c;
}

Curves oracle_curves(const PacketSpec& spec, const std::vector<double>& times,
                     OracleOptions options, int dimension) {
  options.dimension = dimension;
  const MomentOracle oracle(spec, options);
  if (!oracle.velocity().converged)
    throw std::runtime_error("oracle quadrature not converged (relative change " +
                             format_number(oracle.velocity().max_relative_change) + ")");
  Curves c;
  if (dimension == 3)
    c.axes.assign(kAllAxes.begin(), kAllAxes.end());
  else
    c.axes = {ReportAxis::longitudinal};
  for (double t : times) {
    const auto em = oracle.exact_moments(t);
    for (ReportAxis a : c.axes) c.by_axis[lab_index(a)].push_back({t, em.sigma_sq[lab_index(a)]});
  }
  return c;
}

Curves grid_curves(const PacketSpec& spec, const std::vector<double>& times,
                   const GridOptions& options) {
  const auto snaps = snapshot_series(spec, options, times);
  Curves c;
  if (options.dimension == 3)
    c.axes.assign(kAllAxes.begin(), kAllAxes.end());
  else
    c.axes = {ReportAxis::longitudinal};
  for (const auto& s : snaps) {
    if (s.wrapped)
      throw WrapAroundError("grid density wrapped at t = " + format_number(s.time));
    for (ReportAxis a : c.axes)
      c.by_axis[lab_index(a)].push_back({s.time, s.moments.sigma_sq[lab_index(a)]});
  }
  return c;
}

Curves run_method(Method method, const SweepConfig& config, double p) {
  const auto spec = spec_for(config, p);
  switch (method) {
    case Method::analytic: return analytic_curves(spec, config.times);
    case Method::oracle: return oracle_curves(spec, config.times, config.oracle, 3);
    case Method::grid: return grid_curves(spec, config.times, config.grid);
  }
  throw std::logic_error("unhandled method");
}

struct Job {
  Method method;
  double p;
  bool rest;
  int oracle_dimension;  // 1 when this is the line oracle backing a 1D grid comparison
  std::future<Curves> result;
};

std::string describe(Method m, double p) {
  return std::string(to_string(m)) + " p=" + format_number(p);
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::degenerate: return "degenerate";
  }
  return "unknown";
}

std::string_view to_string(ReportAxis a) {
  switch (a) {
    case ReportAxis::longitudinal: return "longitudinal";
    case ReportAxis::transverse_1: return "transverse_1";
    case ReportAxis::transverse_2: return "transverse_2";
  }
  return "unknown";
}

std::size_t lab_index(ReportAxis a) {
  switch (a) {
    case ReportAxis::longitudinal: return 2;
    case ReportAxis::transverse_1: return 0;
    case ReportAxis::transverse_2: return 1;
  }
  return 2;
}

void validate(const SweepConfig& config) {
  validate(PacketSpec{config.mass, config.width, {}});
  if (config.momenta.empty()) throw InvalidParameter("momenta", "at least one momentum is required");
  for (double p : config.momenta)
    if (!std::isfinite(p) || p < 0.0)
      throw InvalidParameter("momenta", "momentum magnitudes must be finite and >= 0");
  if (config.times.empty()) throw InvalidParameter("times", "at least one time is required");
  std::set<double> nonzero;
  bool has_zero = false;
  for (double t : config.times) {
    if (!std::isfinite(t)) throw InvalidParameter("times", "times must be finite");
    if (t == 0.0)
      has_zero = true;
    else
      nonzero.insert(std::abs(t));
  }
  if (!has_zero) throw InvalidParameter("times", "time list must include 0");
  if (nonzero.size() < 3)
    throw InvalidParameter("times", "at least three distinct nonzero times are needed for the fit");
  if (config.methods.empty()) throw InvalidParameter("method", "at least one method is required");
  if (!(config.verdict_tolerance > 0.0) || !std::isfinite(config.verdict_tolerance))
    throw InvalidParameter("verdict_tol", "verdict tolerance must be finite and > 0");
  if (config.oracle.order < 2) throw InvalidParameter("quad_order", "quadrature order must be >= 2");
}

SpreadingFit fit_spreading(std::span<const CurveSample> curve) {
  const auto origin = std::find_if(curve.begin(), curve.end(),
                                   [](const CurveSample& s) { return s.t == 0.0; });
  if (origin == curve.end()) throw InvalidParameter("times", "curve has no t = 0 sample");
  std::set<double> distinct;
  for (const auto& s : curve)
    if (s.t != 0.0) distinct.insert(std::abs(s.t));
  if (distinct.size() < 3)
    throw InvalidParameter("times", "at least three distinct nonzero times are needed");

  const double offset = origin->sigma_sq;
  double num = 0.0, den = 0.0, growth = 0.0;
  for (const auto& s : curve) {
    if (s.t == 0.0) continue;
    const double t2 = s.t * s.t;
    const double y = s.sigma_sq - offset;
    num += y * t2;
    den += t2 * t2;
    growth = std::max(growth, std::abs(y));
  }
  const double c = num / den;
  double sq = 0.0;
  std::size_t n = 0;
  for (const auto& s : curve) {
    if (s.t == 0.0) continue;
    const double r = s.sigma_sq - offset - c * s.t * s.t;
    sq += r * r;
    ++n;
  }
  const double rms = std::sqrt(sq / static_cast<double>(n));
  return {offset, c, growth > 0.0 ? rms / growth : rms};
}

ExponentFit fit_retardation_exponent(std::span<const CurveSample> moving_curve,
                                     double rest_coefficient, double gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    throw DegenerateFrameError("retardation exponent is undefined for gamma = " +
                               format_number(gamma) + " (needs gamma > 1)");
  const auto fit = fit_spreading(moving_curve);
  if (!(fit.coefficient > 0.0) || !(rest_coefficient > 0.0))
    throw std::domain_error("spreading coefficients must be positive to fit an exponent");
  const double alpha = std::log(rest_coefficient / fit.coefficient) / (2.0 * std::log(gamma));
  return {alpha, fit.residual, fit.residual <= kQuadraticResidualLimit, fit.coefficient};
}

Verdict er_verdict(double alpha, double tolerance) {
  if (std::isnan(alpha)) return Verdict::degenerate;
  return std::abs(alpha - 1.0) <= tolerance ? Verdict::holds : Verdict::fails;
}

const AxisResult* RetardationReport::find(double p, ReportAxis axis, Method method) const {
  for (const auto& e : exponents)
    if (e.p == p && e.axis == axis && e.method == method) return &e;
  return nullptr;
}

RetardationReport compare_methods(const SweepConfig& config) {
  validate(config);
  RetardationReport report;
  report.config = config;

  std::vector<Method> methods;
  for (Method m : config.methods)
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
  const bool want_oracle = std::find(methods.begin(), methods.end(), Method::oracle) != methods.end();
  const bool want_grid = std::find(methods.begin(), methods.end(), Method::grid) != methods.end();
  const bool line_grid = want_grid && config.grid.dimension == 1;

  for (double p : config.momenta) {
    const auto spec = spec_for(config, p);
    report.points.push_back({p, derive_kinematics(spec).gamma, check_validity(spec)});
  }

  // Sweep points are independent; launch them all, then reduce in order.
  std::vector<Job> jobs;
  const auto launch = [&](Method m, double p, bool rest, int oracle_dim) {
    std::future<Curves> f = std::async(std::launch::async, [&config, m, p, oracle_dim] {
      if (oracle_dim == 1) return oracle_curves(spec_for(config, p), config.times, config.oracle, 1);
      return run_method(m, config, p);
    });
    jobs.push_back({m, p, rest, oracle_dim, std::move(f)});
  };
  for (Method m : methods) {
    launch(m, 0.0, true, 3);
    for (double p : config.momenta) launch(m, p, false, 3);
  }
  if (line_grid && want_oracle)
    for (double p : config.momenta) launch(Method::oracle, p, false, 1);

  std::map<std::pair<Method, double>, Curves> rest, moving;
  std::map<double, Curves> line_oracle;
  for (auto& job : jobs) {
    try {
      Curves c = job.result.get();
      if (job.oracle_dimension == 1)
        line_oracle.emplace(job.p, std::move(c));
      else if (job.rest)
        rest.emplace(std::pair{job.method, 0.0}, std::move(c));
      else
        moving.emplace(std::pair{job.method, job.p}, std::move(c));
    } catch (const std::exception& e) {
      report.failures.push_back(describe(job.method, job.p) + (job.rest ? " (rest)" : "") +
                                (job.oracle_dimension == 1 ? " (line oracle)" : "") + ": " +
                                e.what());
    }
  }

  const auto append_rows = [&](std::vector<ReportRow>& rows, const Curves& c, Method m, double p,
                               double gamma, ReportAxis axis, double alpha, double residual,
                               Verdict verdict) {
    for (const auto& s : c.by_axis[lab_index(axis)])
      rows.push_back({config.mass, config.width, p, gamma, axis, m, s.t, s.sigma_sq, alpha, residual,
                      verdict});
  };

  for (Method m : methods) {
    const auto rest_it = rest.find({m, 0.0});
    if (rest_it != rest.end())
      for (ReportAxis axis : rest_it->second.axes)
        append_rows(report.rest_rows, rest_it->second, m, 0.0, 1.0, axis, kNaN, kNaN,
                    Verdict::degenerate);
  }

  for (std::size_t i = 0; i < config.momenta.size(); ++i) {
    const double p = config.momenta[i];
    const double gamma = report.points[i].gamma;
    for (Method m : methods) {
      const auto it = moving.find({m, p});
      if (it == moving.end()) continue;
      const auto rest_it = rest.find({m, 0.0});
      for (ReportAxis axis : it->second.axes) {
        const auto& curve = it->second.by_axis[lab_index(axis)];
        double alpha = kNaN, residual = kNaN;
        Verdict verdict = Verdict::degenerate;
        if (gamma > 1.0 && rest_it != rest.end()) {
          try {
            const auto rest_fit = fit_spreading(rest_it->second.by_axis[lab_index(axis)]);
            const auto fit = fit_retardation_exponent(curve, rest_fit.coefficient, gamma);
            alpha = fit.alpha;
            residual = fit.residual;
            verdict = er_verdict(alpha, config.verdict_tolerance);
            report.exponents.push_back({p, gamma, axis, m, alpha, residual, fit.quadratic, verdict});
            if (!fit.quadratic)
              report.failures.push_back(describe(m, p) + " " + std::string(to_string(axis)) +
                                        ": curve is not quadratic in t (residual " +
                                        format_number(residual) + ")");
          } catch (const std::exception& e) {
            report.failures.push_back(describe(m, p) + " " + std::string(to_string(axis)) + ": " +
                                      e.what());
          }
        }
        append_rows(report.rows, it->second, m, p, gamma, axis, alpha, residual, verdict);
      }
    }
  }

  // Pairwise method deltas. The oracle is the reference whenever it is part of
  // the pair.
  const auto curves_for = [&](Method m, double p, int dimension) -> const Curves* {
    if (m == Method::oracle && dimension == 1) {
      const auto it = line_oracle.find(p);
      return it == line_oracle.end() ? nullptr : &it->second;
    }
    const auto it = moving.find({m, p});
    return it == moving.end() ? nullptr : &it->second;
  };
  for (std::size_t a = 0; a < methods.size(); ++a)
    for (std::size_t b = 0; b < methods.size(); ++b) {
      if (!(static_cast<int>(methods[a]) < static_cast<int>(methods[b]))) continue;
      const bool b_is_ref = methods[b] == Method::oracle;
      const Method ref = b_is_ref ? methods[b] : methods[a];
      const Method cand = b_is_ref ? methods[a] : methods[b];
      const bool involves_grid = ref == Method::grid || cand == Method::grid;
      const int dimension = involves_grid ? config.grid.dimension : 3;
      double worst = 0.0;
      bool any = false;
      for (double p : config.momenta) {
        const Curves* cr = curves_for(ref, p, dimension);
        const Curves* cc = curves_for(cand, p, dimension);
        if (!cr || !cc) continue;
        for (ReportAxis axis : cc->axes) {
          if (std::find(cr->axes.begin(), cr->axes.end(), axis) == cr->axes.end()) continue;
          const auto& xr = cr->by_axis[lab_index(axis)];
          const auto& xc = cc->by_axis[lab_index(axis)];
          for (std::size_t k = 0; k < std::min(xr.size(), xc.size()); ++k) {
            worst = std::max(worst, std::abs(xc[k].sigma_sq - xr[k].sigma_sq) / std::abs(xr[k].sigma_sq));
            any = true;
          }
        }
      }
      if (any) report.deltas.push_back({ref, cand, dimension, worst});
    }
  return report;
}

}  // namespace erlab
