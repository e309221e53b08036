#include "cli_run.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "erlab/erlab.h"

namespace erlab_cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Errors that end the run before every point was attempted.
struct RunAbort {
  int exit_code;
  std::string message;
};

int exit_code_for(erlab_status s) {
  switch (s) {
    case ERLAB_ERROR_IO: return kExitIo;
    case ERLAB_ERROR_INVALID_ARGUMENT:
    case ERLAB_ERROR_GRID:
    case ERLAB_ERROR_DEGENERATE_FRAME: return kExitInvalid;
    default: return kExitPointFailures;
  }
}

void check(erlab_status s, const std::string& context) {
  if (s == ERLAB_OK) return;
  std::string msg = context + ": " + erlab_last_error();
  const std::string field = erlab_last_error_field();
  if (!field.empty()) msg += " [" + field + "]";
  throw RunAbort{exit_code_for(s), msg};
}

std::string describe(erlab_status s) {
  std::string msg = erlab_last_error();
  return msg.empty() ? "status " + std::to_string(static_cast<int>(s)) : msg;
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using OraclePtr = std::unique_ptr<erlab_oracle, Deleter<erlab_oracle, erlab_oracle_destroy>>;
using GridPtr = std::unique_ptr<erlab_grid_state, Deleter<erlab_grid_state, erlab_grid_destroy>>;
using DensityPtr = std::unique_ptr<erlab_density, Deleter<erlab_density, erlab_density_destroy>>;
using SweepPtr = std::unique_ptr<erlab_sweep, Deleter<erlab_sweep, erlab_sweep_destroy>>;
using ReportPtr = std::unique_ptr<erlab_report, Deleter<erlab_report, erlab_report_destroy>>;

std::string num(double x) { return std::isnan(x) ? "" : format_number(x); }

nlohmann::json json_num(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }

const char* axis_name(int axis) {
  switch (axis) {
    case ERLAB_AXIS_LONGITUDINAL: return "longitudinal";
    case ERLAB_AXIS_TRANSVERSE_1: return "transverse_1";
    case ERLAB_AXIS_TRANSVERSE_2: return "transverse_2";
  }
  return "?";
}

const char* method_name(int method) {
  switch (method) {
    case ERLAB_METHOD_ANALYTIC: return "analytic";
    case ERLAB_METHOD_ORACLE: return "oracle";
    case ERLAB_METHOD_GRID: return "grid";
  }
  return "?";
}

int method_code(const std::string& name) {
  if (name == "oracle") return ERLAB_METHOD_ORACLE;
  if (name == "grid") return ERLAB_METHOD_GRID;
  return ERLAB_METHOD_ANALYTIC;
}

const char* validity_name(int v) {
  switch (v) {
    case ERLAB_VALID: return "valid";
    case ERLAB_MARGINAL: return "marginal";
    case ERLAB_INVALID: return "invalid";
  }
  return "?";
}

const char* verdict_name(int v) {
  switch (v) {
    case ERLAB_VERDICT_HOLDS: return "holds";
    case ERLAB_VERDICT_FAILS: return "fails";
    case ERLAB_VERDICT_DEGENERATE: return "degenerate";
  }
  return "?";
}

std::vector<std::string> unique_methods(const RunConfig& c) {
  std::vector<std::string> out;
  for (const auto& m : c.methods)
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  return out;
}

// Packet moving along +z with the configured momentum magnitude; the model is
// isotropic so the frame quantities do not depend on the direction of p.
erlab_packet_spec line_spec(const RunConfig& c) { return {c.m, c.sigma, {0.0, 0.0, c.p_magnitude()}}; }

erlab_grid_options grid_options(const RunConfig& c) {
  erlab_grid_options o = erlab_grid_options_default();
  o.dimension = c.dim;
  o.points_per_axis = c.grid_n;
  o.halfwidth_sigma = c.grid_halfwidth;
  return o;
}

double max_abs_time(const std::vector<double>& times) {
  double t = 0.0;
  for (double x : times) t = std::max(t, std::abs(x));
  return t;
}

// Simple fixed-width table for the summary.
class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void print(std::ostream& os) const {
    std::vector<std::size_t> width(rows_[0].size(), 0);
    for (const auto& r : rows_)
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) os << "  " << std::left << std::setw(int(width[i])) << r[i];
      os << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string brief(double x) {
  if (std::isnan(x)) return "-";
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

void print_packet(std::ostream& os, const erlab_packet_spec& spec, const erlab_kinematics& kin) {
  erlab_validity level;
  double sm = 0.0;
  check(erlab_check_validity(&spec, &level, &sm), "validity");
  Table t({"m", "sigma", "|p|", "gamma", "sigma*m", "validity"});
  t.add({brief(spec.mass), brief(spec.width), brief(std::hypot(spec.momentum[0], spec.momentum[1], spec.momentum[2])),
         brief(kin.gamma), brief(sm), validity_name(level)});
  t.print(os);
}

struct Context {
  const RunConfig& config;
  std::ostream& out;
  std::ostream& err;
  RunSummary summary;

  void fail(const std::string& what) {
    ++summary.failed;
    summary.failures.push_back(what);
  }
  void wrote(const std::string& path) { summary.outputs.push_back(path); }
};

// ---- dispersion ----------------------------------------------------------

struct DispersionRow {
  std::string axis;
  std::string method;
  double t;
  double mean;
  double sigma_sq;
};

void run_dispersion(Context& ctx) {
  const auto& c = ctx.config;
  const auto spec = line_spec(c);
  erlab_kinematics kin;
  check(erlab_derive_kinematics(&spec, &kin), "kinematics");

  std::vector<DispersionRow> rows;
  const auto add3 = [&](const std::string& method, double t, double mean, const double s[3]) {
    rows.push_back({"longitudinal", method, t, mean, s[2]});
    if (!std::isnan(s[0])) rows.push_back({"transverse_1", method, t, mean, s[0]});
    if (!std::isnan(s[1])) rows.push_back({"transverse_2", method, t, mean, s[1]});
    ++ctx.summary.computed;
  };

  for (const auto& method : unique_methods(c)) {
    if (method == "analytic") {
      for (double t : c.times) {
        double s[3], x[3];
        check(erlab_longitudinal_dispersion(&spec, t, &s[2]), "longitudinal dispersion");
        check(erlab_transverse_dispersion(&spec, t, &s[0]), "transverse dispersion");
        s[1] = s[0];
        check(erlab_mean_position(&spec, t, x), "mean position");
        add3(method, t, x[2], s);
      }
    } else if (method == "oracle") {
      erlab_oracle* raw = nullptr;
      check(erlab_oracle_create(&spec, c.quad_order, 3, &raw), "oracle");
      OraclePtr oracle(raw);
      erlab_oracle_info info;
      check(erlab_oracle_info_get(oracle.get(), &info), "oracle info");
      if (!info.converged)
        ctx.fail("oracle: quadrature did not converge (relative change " + brief(info.max_relative_change) + ")");
      for (double t : c.times) {
        erlab_moments mom;
        check(erlab_oracle_moments(oracle.get(), t, &mom), "oracle moments");
        add3(method, t, mom.mean_position[2], mom.sigma_sq);
      }
    } else {
      const auto opts = grid_options(c);
      erlab_grid_state* raw = nullptr;
      if (auto s = erlab_grid_create(&spec, &opts, max_abs_time(c.times), &raw); s != ERLAB_OK) {
        ctx.fail("grid: " + describe(s));
        continue;
      }
      GridPtr grid(raw);
      for (double t : c.times) {
        erlab_grid_state* evolved = nullptr;
        erlab_density* dens = nullptr;
        erlab_moments mom;
        erlab_status s = erlab_grid_evolve(grid.get(), t, &evolved);
        GridPtr hold(evolved);
        if (s == ERLAB_OK) s = erlab_grid_density(evolved, &dens);
        DensityPtr dhold(dens);
        if (s == ERLAB_OK) s = erlab_density_moments(dens, &mom);
        if (s != ERLAB_OK) {
          ctx.fail("grid t=" + format_number(t) + ": " + describe(s));
          continue;
        }
        add3(method, t, mom.mean_position[2], mom.sigma_sq);
      }
    }
  }

  std::ostringstream data;
  const double pm = c.p_magnitude();
  if (c.format == "csv") {
    data << "m,sigma,p,gamma,axis,method,t,mean,sigma_sq\n";
    for (const auto& r : rows)
      data << num(c.m) << ',' << num(c.sigma) << ',' << num(pm) << ',' << num(kin.gamma) << ',' << r.axis << ','
           << r.method << ',' << num(r.t) << ',' << num(r.mean) << ',' << num(r.sigma_sq) << '\n';
  } else {
    nlohmann::ordered_json j;
    j["m"] = c.m;
    j["sigma"] = c.sigma;
    j["p"] = pm;
    j["gamma"] = kin.gamma;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      j["rows"].push_back(nlohmann::ordered_json{{"axis", r.axis}, {"method", r.method}, {"t", r.t},
                                                 {"mean", json_num(r.mean)}, {"sigma_sq", json_num(r.sigma_sq)}});
    data << j.dump(2) << '\n';
  }
  write_atomic(c.output_path(), data.str());
  ctx.wrote(c.output_path());

  if (!c.plot_dir.empty()) {
    std::filesystem::create_directories(c.plot_dir);
    for (const auto& method : unique_methods(c))
      for (const char* axis : {"longitudinal", "transverse_1", "transverse_2"}) {
        std::ostringstream plot;
        plot << "# t sigma_sq  p " << num(pm) << " gamma " << num(kin.gamma) << '\n';
        bool any = false;
        for (const auto& r : rows)
          if (r.method == method && r.axis == axis) {
            plot << num(r.t) << ' ' << num(r.sigma_sq) << '\n';
            any = true;
          }
        if (!any) continue;
        const auto path = (std::filesystem::path(c.plot_dir) / ("dispersion_" + std::string(axis) + "_" + method + ".dat")).string();
        write_atomic(path, plot.str());
        ctx.wrote(path);
      }
  }

  print_packet(ctx.out, spec, kin);
  Table t({"method", "t", "sigma_sq long", "sigma_sq trans"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].axis != "longitudinal") continue;
    double trans = kNaN;
    if (i + 1 < rows.size() && rows[i + 1].axis == "transverse_1") trans = rows[i + 1].sigma_sq;
    t.add({rows[i].method, brief(rows[i].t), brief(rows[i].sigma_sq), brief(trans)});
  }
  t.print(ctx.out);
}

// ---- evolve --------------------------------------------------------------

void run_evolve(Context& ctx) {
  const auto& c = ctx.config;
  const auto spec = line_spec(c);
  erlab_kinematics kin;
  check(erlab_derive_kinematics(&spec, &kin), "kinematics");
  const auto opts = grid_options(c);
  erlab_grid_state* raw = nullptr;
  check(erlab_grid_create(&spec, &opts, max_abs_time(c.times), &raw), "grid");
  GridPtr grid(raw);
  if (!c.plot_dir.empty()) std::filesystem::create_directories(c.plot_dir);

  struct Row {
    double t, norm, integral, peak;
    int wrapped;
    double mean, s_long, s_t1, s_t2, analytic_long;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    const double t = c.times[i];
    Row r{t, kNaN, kNaN, kNaN, 0, kNaN, kNaN, kNaN, kNaN, kNaN};
    check(erlab_longitudinal_dispersion(&spec, t, &r.analytic_long), "longitudinal dispersion");
    erlab_grid_state* evolved = nullptr;
    check(erlab_grid_evolve(grid.get(), t, &evolved), "evolve");
    GridPtr state(evolved);
    erlab_density* dens = nullptr;
    check(erlab_grid_norm(state.get(), &r.norm), "norm");
    check(erlab_grid_density(state.get(), &dens), "density");
    DensityPtr density(dens);
    check(erlab_density_integral(dens, &r.integral), "density integral");
    check(erlab_density_peak(dens, &r.peak), "density peak");
    check(erlab_density_wrapped(dens, &r.wrapped), "density wrap flag");
    erlab_moments mom;
    if (auto s = erlab_density_moments(dens, &mom); s == ERLAB_OK) {
      r.mean = mom.mean_position[2];
      r.s_long = mom.sigma_sq[2];
      r.s_t1 = mom.sigma_sq[0];
      r.s_t2 = mom.sigma_sq[1];
      ++ctx.summary.computed;
    } else {
      ctx.fail("evolve t=" + format_number(t) + ": " + describe(s));
    }
    if (!c.plot_dir.empty()) {
      const auto path = (std::filesystem::path(c.plot_dir) / ("evolve_density_" + std::to_string(i) + ".csv")).string();
      check(erlab_density_write_csv(dens, path.c_str()), "density export");
      ctx.wrote(path);
    }
    rows.push_back(r);
  }

  std::ostringstream data;
  if (c.format == "csv") {
    data << "t,norm,integral,peak,wrapped,mean,sigma_sq_longitudinal,sigma_sq_transverse_1,sigma_sq_transverse_2,"
            "analytic_longitudinal\n";
    for (const auto& r : rows)
      data << num(r.t) << ',' << num(r.norm) << ',' << num(r.integral) << ',' << num(r.peak) << ',' << r.wrapped << ','
           << num(r.mean) << ',' << num(r.s_long) << ',' << num(r.s_t1) << ',' << num(r.s_t2) << ','
           << num(r.analytic_long) << '\n';
  } else {
    nlohmann::ordered_json j;
    j["dim"] = c.dim;
    j["grid_n"] = c.grid_n;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      j["rows"].push_back(nlohmann::ordered_json{{"t", r.t},
                                                 {"norm", r.norm},
                                                 {"integral", r.integral},
                                                 {"peak", r.peak},
                                                 {"wrapped", bool(r.wrapped)},
                                                 {"mean", json_num(r.mean)},
                                                 {"sigma_sq_longitudinal", json_num(r.s_long)},
                                                 {"sigma_sq_transverse_1", json_num(r.s_t1)},
                                                 {"sigma_sq_transverse_2", json_num(r.s_t2)},
                                                 {"analytic_longitudinal", r.analytic_long}});
    data << j.dump(2) << '\n';
  }
  write_atomic(c.output_path(), data.str());
  ctx.wrote(c.output_path());

  print_packet(ctx.out, spec, kin);
  Table t({"t", "norm", "wrapped", "sigma_sq long", "closed form"});
  for (const auto& r : rows)
    t.add({brief(r.t), brief(r.norm), r.wrapped ? "yes" : "no", brief(r.s_long), brief(r.analytic_long)});
  t.print(ctx.out);
}

// ---- er-test / sweep -----------------------------------------------------

std::vector<double> sweep_momenta(const RunConfig& c) {
  if (c.subcommand == "er-test") return {c.p_magnitude()};
  if (!c.momenta.empty()) return c.momenta;
  std::vector<double> out;
  for (double g : {1.25, 2.0, 4.0}) out.push_back(c.m * std::sqrt((g - 1.0) * (g + 1.0)));
  return out;
}

void run_retardation(Context& ctx) {
  const auto& c = ctx.config;
  erlab_sweep* raw = nullptr;
  check(erlab_sweep_create(&raw), "sweep");
  SweepPtr sweep(raw);
  const auto momenta = sweep_momenta(c);
  std::vector<int> methods;
  for (const auto& m : c.methods) methods.push_back(method_code(m));
  const auto opts = grid_options(c);
  check(erlab_sweep_set_packet(raw, c.m, c.sigma), "packet");
  check(erlab_sweep_set_momenta(raw, momenta.data(), momenta.size()), "momenta");
  check(erlab_sweep_set_times(raw, c.times.data(), c.times.size()), "times");
  check(erlab_sweep_set_methods(raw, methods.data(), methods.size()), "methods");
  check(erlab_sweep_set_quad_order(raw, c.quad_order), "quad_order");
  check(erlab_sweep_set_grid(raw, &opts), "grid");
  check(erlab_sweep_set_verdict_tolerance(raw, c.verdict_tol), "verdict_tol");

  erlab_report* rep = nullptr;
  check(erlab_sweep_run(raw, &rep), "sweep");
  ReportPtr report(rep);

  const auto path = c.output_path();
  if (c.format == "csv")
    check(erlab_report_write_csv(rep, path.c_str()), "write report");
  else
    check(erlab_report_write_json(rep, path.c_str()), "write report");
  ctx.wrote(path);

  if (!c.plot_dir.empty()) {
    std::size_t written = 0;
    check(erlab_report_write_plotdata(rep, c.plot_dir.c_str(), c.subcommand.c_str(), &written), "plot data");
    if (written == 0) ctx.err << "warning: report is empty, no plot files written\n";
    ctx.wrote(c.plot_dir);
  }

  std::size_t n = 0;
  check(erlab_report_point_count(rep, &n), "points");
  Table points({"|p|", "gamma", "sigma*m", "validity"});
  for (std::size_t i = 0; i < n; ++i) {
    erlab_point pt;
    check(erlab_report_point(rep, i, &pt), "point");
    points.add({brief(pt.p), brief(pt.gamma), brief(pt.sigma_m), validity_name(pt.validity)});
  }
  points.print(ctx.out);

  check(erlab_report_exponent_count(rep, &n), "exponents");
  ctx.out << '\n';
  Table exps({"|p|", "gamma", "axis", "method", "alpha", "verdict"});
  for (std::size_t i = 0; i < n; ++i) {
    erlab_exponent e;
    check(erlab_report_exponent(rep, i, &e), "exponent");
    exps.add({brief(e.p), brief(e.gamma), axis_name(e.axis), method_name(e.method), brief(e.alpha),
              verdict_name(e.verdict)});
    ++ctx.summary.computed;
  }
  if (n == 0)
    ctx.out << "  no exponents: every momentum is at rest (gamma = 1)\n";
  else
    exps.print(ctx.out);

  check(erlab_report_delta_count(rep, &n), "deltas");
  if (n > 0) {
    ctx.out << '\n';
    Table deltas({"reference", "candidate", "dim", "max rel. delta"});
    for (std::size_t i = 0; i < n; ++i) {
      erlab_method_delta d;
      check(erlab_report_delta(rep, i, &d), "delta");
      deltas.add({method_name(d.reference), method_name(d.candidate), std::to_string(d.dimension),
                  brief(d.max_relative_delta)});
    }
    deltas.print(ctx.out);
  }

  check(erlab_report_failure_count(rep, &n), "failures");
  for (std::size_t i = 0; i < n; ++i) {
    const char* msg = nullptr;
    check(erlab_report_failure(rep, i, &msg), "failure");
    ctx.fail(msg);
  }
}

// ---- residual ------------------------------------------------------------

void run_residual(Context& ctx) {
  const auto& c = ctx.config;
  const erlab_packet_spec spec{c.m, c.sigma, {c.p[0], c.p[1], c.p[2]}};
  erlab_kinematics kin;
  check(erlab_derive_kinematics(&spec, &kin), "kinematics");

  struct Row {
    double lambda, k[3], residual, scaled;
  };
  std::vector<Row> rows;
  for (double lambda : {1.0, 0.5, 0.25, 0.125}) {
    Row r{lambda, {lambda * c.kprime[0], lambda * c.kprime[1], lambda * c.kprime[2]}, 0.0, 0.0};
    check(erlab_dispersion_relation_residual(&spec, r.k, &r.residual), "residual");
    r.scaled = r.residual / (lambda * lambda * lambda);
    rows.push_back(r);
    ++ctx.summary.computed;
  }
  // The residual is at least cubic when residual / lambda^3 stops growing.
  const double coarse = std::abs(rows[2].scaled), fine = std::abs(rows[3].scaled);
  const bool cubic = fine <= 1.05 * coarse;
  const double order = (coarse > 0.0 && fine > 0.0) ? std::log2(std::abs(rows[2].residual / rows[3].residual)) : kNaN;
  if (!cubic) ctx.fail("residual: residual / lambda^3 grows under refinement (order " + brief(order) + ")");

  std::ostringstream data;
  if (c.format == "csv") {
    data << "lambda,k1,k2,k3,residual,residual_over_lambda3\n";
    for (const auto& r : rows)
      data << num(r.lambda) << ',' << num(r.k[0]) << ',' << num(r.k[1]) << ',' << num(r.k[2]) << ','
           << num(r.residual) << ',' << num(r.scaled) << '\n';
  } else {
    nlohmann::ordered_json j;
    j["kprime"] = c.kprime;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      j["rows"].push_back(nlohmann::ordered_json{
          {"lambda", r.lambda}, {"k", {r.k[0], r.k[1], r.k[2]}}, {"residual", r.residual}, {"residual_over_lambda3", r.scaled}});
    j["order"] = json_num(order);
    j["cubic"] = cubic;
    data << j.dump(2) << '\n';
  }
  write_atomic(c.output_path(), data.str());
  ctx.wrote(c.output_path());

  print_packet(ctx.out, spec, kin);
  Table t({"lambda", "residual", "residual/lambda^3"});
  for (const auto& r : rows) t.add({brief(r.lambda), brief(r.residual), brief(r.scaled)});
  t.print(ctx.out);
  ctx.out << "  residual(k') = " << format_number(rows[0].residual) << "; observed order " << brief(order)
          << "; cubic scaling " << (cubic ? "ok" : "VIOLATED") << '\n';
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw RunAbort{kExitIo, "cannot open " + tmp + " for writing"};
    f << text;
    f.flush();
    if (!f) throw RunAbort{kExitIo, "write failed for " + tmp};
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw RunAbort{kExitIo, "cannot rename " + tmp + " to " + path};
  }
}

RunSummary run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx{config, out, err, {}};
  out << "erlab " << erlab_version() << "  " << config.subcommand << '\n';
  try {
    const auto echo = config.output_path() + ".config.json";
    write_atomic(echo, config_json(config));
    ctx.wrote(echo);
    if (config.subcommand == "dispersion")
      run_dispersion(ctx);
    else if (config.subcommand == "evolve")
      run_evolve(ctx);
    else if (config.subcommand == "residual")
      run_residual(ctx);
    else
      run_retardation(ctx);
    ctx.summary.exit_code = ctx.summary.failed > 0 ? kExitPointFailures : kExitOk;
  } catch (const RunAbort& a) {
    err << "error: " << a.message << '\n';
    ctx.summary.exit_code = a.exit_code;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    ctx.summary.exit_code = kExitIo;
  }
  if (ctx.summary.failed > 0 && ctx.summary.exit_code == kExitOk) ctx.summary.exit_code = kExitPointFailures;

  for (const auto& f : ctx.summary.failures) err << "failed: " << f << '\n';
  ctx.summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << '\n' << "  points computed " << ctx.summary.computed << ", failed " << ctx.summary.failed << '\n';
  for (const auto& p : ctx.summary.outputs) out << "  wrote " << p << '\n';
  out << "  finished " << now_iso8601() << " in " << std::fixed << std::setprecision(3) << ctx.summary.wall_seconds
      << " s\n"
      << std::defaultfloat;
  return ctx.summary;
}

int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  for (std::size_t i = 1; i < args.size(); ++i)
    if (args[i] == "--help" || args[i] == "-h") {
      print_usage(out);
      return kExitOk;
    }
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const ConfigError& e) {
    err << "erlab: " << to_string(e.kind()) << ": " << e.what() << '\n';
    if (e.kind() == ConfigErrorKind::usage) print_usage(err);
    return e.kind() == ConfigErrorKind::unwritable_path ? kExitIo : kExitInvalid;
  }
  return run(config, out, err).exit_code;
}

}  // namespace erlab_cli
