#include "erlab/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "erlab/harness.hpp"

namespace erlab {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

namespace {

std::string csv_number(double v) { return std::isnan(v) ? std::string() : format_number(v); }

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json row_json(const ReportRow& r) {
  return {{"m", r.m},
          {"sigma", r.sigma},
          {"p", r.p},
          {"gamma", r.gamma},
          {"axis", to_string(r.axis)},
          {"method", to_string(r.method)},
          {"t", r.t},
          {"sigma_sq", json_number(r.sigma_sq)},
          {"alpha_fit", json_number(r.alpha_fit)},
          {"residual", json_number(r.residual)},
          {"verdict", to_string(r.verdict)}};
}

}  // namespace

void write_report_csv(std::ostream& out, const RetardationReport& report) {
  out << "m,sigma,p,gamma,axis,method,t,sigma_sq,alpha_fit,residual,verdict\n";
  for (const auto& r : report.rows)
    out << format_number(r.m) << ',' << format_number(r.sigma) << ',' << format_number(r.p) << ','
        << format_number(r.gamma) << ',' << to_string(r.axis) << ',' << to_string(r.method) << ','
        << format_number(r.t) << ',' << csv_number(r.sigma_sq) << ',' << csv_number(r.alpha_fit)
        << ',' << csv_number(r.residual) << ',' << to_string(r.verdict) << '\n';
}

nlohmann::json config_to_json(const SweepConfig& config) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : config.methods) methods.push_back(to_string(m));
  return {{"m", config.mass},
          {"sigma", config.width},
          {"momenta", config.momenta},
          {"times", config.times},
          {"methods", methods},
          {"quad_order", config.oracle.order},
          {"convergence_rtol", config.oracle.convergence_rtol},
          {"grid_n", config.grid.points_per_axis},
          {"dim", config.grid.dimension},
          {"grid_halfwidth", config.grid.halfwidth_sigma},
          {"verdict_tol", config.verdict_tolerance}};
}

nlohmann::json report_to_json(const RetardationReport& report) {
  nlohmann::json j;
  j["metadata"] = {
      {"units", "natural (hbar = c = 1)"},
      {"momentum_axis", "z"},
      {"verdict_rule", "holds iff |alpha - 1| <= verdict_tol"},
      {"verdict_tol", report.config.verdict_tolerance},
      {"quadratic_residual_limit", kQuadraticResidualLimit},
      {"csv_columns", "m,sigma,p,gamma,axis,method,t,sigma_sq,alpha_fit,residual,verdict"},
  };
  j["config"] = config_to_json(report.config);

  auto& points = j["points"] = nlohmann::json::array();
  for (const auto& p : report.points)
    points.push_back({{"p", p.p},
                      {"gamma", p.gamma},
                      {"sigma_m", p.validity.sigma_m},
                      {"validity", to_string(p.validity.level)}});

  auto& exps = j["exponents"] = nlohmann::json::array();
  for (const auto& e : report.exponents)
    exps.push_back({{"p", e.p},
                    {"gamma", e.gamma},
                    {"axis", to_string(e.axis)},
                    {"method", to_string(e.method)},
                    {"alpha", json_number(e.alpha)},
                    {"residual", json_number(e.residual)},
                    {"quadratic", e.quadratic},
                    {"verdict", to_string(e.verdict)}});

  auto& deltas = j["method_deltas"] = nlohmann::json::array();
  for (const auto& d : report.deltas)
    deltas.push_back({{"reference", to_string(d.reference)},
                      {"candidate", to_string(d.candidate)},
                      {"dimension", d.dimension},
                      {"max_relative_delta", json_number(d.max_relative_delta)}});

  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) rows.push_back(row_json(r));
  auto& rest = j["rest_rows"] = nlohmann::json::array();
  for (const auto& r : report.rest_rows) rest.push_back(row_json(r));
  j["failures"] = report.failures;
  return j;
}

std::vector<std::filesystem::path> emit_plotdata(const RetardationReport& report,
                                                 const std::filesystem::path& dir,
                                                 const std::string& tag) {
  std::vector<std::filesystem::path> written;
  if (report.rows.empty() && report.rest_rows.empty()) return written;

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());

  // Group curves by file, keeping first-seen order.
  std::vector<std::pair<std::string, std::ostringstream>> files;
  const auto stream_for = [&](const std::string& name) -> std::ostringstream& {
    for (auto& [n, s] : files)
      if (n == name) return s;
    files.emplace_back(name, std::ostringstream{});
    return files.back().second;
  };

  double last_p = -1.0;
  std::string last_name;
  for (const auto& r : report.rows) {
    const std::string name =
        tag + "_" + std::string(to_string(r.axis)) + "_" + std::string(to_string(r.method)) + ".dat";
    auto& s = stream_for(name);
    if (name != last_name || r.p != last_p) {
      if (s.tellp() > 0) s << "\n\n";
      s << "# p " << format_number(r.p) << " gamma " << format_number(r.gamma) << "\n# t sigma_sq\n";
    }
    s << format_number(r.t) << ' ' << format_number(r.sigma_sq) << '\n';
    last_name = name;
    last_p = r.p;
  }

  for (const auto& r : report.rest_rows) {
    if (r.axis != ReportAxis::longitudinal) continue;  // rest curves are isotropic
    auto& s = stream_for(tag + "_rest_" + std::string(to_string(r.method)) + ".dat");
    if (s.tellp() == 0) s << "# p 0 gamma 1\n# t sigma_sq\n";
    s << format_number(r.t) << ' ' << format_number(r.sigma_sq) << '\n';
  }

  for (const auto& e : report.exponents) {
    auto& s = stream_for(tag + "-alpha_" + std::string(to_string(e.axis)) + "_" +
                         std::string(to_string(e.method)) + ".dat");
    if (s.tellp() == 0) s << "# gamma alpha\n";
    s << format_number(e.gamma) << ' ' << format_number(e.alpha) << '\n';
  }

  for (auto& [name, s] : files) {
    const auto path = dir / name;
    write_file_atomic(path, s.str());
    written.push_back(path);
  }
  return written;
}

}  // namespace erlab
