#include "cli_config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "erlab/erlab.h"

namespace erlab_cli {

namespace {

using Values = std::map<std::string, std::string>;

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ConfigError(ConfigErrorKind::invalid_value, field, field + ": " + what);
}

bool known_key(const std::string& key) {
  return std::find_if(kConfigKeys.begin(), kConfigKeys.end(),
                      [&](const char* k) { return key == k; }) != kConfigKeys.end();
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!text.empty() && text.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& field, const std::string& text) {
  const std::string s = trim(text);
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (s.empty() || ec != std::errc() || ptr != last) invalid(field, "'" + text + "' is not a number");
  if (!std::isfinite(value)) invalid(field, "value must be finite");
  return value;
}

int to_int(const std::string& field, const std::string& text) {
  const std::string s = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    invalid(field, "'" + text + "' is not an integer");
  return value;
}

std::vector<double> to_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text)) out.push_back(to_double(field, item));
  return out;
}

std::array<double, 3> to_vector(const std::string& field, const std::string& text) {
  const auto values = to_list(field, text);
  if (values.size() == 1) return {0.0, 0.0, values[0]};
  if (values.size() == 3) return {values[0], values[1], values[2]};
  invalid(field, "expected a magnitude along z or a comma triple");
}

Values read_key_value(const std::string& path, const std::string& text) {
  Values values;
  std::istringstream in(text);
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(number);
    if (eq == std::string::npos)
      throw ConfigError(ConfigErrorKind::malformed_file, "", where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(ConfigErrorKind::malformed_file, "", where + ": empty key");
    if (!known_key(key))
      throw ConfigError(ConfigErrorKind::unknown_key, key, where + ": unknown key '" + key + "'");
    if (!values.emplace(key, trim(line.substr(eq + 1))).second)
      throw ConfigError(ConfigErrorKind::malformed_file, key, where + ": duplicate key '" + key + "'");
  }
  return values;
}

std::string json_scalar(const std::string& where, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  throw ConfigError(ConfigErrorKind::malformed_file, "", where + ": expected a string or number");
}

Values read_json(const std::string& path, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ConfigErrorKind::malformed_file, "", path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(ConfigErrorKind::malformed_file, "", path + ": expected a JSON object");
  Values values;
  for (const auto& [key, v] : doc.items()) {
    if (!known_key(key))
      throw ConfigError(ConfigErrorKind::unknown_key, key, path + ": unknown key '" + key + "'");
    const std::string where = path + ": " + key;
    if (v.is_array()) {
      std::string joined;
      for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? "," : "") + json_scalar(where, v[i]);
      values[key] = joined;
    } else {
      values[key] = json_scalar(where, v);
    }
  }
  return values;
}

Values read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigErrorKind::malformed_file, "config", "cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return read_json(path, text);
  return read_key_value(path, text);
}

bool is_subcommand(const std::string& s) {
  return std::find_if(kSubcommands.begin(), kSubcommands.end(), [&](const char* k) { return s == k; }) !=
         kSubcommands.end();
}

void check_parent_writable(const std::string& field, const std::filesystem::path& path) {
  const auto parent = path.parent_path();
  std::error_code ec;
  if (!parent.empty() && !std::filesystem::is_directory(parent, ec))
    throw ConfigError(ConfigErrorKind::unwritable_path, field,
                      field + ": directory " + parent.string() + " does not exist");
}

RunConfig resolve(const Values& values) {
  RunConfig c;
  const auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };

  if (auto v = get("subcommand")) c.subcommand = trim(*v);
  if (c.subcommand.empty())
    throw ConfigError(ConfigErrorKind::usage, "subcommand",
                      "a subcommand is required (dispersion, evolve, er-test, residual, sweep)");
  if (!is_subcommand(c.subcommand)) invalid("subcommand", "unknown subcommand '" + c.subcommand + "'");

  if (auto v = get("m")) c.m = to_double("m", *v);
  if (auto v = get("sigma")) c.sigma = to_double("sigma", *v);
  if (auto v = get("p")) c.p = to_vector("p", *v);
  if (auto v = get("momenta")) c.momenta = to_list("momenta", *v);
  if (auto v = get("times")) c.times = to_list("times", *v);
  if (auto v = get("method")) c.methods = split(*v);
  if (auto v = get("quad_order")) c.quad_order = to_int("quad_order", *v);
  if (auto v = get("dim")) c.dim = to_int("dim", *v);
  if (auto v = get("grid_n"))
    c.grid_n = to_int("grid_n", *v);
  else if (c.dim == 3)
    c.grid_n = 64;
  if (auto v = get("grid_halfwidth")) c.grid_halfwidth = to_double("grid_halfwidth", *v);
  if (auto v = get("verdict_tol")) c.verdict_tol = to_double("verdict_tol", *v);
  if (auto v = get("kprime")) {
    const auto k = to_list("kprime", *v);
    if (k.size() != 3) invalid("kprime", "expected a comma triple");
    c.kprime = {k[0], k[1], k[2]};
  }
  if (auto v = get("out")) c.out = *v;
  if (auto v = get("format")) c.format = trim(*v);
  if (auto v = get("plot_dir")) c.plot_dir = *v;

  // Physics values go through the library's own validation.
  const erlab_packet_spec spec{c.m, c.sigma, {c.p[0], c.p[1], c.p[2]}};
  erlab_kinematics kin;
  if (erlab_derive_kinematics(&spec, &kin) != ERLAB_OK) {
    const std::string field = erlab_last_error_field();
    throw ConfigError(ConfigErrorKind::invalid_value, field.empty() ? "p" : field, erlab_last_error());
  }
  for (double p : c.momenta)
    if (p < 0.0) invalid("momenta", "momentum magnitudes must be >= 0");
  if (c.times.empty()) invalid("times", "at least one time is required");
  if (c.methods.empty()) invalid("method", "at least one method is required");
  for (const auto& m : c.methods)
    if (m != "analytic" && m != "oracle" && m != "grid") invalid("method", "unknown method '" + m + "'");
  if (c.quad_order < 2) invalid("quad_order", "quadrature order must be >= 2");
  if (c.dim != 1 && c.dim != 3) invalid("dim", "dimension must be 1 or 3");
  if (c.grid_n < 4 || (c.grid_n & (c.grid_n - 1)) != 0)
    invalid("grid_n", "points per axis must be a power of two >= 4");
  if (c.grid_halfwidth < 5.0) invalid("grid_halfwidth", "momentum half-width must be at least 5 / sigma");
  if (!(c.verdict_tol > 0.0)) invalid("verdict_tol", "verdict tolerance must be > 0");
  if (c.format != "csv" && c.format != "json") invalid("format", "format must be csv or json");

  check_parent_writable("out", c.output_path());
  if (!c.plot_dir.empty()) {
    std::error_code ec;
    const std::filesystem::path dir(c.plot_dir);
    if (std::filesystem::exists(dir, ec) && !std::filesystem::is_directory(dir, ec))
      throw ConfigError(ConfigErrorKind::unwritable_path, "plot_dir", "plot_dir: " + c.plot_dir + " is not a directory");
    check_parent_writable("plot_dir", dir);
  }
  return c;
}

}  // namespace

const char* to_string(ConfigErrorKind kind) {
  switch (kind) {
    case ConfigErrorKind::usage: return "usage error";
    case ConfigErrorKind::malformed_file: return "malformed config file";
    case ConfigErrorKind::unknown_key: return "unknown key";
    case ConfigErrorKind::conflicting_flags: return "conflicting flags";
    case ConfigErrorKind::invalid_value: return "invalid value";
    case ConfigErrorKind::unwritable_path: return "unwritable path";
  }
  return "error";
}

double RunConfig::p_magnitude() const { return std::hypot(p[0], p[1], p[2]); }

std::string RunConfig::output_path() const {
  return out.empty() ? "erlab-" + subcommand + "." + format : out;
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"erlab: relativistic wave-packet spreading laboratory"};
  app.set_help_flag();
  app.allow_windows_style_options(false);

  Values flags;
  std::map<std::string, CLI::Option*> options;
  std::vector<std::string> methods;
  std::string config_path;
  for (const char* key : kConfigKeys) {
    if (std::string(key) == "subcommand" || std::string(key) == "method") continue;
    std::string flag = std::string("--") + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    options[key] = app.add_option(flag, flags[key]);
  }
  options["method"] = app.add_option("--method", methods)->delimiter(',')->allow_extra_args(false);
  app.add_option("--config", config_path);

  std::string subcommand;
  for (const char* name : kSubcommands) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    sub->callback([&subcommand, name] { subcommand = name; });
  }
  app.require_subcommand(0, 1);

  if (std::count_if(args.begin() + std::min<std::size_t>(1, args.size()), args.end(), is_subcommand) > 1)
    throw ConfigError(ConfigErrorKind::usage, "subcommand", "exactly one subcommand may be given");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ExtrasError& e) {
    throw ConfigError(ConfigErrorKind::unknown_key, "", e.what());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(ConfigErrorKind::usage, "", e.what());
  }

  if (options["p"]->count() && options["momenta"]->count())
    throw ConfigError(ConfigErrorKind::conflicting_flags, "p",
                      "--p and --momenta both set the packet momentum; give one of them");

  Values values;
  if (!config_path.empty()) values = read_config_file(config_path);
  for (const auto& [key, opt] : options) {
    if (!opt->count()) continue;
    if (key == "method") {
      std::string joined;
      for (std::size_t i = 0; i < methods.size(); ++i) joined += (i ? "," : "") + methods[i];
      values[key] = joined;
    } else {
      values[key] = flags[key];
    }
  }
  if (!subcommand.empty()) values["subcommand"] = subcommand;
  // A --dim flag without --grid-n picks the default size for that dimension.
  if (options["dim"]->count() && !options["grid_n"]->count()) values.erase("grid_n");
  return resolve(values);
}

RunConfig parse_config(int argc, const char* const* argv) {
  return parse_config(std::vector<std::string>(argv, argv + argc));
}

std::string config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["subcommand"] = c.subcommand;
  j["m"] = c.m;
  j["sigma"] = c.sigma;
  j["p"] = c.p;
  j["momenta"] = c.momenta;
  j["times"] = c.times;
  j["method"] = c.methods;
  j["quad_order"] = c.quad_order;
  j["grid_n"] = c.grid_n;
  j["dim"] = c.dim;
  j["grid_halfwidth"] = c.grid_halfwidth;
  j["verdict_tol"] = c.verdict_tol;
  j["kprime"] = c.kprime;
  j["out"] = c.out;
  j["format"] = c.format;
  j["plot_dir"] = c.plot_dir;
  return j.dump(2) + "\n";
}

void print_usage(std::ostream& os) {
  os << "usage: erlab <dispersion|evolve|er-test|residual|sweep> [options]\n"
        "\n"
        "  --m <mass>              particle mass (default 1)\n"
        "  --sigma <width>         initial packet width (default 5)\n"
        "  --p <p | px,py,pz>      mean momentum, magnitude along z or a triple (default sqrt 3)\n"
        "  --momenta <list>        sweep magnitudes (default: gamma = 1.25, 2, 4)\n"
        "  --times <list>          evaluation times (default 0,5,10,20)\n"
        "  --method <name>         analytic | oracle | grid, repeatable (default analytic)\n"
        "  --quad-order <n>        quadrature points per axis (default 40)\n"
        "  --grid-n <n>            grid points per axis (default 128 in 1D, 64 in 3D)\n"
        "  --dim <1|3>             grid dimension (default 1)\n"
        "  --grid-halfwidth <h>    momentum half-width times sigma (default 6)\n"
        "  --verdict-tol <tol>     |alpha - 1| tolerance for 'holds' (default 0.05)\n"
        "  --kprime <kx,ky,kz>     momentum offset for the residual (default 0,0,0.6)\n"
        "  --out <path>            data file (default erlab-<subcommand>.<format>)\n"
        "  --format <csv|json>     data format (default csv)\n"
        "  --plot-dir <dir>        also write whitespace-delimited plot files here\n"
        "  --config <file>         key = value or JSON file with the keys above\n"
        "\n"
        "exit codes: 0 ok, 1 invalid configuration, 2 some points failed, 3 I/O error\n";
}

}  // namespace erlab_cli
