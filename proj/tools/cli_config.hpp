#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace erlab_cli {

enum class ConfigErrorKind { usage, malformed_file, unknown_key, conflicting_flags, invalid_value, unwritable_path };

const char* to_string(ConfigErrorKind kind);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, std::string field, const std::string& what)
      : std::runtime_error(what), kind_(kind), field_(std::move(field)) {}
  ConfigErrorKind kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  ConfigErrorKind kind_;
  std::string field_;
};

// Keys of the config file; each has a command-line flag with '_' spelled '-'.
inline constexpr std::array<const char*, 16> kConfigKeys = {
    "subcommand", "m",  "sigma",          "p",           "momenta", "times",    "method", "quad_order",
    "grid_n",     "dim", "grid_halfwidth", "verdict_tol", "kprime",  "out",      "format", "plot_dir"};

inline constexpr std::array<const char*, 5> kSubcommands = {"dispersion", "evolve", "er-test", "residual",
                                                            "sweep"};

struct RunConfig {
  std::string subcommand;
  double m = 1.0;
  double sigma = 5.0;
  std::array<double, 3> p{0.0, 0.0, 1.7320508075688772};
  std::vector<double> momenta;  // sweep magnitudes; empty means the gamma ladder {1.25, 2, 4}
  std::vector<double> times{0.0, 5.0, 10.0, 20.0};
  std::vector<std::string> methods{"analytic"};
  int quad_order = 40;
  int grid_n = 128;
  int dim = 1;
  double grid_halfwidth = 6.0;
  double verdict_tol = 0.05;
  std::array<double, 3> kprime{0.0, 0.0, 0.6};
  std::string out;  // empty means erlab-<subcommand>.<format>
  std::string format = "csv";
  std::string plot_dir;

  double p_magnitude() const;
  std::string output_path() const;
  bool operator==(const RunConfig&) const = default;
};

// argv[0] is the program name. Values come from defaults, then the --config
// file, then flags.
RunConfig parse_config(int argc, const char* const* argv);
RunConfig parse_config(const std::vector<std::string>& args);

// Canonical JSON echo of a resolved configuration; feeding it back through
// --config reproduces the same RunConfig.
std::string config_json(const RunConfig& config);

std::string format_number(double x);

void print_usage(std::ostream& os);

}  // namespace erlab_cli
