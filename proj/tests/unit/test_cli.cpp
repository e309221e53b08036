#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli_config.hpp"
#include "cli_run.hpp"

using namespace erlab_cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "erlab");
  return parse_config(args);
}

ConfigError parse_error(std::vector<std::string> args) {
  try {
    parse(std::move(args));
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a configuration error");
  return ConfigError(ConfigErrorKind::usage, "", "");
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("erlab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(ERLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("documented defaults") {
  const auto c = parse({"er-test"});
  CHECK(c.subcommand == "er-test");
  CHECK(c.m == 1.0);
  CHECK(c.sigma == 5.0);
  CHECK(c.p == std::array<double, 3>{0.0, 0.0, std::sqrt(3.0)});
  CHECK(c.times == std::vector<double>{0, 5, 10, 20});
  CHECK(c.methods == std::vector<std::string>{"analytic"});
  CHECK(c.quad_order == 40);
  CHECK(c.dim == 1);
  CHECK(c.grid_n == 128);
  CHECK(c.format == "csv");
  CHECK(c.output_path() == "erlab-er-test.csv");
  CHECK(parse({"evolve", "--dim", "3"}).grid_n == 64);
  CHECK(parse({"evolve", "--dim", "3", "--grid-n", "32"}).grid_n == 32);
}

TEST_CASE("worked parse example") {
  const auto c = parse({"er-test", "--m", "1", "--sigma", "5", "--p", "1.7320508", "--times", "0,5,10,20"});
  CHECK(c.p == std::array<double, 3>{0.0, 0.0, 1.7320508});
  CHECK(c.times.size() == 4);
  const auto t = parse({"dispersion", "--p", "0.1,0.2,0.3", "--method", "oracle", "--method", "grid"});
  CHECK(t.p == std::array<double, 3>{0.1, 0.2, 0.3});
  CHECK(t.methods == std::vector<std::string>{"oracle", "grid"});
  CHECK(parse({"sweep", "--method", "analytic,oracle"}).methods.size() == 2);
  CHECK(parse({"--sigma", "7", "residual"}).sigma == 7.0);
}

TEST_CASE("invalid physics values name the field") {
  auto e = parse_error({"er-test", "--sigma", "-1"});
  CHECK(e.kind() == ConfigErrorKind::invalid_value);
  CHECK(e.field() == "sigma");
  CHECK(std::string(e.what()).find("sigma") != std::string::npos);
  CHECK(parse_error({"er-test", "--m", "0"}).field() == "m");
  CHECK(parse_error({"er-test", "--p", "nan"}).field() == "p");
  CHECK(parse_error({"er-test", "--p", "1,2"}).field() == "p");
  CHECK(parse_error({"er-test", "--times", "0,x"}).field() == "times");
  CHECK(parse_error({"er-test", "--method", "magic"}).field() == "method");
  CHECK(parse_error({"er-test", "--grid-n", "100"}).field() == "grid_n");
  CHECK(parse_error({"er-test", "--dim", "2"}).field() == "dim");
  CHECK(parse_error({"er-test", "--format", "xml"}).field() == "format");
  CHECK(parse_error({"er-test", "--quad-order", "1"}).field() == "quad_order");
  CHECK(parse_error({"sweep", "--momenta", "1,-1"}).field() == "momenta");
}

TEST_CASE("distinct diagnostics") {
  const auto dir = scratch("diag");
  CHECK(parse_error({}).kind() == ConfigErrorKind::usage);
  CHECK(parse_error({"er-test", "sweep"}).kind() == ConfigErrorKind::usage);
  CHECK(parse_error({"er-test", "--bogus", "1"}).kind() == ConfigErrorKind::unknown_key);
  CHECK(parse_error({"sweep", "--p", "1", "--momenta", "1,2"}).kind() == ConfigErrorKind::conflicting_flags);
  CHECK(parse_error({"er-test", "--out", (dir / "missing" / "x.csv").string()}).kind() ==
        ConfigErrorKind::unwritable_path);

  spit(dir / "unknown.cfg", "sigma = 5\nwidth = 3\n");
  const auto unknown = parse_error({"er-test", "--config", (dir / "unknown.cfg").string()});
  CHECK(unknown.kind() == ConfigErrorKind::unknown_key);
  CHECK(unknown.field() == "width");

  spit(dir / "broken.cfg", "sigma 5\n");
  CHECK(parse_error({"er-test", "--config", (dir / "broken.cfg").string()}).kind() ==
        ConfigErrorKind::malformed_file);
  spit(dir / "dup.cfg", "sigma = 5\nsigma = 6\n");
  CHECK(parse_error({"er-test", "--config", (dir / "dup.cfg").string()}).kind() ==
        ConfigErrorKind::malformed_file);
  spit(dir / "broken.json", "{\"sigma\": 5,");
  CHECK(parse_error({"er-test", "--config", (dir / "broken.json").string()}).kind() ==
        ConfigErrorKind::malformed_file);
  CHECK(parse_error({"er-test", "--config", (dir / "absent.cfg").string()}).kind() ==
        ConfigErrorKind::malformed_file);
}

TEST_CASE("flags override the config file") {
  const auto dir = scratch("override");
  spit(dir / "run.cfg", "# packet\nsigma = 7\nm = 2\ntimes = 0, 1, 2, 3\nsubcommand = sweep\n");
  const auto file_only = parse({"--config", (dir / "run.cfg").string()});
  CHECK(file_only.subcommand == "sweep");
  CHECK(file_only.sigma == 7.0);
  CHECK(file_only.m == 2.0);
  CHECK(file_only.times == std::vector<double>{0, 1, 2, 3});

  const auto c = parse({"er-test", "--config", (dir / "run.cfg").string(), "--sigma", "9"});
  CHECK(c.subcommand == "er-test");
  CHECK(c.sigma == 9.0);
  CHECK(c.m == 2.0);
}

TEST_CASE("property: the config echo round-trips") {
  const auto dir = scratch("roundtrip");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const char* subs[] = {"dispersion", "evolve", "er-test", "residual", "sweep"};
  const char* methods[] = {"analytic", "oracle", "grid"};
  for (int i = 0; i < 200; ++i) {
    RunConfig c;
    c.subcommand = subs[rng() % 5];
    c.m = std::exp(-2.0 + 4.0 * u(rng));
    c.sigma = std::exp(-1.0 + 5.0 * u(rng));
    c.p = {u(rng) - 0.5, u(rng) - 0.5, 10.0 * u(rng)};
    c.momenta.clear();
    if (c.subcommand == std::string("sweep"))
      for (int k = 0; k < int(rng() % 4); ++k) c.momenta.push_back(5.0 * u(rng));
    c.times = {0.0};
    for (int k = 0; k < 3 + int(rng() % 4); ++k) c.times.push_back(100.0 * (u(rng) - 0.3));
    c.methods.clear();
    for (int k = 0; k < 1 + int(rng() % 3); ++k) c.methods.push_back(methods[rng() % 3]);
    c.quad_order = 2 + int(rng() % 80);
    c.dim = (rng() % 2) ? 3 : 1;
    c.grid_n = 1 << (2 + rng() % 8);
    c.grid_halfwidth = 5.0 + 5.0 * u(rng);
    c.verdict_tol = 0.2 * u(rng) + 1e-3;
    c.kprime = {u(rng), -u(rng), u(rng)};
    c.out = (rng() % 2) ? "" : (dir / "out.dat").string();
    c.format = (rng() % 2) ? "csv" : "json";
    c.plot_dir = (rng() % 2) ? "" : (dir / "plots").string();

    spit(dir / "echo.json", config_json(c));
    const auto back = parse({"--config", (dir / "echo.json").string()});
    CHECK(back == c);
    CHECK(config_json(back) == config_json(c));
  }
}

TEST_CASE("default er-test reports the exponents") {
  const auto dir = scratch("ertest");
  auto c = parse({"er-test", "--out", (dir / "er.csv").string(), "--plot-dir", (dir / "plots").string()});
  std::ostringstream out, err;
  const auto summary = run(c, out, err);
  CHECK(summary.exit_code == 0);
  CHECK(summary.failed == 0);
  CHECK(summary.computed == 3);
  CHECK(out.str().find("longitudinal") != std::string::npos);
  CHECK(out.str().find("fails") != std::string::npos);
  CHECK(out.str().find("valid") != std::string::npos);

  const auto rows = read_csv(dir / "er.csv");
  REQUIRE(rows.size() == 13);
  CHECK(rows[0][8] == "alpha_fit");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double alpha = std::stod(rows[i][8]);
    if (rows[i][4] == "longitudinal") {
      CHECK(std::abs(alpha - 3.0) < 1e-10);
      CHECK(rows[i][10] == "fails");
    } else {
      CHECK(std::abs(alpha - 1.0) < 1e-10);
      CHECK(rows[i][10] == "holds");
    }
  }
  CHECK(fs::exists(dir / "er.csv.config.json"));
  CHECK(fs::exists(dir / "plots" / "er-test_longitudinal_analytic.dat"));
  CHECK_FALSE(fs::exists(dir / "er.csv.tmp"));
}

TEST_CASE("dispersion with the oracle method") {
  const auto dir = scratch("dispersion");
  auto c = parse({"dispersion", "--method", "oracle", "--out", (dir / "d.csv").string()});
  std::ostringstream out, err;
  CHECK(run(c, out, err).exit_code == 0);
  const auto rows = read_csv(dir / "d.csv");
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == std::vector<std::string>{"m", "sigma", "p", "gamma", "axis", "method", "t", "mean", "sigma_sq"});
  // Velocity variances from an independent tabulation for m = 1, sigma = 5, |p| = sqrt 3.
  const double var_long = 1.6940607283138576e-4, var_trans = 2.487484735425422e-3, mean_v = 0.8630529361089982;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i][6]);
    const double s = std::stod(rows[i][8]);
    const double expected = 25.0 + t * t * (rows[i][4] == "longitudinal" ? var_long : var_trans);
    CHECK(s == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::stod(rows[i][7]) == doctest::Approx(mean_v * t).epsilon(1e-9));
  }
}

TEST_CASE("residual subcommand") {
  const auto dir = scratch("residual");
  auto c = parse({"residual", "--kprime", "0,0,0.6", "--out", (dir / "r.csv").string()});
  std::ostringstream out, err;
  CHECK(run(c, out, err).exit_code == 0);
  CHECK(out.str().find("cubic scaling ok") != std::string::npos);
  const auto rows = read_csv(dir / "r.csv");
  REQUIRE(rows.size() == 5);
  CHECK(std::stod(rows[1][4]) == doctest::Approx(0.0075916674).epsilon(1e-8));
  const double coarse = std::stod(rows[3][5]), fine = std::stod(rows[4][5]);
  CHECK(std::abs(fine / coarse - 1.0) < 0.05);
}

TEST_CASE("evolve subcommand writes snapshots") {
  const auto dir = scratch("evolve");
  auto c = parse({"evolve", "--out", (dir / "e.json").string(), "--format", "json", "--plot-dir",
                  (dir / "rho").string()});
  std::ostringstream out, err;
  const auto summary = run(c, out, err);
  CHECK(summary.exit_code == 0);
  CHECK(summary.computed == 4);
  const auto text = slurp(dir / "e.json");
  CHECK(text.find("\"sigma_sq_longitudinal\"") != std::string::npos);
  for (int i = 0; i < 4; ++i) CHECK(fs::exists(dir / "rho" / ("evolve_density_" + std::to_string(i) + ".csv")));
}

TEST_CASE("outputs are byte-for-byte deterministic") {
  const auto dir = scratch("determinism");
  for (const char* name : {"a.csv", "b.csv"}) {
    auto c = parse({"sweep", "--method", "analytic,oracle,grid", "--out", (dir / name).string()});
    std::ostringstream out, err;
    CHECK(run(c, out, err).exit_code == 0);
  }
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}

TEST_CASE("process exit codes") {
  const auto dir = scratch("exit");
  const std::string out = " --out " + (dir / "x.csv").string();
  CHECK(run_binary("er-test" + out) == 0);
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("er-test --sigma -1" + out) == 1);
  CHECK(run_binary("er-test --times 0,5" + out) == 1);
  CHECK(run_binary("") == 1);
  CHECK(run_binary("dispersion --method analytic --method grid --grid-n 32 --times 0,10,20,200" + out) == 2);
  CHECK(run_binary("er-test --out " + (dir / "nowhere" / "x.csv").string()) == 3);
  fs::create_directories(dir / "blocked.csv");
  CHECK(run_binary("er-test --out " + (dir / "blocked.csv").string()) == 3);
}
