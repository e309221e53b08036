#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "erlab/analytic.hpp"
#include "erlab/oracle.hpp"
#include "erlab/propagator.hpp"
#include "test_support.hpp"

using namespace erlab;
using testing::rel_diff;

namespace {

const PacketSpec kMoving{1.0, 5.0, {0.0, 0.0, std::sqrt(3.0)}};
const PacketSpec kRest{1.0, 5.0, {0.0, 0.0, 0.0}};
const GridOptions kLine{.dimension = 1, .points_per_axis = 128, .halfwidth_sigma = 6.0};

MomentSet line_moments(const PacketSpec& spec, double t, GridOptions opts = kLine) {
  const MomentumGrid grid(spec, opts);
  grid.check_box(spec, t);
  return grid_moments(to_position_density(evolve(init_packet_on_grid(spec, grid), t)));
}

}  // namespace

TEST_CASE("grid geometry") {
  const MomentumGrid g(kRest, kLine);
  CHECK(g.k_halfwidth() == doctest::Approx(1.2));
  CHECK(g.dk() == doctest::Approx(2.4 / 128));
  CHECK(g.dx() * g.dk() * 128 == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(g.k(2, 64) == 0.0);
  CHECK(g.size() == 128);
  CHECK(MomentumGrid(kMoving, {3, 16, 6.0}).size() == 4096);
  CHECK(MomentumGrid(kMoving, kLine).k_center()[2] == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("grid sizing rules are enforced") {
  CHECK_THROWS_AS(MomentumGrid(kRest, {1, 128, 2.0}), GridError);
  CHECK_THROWS_AS(MomentumGrid(kRest, {1, 100, 6.0}), GridError);
  CHECK_THROWS_AS(MomentumGrid(kRest, {2, 128, 6.0}), GridError);
  CHECK_NOTHROW(MomentumGrid(kRest, {1, 128, 5.0}));
  const MomentumGrid small(kRest, {1, 16, 6.0});  // box half-length ~21
  CHECK_THROWS_AS(small.check_box(kRest, 0.0), GridError);
  const MomentumGrid ok(kRest, kLine);
  CHECK_NOTHROW(ok.check_box(kRest, 20.0));
  CHECK_THROWS_AS(ok.check_box(kRest, 2000.0), GridError);
}

TEST_CASE("initial packet on the grid") {
  const auto s = init_packet_on_grid(kRest, MomentumGrid(kRest, kLine));
  CHECK(std::abs(s.discrete_norm() - 1.0) < 1e-8);
  CHECK(s.time == 0.0);

  const MomentumGrid g3(kMoving, {3, 32, 6.0});
  const auto s3 = init_packet_on_grid(kMoving, g3);
  CHECK(std::abs(s3.discrete_norm() - 1.0) < 1e-8);
  const double m = std::sqrt(5.0 * std::sqrt(2.0 / std::numbers::pi));
  const std::size_t mid = 16;
  CHECK(s3.initial[(mid * 32 + mid) * 32 + mid].real() == m * m * m);
}

TEST_CASE("evolution is a pure phase") {
  const auto s0 = init_packet_on_grid(kMoving, MomentumGrid(kMoving, kLine));
  const auto same = evolve(s0, 0.0);
  CHECK(same.amplitude == s0.amplitude);

  const auto s1 = evolve(s0, 10.0);
  CHECK(rel_diff(s1.discrete_norm(), s0.discrete_norm()) < 1e-14);
  for (std::size_t i = 0; i < s0.amplitude.size(); ++i)
    CHECK(std::abs(std::abs(s1.amplitude[i]) - std::abs(s0.amplitude[i])) <= 4e-16 * std::abs(s0.amplitude[i]) + 1e-300);

  const auto a = evolve(evolve(s0, 3.5), 6.5);
  const auto b = evolve(s0, 10.0);
  for (std::size_t i = 0; i < a.amplitude.size(); ++i) {
    CHECK(testing::ulp_distance(a.amplitude[i].real(), b.amplitude[i].real()) <= 8);
    CHECK(testing::ulp_distance(a.amplitude[i].imag(), b.amplitude[i].imag()) <= 8);
  }
}

TEST_CASE("density at t = 0 reproduces the initial Gaussian") {
  const auto d = to_position_density(init_packet_on_grid(kRest, MomentumGrid(kRest, kLine)));
  CHECK_FALSE(d.wrapped);
  CHECK(std::abs(d.integral() - 1.0) < 1e-8);
  for (double r : d.rho) CHECK(r >= 0.0);
  CHECK(d.peak == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * 25.0)).epsilon(1e-10));
  const auto m = grid_moments(d);
  CHECK(rel_diff(m.sigma_sq[2], 25.0) < 1e-3);
  CHECK(std::abs(m.mean_position[2]) < 1e-10);
  CHECK(m.method == Method::grid);
  CHECK(m.dimension == 1);
}

TEST_CASE("moving packet density peaks near v t") {
  const MomentumGrid g(kMoving, kLine);
  const auto d = to_position_density(evolve(init_packet_on_grid(kMoving, g), 10.0));
  std::size_t arg = 0;
  for (std::size_t i = 0; i < d.rho.size(); ++i)
    if (d.rho[i] > d.rho[arg]) arg = i;
  CHECK(std::abs(d.position(2, static_cast<int>(arg)) - 8.6602540378) <= d.dx);
  const auto m = grid_moments(d);
  CHECK(m.mean_position[2] == doctest::Approx(8.66).epsilon(0.01));
}

TEST_CASE("one-dimensional grid agrees with the one-dimensional oracle") {
  const MomentOracle oracle(kMoving, {.order = 40, .dimension = 1});
  for (double t : {0.0, 5.0, 10.0, 20.0}) {
    const auto g = line_moments(kMoving, t);
    const auto o = oracle.exact_moments(t);
    CHECK(rel_diff(g.sigma_sq[2], o.sigma_sq[2]) < 1e-3);
    if (t > 0.0) CHECK(rel_diff(g.mean_position[2], o.mean_position[2]) < 1e-3);
  }
}

TEST_CASE("exact mean motion is linear on the grid") {
  const double v5 = line_moments(kMoving, 5.0).mean_position[2] / 5.0;
  for (double t : {10.0, 20.0}) CHECK(rel_diff(line_moments(kMoving, t).mean_position[2] / t, v5) < 1e-3);
}

TEST_CASE("time reversal symmetry of grid dispersions") {
  for (double t : {5.0, 20.0}) {
    const auto fwd = line_moments(kMoving, t);
    const auto bwd = line_moments(kMoving, -t);
    CHECK(rel_diff(bwd.sigma_sq[2], fwd.sigma_sq[2]) < 1e-10);
    CHECK(rel_diff(bwd.mean_position[2], -fwd.mean_position[2]) < 1e-10);
  }
}

TEST_CASE("wrap-around is detected") {
  const MomentumGrid g(kRest, {1, 32, 6.0});  // box half-length ~42
  const auto start = init_packet_on_grid(kRest, g);
  CHECK_FALSE(to_position_density(start).wrapped);
  const auto d = to_position_density(evolve(start, 200.0));
  CHECK(d.wrapped);
  CHECK_THROWS_AS(grid_moments(d), WrapAroundError);
}

TEST_CASE("snapshot series") {
  const auto one = snapshot_series(kMoving, kLine, {0.0});
  REQUIRE(one.size() == 1);
  CHECK(rel_diff(one[0].moments.sigma_sq[2], 25.0) < 1e-3);

  const std::vector<double> times{0.0, 5.0, 10.0, 20.0, 40.0};
  const auto series = snapshot_series(kMoving, kLine, times);
  const MomentOracle oracle(kMoving, {.order = 40, .dimension = 1});
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK_FALSE(series[i].wrapped);
    CHECK(std::abs(series[i].norm - 1.0) < 1e-8);
    CHECK(rel_diff(series[i].moments.sigma_sq[2], oracle.exact_moments(times[i]).sigma_sq[2]) < 1e-3);
    if (i > 0) CHECK(series[i].moments.sigma_sq[2] > series[i - 1].moments.sigma_sq[2]);
  }
}

TEST_CASE("three-dimensional grid agrees with the oracle") {
  const GridOptions cube{3, 32, 6.0};
  const MomentOracle oracle(kMoving);
  const auto series = snapshot_series(kMoving, cube, {0.0, 2.0, 4.0});
  for (const auto& s : series) {
    REQUIRE_FALSE(s.wrapped);
    CHECK(std::abs(s.norm - 1.0) < 1e-8);
    const auto o = oracle.exact_moments(s.time);
    for (std::size_t a = 0; a < 3; ++a) CHECK(rel_diff(s.moments.sigma_sq[a], o.sigma_sq[a]) < 1e-3);
    if (s.time > 0.0) CHECK(rel_diff(s.moments.mean_position[2], o.mean_position[2]) < 1e-3);
    CHECK(rel_diff(s.moments.sigma_sq[0], s.moments.sigma_sq[1]) < 1e-9);
  }
}

TEST_CASE("property: norm and positivity over random specs") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> tt(-30.0, 30.0);
  for (int i = 0; i < 25; ++i) {
    auto spec = testing::random_spec(rng);
    spec.width = std::min(spec.width, 40.0);  // keep the default box adequate
    GridOptions opts = kLine;
    const MomentumGrid grid(spec, opts);
    const double t = tt(rng) * spec.width;
    if (grid.box_length() / 2.0 < 8.0 * std::sqrt(rest_dispersion(spec, t))) continue;
    const auto s = evolve(init_packet_on_grid(spec, grid), t);
    CHECK(std::abs(s.discrete_norm() - 1.0) < 1e-8);
    const auto d = to_position_density(s);
    CHECK(std::abs(d.integral() - 1.0) < 1e-8);
    for (double r : d.rho) CHECK(r >= 0.0);
  }
}

TEST_CASE("density export") {
  const auto d = to_position_density(init_packet_on_grid(kRest, MomentumGrid(kRest, {1, 32, 6.0})));
  std::ostringstream csv;
  write_density_csv(csv, d);
  const std::string text = csv.str();
  CHECK(text.rfind("axis,x,rho\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 33);
  std::ostringstream dat;
  write_density_slice(dat, d, 2);
  const std::string slice = dat.str();
  CHECK(std::count(slice.begin(), slice.end(), '\n') == 32);
}
