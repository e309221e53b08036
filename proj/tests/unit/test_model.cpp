#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "erlab/model.hpp"
#include "test_support.hpp"

using namespace erlab;

TEST_CASE("kinematics of the worked packet") {
  const auto k = derive_kinematics({1.0, 5.0, {0.0, 0.0, std::sqrt(3.0)}});
  CHECK(k.energy == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(k.speed == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
  CHECK(k.gamma == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("kinematics at rest") {
  const auto k = derive_kinematics({1.0, 5.0, {0.0, 0.0, 0.0}});
  CHECK(k.energy == 1.0);
  CHECK(k.speed == 0.0);
  CHECK(k.gamma == 1.0);
}

TEST_CASE("compton wavelength and sigma m") {
  const auto k = derive_kinematics({2.0, 5.0, {0.0, 0.0, 0.0}});
  CHECK(k.compton_wavelength == 0.5);
  CHECK(k.sigma_m_product == 10.0);
}

TEST_CASE("invalid packets are rejected with the field name") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto field_of = [](const PacketSpec& s) {
    try {
      validate(s);
    } catch (const InvalidParameter& e) {
      return e.field();
    }
    return std::string();
  };
  CHECK(field_of({0.0, 5.0, {}}) == "m");
  CHECK(field_of({-1.0, 5.0, {}}) == "m");
  CHECK(field_of({1.0, -1.0, {}}) == "sigma");
  CHECK(field_of({1.0, 0.0, {}}) == "sigma");
  CHECK(field_of({1.0, 5.0, {nan, 0.0, 0.0}}) == "p");
  CHECK(field_of({std::numeric_limits<double>::infinity(), 5.0, {}}) == "m");
  CHECK_THROWS_AS(derive_kinematics({1.0, nan, {}}), InvalidParameter);
}

TEST_CASE("validity bands in sigma m") {
  auto v = check_validity({1.0, 5.0, {}});
  CHECK(v.level == Validity::valid);
  CHECK(v.sigma_m == 5.0);
  v = check_validity({1.0, 2.0, {}});
  CHECK(v.level == Validity::marginal);
  CHECK(v.sigma_m == 2.0);
  v = check_validity({1.0, 0.5, {}});
  CHECK(v.level == Validity::invalid);
  CHECK(v.sigma_m == 0.5);
  // Boundaries: exactly 3 is marginal, exactly 1 is invalid.
  CHECK(check_validity({1.0, 3.0, {}}).level == Validity::marginal);
  CHECK(check_validity({1.0, 1.0, {}}).level == Validity::invalid);
}

TEST_CASE("property: gamma m equals sqrt(p^2 + m^2) within 4 ulp") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto spec = testing::random_spec(rng);
    const auto k = derive_kinematics(spec);
    const double direct = std::sqrt(dot(spec.momentum, spec.momentum) + spec.mass * spec.mass);
    CHECK(testing::ulp_distance(k.gamma * spec.mass, direct) <= 4);
    CHECK(k.gamma >= 1.0);
    CHECK(k.energy >= spec.mass);
  }
}

TEST_CASE("property: v < 1 strictly for finite momenta") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> expo(-6.0, 300.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = std::pow(10.0, expo(rng));
    const auto k = derive_kinematics({1.0, 5.0, {0.0, p, 0.0}});
    CHECK(k.speed < 1.0);
    CHECK(k.speed >= 0.0);
  }
}

TEST_CASE("property: kinematics depend on |p| only") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto spec = testing::random_spec(rng);
    // Random rotation from a normalised quaternion.
    double q[4] = {g(rng), g(rng), g(rng), g(rng)};
    const double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    for (double& c : q) c /= qn;
    const auto [w, x, y, z] = q;
    const double r[3][3] = {{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
                            {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
                            {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
    PacketSpec rotated = spec;
    for (int a = 0; a < 3; ++a)
      rotated.momentum[a] = r[a][0] * spec.momentum[0] + r[a][1] * spec.momentum[1] +
                            r[a][2] * spec.momentum[2];
    const auto k0 = derive_kinematics(spec);
    const auto k1 = derive_kinematics(rotated);
    CHECK(testing::rel_diff(k1.energy, k0.energy) < 1e-14);
    CHECK(testing::rel_diff(k1.gamma, k0.gamma) < 1e-14);
    CHECK(std::abs(k1.speed - k0.speed) < 1e-14);
  }
}
