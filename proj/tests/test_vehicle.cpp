#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vbi/errors.hpp"
#include "vbi/vehicle.hpp"

using namespace vbi;

TEST_CASE("presets") {
  CHECK(vehicle_frequencies(heavy_truck())[0] == doctest::Approx(0.69).epsilon(0.01 / 0.69));
  CHECK(vehicle_preset("truck").sprung_mass == heavy_truck().sprung_mass);
  CHECK(vehicle_preset("commercial").sprung_mass == commercial_vehicle().sprung_mass);
  try {
    vehicle_preset("bicycle");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const auto& n : vehicle_preset_names()) CHECK(msg.find(n) != std::string::npos);
  }
  QuarterCarSpec bad = commercial_vehicle();
  bad.tire_stiffness = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = commercial_vehicle();
  bad.sprung_mass = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(bad.validate_allow_massless(), ConfigError);  // only fully massless is allowed
  bad.unsprung_mass = 0.0;
  CHECK_NOTHROW(bad.validate_allow_massless());
}

TEST_CASE("scaling keeps frequencies") {
  const QuarterCarSpec t = heavy_truck();
  const QuarterCarSpec s = t.scaled(10.0);
  CHECK(s.total_mass() == doctest::Approx(10.0 * t.total_mass()));
  CHECK(vehicle_frequencies(s)[0] == doctest::Approx(vehicle_frequencies(t)[0]));
  CHECK(vehicle_frequencies(s)[1] == doctest::Approx(vehicle_frequencies(t)[1]));
}

TEST_CASE("rigid tire limit reduces to the sprung SDOF") {
  QuarterCarSpec q = commercial_vehicle();
  q.tire_stiffness *= 1e6;
  const double f = vehicle_frequencies(q)[0];
  const double sdof = std::sqrt(q.suspension_stiffness / q.sprung_mass) / (2 * std::numbers::pi);
  CHECK(f == doctest::Approx(sdof).epsilon(1e-4));
}

TEST_CASE("transmissibility limits") {
  for (const QuarterCarSpec& q : {commercial_vehicle(), heavy_truck()}) {
    const Eigen::Vector2cd lo = vehicle_transfer(q, 1e-4);
    CHECK(std::abs(lo(0)) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(lo(1)) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(vehicle_transfer(q, 200.0)(0)) < 1e-3);
  }
}

TEST_CASE("tire force") {
  const QuarterCarSpec q = commercial_vehicle();
  const double W = -q.total_mass() * 9.81;
  SUBCASE("compression") {
    const double yu = -1e-4, wv = 0.0;
    const ContactForce c = interaction_force(q, yu, 0.0, wv, 0.0);
    CHECK(c.tire_force == doctest::Approx(q.tire_stiffness * 1e-4));
    CHECK(c.total_reaction == doctest::Approx(W - q.tire_stiffness * 1e-4));
    CHECK_FALSE(c.contact_lost);
  }
  SUBCASE("commercial tire under 1 cm compression") {
    CHECK(interaction_force(q, -0.01, 0.0, 0.0, 0.0).tire_force == doctest::Approx(30.43));
    CHECK(interaction_force(q, 0.0, 0.0, 0.01, 0.0).tire_force == doctest::Approx(30.43));
  }
  SUBCASE("damping contributes") {
    QuarterCarSpec d = q;
    d.tire_damping = 250.0;
    const ContactForce c = interaction_force(d, 0.0, -0.01, 0.0, 0.0);
    CHECK(c.tire_force == doctest::Approx(2.5));
  }
  SUBCASE("separation clamps to zero") {
    const ContactForce c = interaction_force(q, 1e-3, 0.0, 0.0, 0.0);
    CHECK(c.tire_force == 0.0);
    CHECK(c.contact_lost);
    CHECK(c.total_reaction == doctest::Approx(W));
  }
}

TEST_CASE("vehicle starts at rest on the contact") {
  const TwoDofState s = vehicle_initial_state(0.002, -0.1);
  CHECK(s.displacement(0) == 0.002);
  CHECK(s.displacement(1) == 0.002);
  CHECK(s.velocity(1) == -0.1);
  const std::vector<double> wv(200, 0.002), rate(200, 0.0);
  const TimeSeriesResult r = vehicle_response(heavy_truck(), wv, rate, 0.01);
  CHECK((r.displacement.array() - 0.002).abs().maxCoeff() < 1e-12);
}

TEST_CASE("undamped free vibration conserves energy") {
  QuarterCarSpec q = heavy_truck();
  q.suspension_damping = q.tire_damping = 0.0;
  const VehicleMatrices m = vehicle_matrices(q);
  const std::vector<double> zero(2001, 0.0);
  TwoDofState init;
  init.displacement << 0.01, 0.0;
  RkOptions o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-14;
  const TimeSeriesResult r = rk_integrate(vehicle_system(q), zero, zero, 0.005, o, init);
  auto energy = [&](Eigen::Index i) {
    const Eigen::Vector2d x = r.displacement.row(i).transpose(), v = r.velocity.row(i).transpose();
    return 0.5 * v.dot(m.mass * v) + 0.5 * x.dot(m.stiffness * x);
  };
  const double e0 = energy(0);
  double drift = 0.0;
  for (Eigen::Index i = 0; i < r.displacement.rows(); ++i) drift = std::max(drift, std::abs(energy(i) - e0) / e0);
  CHECK(drift < 1e-6);
}
