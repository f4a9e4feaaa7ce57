#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "vbi/errors.hpp"
#include "vbi/integrators.hpp"
#include "vbi/validation.hpp"
#include "vbi/vehicle.hpp"

using namespace vbi;

namespace {

BeamSystem sdof(double m, double c, double k) {
  BandedSymmetric M(1, 0), C(1, 0), K(1, 0);
  M.add(0, 0, m);
  C.add(0, 0, c);
  K.add(0, 0, k);
  return lumped_system(M, K, C);
}

using Rows = std::vector<std::vector<std::pair<std::size_t, double>>>;

Rows harmonic_rows(double F, double omega, double dt, std::size_t steps, std::size_t node = 0) {
  Rows rows(steps);
  for (std::size_t i = 0; i < steps; ++i) rows[i] = {{node, F * std::cos(omega * dt * static_cast<double>(i))}};
  return rows;
}

}  // namespace

TEST_CASE("newmark parameter validation") {
  NewmarkParams p;
  p.time_step = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = NewmarkParams{};
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("damped SDOF steady amplitude") {
  const double m = 1.0, k = std::pow(2 * std::numbers::pi, 2), c = 2 * 0.05 * std::sqrt(k * m);
  const double w = 0.8 * std::sqrt(k / m);
  const double num = newmark_sdof_steady_amplitude(m, c, k, 1.0, w, 1.0 / 200.0);
  const double ref = sdof_steady_amplitude(m, c, k, 1.0, w);
  CHECK(std::abs(num - ref) / ref < 0.01);
}

TEST_CASE("undamped free vibration conserves energy") {
  CHECK(newmark_energy_drift(2.0, 50.0, 0.01, 10000) < 1e-6);
  CHECK(newmark_energy_drift(1.0, 1e6, 0.1, 1000) < 1e-6);  // dt far above the period
}

TEST_CASE("average acceleration amplification matrix has unit spectral radius") {
  for (double wdt : {0.01, 0.5, 2.0, 50.0, 1e4}) {
    const double b = 0.25, g = 0.5;
    // Undamped recurrence on (u, v dt) derived from the Newmark equations.
    const double d = 1.0 + b * wdt * wdt;
    Eigen::Matrix3d A;
    A << 1.0 / d, 1.0 / d, (0.5 - b) / d,  // displacement
        -g * wdt * wdt / d, 1.0 - g * wdt * wdt / d, (1.0 - g) - g * (0.5 - b) * wdt * wdt / d,
        -wdt * wdt / d, -wdt * wdt / d, -(0.5 - b) * wdt * wdt / d;
    const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
    CAPTURE(wdt);
    CHECK(rho <= 1.0 + 1e-9);
  }
  SUBCASE("numerically via a stiff SDOF") {
    const BeamSystem s = sdof(1.0, 0.0, 1e8);
    NewmarkParams p;
    p.time_step = 0.05;
    const NewmarkIntegrator integ(s, p);
    const Rows rows(400, std::vector<std::pair<std::size_t, double>>{});
    Eigen::VectorXd u0(1), v0(1);
    u0 << 1.0;
    v0 << 0.0;
    const NewmarkState init = integ.initial_state(u0, v0, rows[0]);
    const TimeSeriesResult r = newmark_solve(integ, rows, {}, &init);
    CHECK(r.displacement.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
  }
}

TEST_CASE("beam response is linear in the load") {
  const BeamSystem s = assemble_beam(reference_bridge(15.0, 0.5));
  NewmarkParams p;
  p.time_step = 0.01;
  const NewmarkIntegrator integ(s, p);
  const Rows a = harmonic_rows(1e4, 20.0, p.time_step, 200, 10);
  const Rows b = harmonic_rows(-3e3, 47.0, p.time_step, 200, 22);
  Rows sum(200), twice(200);
  for (std::size_t i = 0; i < 200; ++i) {
    sum[i] = a[i];
    sum[i].insert(sum[i].end(), b[i].begin(), b[i].end());
    twice[i] = {{10, 2.0 * a[i][0].second}};
  }
  const TimeSeriesResult ra = newmark_solve(integ, a), rb = newmark_solve(integ, b), rs = newmark_solve(integ, sum);
  const TimeSeriesResult r2 = newmark_solve(integ, twice);
  const double scale = rs.displacement.cwiseAbs().maxCoeff();
  CHECK((rs.displacement - ra.displacement - rb.displacement).cwiseAbs().maxCoeff() / scale < 1e-10);
  CHECK((r2.displacement - 2.0 * ra.displacement).cwiseAbs().maxCoeff() / scale < 1e-10);

  SUBCASE("zero load gives zero response") {
    const Rows zero(50, std::vector<std::pair<std::size_t, double>>{});
    CHECK(newmark_solve(integ, zero).displacement.isZero(0.0));
  }
  SUBCASE("support loads are ignored") {
    const Rows support(20, std::vector<std::pair<std::size_t, double>>{{0, 1e6}, {30, -1e6}});
    CHECK(newmark_solve(integ, support).displacement.isZero(0.0));
  }
}

TEST_CASE("stepper resolve under an unchanged row is bit-identical") {
  const BeamSystem s = assemble_beam(reference_bridge(15.0, 0.5));
  NewmarkParams p;
  p.time_step = 0.01;
  const NewmarkIntegrator integ(s, p);
  const Rows rows = harmonic_rows(5e3, 30.0, p.time_step, 60, 15);
  const TimeSeriesResult ref = newmark_solve(integ, rows, {15});

  NewmarkStepper st(integ, integ.initial_state(rows[0]));
  CHECK_THROWS_AS(st.resolve(rows[0]), ConfigError);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    st.advance(rows[i]);
    const double u1 = integ.node_displacement(st.current(), 15);
    const std::vector<std::pair<std::size_t, double>> other{{15, 1e7}};
    st.resolve(other);
    st.resolve(rows[i]);
    CHECK(integ.node_displacement(st.current(), 15) == u1);
    CHECK(u1 == ref.displacement(static_cast<Eigen::Index>(i), 0));
  }
}

TEST_CASE("time series csv header") {
  TimeSeriesResult r;
  r.time_step = 0.5;
  r.dof_labels = {"n3"};
  r.displacement = Eigen::MatrixXd::Constant(2, 1, 1.0);
  r.velocity = r.acceleration = Eigen::MatrixXd::Zero(2, 1);
  std::ostringstream os;
  write_time_series_csv(os, r);
  CHECK(os.str().find("step,time,n3_u,n3_v,n3_a") != std::string::npos);
  CHECK(r.column("n3") == 0);
  CHECK_THROWS_AS(r.column("n4"), ConfigError);
}

TEST_CASE("dormand-prince on an exponential") {
  const DormandPrince rk;
  DormandPrince::Vec y{1.0, 0.0, 0.0, 0.0};
  double h = 0.0;
  rk.integrate([](double, const DormandPrince::Vec& x, DormandPrince::Vec& d) {
    d = {-x[0], 0.0, 0.0, 0.0};
  }, 0.0, 2.0, y, h);
  CHECK(y[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
}

TEST_CASE("RK quarter car matches the transfer function") {
  for (double f : {0.3, 1.0, 3.0}) {
    CAPTURE(f);
    CHECK(vehicle_transfer_error("truck", f) < 0.005);
    CHECK(vehicle_transfer_error("commercial", f) < 0.005);
  }
}

TEST_CASE("RK error shrinks with the tolerance") {
  const QuarterCarSpec spec = heavy_truck();
  const double dt = 0.01, w = 2 * std::numbers::pi * 1.5;
  std::vector<double> u(400), v(400);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = dt * static_cast<double>(i);
    u[i] = 0.01 * std::sin(w * t);
    v[i] = 0.01 * w * std::cos(w * t);
  }
  RkOptions tight;
  tight.rel_tol = 1e-12;
  tight.abs_tol = 1e-14;
  const TimeSeriesResult ref = rk_integrate(vehicle_system(spec), u, v, dt, tight);
  auto err = [&](double tol) {
    RkOptions o;
    o.rel_tol = tol;
    o.abs_tol = tol * 1e-2;
    return (rk_integrate(vehicle_system(spec), u, v, dt, o).displacement - ref.displacement).cwiseAbs().maxCoeff();
  };
  const double e1 = err(1e-5), e2 = err(1e-7);
  CHECK(e2 < e1);
  CHECK(e1 < 1e-4 * ref.displacement.cwiseAbs().maxCoeff());

  SUBCASE("zero input stays at rest") {
    const std::vector<double> z(100, 0.0);
    CHECK(rk_integrate(vehicle_system(spec), z, z, dt).displacement.isZero(0.0));
  }
}
