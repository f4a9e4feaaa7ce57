#include "vbi/validation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "vbi/integrators.hpp"
#include "vbi/model.hpp"
#include "vbi/theory.hpp"
#include "vbi/vehicle.hpp"

namespace vbi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

BeamSystem sdof(double m, double c, double k) {
  BandedSymmetric M(1, 0), C(1, 0), K(1, 0);
  M.add(0, 0, m);
  C.add(0, 0, c);
  K.add(0, 0, k);
  return lumped_system(std::move(M), std::move(K), std::move(C));
}

ValidationCheck make_check(std::string name, double expected, double actual, double tol, bool relative) {
  ValidationCheck c{std::move(name), expected, actual, tol, relative, false};
  const double err = relative ? std::abs(actual - expected) / std::abs(expected) : std::abs(actual - expected);
  c.passed = std::isfinite(actual) && err <= tol;
  return c;
}

}  // namespace

double newmark_sdof_steady_amplitude(double m, double c, double k, double force, double omega, double dt) {
  const BeamSystem sys = sdof(m, c, k);
  const NewmarkIntegrator integ(sys, NewmarkParams{0.25, 0.5, dt});
  const double wn = std::sqrt(k / m);
  const double zeta = c / (2.0 * std::sqrt(k * m));
  // Run long enough for the homogeneous part to fall below 1e-8 of itself.
  const double settle = 18.4 / (zeta * wn);
  const double forcing_period = kTwoPi / omega;
  const auto steps = static_cast<std::size_t>(std::ceil((settle + 5.0 * forcing_period) / dt));
  const auto tail = static_cast<std::size_t>(std::ceil(5.0 * forcing_period / dt));
  std::pair<std::size_t, double> load{0, force};
  NewmarkState s = integ.initial_state({&load, 1});
  NewmarkState next = s;
  double peak = 0.0;
  for (std::size_t j = 1; j <= steps; ++j) {
    load.second = force * std::cos(omega * dt * static_cast<double>(j));
    integ.step(s, {&load, 1}, next);
    std::swap(s, next);
    if (j + tail > steps) peak = std::max(peak, std::abs(s.displacement(0)));
  }
  return peak;
}

double sdof_steady_amplitude(double m, double c, double k, double force, double omega) {
  return force / std::abs(std::complex<double>(k - m * omega * omega, c * omega));
}

double newmark_energy_drift(double m, double k, double dt, std::size_t steps) {
  const BeamSystem sys = sdof(m, 0.0, k);
  const NewmarkIntegrator integ(sys, NewmarkParams{0.25, 0.5, dt});
  NewmarkState s = integ.initial_state(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1), {});
  NewmarkState next = s;
  auto energy = [&](const NewmarkState& st) {
    return 0.5 * m * st.velocity(0) * st.velocity(0) + 0.5 * k * st.displacement(0) * st.displacement(0);
  };
  const double e0 = energy(s);
  double drift = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    integ.step(s, {}, next);
    std::swap(s, next);
    drift = std::max(drift, std::abs(energy(s) - e0) / e0);
  }
  return drift;
}

double vehicle_transfer_error(const std::string& preset, double frequency_hz) {
  const QuarterCarSpec spec = vehicle_preset(preset);
  const double w = kTwoPi * frequency_hz;
  const double period = 1.0 / frequency_hz;
  const double dt = period / 200.0;
  // Slowest modal decay sets the settling time.
  const VehicleMatrices mats = vehicle_matrices(spec);
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  const Eigen::Matrix2d Minv = mats.mass.inverse();
  A.topRightCorner<2, 2>().setIdentity();
  A.bottomLeftCorner<2, 2>() = -Minv * mats.stiffness;
  A.bottomRightCorner<2, 2>() = -Minv * mats.damping;
  const Eigen::Vector4cd ev = A.eigenvalues();
  double decay = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) decay = std::min(decay, -ev(i).real());
  const double settle = 20.0 / decay;
  const auto steps = static_cast<std::size_t>(std::ceil((settle + 5.0 * period) / dt)) + 1;
  std::vector<double> u(steps), v(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = dt * static_cast<double>(j);
    u[j] = std::sin(w * t);
    v[j] = w * std::cos(w * t);
  }
  const TimeSeriesResult r = vehicle_response(spec, u, v, dt);
  const auto tail = static_cast<std::size_t>(std::ceil(5.0 * period / dt));
  const Eigen::Vector2cd h = vehicle_transfer(spec, frequency_hz);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < 2; ++c) {
    double peak = 0.0;
    for (std::size_t j = steps - tail; j < steps; ++j) {
      peak = std::max(peak, std::abs(r.displacement(static_cast<Eigen::Index>(j), c)));
    }
    worst = std::max(worst, std::abs(peak - std::abs(h(c))) / std::abs(h(c)));
  }
  return worst;
}

std::vector<ValidationCheck> run_validation(const ValidationOptions& o) {
  std::vector<ValidationCheck> out;
  for (const ReferenceBridge& ref : reference_bridges()) {
    BridgeSpec spec = reference_bridge(ref.span, o.node_spacing);
    spec.mass_density *= o.density_factor;
    const BeamSystem sys = assemble_undamped(spec);
    const double f1 = modal_frequencies(sys, 1).front();
    std::ostringstream name;
    name << "bridge " << ref.span << " m f1 [Hz]";
    out.push_back(make_check(name.str(), ref.fundamental_hz, f1, ref.span == 15.0 ? 0.02 : 0.05, true));
  }
  {
    const double m = 1.0, k = kTwoPi * kTwoPi, c = 2.0 * 0.05 * std::sqrt(k * m);
    const double omega = 0.8 * kTwoPi;
    const double dt = 1.0 / 200.0;
    out.push_back(make_check("SDOF Newmark steady amplitude [m]", sdof_steady_amplitude(m, c, k, 1.0, omega),
                             newmark_sdof_steady_amplitude(m, c, k, 1.0, omega, dt), 0.01, true));
    out.push_back(make_check("SDOF Newmark energy drift", 0.0, newmark_energy_drift(m, k, dt, 10000), 1e-6, false));
  }
  out.push_back(make_check("truck lowest frequency [Hz]", 0.69, vehicle_frequencies(heavy_truck())[0], 0.01, false));
  out.push_back(make_check("truck RK vs transfer function", 0.0, vehicle_transfer_error("truck", 0.69), 0.005, false));
  {
    double worst = 0.0;
    const std::size_t n = 20;
    for (std::size_t i = 0; i < n; ++i) {
      // Half-step offset in log space keeps the grid off gamma = 1.
      const double g = std::pow(10.0, -3.0 + 6.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
      const TheoryConfig cfg{1e4, 10.0, g, 1.0, 1.0};
      const double c = coupled_amplitude(cfg), x = exact_oracle(cfg);
      worst = std::max(worst, std::abs(c - x) / x);
    }
    out.push_back(make_check("closed form vs 2x2 solve (max rel.)", 0.0, worst, 0.01, false));
  }
  return out;
}

void print_validation(std::ostream& os, const std::vector<ValidationCheck>& checks) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::left << std::setw(40) << "check" << std::setw(14) << "expected" << std::setw(14) << "actual"
     << std::setw(14) << "tolerance" << "verdict\n";
  for (const ValidationCheck& c : checks) {
    std::ostringstream tol;
    tol << std::setprecision(3) << (c.relative ? c.tolerance * 100.0 : c.tolerance) << (c.relative ? "%" : "");
    os << std::left << std::setw(40) << c.name << std::setw(14) << std::setprecision(6) << c.expected
       << std::setw(14) << c.actual << std::setw(14) << tol.str() << (c.passed ? "PASS" : "FAIL") << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace vbi
