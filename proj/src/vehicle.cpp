#include "vbi/vehicle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "vbi/errors.hpp"
#include "vbi/excitation.hpp"

namespace vbi {

QuarterCarSpec QuarterCarSpec::scaled(double factor) const {
  if (!(factor > 0.0)) throw ConfigError("vehicle: scale factor must be positive");
  QuarterCarSpec s = *this;
  s.sprung_mass *= factor;
  s.unsprung_mass *= factor;
  s.suspension_stiffness *= factor;
  s.suspension_damping *= factor;
  s.tire_stiffness *= factor;
  s.tire_damping *= factor;
  return s;
}

void QuarterCarSpec::validate_allow_massless() const {
  if (sprung_mass < 0.0 || unsprung_mass < 0.0) throw ConfigError("vehicle: masses must be >= 0");
  if (suspension_stiffness < 0.0 || tire_stiffness < 0.0) {
    throw ConfigError("vehicle: stiffnesses must be >= 0");
  }
  if (suspension_damping < 0.0 || tire_damping < 0.0) {
    throw ConfigError("vehicle: dampings must be >= 0");
  }
  if (!(speed > 0.0)) throw ConfigError("vehicle: speed must be positive");
  if (total_mass() > 0.0) validate();
}

void QuarterCarSpec::validate() const {
  if (!(sprung_mass > 0.0) || !(unsprung_mass > 0.0)) throw ConfigError("vehicle: masses must be positive");
  if (!(suspension_stiffness > 0.0) || !(tire_stiffness > 0.0)) {
    throw ConfigError("vehicle: stiffnesses must be positive");
  }
  if (suspension_damping < 0.0 || tire_damping < 0.0) {
    throw ConfigError("vehicle: dampings must be >= 0");
  }
  if (!(speed > 0.0)) throw ConfigError("vehicle: speed must be positive");
}

QuarterCarSpec commercial_vehicle() {
  QuarterCarSpec s;
  s.name = "commercial";
  s.unsprung_mass = 69.9;
  s.sprung_mass = 466.0;
  s.tire_damping = 0.0;
  s.suspension_damping = 2796.0;
  s.tire_stiffness = 3043.0;
  s.suspension_stiffness = 290.3;
  return s;
}

QuarterCarSpec heavy_truck() {
  QuarterCarSpec s;
  s.name = "truck";
  s.unsprung_mass = 700.0;
  s.sprung_mass = 17300.0;
  s.tire_damping = 0.0;
  s.suspension_damping = 1.0e4;
  s.tire_stiffness = 1.75e6;
  s.suspension_stiffness = 4.0e5;
  return s;
}

const std::vector<std::string>& vehicle_preset_names() {
  static const std::vector<std::string> names = {"commercial", "truck"};
  return names;
}

QuarterCarSpec vehicle_preset(const std::string& name) {
  if (name == "commercial") return commercial_vehicle();
  if (name == "truck") return heavy_truck();
  std::ostringstream msg;
  msg << "unknown vehicle preset '" << name << "' (known presets:";
  for (const auto& n : vehicle_preset_names()) msg << ' ' << n;
  msg << ')';
  throw ConfigError(msg.str());
}

VehicleMatrices vehicle_matrices(const QuarterCarSpec& s) {
  s.validate_allow_massless();
  VehicleMatrices m;
  m.mass << s.sprung_mass, 0.0, 0.0, s.unsprung_mass;
  m.stiffness << s.suspension_stiffness, -s.suspension_stiffness, -s.suspension_stiffness,
      s.suspension_stiffness + s.tire_stiffness;
  m.damping << s.suspension_damping, -s.suspension_damping, -s.suspension_damping,
      s.suspension_damping + s.tire_damping;
  return m;
}

std::array<double, 2> vehicle_frequencies(const QuarterCarSpec& s) {
  s.validate();
  // det(K - lambda M) = 0 with lambda = w^2.
  const double a = s.sprung_mass * s.unsprung_mass;
  const double b = -(s.sprung_mass * (s.suspension_stiffness + s.tire_stiffness) +
                     s.unsprung_mass * s.suspension_stiffness);
  const double c = s.suspension_stiffness * s.tire_stiffness;
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  // Numerically stable root pair.
  const double q = -0.5 * (b - disc);
  const double l_hi = q / a;
  const double l_lo = c / q;
  const double two_pi = 2.0 * std::numbers::pi;
  return {std::sqrt(l_lo) / two_pi, std::sqrt(l_hi) / two_pi};
}

TwoDofSystem vehicle_system(const QuarterCarSpec& spec) {
  const VehicleMatrices m = vehicle_matrices(spec);
  TwoDofSystem sys;
  sys.mass = m.mass;
  sys.damping = m.damping;
  sys.stiffness = m.stiffness;
  sys.input_gain = {0.0, spec.tire_stiffness};
  sys.rate_gain = {0.0, spec.tire_damping};
  return sys;
}

Eigen::Vector2cd vehicle_transfer(const QuarterCarSpec& spec, double frequency_hz) {
  const VehicleMatrices m = vehicle_matrices(spec);
  const double w = 2.0 * std::numbers::pi * frequency_hz;
  const std::complex<double> iw(0.0, w);
  Eigen::Matrix2cd D = m.stiffness.cast<std::complex<double>>() +
                       iw * m.damping.cast<std::complex<double>>() -
                       (w * w) * m.mass.cast<std::complex<double>>();
  Eigen::Vector2cd rhs(0.0, spec.tire_stiffness + iw * spec.tire_damping);
  return D.partialPivLu().solve(rhs);
}

TwoDofState vehicle_initial_state(double wv0, double wv_rate0) {
  TwoDofState s;
  s.displacement = {wv0, wv0};
  s.velocity = {wv_rate0, wv_rate0};
  return s;
}

TimeSeriesResult vehicle_response(const QuarterCarSpec& spec, std::span<const double> wv,
                                  std::span<const double> wv_rate, double dt,
                                  const RkOptions& options) {
  if (wv.size() != wv_rate.size()) throw ConfigError("vehicle_response: input lengths differ");
  if (wv.empty()) throw ConfigError("vehicle_response: empty input");
  if (!(dt > 0.0)) throw ConfigError("vehicle_response: dt must be positive");
  spec.validate_allow_massless();
  TimeSeriesResult out;
  if (spec.total_mass() == 0.0) {
    // Massless probe: both points ride on the contact.
    const auto T = static_cast<Eigen::Index>(wv.size());
    out.time_step = dt;
    out.displacement.resize(T, 2);
    out.velocity.resize(T, 2);
    out.acceleration = Eigen::MatrixXd::Zero(T, 2);
    for (Eigen::Index k = 0; k < T; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      out.displacement.row(k).setConstant(wv[kk]);
      out.velocity.row(k).setConstant(wv_rate[kk]);
    }
  } else {
    out = rk_integrate(vehicle_system(spec), wv, wv_rate, dt, options,
                       vehicle_initial_state(wv[0], wv_rate[0]));
  }
  out.dof_labels = {"sprung", "unsprung"};
  return out;
}

ContactForce interaction_force(const QuarterCarSpec& spec, double unsprung_disp,
                               double unsprung_vel, double wv, double wv_rate) {
  ContactForce c;
  const double raw = -spec.tire_stiffness * (unsprung_disp - wv) -
                     spec.tire_damping * (unsprung_vel - wv_rate);
  c.contact_lost = raw < 0.0;
  c.tire_force = raw > 0.0 ? raw : 0.0;
  c.total_reaction = -spec.total_mass() * kGravity - c.tire_force;
  return c;
}

}  // namespace vbi
