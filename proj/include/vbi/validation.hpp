#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vbi {

struct ValidationCheck {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;  // absolute unless `relative`
  bool relative = false;
  bool passed = false;
};

struct ValidationOptions {
  double node_spacing = 0.1;
  /// Multiplies the steel density; anything but 1 should break the frequency checks.
  double density_factor = 1.0;
};

/// Damped SDOF under F cos(w t), integrated with the beam Newmark integrator on
/// a one-DOF lumped system; returns the peak |u| over the last few forcing
/// periods after transients have decayed.
double newmark_sdof_steady_amplitude(double mass, double damping, double stiffness, double force,
                                     double omega, double dt);
double sdof_steady_amplitude(double mass, double damping, double stiffness, double force, double omega);

/// Largest relative deviation of total energy from its initial value for an
/// undamped SDOF in free vibration over `steps` Newmark steps.
double newmark_energy_drift(double mass, double stiffness, double dt, std::size_t steps);

/// Peak sprung/unsprung response to a unit harmonic contact displacement from
/// the adaptive RK path, compared with the complex transfer function. Returns
/// the larger relative error of the two DOFs.
double vehicle_transfer_error(const std::string& preset, double frequency_hz);

std::vector<ValidationCheck> run_validation(const ValidationOptions& options = {});

/// Table: check / expected / actual / tolerance / verdict.
void print_validation(std::ostream& os, const std::vector<ValidationCheck>& checks);

}  // namespace vbi
