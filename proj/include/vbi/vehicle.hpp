#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vbi/integrators.hpp"

namespace vbi {

/// Quarter-car parameters. DOF order is (sprung, unsprung).
struct QuarterCarSpec {
  std::string name = "custom";
  double sprung_mass = 0.0;           // kg
  double unsprung_mass = 0.0;         // kg
  double suspension_stiffness = 0.0;  // N/m
  double suspension_damping = 0.0;    // N s/m
  double tire_stiffness = 0.0;        // N/m
  double tire_damping = 0.0;          // N s/m
  double speed = 10.0;                // m/s

  double total_mass() const { return sprung_mass + unsprung_mass; }

  /// Every mass, stiffness and damping multiplied by `factor`; frequencies unchanged.
  QuarterCarSpec scaled(double factor) const;

  void validate() const;
  /// Like validate() but allows zero masses (massless probe used in tests).
  void validate_allow_massless() const;
};

/// Commercial passenger vehicle (soft suspension, heavy damping).
QuarterCarSpec commercial_vehicle();
/// Heavy truck, lowest natural frequency about 0.69 Hz.
QuarterCarSpec heavy_truck();

/// Names accepted by vehicle_preset().
const std::vector<std::string>& vehicle_preset_names();
/// Throws ConfigError listing the known presets for an unknown name.
QuarterCarSpec vehicle_preset(const std::string& name);

struct VehicleMatrices {
  Eigen::Matrix2d mass;
  Eigen::Matrix2d damping;
  Eigen::Matrix2d stiffness;
};

VehicleMatrices vehicle_matrices(const QuarterCarSpec& spec);

/// Undamped natural frequencies in Hz, ascending.
std::array<double, 2> vehicle_frequencies(const QuarterCarSpec& spec);

/// Base-excited form: contact elevation wv enters the unsprung equation as
/// k_t wv + c_t wv'.
TwoDofSystem vehicle_system(const QuarterCarSpec& spec);

/// Steady-state complex response (sprung, unsprung) to a unit harmonic
/// contact displacement at `frequency_hz` (wv = e^{i w t}, wv' = i w wv).
Eigen::Vector2cd vehicle_transfer(const QuarterCarSpec& spec, double frequency_hz);

/// Integrates the vehicle over a contact history. The vehicle starts resting on
/// the contact point: both displacements equal wv[0] and both velocities wv'[0].
TimeSeriesResult vehicle_response(const QuarterCarSpec& spec, std::span<const double> wv,
                                  std::span<const double> wv_rate, double dt,
                                  const RkOptions& options = {});

TwoDofState vehicle_initial_state(double wv0, double wv_rate0);

struct ContactForce {
  double tire_force = 0.0;      // N, dynamic tire compression, clamped >= 0
  double total_reaction = 0.0;  // N, force on the bridge (negative = downward)
  bool contact_lost = false;    // the raw tire force was negative
};

ContactForce interaction_force(const QuarterCarSpec& spec, double unsprung_disp,
                               double unsprung_vel, double wv, double wv_rate);

}  // namespace vbi
