#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vbi/analysis.hpp"
#include "vbi/simulators.hpp"
#include "vbi/theory.hpp"

namespace vbi {

struct BridgeSettings {
  double span = 15.0;
  double node_spacing = 0.1;
  double damping_ratio = 0.02;
  double elastic_modulus = kSteelModulus;
  double mass_density = kSteelDensity;
  /// Unset: use the reference section for the span (must be a reference span).
  std::optional<BoxSection> section;
};

struct VehicleSettings {
  std::string preset = "commercial";
  double scale = 1.0;
  double speed = 10.0;
  std::optional<double> sprung_mass, unsprung_mass, suspension_stiffness, suspension_damping,
      tire_stiffness, tire_damping;
};

struct SimulationSettings {
  SimulationMode mode = SimulationMode::coupled;
  bool strict_paper_mode = false;
  double convergence_threshold = 1.5e-12;
  int max_iterations_per_step = 50;
  double rk_rel_tol = RkOptions{}.rel_tol;
  double rk_abs_tol = RkOptions{}.abs_tol;
};

struct CompareSettings {
  std::vector<double> spans{15.0, 30.0, 50.0, 100.0, 200.0, 500.0};
  std::vector<int> n_vehicles{0, 10, 20, 50};
  std::vector<std::string> vehicles{"commercial", "truck"};
  double node_spacing = 0.1;
  double cutoff_hz = 25.0;
};

/// Everything a command can be configured with. Sections mirror the INI file.
struct AppConfig {
  BridgeSettings bridge;
  VehicleSettings vehicle;
  TrafficParams traffic;
  RoughnessParams roughness;
  SimulationSettings simulation;
  CompareSettings compare;
  SweepOptions theory;
  BenchmarkOptions benchmark;

  void validate() const;
};

/// INI text; unknown sections or keys are rejected so typos do not pass silently.
AppConfig parse_config(std::istream& is);
AppConfig load_config(const std::string& path);
/// Writes every key, so the output re-creates `config` exactly.
void write_config(std::ostream& os, const AppConfig& config);

/// Applies one seed to traffic (seed) and roughness (seed + 1).
void apply_seed(AppConfig& config, std::uint64_t seed);

struct ScenarioOverrides {
  std::optional<std::string> preset;
  std::optional<double> span;
  std::optional<double> node_spacing;
  std::optional<int> n_vehicles;
};

QuarterCarSpec build_vehicle(const VehicleSettings& settings, const std::optional<std::string>& preset = {});

/// Scenario from the config with optional grid overrides.
ScenarioConfig build_scenario(const AppConfig& config, const ScenarioOverrides& overrides = {});

}  // namespace vbi
