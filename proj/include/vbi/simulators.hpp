#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vbi/excitation.hpp"
#include "vbi/integrators.hpp"
#include "vbi/model.hpp"
#include "vbi/vehicle.hpp"

namespace vbi {

struct TrafficParams {
  int n_vehicles = 0;
  double density = 0.05;
  std::uint64_t seed = 1;
};

struct RoughnessParams {
  bool enabled = true;
  RoughnessOptions options;
  std::uint64_t seed = 2;
};

enum class SimulationMode { coupled, decoupled };

std::string to_string(SimulationMode mode);
SimulationMode parse_simulation_mode(const std::string& text);

struct ScenarioConfig {
  BridgeSpec bridge;
  QuarterCarSpec vehicle = commercial_vehicle();
  TrafficParams traffic;
  RoughnessParams roughness;
  double convergence_threshold = 1.5e-12;  // m
  int max_iterations_per_step = 50;
  SimulationMode mode = SimulationMode::coupled;
  bool strict_paper_mode = false;
  NewmarkParams newmark;  // time_step is overwritten by node_spacing / speed
  RkOptions rk;
  /// Testing aid: the coupled driver applies no reaction to the bridge.
  bool zero_interaction = false;
  /// Diagnostic: when false the bridge receives only the dynamic tire force,
  /// without the vehicle's static weight.
  bool apply_static_weight = true;

  double time_step() const { return bridge.node_spacing / vehicle.speed; }
  void validate() const;
};

/// Everything a run needs, built once so excitation generation and assembly
/// stay outside the timed region.
struct Scenario {
  ScenarioConfig config;
  BeamSystem bridge;
  RoughnessProfile roughness;
  TrafficLoadMatrix traffic;
  NewmarkParams newmark;
  std::vector<std::size_t> recorded_nodes;  // midspan first
};

Scenario prepare_scenario(const ScenarioConfig& config);

struct ContactState {
  std::size_t node = 0;
  double bridge_displacement = 0.0;  // r
  double bridge_velocity = 0.0;
  double wv = 0.0;                   // m
  double wv_rate = 0.0;              // m/s
  double tire_force = 0.0;           // N
  double total_reaction = 0.0;       // N
  bool contact_lost = false;
};

struct SimulationOutput {
  SimulationMode mode = SimulationMode::decoupled;
  bool strict_paper_mode = false;
  TimeSeriesResult bridge_result;   // recorded nodes, midspan first
  TimeSeriesResult vehicle_result;  // sprung, unsprung
  std::vector<ContactState> contact_trace;
  std::vector<int> iteration_counts;  // coupled only; 0 at step 0
  std::size_t dof_count = 0;
  double wall_time = 0.0;  // s

  double median_iterations() const;
  int max_iterations() const;
};

/// Conventional iterative coupling: per step the vehicle is integrated on the
/// current bridge contact motion, its reaction is superposed on the traffic
/// row at the contact node, and the step is re-solved until the contact
/// displacement changes by less than the threshold.
SimulationOutput simulate_coupled(const Scenario& scenario);

/// One bridge solve under traffic only; the vehicle rides on roughness plus
/// bridge motion with no feedback.
SimulationOutput simulate_decoupled(const Scenario& scenario);

SimulationOutput simulate(const Scenario& scenario);

/// Per-step contact trace as CSV.
void write_contact_csv(std::ostream& os, const SimulationOutput& output, double time_step);

}  // namespace vbi
