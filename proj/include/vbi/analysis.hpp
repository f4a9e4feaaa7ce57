#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vbi/simulators.hpp"

namespace vbi {

/// Mean of squared differences after dividing both signals by `normalization`.
double mse_time(std::span<const double> reference, std::span<const double> candidate,
                double normalization);

struct Spectrum {
  std::vector<double> frequency;  // Hz
  std::vector<double> magnitude;  // same unit as the signal
};

/// One-sided amplitude spectrum by direct DFT (rectangular window): bin 0 is
/// scaled by 1/N, the others by 2/N. Bins above `cutoff_hz` are dropped.
Spectrum amplitude_spectrum(std::span<const double> signal, double dt, double cutoff_hz);

/// MSE of the magnitude spectra of the two normalized signals over bins up to
/// `cutoff_hz`.
double mse_freq(std::span<const double> reference, std::span<const double> candidate,
                double normalization, double dt, double cutoff_hz = 25.0);

enum class ResponseKind { bridge, vehicle };

std::string to_string(ResponseKind kind);

struct ComparisonReport {
  ResponseKind response = ResponseKind::bridge;
  double mse_time = 0.0;
  double mse_freq = 0.0;
  double normalization = 0.0;  // m, max |displacement| of the coupled run
  double span = 0.0;
  int n_vehicles = 0;
  std::string vehicle_preset;
};

/// Compares the midspan displacement (bridge) or the sprung-mass
/// displacement (vehicle) of a coupled and a decoupled run. The coupled run
/// is the reference and supplies the normalization.
ComparisonReport compare_outputs(const SimulationOutput& coupled, const SimulationOutput& decoupled,
                                 ResponseKind kind, double cutoff_hz = 25.0);

struct PairedRun {
  Scenario scenario;
  SimulationOutput coupled;
  SimulationOutput decoupled;
  ComparisonReport bridge;
  ComparisonReport vehicle;
};

/// Both drivers on one prepared scenario (shared seeds and excitation).
PairedRun run_paired(const ScenarioConfig& config, double cutoff_hz = 25.0);

void write_comparison_header(std::ostream& os);
void write_comparison_row(std::ostream& os, const ComparisonReport& report);

struct BenchmarkRecord {
  double span = 0.0;
  std::size_t dof_count = 0;
  std::size_t steps = 0;
  double coupled_seconds = 0.0;
  double decoupled_seconds = 0.0;
  double speedup = 0.0;
  bool strict_mode = false;
  double median_iterations = 0.0;
  bool deterministic = true;
};

struct BenchmarkFailure {
  double span = 0.0;
  bool strict_mode = false;
  std::string message;
};

struct BenchmarkOptions {
  std::vector<double> spans{15.0, 30.0, 50.0, 100.0, 200.0, 500.0};
  std::string vehicle_preset = "commercial";
  int n_vehicles = 10;
  int repetitions = 3;
  double node_spacing = 0.1;
  bool include_strict = true;
  bool include_single_step = true;
  std::uint64_t traffic_seed = 1;
  std::uint64_t roughness_seed = 2;

  void validate() const;
};

struct BenchmarkReport {
  std::vector<BenchmarkRecord> records;
  std::vector<BenchmarkFailure> failures;  // non-convergent coupled runs

  /// Record for `span` and mode, or nullptr.
  const BenchmarkRecord* find(double span, bool strict) const;
};

/// Median wall times over the repetitions for the decoupled driver and the
/// coupled driver (single-step and/or strict re-solve) on identical scenarios.
/// Scenario preparation is outside the timed region.
BenchmarkReport run_benchmark(const BenchmarkOptions& options);

void write_benchmark_csv(std::ostream& os, const BenchmarkReport& report);

}  // namespace vbi
