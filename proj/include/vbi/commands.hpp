#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vbi/config.hpp"

namespace vbi {

std::string version();

struct RunOptions {
  std::string config_path;  // empty: built-in defaults
  std::filesystem::path output_dir = "vbi-out";
  bool emit_traces = false;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<bool> strict_paper_mode;
};

/// Reads the config (or defaults) and applies command line overrides.
AppConfig resolve_config(const RunOptions& options);

/// manifest.ini: the full effective config plus a [run] section with the
/// command, seeds and version. Passing it back via --config repeats the run.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const RunOptions& options,
                    const AppConfig& config);

/// Each command writes its CSVs and manifest into options.output_dir and
/// returns a process exit code. Configuration problems throw ConfigError.
int cmd_theory_sweep(const RunOptions& options, std::ostream& log);
int cmd_simulate(const RunOptions& options, std::ostream& log);
int cmd_compare(const RunOptions& options, std::ostream& log);
int cmd_benchmark(const RunOptions& options, std::ostream& log);
int cmd_validate(std::ostream& out);

struct CompareCell {
  double span = 0.0;
  int n_vehicles = 0;
  std::string vehicle;
};

/// Grid cells in output order: vehicle, then span, then n.
std::vector<CompareCell> compare_grid(const AppConfig& config);

/// Runs the paired simulations for every cell on `jobs` worker threads and
/// returns the reports in grid order (bridge then vehicle per cell).
std::vector<ComparisonReport> run_compare(const AppConfig& config, int jobs,
                                          const std::filesystem::path* trace_dir = nullptr);

}  // namespace vbi
