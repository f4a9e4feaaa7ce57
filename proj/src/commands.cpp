#include "vbi/commands.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "vbi/errors.hpp"
#include "vbi/validation.hpp"

namespace vbi {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string cell_tag(const CompareCell& c) {
  std::ostringstream os;
  os << c.vehicle << "_L" << c.span << "_n" << c.n_vehicles;
  return os.str();
}

}  // namespace

std::string version() { return "0.3.0"; }

AppConfig resolve_config(const RunOptions& o) {
  AppConfig c = o.config_path.empty() ? AppConfig{} : load_config(o.config_path);
  if (o.seed) apply_seed(c, *o.seed);
  if (o.strict_paper_mode) c.simulation.strict_paper_mode = *o.strict_paper_mode;
  if (o.jobs < 1) throw ConfigError("--jobs must be >= 1");
  c.validate();
  return c;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunOptions& o, const AppConfig& c) {
  std::ofstream f = open_out(dir / "manifest.ini");
  f << "[run]\n"
    << "command = " << command << '\n'
    << "config_path = " << (o.config_path.empty() ? "(defaults)" : o.config_path) << '\n'
    << "output_dir = " << o.output_dir.string() << '\n'
    << "seeds = " << c.traffic.seed << ", " << c.roughness.seed << '\n'
    << "benchmark_seeds = " << c.benchmark.traffic_seed << ", " << c.benchmark.roughness_seed << '\n'
    << "emit_traces = " << (o.emit_traces ? "true" : "false") << '\n'
    << "jobs = " << o.jobs << '\n'
    << "version = " << version() << "\n\n";
  write_config(f, c);
}

int cmd_theory_sweep(const RunOptions& o, std::ostream& log) {
  const AppConfig c = resolve_config(o);
  prepare_dir(o.output_dir);
  const SweepResult r = parametric_sweep(c.theory);
  {
    std::ofstream f = open_out(o.output_dir / "sweep.csv");
    write_sweep_csv(f, r);
  }
  {
    std::ofstream f = open_out(o.output_dir / "sweep_axis.csv");
    write_sweep_axis_csv(f, r);
  }
  {
    std::ofstream f = open_out(o.output_dir / "sweep_peaks.csv");
    f.precision(12);
    f << "position,alpha,beta,max_error_pct,gamma_at_max\n";
    for (std::size_t i = 0; i < r.path.size(); ++i) {
      const auto [err, g] = r.peak(i);
      f << r.path[i].position << ',' << r.path[i].alpha << ',' << r.path[i].beta << ',' << err << ',' << g << '\n';
    }
  }
  write_manifest(o.output_dir, "theory-sweep", o, c);
  log << "theory-sweep: " << r.path.size() << " path points x " << r.gammas.size() << " frequencies, "
      << r.pole_count() << " poles, " << r.clipped << " path points clipped (alpha <= beta + 1)\n";
  return 0;
}

int cmd_simulate(const RunOptions& o, std::ostream& log) {
  const AppConfig c = resolve_config(o);
  prepare_dir(o.output_dir);
  const Scenario sc = prepare_scenario(build_scenario(c));
  const SimulationOutput out = simulate(sc);
  {
    std::ofstream f = open_out(o.output_dir / "bridge.csv");
    write_time_series_csv(f, out.bridge_result);
  }
  {
    std::ofstream f = open_out(o.output_dir / "vehicle.csv");
    write_time_series_csv(f, out.vehicle_result);
  }
  {
    std::ofstream f = open_out(o.output_dir / "contact.csv");
    write_contact_csv(f, out, sc.newmark.time_step);
  }
  if (o.emit_traces) {
    std::ofstream r = open_out(o.output_dir / "roughness.csv");
    write_roughness_csv(r, sc.roughness);
    std::ofstream t = open_out(o.output_dir / "traffic.csv");
    write_traffic_csv(t, sc.traffic);
  }
  write_manifest(o.output_dir, "simulate", o, c);
  log << "simulate: " << to_string(out.mode) << (out.strict_paper_mode ? " (strict)" : "") << ", span "
      << sc.config.bridge.span << " m, " << out.dof_count << " DOFs, " << sc.traffic.row_count() << " steps, "
      << out.wall_time << " s";
  if (out.mode == SimulationMode::coupled) {
    log << ", iterations median " << out.median_iterations() << " max " << out.max_iterations();
  }
  log << '\n';
  return 0;
}

std::vector<CompareCell> compare_grid(const AppConfig& c) {
  std::vector<CompareCell> cells;
  for (const auto& v : c.compare.vehicles) {
    for (double span : c.compare.spans) {
      for (int n : c.compare.n_vehicles) cells.push_back({span, n, v});
    }
  }
  return cells;
}

std::vector<ComparisonReport> run_compare(const AppConfig& c, int jobs, const fs::path* trace_dir) {
  const std::vector<CompareCell> cells = compare_grid(c);
  std::vector<ComparisonReport> reports(2 * cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const CompareCell& cell = cells[i];
        ScenarioConfig sc = build_scenario(c, {cell.vehicle, cell.span, c.compare.node_spacing, cell.n_vehicles});
        const PairedRun p = run_paired(sc, c.compare.cutoff_hz);
        reports[2 * i] = p.bridge;
        reports[2 * i + 1] = p.vehicle;
        reports[2 * i].vehicle_preset = reports[2 * i + 1].vehicle_preset = cell.vehicle;
        if (trace_dir) {
          const std::string tag = cell_tag(cell);
          for (const auto& [name, res] :
               {std::pair{"coupled_bridge", &p.coupled.bridge_result}, {"decoupled_bridge", &p.decoupled.bridge_result},
                {"coupled_vehicle", &p.coupled.vehicle_result}, {"decoupled_vehicle", &p.decoupled.vehicle_result}}) {
            std::ofstream f = open_out(*trace_dir / (tag + "_" + name + ".csv"));
            write_time_series_csv(f, *res);
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
        return;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return reports;
}

int cmd_compare(const RunOptions& o, std::ostream& log) {
  const AppConfig c = resolve_config(o);
  prepare_dir(o.output_dir);
  fs::path traces = o.output_dir / "traces";
  if (o.emit_traces) prepare_dir(traces);
  const std::vector<ComparisonReport> reports = run_compare(c, o.jobs, o.emit_traces ? &traces : nullptr);
  {
    std::ofstream f = open_out(o.output_dir / "comparison.csv");
    write_comparison_header(f);
    for (const auto& r : reports) write_comparison_row(f, r);
  }
  write_manifest(o.output_dir, "compare", o, c);
  log << "compare: " << reports.size() / 2 << " cells written to " << (o.output_dir / "comparison.csv").string()
      << '\n';
  return 0;
}

int cmd_benchmark(const RunOptions& o, std::ostream& log) {
  const AppConfig c = resolve_config(o);
  prepare_dir(o.output_dir);
  // Timings are always gathered serially; --jobs is ignored here.
  const BenchmarkReport r = run_benchmark(c.benchmark);
  {
    std::ofstream f = open_out(o.output_dir / "benchmark.csv");
    write_benchmark_csv(f, r);
  }
  {
    std::ofstream f = open_out(o.output_dir / "benchmark_failures.csv");
    f << "span,strict_mode,message\n";
    for (const auto& e : r.failures) f << e.span << ',' << (e.strict_mode ? 1 : 0) << ",\"" << e.message << "\"\n";
  }
  write_manifest(o.output_dir, "benchmark", o, c);
  for (const auto& rec : r.records) {
    log << "benchmark: span " << rec.span << " m" << (rec.strict_mode ? " strict" : "") << ": coupled "
        << rec.coupled_seconds << " s, decoupled " << rec.decoupled_seconds << " s, speedup " << rec.speedup
        << '\n';
  }
  if (!r.failures.empty()) log << "benchmark: " << r.failures.size() << " coupled runs did not converge\n";
  return 0;
}

int cmd_validate(std::ostream& out) {
  const std::vector<ValidationCheck> checks = run_validation();
  print_validation(out, checks);
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
  out << (ok ? "all checks passed\n" : "validation FAILED\n");
  return ok ? 0 : 2;
}

}  // namespace vbi
