#include "vbi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "vbi/errors.hpp"

namespace vbi {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, double normalization) {
  if (a.size() != b.size()) throw ConfigError("mse: signals differ in length");
  if (a.empty()) throw ConfigError("mse: empty signals");
  if (!(normalization > 0.0) || !std::isfinite(normalization)) {
    throw ConfigError("mse: normalization must be positive");
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<double> column_copy(const Eigen::MatrixXd& m, Eigen::Index c) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index k = 0; k < m.rows(); ++k) out[static_cast<std::size_t>(k)] = m(k, c);
  return out;
}

bool same_output(const SimulationOutput& a, const SimulationOutput& b) {
  return a.bridge_result.displacement == b.bridge_result.displacement &&
         a.vehicle_result.displacement == b.vehicle_result.displacement;
}

}  // namespace

double mse_time(std::span<const double> ref, std::span<const double> cand, double normalization) {
  check_pair(ref, cand, normalization);
  double acc = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref[i] / normalization - cand[i] / normalization;
    acc += d * d;
  }
  return acc / static_cast<double>(ref.size());
}

Spectrum amplitude_spectrum(std::span<const double> x, double dt, double cutoff_hz) {
  if (x.empty()) throw ConfigError("spectrum: empty signal");
  if (!(dt > 0.0)) throw ConfigError("spectrum: dt must be positive");
  if (!(cutoff_hz >= 0.0)) throw ConfigError("spectrum: cutoff must be >= 0");
  const std::size_t n = x.size();
  const double df = 1.0 / (static_cast<double>(n) * dt);
  const std::size_t nyquist_bin = n / 2;
  const auto cutoff_bin = static_cast<std::size_t>(std::floor(cutoff_hz / df + 1e-9));
  const std::size_t last = std::min(nyquist_bin, cutoff_bin);

  // Twiddle table indexed by (j * k) mod n keeps the phase exact for long records.
  std::vector<double> cos_t(n), sin_t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    cos_t[i] = std::cos(phase);
    sin_t[i] = std::sin(phase);
  }
  Spectrum s;
  s.frequency.reserve(last + 1);
  s.magnitude.reserve(last + 1);
  for (std::size_t k = 0; k <= last; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      re += x[j] * cos_t[idx];
      im -= x[j] * sin_t[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    const bool edge = k == 0 || (n % 2 == 0 && k == nyquist_bin);
    const double scale = (edge ? 1.0 : 2.0) / static_cast<double>(n);
    s.frequency.push_back(static_cast<double>(k) * df);
    s.magnitude.push_back(scale * std::hypot(re, im));
  }
  return s;
}

double mse_freq(std::span<const double> ref, std::span<const double> cand, double normalization,
                double dt, double cutoff_hz) {
  check_pair(ref, cand, normalization);
  std::vector<double> a(ref.begin(), ref.end()), b(cand.begin(), cand.end());
  for (double& v : a) v /= normalization;
  for (double& v : b) v /= normalization;
  const Spectrum sa = amplitude_spectrum(a, dt, cutoff_hz);
  const Spectrum sb = amplitude_spectrum(b, dt, cutoff_hz);
  double acc = 0.0;
  for (std::size_t k = 0; k < sa.magnitude.size(); ++k) {
    const double d = sa.magnitude[k] - sb.magnitude[k];
    acc += d * d;
  }
  return acc / static_cast<double>(sa.magnitude.size());
}

std::string to_string(ResponseKind kind) { return kind == ResponseKind::bridge ? "bridge" : "vehicle"; }

ComparisonReport compare_outputs(const SimulationOutput& coupled, const SimulationOutput& decoupled,
                                 ResponseKind kind, double cutoff_hz) {
  const TimeSeriesResult& rc = kind == ResponseKind::bridge ? coupled.bridge_result : coupled.vehicle_result;
  const TimeSeriesResult& rd = kind == ResponseKind::bridge ? decoupled.bridge_result : decoupled.vehicle_result;
  if (rc.steps() != rd.steps()) throw ConfigError("compare: runs differ in length");
  // Column 0 is midspan for the bridge and the sprung mass for the vehicle.
  const std::vector<double> a = column_copy(rc.displacement, 0);
  const std::vector<double> b = column_copy(rd.displacement, 0);
  double peak = 0.0;
  for (double v : a) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw ConfigError("compare: conventional response is identically zero");
  ComparisonReport r;
  r.response = kind;
  r.normalization = peak;
  r.mse_time = mse_time(a, b, peak);
  r.mse_freq = mse_freq(a, b, peak, rc.time_step, cutoff_hz);
  return r;
}

PairedRun run_paired(const ScenarioConfig& config, double cutoff_hz) {
  PairedRun p;
  p.scenario = prepare_scenario(config);
  p.coupled = simulate_coupled(p.scenario);
  p.decoupled = simulate_decoupled(p.scenario);
  for (ComparisonReport* r : {&p.bridge, &p.vehicle}) {
    const ResponseKind kind = r == &p.bridge ? ResponseKind::bridge : ResponseKind::vehicle;
    *r = compare_outputs(p.coupled, p.decoupled, kind, cutoff_hz);
    r->span = config.bridge.span;
    r->n_vehicles = config.traffic.n_vehicles;
    r->vehicle_preset = config.vehicle.name;
  }
  return p;
}

void write_comparison_header(std::ostream& os) {
  os << "span,n_vehicles,vehicle,response,mse_time,mse_freq,normalization\n";
}

void write_comparison_row(std::ostream& os, const ComparisonReport& r) {
  const auto old = os.precision(12);
  os << r.span << ',' << r.n_vehicles << ',' << r.vehicle_preset << ',' << to_string(r.response) << ','
     << r.mse_time << ',' << r.mse_freq << ',' << r.normalization << '\n';
  os.precision(old);
}

void BenchmarkOptions::validate() const {
  if (spans.empty()) throw ConfigError("benchmark.spans must not be empty");
  if (repetitions < 3) throw ConfigError("benchmark.repetitions must be >= 3");
  if (!include_strict && !include_single_step) {
    throw ConfigError("benchmark: enable at least one coupled mode");
  }
  (void)vbi::vehicle_preset(vehicle_preset);
}

const BenchmarkRecord* BenchmarkReport::find(double span, bool strict) const {
  for (const BenchmarkRecord& r : records) {
    if (r.span == span && r.strict_mode == strict) return &r;
  }
  return nullptr;
}

BenchmarkReport run_benchmark(const BenchmarkOptions& o) {
  o.validate();
  BenchmarkReport report;
  for (double span : o.spans) {
    ScenarioConfig cfg;
    cfg.bridge = reference_bridge(span, o.node_spacing);
    cfg.vehicle = vehicle_preset(o.vehicle_preset);
    cfg.traffic.n_vehicles = o.n_vehicles;
    cfg.traffic.seed = o.traffic_seed;
    cfg.roughness.seed = o.roughness_seed;
    Scenario sc = prepare_scenario(cfg);

    std::vector<double> dec_times;
    SimulationOutput dec_first;
    bool dec_same = true;
    for (int r = 0; r < o.repetitions; ++r) {
      SimulationOutput out = simulate_decoupled(sc);
      dec_times.push_back(out.wall_time);
      if (r == 0) dec_first = std::move(out);
      else dec_same = dec_same && same_output(dec_first, out);
    }
    const double dec = median(dec_times);

    std::vector<bool> modes;
    if (o.include_single_step) modes.push_back(false);
    if (o.include_strict) modes.push_back(true);
    for (bool strict : modes) {
      sc.config.strict_paper_mode = strict;
      std::vector<double> times;
      SimulationOutput first;
      bool same = dec_same;
      try {
        for (int r = 0; r < o.repetitions; ++r) {
          SimulationOutput out = simulate_coupled(sc);
          times.push_back(out.wall_time);
          if (r == 0) first = std::move(out);
          else same = same && same_output(first, out);
        }
      } catch (const ConvergenceError& e) {
        report.failures.push_back({span, strict, e.what()});
        continue;
      }
      BenchmarkRecord rec;
      rec.span = span;
      rec.dof_count = sc.bridge.dof_count();
      rec.steps = sc.traffic.row_count();
      rec.coupled_seconds = median(times);
      rec.decoupled_seconds = dec;
      rec.speedup = rec.coupled_seconds / rec.decoupled_seconds;
      rec.strict_mode = strict;
      rec.median_iterations = first.median_iterations();
      rec.deterministic = same;
      report.records.push_back(rec);
    }
  }
  return report;
}

void write_benchmark_csv(std::ostream& os, const BenchmarkReport& report) {
  const auto old = os.precision(9);
  os << "span,dof_count,steps,strict_mode,coupled_seconds,decoupled_seconds,speedup,median_iterations,"
        "deterministic\n";
  for (const BenchmarkRecord& r : report.records) {
    os << r.span << ',' << r.dof_count << ',' << r.steps << ',' << (r.strict_mode ? 1 : 0) << ','
       << r.coupled_seconds << ',' << r.decoupled_seconds << ',' << r.speedup << ',' << r.median_iterations
       << ',' << (r.deterministic ? 1 : 0) << '\n';
  }
  os.precision(old);
}

}  // namespace vbi
