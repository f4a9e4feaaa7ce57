#include "vbi/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "vbi/errors.hpp"

namespace vbi {

namespace {

std::size_t grid_intervals(double length, double spacing, const char* what) {
  if (!(spacing > 0.0)) throw ConfigError(std::string(what) + ": spacing must be positive");
  if (!(length > 0.0)) throw ConfigError(std::string(what) + ": length must be positive");
  const double ratio = length / spacing;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError(std::string(what) + ": length / spacing must be an integer");
  }
  return static_cast<std::size_t>(std::llround(ratio));
}

std::map<std::string, std::string> parse_metadata(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("csv metadata: expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double meta_double(const std::map<std::string, std::string>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw ConfigError("csv metadata: missing '" + key + "'");
  return std::stod(it->second);
}

std::vector<double> split_doubles(const std::string& line) {
  std::vector<double> v;
  std::istringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  return v;
}

}  // namespace

double roughness_psd(const RoughnessOptions& o, double n) {
  const double r = n / o.reference_frequency;
  return o.class_coefficient / (r * r);
}

RoughnessProfile generate_roughness(double length, double spacing, std::uint64_t seed,
                                    RoughnessOptions options) {
  const std::size_t intervals = grid_intervals(length, spacing, "roughness");
  const double nyquist = 0.5 / spacing;
  if (options.band_high == 0.0) options.band_high = std::min(10.0, nyquist);
  if (!(options.band_low > 0.0) || !(options.band_high > options.band_low)) {
    throw ConfigError("roughness: band must satisfy 0 < band_low < band_high");
  }
  if (options.band_high > nyquist * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "roughness: band_high " << options.band_high << " cycles/m exceeds the grid Nyquist "
        << nyquist << " cycles/m";
    throw ConfigError(msg.str());
  }
  if (options.class_coefficient < 0.0) throw ConfigError("roughness: class_coefficient must be >= 0");
  if (!(options.reference_frequency > 0.0)) {
    throw ConfigError("roughness: reference_frequency must be positive");
  }

  const double width = options.band_high - options.band_low;
  const double requested_step = options.frequency_step > 0.0 ? options.frequency_step : 1.0 / length;
  const auto components =
      static_cast<std::size_t>(std::max(1.0, std::round(width / requested_step)));
  const double dn = width / static_cast<double>(components);

  RoughnessProfile p;
  p.seed = seed;
  p.spacing = spacing;
  p.options = options;
  p.sample_positions.resize(intervals + 1);
  p.elevation.assign(intervals + 1, 0.0);
  p.slope.assign(intervals + 1, 0.0);
  for (std::size_t i = 0; i <= intervals; ++i) p.sample_positions[i] = spacing * static_cast<double>(i);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < components; ++k) {
    const double n = options.band_low + (static_cast<double>(k) + 0.5) * dn;
    const double amplitude = std::sqrt(2.0 * roughness_psd(options, n) * dn);
    const double phase = phase_dist(rng);
    const double wavenumber = 2.0 * std::numbers::pi * n;
    if (amplitude == 0.0) continue;
    for (std::size_t i = 0; i <= intervals; ++i) {
      const double arg = wavenumber * p.sample_positions[i] + phase;
      p.elevation[i] += amplitude * std::cos(arg);
      p.slope[i] -= amplitude * wavenumber * std::sin(arg);
    }
  }
  const double mean =
      std::accumulate(p.elevation.begin(), p.elevation.end(), 0.0) / static_cast<double>(p.size());
  for (double& z : p.elevation) z -= mean;
  return p;
}

RoughnessProfile flat_roughness(double length, double spacing) {
  const std::size_t intervals = grid_intervals(length, spacing, "roughness");
  RoughnessProfile p;
  p.spacing = spacing;
  p.options.class_coefficient = 0.0;
  p.sample_positions.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) p.sample_positions[i] = spacing * static_cast<double>(i);
  p.elevation.assign(intervals + 1, 0.0);
  p.slope.assign(intervals + 1, 0.0);
  return p;
}

double TrafficLoadMatrix::row_total() const {
  return static_cast<double>(vehicle_count_equivalent) * kAverageVehicleMass * kGravity;
}

Eigen::MatrixXd TrafficLoadMatrix::to_dense() const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(node_count));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [node, f] : rows[r]) {
      D(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(node)) += f;
    }
  }
  return D;
}

TrafficLoadMatrix generate_traffic(double duration, double time_step, std::size_t node_count,
                                   int n_vehicles, double density, std::uint64_t seed) {
  if (!(time_step > 0.0)) throw ConfigError("traffic: time_step must be positive");
  if (!(duration >= 0.0)) throw ConfigError("traffic: duration must be non-negative");
  if (n_vehicles < 0) throw ConfigError("traffic: n_vehicles must be >= 0");
  if (!(density > 0.0 && density <= 1.0)) throw ConfigError("traffic: density must lie in (0, 1]");
  if (node_count < 2) throw ConfigError("traffic: at least two nodes required");

  TrafficLoadMatrix m;
  m.node_count = node_count;
  m.time_step = time_step;
  m.vehicle_count_equivalent = n_vehicles;
  m.density = density;
  m.seed = seed;
  const auto steps = static_cast<std::size_t>(std::llround(duration / time_step));
  m.rows.resize(steps + 1);
  if (n_vehicles == 0) return m;

  const std::size_t interior = node_count - 2;
  const auto active = static_cast<std::size_t>(
      std::ceil(density * static_cast<double>(interior) - 1e-9));
  if (active == 0) {
    throw ConfigError("traffic: density selects zero interior nodes while n_vehicles > 0");
  }
  std::vector<std::size_t> candidates(interior);
  std::iota(candidates.begin(), candidates.end(), std::size_t{1});

  const double total = m.row_total();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> chosen(active);
  std::vector<double> weights(active);
  for (auto& row : m.rows) {
    std::sample(candidates.begin(), candidates.end(), chosen.begin(), active, rng);
    double sum = 0.0;
    for (double& w : weights) {
      w = 1.0 - unif(rng);  // (0, 1]
      sum += w;
    }
    row.resize(active);
    for (std::size_t j = 0; j < active; ++j) row[j] = {chosen[j], -total * weights[j] / sum};
  }
  return m;
}

void write_roughness_csv(std::ostream& os, const RoughnessProfile& p) {
  const auto old = os.precision(17);
  os << "spacing=" << p.spacing << ",seed=" << p.seed
     << ",class_coefficient=" << p.options.class_coefficient
     << ",reference_frequency=" << p.options.reference_frequency
     << ",band_low=" << p.options.band_low << ",band_high=" << p.options.band_high << '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << p.sample_positions[i] << ',' << p.elevation[i] << ',' << p.slope[i] << '\n';
  }
  os.precision(old);
}

RoughnessProfile read_roughness_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("roughness csv: empty input");
  const auto meta = parse_metadata(line);
  RoughnessProfile p;
  p.spacing = meta_double(meta, "spacing");
  p.seed = std::stoull(meta.at("seed"));
  p.options.class_coefficient = meta_double(meta, "class_coefficient");
  p.options.reference_frequency = meta_double(meta, "reference_frequency");
  p.options.band_low = meta_double(meta, "band_low");
  p.options.band_high = meta_double(meta, "band_high");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto v = split_doubles(line);
    if (v.size() != 3) throw ConfigError("roughness csv: expected position,elevation,slope");
    p.sample_positions.push_back(v[0]);
    p.elevation.push_back(v[1]);
    p.slope.push_back(v[2]);
  }
  return p;
}

void write_traffic_csv(std::ostream& os, const TrafficLoadMatrix& t) {
  const auto old = os.precision(17);
  os << "time_step=" << t.time_step << ",seed=" << t.seed
     << ",n_vehicles=" << t.vehicle_count_equivalent << ",density=" << t.density
     << ",rows=" << t.row_count() << ",nodes=" << t.node_count << '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (const auto& [node, f] : t.rows[r]) os << r << ',' << node << ',' << f << '\n';
  }
  os.precision(old);
}

TrafficLoadMatrix read_traffic_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("traffic csv: empty input");
  const auto meta = parse_metadata(line);
  TrafficLoadMatrix t;
  t.time_step = meta_double(meta, "time_step");
  t.seed = std::stoull(meta.at("seed"));
  t.vehicle_count_equivalent = std::stoi(meta.at("n_vehicles"));
  t.density = meta_double(meta, "density");
  t.node_count = std::stoull(meta.at("nodes"));
  t.rows.resize(std::stoull(meta.at("rows")));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw ConfigError("traffic csv: expected row,node,force");
    }
    const std::size_t r = std::stoull(a);
    const std::size_t node = std::stoull(b);
    if (r >= t.rows.size() || node >= t.node_count) throw ConfigError("traffic csv: index out of range");
    t.rows[r].emplace_back(node, std::stod(c));
  }
  return t;
}

}  // namespace vbi
