#include "vbi/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "vbi/errors.hpp"

namespace vbi {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"bridge",
       {"span", "node_spacing", "damping_ratio", "elastic_modulus", "mass_density", "depth", "width",
        "flange_thickness", "web_thickness"}},
      {"vehicle",
       {"preset", "scale", "speed", "sprung_mass", "unsprung_mass", "suspension_stiffness",
        "suspension_damping", "tire_stiffness", "tire_damping"}},
      {"traffic", {"n_vehicles", "density", "seed"}},
      {"roughness",
       {"enabled", "seed", "class_coefficient", "reference_frequency", "band_low", "band_high",
        "frequency_step"}},
      {"simulation",
       {"mode", "strict_paper_mode", "convergence_threshold", "max_iterations_per_step", "rk_rel_tol",
        "rk_abs_tol"}},
      {"compare", {"spans", "n_vehicles", "vehicles", "node_spacing", "cutoff_hz"}},
      {"theory",
       {"alpha_start", "alpha_end", "beta_start", "beta_end", "gamma_min", "gamma_max", "path_points",
        "gamma_points", "k", "amplitude", "clip_to_valid", "printed_uncoupled"}},
      {"benchmark",
       {"spans", "vehicle", "n_vehicles", "repetitions", "node_spacing", "strict", "single_step",
        "traffic_seed", "roughness_seed"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Typed reader that names the offending key on failure.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <class T>
  void get(const std::string& key, T& out) const {
    const auto node = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!node) return;
    out = convert<T>(key, trim(*node));
  }

  template <class T>
  void get_optional(const std::string& key, std::optional<T>& out) const {
    const auto node = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (node) out = convert<T>(key, trim(*node));
  }

  template <class T>
  void get_list(const std::string& key, std::vector<T>& out) const {
    const auto node = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!node) return;
    out.clear();
    for (const auto& item : split_list(*node)) out.push_back(convert<T>(key, item));
    if (out.empty()) throw ConfigError(key + ": list must not be empty");
  }

 private:
  template <class T>
  static T convert(const std::string& key, const std::string& text) {
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
      if (text == "false" || text == "0" || text == "no" || text == "off") return false;
      throw ConfigError(key + ": expected a boolean, got '" + text + "'");
    } else {
      std::istringstream is(text);
      T value{};
      is >> value;
      if (is.fail() || !is.eof()) throw ConfigError(key + ": cannot parse '" + text + "'");
      return value;
    }
  }

  const pt::ptree& tree_;
};

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    os << (i ? ", " : "");
    if constexpr (std::is_floating_point_v<T>) os << num(v[i]);
    else os << v[i];
  }
  return os.str();
}

}  // namespace

void AppConfig::validate() const {
  if (!(bridge.span > 0.0)) throw ConfigError("bridge.span must be positive");
  if (!(bridge.node_spacing > 0.0)) throw ConfigError("bridge.node_spacing must be positive");
  if (!(vehicle.scale > 0.0)) throw ConfigError("vehicle.scale must be positive");
  if (compare.spans.empty()) throw ConfigError("compare.spans must not be empty");
  if (compare.vehicles.empty()) throw ConfigError("compare.vehicles must not be empty");
  for (int n : compare.n_vehicles) {
    if (n < 0) throw ConfigError("compare.n_vehicles must be >= 0");
  }
  for (const auto& v : compare.vehicles) (void)vehicle_preset(v);
  if (!(compare.node_spacing > 0.0)) throw ConfigError("compare.node_spacing must be positive");
  if (!(compare.cutoff_hz > 0.0)) throw ConfigError("compare.cutoff_hz must be positive");
  theory.validate();
  benchmark.validate();
  (void)build_scenario(*this).validate();
}

AppConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    if (section == "run") continue;  // manifest metadata
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) throw ConfigError("config: key '" + section + "' must be inside a section");
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("config: unknown key '" + section + "." + key + "'");
    }
  }

  AppConfig c;
  const Reader r(tree);
  r.get("bridge.span", c.bridge.span);
  r.get("bridge.node_spacing", c.bridge.node_spacing);
  r.get("bridge.damping_ratio", c.bridge.damping_ratio);
  r.get("bridge.elastic_modulus", c.bridge.elastic_modulus);
  r.get("bridge.mass_density", c.bridge.mass_density);
  std::optional<double> depth, width, flange, web;
  r.get_optional("bridge.depth", depth);
  r.get_optional("bridge.width", width);
  r.get_optional("bridge.flange_thickness", flange);
  r.get_optional("bridge.web_thickness", web);
  const int given = int(depth.has_value()) + int(width.has_value()) + int(flange.has_value()) + int(web.has_value());
  if (given == 4) {
    c.bridge.section = BoxSection{*depth, *width, *flange, *web};
  } else if (given != 0) {
    throw ConfigError("bridge: depth, width, flange_thickness and web_thickness must be given together");
  }

  r.get("vehicle.preset", c.vehicle.preset);
  r.get("vehicle.scale", c.vehicle.scale);
  r.get("vehicle.speed", c.vehicle.speed);
  r.get_optional("vehicle.sprung_mass", c.vehicle.sprung_mass);
  r.get_optional("vehicle.unsprung_mass", c.vehicle.unsprung_mass);
  r.get_optional("vehicle.suspension_stiffness", c.vehicle.suspension_stiffness);
  r.get_optional("vehicle.suspension_damping", c.vehicle.suspension_damping);
  r.get_optional("vehicle.tire_stiffness", c.vehicle.tire_stiffness);
  r.get_optional("vehicle.tire_damping", c.vehicle.tire_damping);

  r.get("traffic.n_vehicles", c.traffic.n_vehicles);
  r.get("traffic.density", c.traffic.density);
  r.get("traffic.seed", c.traffic.seed);

  r.get("roughness.enabled", c.roughness.enabled);
  r.get("roughness.seed", c.roughness.seed);
  r.get("roughness.class_coefficient", c.roughness.options.class_coefficient);
  r.get("roughness.reference_frequency", c.roughness.options.reference_frequency);
  r.get("roughness.band_low", c.roughness.options.band_low);
  r.get("roughness.band_high", c.roughness.options.band_high);
  r.get("roughness.frequency_step", c.roughness.options.frequency_step);

  std::string mode = to_string(c.simulation.mode);
  r.get("simulation.mode", mode);
  c.simulation.mode = parse_simulation_mode(mode);
  r.get("simulation.strict_paper_mode", c.simulation.strict_paper_mode);
  r.get("simulation.convergence_threshold", c.simulation.convergence_threshold);
  r.get("simulation.max_iterations_per_step", c.simulation.max_iterations_per_step);
  r.get("simulation.rk_rel_tol", c.simulation.rk_rel_tol);
  r.get("simulation.rk_abs_tol", c.simulation.rk_abs_tol);

  r.get_list("compare.spans", c.compare.spans);
  r.get_list("compare.n_vehicles", c.compare.n_vehicles);
  r.get_list("compare.vehicles", c.compare.vehicles);
  r.get("compare.node_spacing", c.compare.node_spacing);
  r.get("compare.cutoff_hz", c.compare.cutoff_hz);

  r.get("theory.alpha_start", c.theory.alpha_start);
  r.get("theory.alpha_end", c.theory.alpha_end);
  r.get("theory.beta_start", c.theory.beta_start);
  r.get("theory.beta_end", c.theory.beta_end);
  r.get("theory.gamma_min", c.theory.gamma_min);
  r.get("theory.gamma_max", c.theory.gamma_max);
  r.get("theory.path_points", c.theory.path_points);
  r.get("theory.gamma_points", c.theory.gamma_points);
  r.get("theory.k", c.theory.k);
  r.get("theory.amplitude", c.theory.amplitude);
  r.get("theory.clip_to_valid", c.theory.clip_to_valid);
  r.get("theory.printed_uncoupled", c.theory.printed_uncoupled);

  r.get_list("benchmark.spans", c.benchmark.spans);
  r.get("benchmark.vehicle", c.benchmark.vehicle_preset);
  r.get("benchmark.n_vehicles", c.benchmark.n_vehicles);
  r.get("benchmark.repetitions", c.benchmark.repetitions);
  r.get("benchmark.node_spacing", c.benchmark.node_spacing);
  r.get("benchmark.strict", c.benchmark.include_strict);
  r.get("benchmark.single_step", c.benchmark.include_single_step);
  r.get("benchmark.traffic_seed", c.benchmark.traffic_seed);
  r.get("benchmark.roughness_seed", c.benchmark.roughness_seed);

  c.validate();
  return c;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& os, const AppConfig& c) {
  auto flag = [](bool b) { return b ? "true" : "false"; };
  os << "[bridge]\n"
     << "span = " << num(c.bridge.span) << '\n'
     << "node_spacing = " << num(c.bridge.node_spacing) << '\n'
     << "damping_ratio = " << num(c.bridge.damping_ratio) << '\n'
     << "elastic_modulus = " << num(c.bridge.elastic_modulus) << '\n'
     << "mass_density = " << num(c.bridge.mass_density) << '\n';
  if (c.bridge.section) {
    os << "depth = " << num(c.bridge.section->depth) << '\n'
       << "width = " << num(c.bridge.section->width) << '\n'
       << "flange_thickness = " << num(c.bridge.section->flange_thickness) << '\n'
       << "web_thickness = " << num(c.bridge.section->web_thickness) << '\n';
  } else {
    os << "; depth, width, flange_thickness, web_thickness: reference section for the span\n";
  }
  os << "\n[vehicle]\n"
     << "preset = " << c.vehicle.preset << '\n'
     << "scale = " << num(c.vehicle.scale) << '\n'
     << "speed = " << num(c.vehicle.speed) << '\n';
  auto opt = [&os](const char* key, const std::optional<double>& v) {
    if (v) os << key << " = " << num(*v) << '\n';
  };
  opt("sprung_mass", c.vehicle.sprung_mass);
  opt("unsprung_mass", c.vehicle.unsprung_mass);
  opt("suspension_stiffness", c.vehicle.suspension_stiffness);
  opt("suspension_damping", c.vehicle.suspension_damping);
  opt("tire_stiffness", c.vehicle.tire_stiffness);
  opt("tire_damping", c.vehicle.tire_damping);
  os << "\n[traffic]\n"
     << "n_vehicles = " << c.traffic.n_vehicles << '\n'
     << "density = " << num(c.traffic.density) << '\n'
     << "seed = " << c.traffic.seed << '\n'
     << "\n[roughness]\n"
     << "enabled = " << flag(c.roughness.enabled) << '\n'
     << "seed = " << c.roughness.seed << '\n'
     << "class_coefficient = " << num(c.roughness.options.class_coefficient) << '\n'
     << "reference_frequency = " << num(c.roughness.options.reference_frequency) << '\n'
     << "band_low = " << num(c.roughness.options.band_low) << '\n'
     << "band_high = " << num(c.roughness.options.band_high) << '\n'
     << "frequency_step = " << num(c.roughness.options.frequency_step) << '\n'
     << "\n[simulation]\n"
     << "mode = " << to_string(c.simulation.mode) << '\n'
     << "strict_paper_mode = " << flag(c.simulation.strict_paper_mode) << '\n'
     << "convergence_threshold = " << num(c.simulation.convergence_threshold) << '\n'
     << "max_iterations_per_step = " << c.simulation.max_iterations_per_step << '\n'
     << "rk_rel_tol = " << num(c.simulation.rk_rel_tol) << '\n'
     << "rk_abs_tol = " << num(c.simulation.rk_abs_tol) << '\n'
     << "\n[compare]\n"
     << "spans = " << join(c.compare.spans) << '\n'
     << "n_vehicles = " << join(c.compare.n_vehicles) << '\n'
     << "vehicles = " << join(c.compare.vehicles) << '\n'
     << "node_spacing = " << num(c.compare.node_spacing) << '\n'
     << "cutoff_hz = " << num(c.compare.cutoff_hz) << '\n'
     << "\n[theory]\n"
     << "alpha_start = " << num(c.theory.alpha_start) << '\n'
     << "alpha_end = " << num(c.theory.alpha_end) << '\n'
     << "beta_start = " << num(c.theory.beta_start) << '\n'
     << "beta_end = " << num(c.theory.beta_end) << '\n'
     << "gamma_min = " << num(c.theory.gamma_min) << '\n'
     << "gamma_max = " << num(c.theory.gamma_max) << '\n'
     << "path_points = " << c.theory.path_points << '\n'
     << "gamma_points = " << c.theory.gamma_points << '\n'
     << "k = " << num(c.theory.k) << '\n'
     << "amplitude = " << num(c.theory.amplitude) << '\n'
     << "clip_to_valid = " << flag(c.theory.clip_to_valid) << '\n'
     << "printed_uncoupled = " << flag(c.theory.printed_uncoupled) << '\n'
     << "\n[benchmark]\n"
     << "spans = " << join(c.benchmark.spans) << '\n'
     << "vehicle = " << c.benchmark.vehicle_preset << '\n'
     << "n_vehicles = " << c.benchmark.n_vehicles << '\n'
     << "repetitions = " << c.benchmark.repetitions << '\n'
     << "node_spacing = " << num(c.benchmark.node_spacing) << '\n'
     << "strict = " << flag(c.benchmark.include_strict) << '\n'
     << "single_step = " << flag(c.benchmark.include_single_step) << '\n'
     << "traffic_seed = " << c.benchmark.traffic_seed << '\n'
     << "roughness_seed = " << c.benchmark.roughness_seed << '\n';
}

void apply_seed(AppConfig& c, std::uint64_t seed) {
  c.traffic.seed = seed;
  c.roughness.seed = seed + 1;
  c.benchmark.traffic_seed = seed;
  c.benchmark.roughness_seed = seed + 1;
}

QuarterCarSpec build_vehicle(const VehicleSettings& v, const std::optional<std::string>& preset) {
  QuarterCarSpec spec = vehicle_preset(preset.value_or(v.preset));
  if (v.sprung_mass) spec.sprung_mass = *v.sprung_mass;
  if (v.unsprung_mass) spec.unsprung_mass = *v.unsprung_mass;
  if (v.suspension_stiffness) spec.suspension_stiffness = *v.suspension_stiffness;
  if (v.suspension_damping) spec.suspension_damping = *v.suspension_damping;
  if (v.tire_stiffness) spec.tire_stiffness = *v.tire_stiffness;
  if (v.tire_damping) spec.tire_damping = *v.tire_damping;
  if (v.scale != 1.0) spec = spec.scaled(v.scale);
  spec.speed = v.speed;
  spec.validate_allow_massless();
  return spec;
}

ScenarioConfig build_scenario(const AppConfig& c, const ScenarioOverrides& o) {
  ScenarioConfig s;
  const double span = o.span.value_or(c.bridge.span);
  const double spacing = o.node_spacing.value_or(c.bridge.node_spacing);
  if (c.bridge.section) {
    s.bridge.span = span;
    s.bridge.section = *c.bridge.section;
    s.bridge.node_spacing = spacing;
  } else {
    s.bridge = reference_bridge(span, spacing);
  }
  s.bridge.damping_ratio = c.bridge.damping_ratio;
  s.bridge.elastic_modulus = c.bridge.elastic_modulus;
  s.bridge.mass_density = c.bridge.mass_density;
  s.vehicle = build_vehicle(c.vehicle, o.preset);
  s.traffic = c.traffic;
  if (o.n_vehicles) s.traffic.n_vehicles = *o.n_vehicles;
  s.roughness = c.roughness;
  s.mode = c.simulation.mode;
  s.strict_paper_mode = c.simulation.strict_paper_mode;
  s.convergence_threshold = c.simulation.convergence_threshold;
  s.max_iterations_per_step = c.simulation.max_iterations_per_step;
  s.rk.rel_tol = c.simulation.rk_rel_tol;
  s.rk.abs_tol = c.simulation.rk_abs_tol;
  return s;
}

}  // namespace vbi
