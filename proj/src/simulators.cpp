#include "vbi/simulators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "vbi/errors.hpp"

namespace vbi {

std::string to_string(SimulationMode mode) {
  return mode == SimulationMode::coupled ? "coupled" : "decoupled";
}

SimulationMode parse_simulation_mode(const std::string& text) {
  if (text == "coupled") return SimulationMode::coupled;
  if (text == "decoupled") return SimulationMode::decoupled;
  throw ConfigError("simulation mode must be 'coupled' or 'decoupled', got '" + text + "'");
}

void ScenarioConfig::validate() const {
  bridge.validate();
  vehicle.validate_allow_massless();
  if (!(convergence_threshold > 0.0)) throw ConfigError("simulation: convergence_threshold must be positive");
  if (max_iterations_per_step < 1) throw ConfigError("simulation: max_iterations_per_step must be >= 1");
  if (traffic.n_vehicles < 0) throw ConfigError("traffic: n_vehicles must be >= 0");
  if (!(traffic.density > 0.0 && traffic.density <= 1.0)) {
    throw ConfigError("traffic: density must lie in (0, 1]");
  }
}

Scenario prepare_scenario(const ScenarioConfig& config) {
  config.validate();
  Scenario sc;
  sc.config = config;
  sc.bridge = assemble_beam(config.bridge);
  sc.newmark = config.newmark;
  sc.newmark.time_step = config.time_step();
  sc.newmark.validate();
  const double span = config.bridge.span;
  const double spacing = config.bridge.node_spacing;
  sc.roughness = config.roughness.enabled
                     ? generate_roughness(span, spacing, config.roughness.seed, config.roughness.options)
                     : flat_roughness(span, spacing);
  // Transit time: the vehicle advances one node per step.
  const double duration = sc.newmark.time_step * static_cast<double>(config.bridge.element_count());
  sc.traffic = generate_traffic(duration, sc.newmark.time_step, sc.bridge.node_count(),
                                config.traffic.n_vehicles, config.traffic.density, config.traffic.seed);
  const std::size_t nodes = sc.bridge.node_count();
  sc.recorded_nodes = {sc.bridge.midspan_node(), (nodes - 1) / 4, 3 * (nodes - 1) / 4};
  return sc;
}

double SimulationOutput::median_iterations() const {
  if (iteration_counts.size() < 2) return 0.0;
  std::vector<int> v(iteration_counts.begin() + 1, iteration_counts.end());
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int SimulationOutput::max_iterations() const {
  return iteration_counts.empty() ? 0 : *std::max_element(iteration_counts.begin(), iteration_counts.end());
}

namespace {

using Clock = std::chrono::steady_clock;
using ForceRows = std::vector<std::vector<std::pair<std::size_t, double>>>;

void check_scenario(const Scenario& sc) {
  if (sc.traffic.row_count() != sc.bridge.node_count()) {
    throw ConfigError("scenario: traffic rows must equal the number of bridge nodes (one node per step)");
  }
  if (sc.roughness.size() != sc.bridge.node_count()) {
    throw ConfigError("scenario: roughness must be sampled on the bridge node grid");
  }
}

TimeSeriesResult make_series(double dt, std::vector<std::string> labels, std::size_t rows) {
  TimeSeriesResult r;
  r.time_step = dt;
  r.dof_labels = std::move(labels);
  const auto T = static_cast<Eigen::Index>(rows);
  const auto C = static_cast<Eigen::Index>(r.dof_labels.size());
  r.displacement.resize(T, C);
  r.velocity.resize(T, C);
  r.acceleration.resize(T, C);
  return r;
}

std::vector<std::string> node_labels(const std::vector<std::size_t>& nodes) {
  std::vector<std::string> out;
  for (std::size_t n : nodes) out.push_back("node" + std::to_string(n));
  return out;
}

// Vehicle ride state carried between steps. A massless probe rides on the contact.
struct Ride {
  TwoDofState state;
  double h = 0.0;
};

}  // namespace

SimulationOutput simulate_coupled(const Scenario& sc) {
  check_scenario(sc);
  const auto start = Clock::now();
  const ScenarioConfig& cfg = sc.config;
  const QuarterCarSpec& car = cfg.vehicle;
  const bool massless = car.total_mass() == 0.0;
  const double dt = sc.newmark.time_step;
  const std::size_t T = sc.traffic.row_count();

  const NewmarkIntegrator integ(sc.bridge, sc.newmark);
  const DormandPrince rk(cfg.rk);
  std::optional<TwoDofOde> ode;
  if (!massless) ode.emplace(vehicle_system(car));

  ForceRows F = sc.traffic.rows;
  const NewmarkState initial = integ.initial_state(F[0]);

  // Single-step re-solve (default) or literal full-history re-solve.
  NewmarkStepper stepper(integ, initial);
  NewmarkState strict_k, strict_next;
  auto full_history = [&](std::size_t k) {
    NewmarkState s = integ.initial_state(F[0]);
    NewmarkState next = s;
    if (k == 0) strict_k = s;
    for (std::size_t j = 1; j < T; ++j) {
      integ.step(s, F[j], next);
      std::swap(s, next);
      if (j == k) strict_k = s;
      if (j == k + 1) strict_next = s;
    }
  };
  if (cfg.strict_paper_mode) full_history(0);

  SimulationOutput out;
  out.mode = SimulationMode::coupled;
  out.strict_paper_mode = cfg.strict_paper_mode;
  out.dof_count = sc.bridge.dof_count();
  out.bridge_result = make_series(dt, node_labels(sc.recorded_nodes), T);
  out.vehicle_result = make_series(dt, {"sprung", "unsprung"}, T);
  out.contact_trace.resize(T);
  out.iteration_counts.assign(T, 0);

  auto record_bridge = [&](std::size_t k, const NewmarkState& s) {
    const auto kk = static_cast<Eigen::Index>(k);
    for (std::size_t c = 0; c < sc.recorded_nodes.size(); ++c) {
      const auto cc = static_cast<Eigen::Index>(c);
      out.bridge_result.displacement(kk, cc) = integ.node_displacement(s, sc.recorded_nodes[c]);
      out.bridge_result.velocity(kk, cc) = integ.node_velocity(s, sc.recorded_nodes[c]);
      out.bridge_result.acceleration(kk, cc) = integ.node_acceleration(s, sc.recorded_nodes[c]);
    }
  };
  auto record_vehicle = [&](std::size_t k, const TwoDofState& s, double wv, double wvr) {
    const auto kk = static_cast<Eigen::Index>(k);
    out.vehicle_result.displacement.row(kk) = s.displacement.transpose();
    out.vehicle_result.velocity.row(kk) = s.velocity.transpose();
    const Eigen::Vector2d acc = massless ? Eigen::Vector2d::Zero() : ode->acceleration(s, wv, wvr);
    out.vehicle_result.acceleration.row(kk) = acc.transpose();
  };
  auto make_contact = [&](std::size_t node, double r, double rdot, double wv, double wvr,
                          const TwoDofState& s) {
    ContactState c;
    c.node = node;
    c.bridge_displacement = r;
    c.bridge_velocity = rdot;
    c.wv = wv;
    c.wv_rate = wvr;
    const ContactForce f = interaction_force(car, s.displacement(1), s.velocity(1), wv, wvr);
    c.tire_force = f.tire_force;
    c.contact_lost = f.contact_lost;
    c.total_reaction = cfg.zero_interaction     ? 0.0
                       : cfg.apply_static_weight ? f.total_reaction
                                                 : -f.tire_force;
    return c;
  };

  // Step 0: the vehicle sits on the left support.
  const NewmarkState& s0 = cfg.strict_paper_mode ? strict_k : stepper.current();
  double r = integ.node_displacement(s0, 0);
  double rdot = integ.node_velocity(s0, 0);
  double wv_prev = sc.roughness.elevation[0] + r;
  double wvr_prev = sc.roughness.slope[0] * car.speed + rdot;
  Ride ride{vehicle_initial_state(wv_prev, wvr_prev), 0.0};
  record_bridge(0, s0);
  record_vehicle(0, ride.state, wv_prev, wvr_prev);
  out.contact_trace[0] = make_contact(0, r, rdot, wv_prev, wvr_prev, ride.state);

  for (std::size_t k = 1; k < T; ++k) {
    const std::size_t node = k;
    const NewmarkState* state = nullptr;
    if (cfg.strict_paper_mode) {
      strict_k = strict_next;  // the previous full run already holds step k under F0
      state = &strict_k;
    } else {
      state = &stepper.advance(F[k]);
    }
    r = integ.node_displacement(*state, node);
    rdot = integ.node_velocity(*state, node);

    const std::vector<std::pair<std::size_t, double>> base_row = sc.traffic.rows[k];
    Ride trial;
    double wv = 0.0, wvr = 0.0;
    ContactState contact;
    int iterations = 0;
    for (;;) {
      wv = sc.roughness.elevation[k] + r;
      wvr = sc.roughness.slope[k] * car.speed + rdot;
      trial = ride;
      if (massless) {
        trial.state = vehicle_initial_state(wv, wvr);
      } else {
        ode->advance(trial.state, dt, wv_prev, wvr_prev, wv, wvr, rk, trial.h);
      }
      contact = make_contact(node, r, rdot, wv, wvr, trial.state);

      F[k] = base_row;
      F[k].emplace_back(node, contact.total_reaction);
      if (cfg.strict_paper_mode) {
        full_history(k);
        state = &strict_k;
      } else {
        state = &stepper.resolve(F[k]);
      }
      ++iterations;
      const double r_new = integ.node_displacement(*state, node);
      const double rdot_new = integ.node_velocity(*state, node);
      const double residual = std::abs(r - r_new);
      if (residual < cfg.convergence_threshold) break;
      if (iterations >= cfg.max_iterations_per_step) {
        std::ostringstream msg;
        msg << "coupled simulation did not converge at step " << k << " after " << iterations
            << " iterations (residual " << residual << " m)";
        throw ConvergenceError(msg.str(), k, residual);
      }
      r = r_new;
      rdot = rdot_new;
    }
    ride = trial;
    wv_prev = wv;
    wvr_prev = wvr;
    out.iteration_counts[k] = iterations;
    out.contact_trace[k] = contact;
    record_bridge(k, *state);
    record_vehicle(k, ride.state, wv, wvr);
  }
  out.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

SimulationOutput simulate_decoupled(const Scenario& sc) {
  check_scenario(sc);
  const auto start = Clock::now();
  const ScenarioConfig& cfg = sc.config;
  const QuarterCarSpec& car = cfg.vehicle;
  const double dt = sc.newmark.time_step;
  const std::size_t T = sc.traffic.row_count();

  const NewmarkIntegrator integ(sc.bridge, sc.newmark);
  std::vector<double> r(T), rdot(T);
  SimulationOutput out;
  out.mode = SimulationMode::decoupled;
  out.dof_count = sc.bridge.dof_count();
  out.bridge_result = newmark_solve(integ, sc.traffic.rows, sc.recorded_nodes, nullptr,
                                    [&](std::size_t k, const NewmarkState& s) {
                                      r[k] = integ.node_displacement(s, k);
                                      rdot[k] = integ.node_velocity(s, k);
                                    });
  std::vector<double> wv(T), wvr(T);
  for (std::size_t k = 0; k < T; ++k) {
    wv[k] = sc.roughness.elevation[k] + r[k];
    wvr[k] = sc.roughness.slope[k] * car.speed + rdot[k];
  }
  out.vehicle_result = vehicle_response(car, wv, wvr, dt, cfg.rk);
  out.iteration_counts.assign(T, 0);
  out.contact_trace.resize(T);
  for (std::size_t k = 0; k < T; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    ContactState& c = out.contact_trace[k];
    c.node = k;
    c.bridge_displacement = r[k];
    c.bridge_velocity = rdot[k];
    c.wv = wv[k];
    c.wv_rate = wvr[k];
    const ContactForce f = interaction_force(car, out.vehicle_result.displacement(kk, 1),
                                             out.vehicle_result.velocity(kk, 1), wv[k], wvr[k]);
    c.tire_force = f.tire_force;
    c.total_reaction = f.total_reaction;
    c.contact_lost = f.contact_lost;
  }
  out.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

SimulationOutput simulate(const Scenario& scenario) {
  return scenario.config.mode == SimulationMode::coupled ? simulate_coupled(scenario)
                                                         : simulate_decoupled(scenario);
}

void write_contact_csv(std::ostream& os, const SimulationOutput& o, double time_step) {
  const auto old = os.precision(17);
  os << "step,time,node,bridge_displacement,bridge_velocity,wv,wv_rate,tire_force,total_reaction,"
        "contact_lost,iterations\n";
  for (std::size_t k = 0; k < o.contact_trace.size(); ++k) {
    const ContactState& c = o.contact_trace[k];
    os << k << ',' << time_step * static_cast<double>(k) << ',' << c.node << ','
       << c.bridge_displacement << ',' << c.bridge_velocity << ',' << c.wv << ',' << c.wv_rate
       << ',' << c.tire_force << ',' << c.total_reaction << ',' << (c.contact_lost ? 1 : 0) << ','
       << (k < o.iteration_counts.size() ? o.iteration_counts[k] : 0) << '\n';
  }
  os.precision(old);
}

}  // namespace vbi
