#include "vbi/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "vbi/errors.hpp"

namespace vbi {

void NewmarkParams::validate() const {
  if (!(time_step > 0.0) || !std::isfinite(time_step)) {
    throw ConfigError("newmark: time_step must be positive");
  }
  if (!(beta > 0.0) || !(gamma >= 0.0)) throw ConfigError("newmark: beta > 0 and gamma >= 0 required");
}

Eigen::Index TimeSeriesResult::column(const std::string& label) const {
  const auto it = std::find(dof_labels.begin(), dof_labels.end(), label);
  if (it == dof_labels.end()) throw ConfigError("time series has no DOF labelled '" + label + "'");
  return static_cast<Eigen::Index>(it - dof_labels.begin());
}

void write_time_series_csv(std::ostream& os, const TimeSeriesResult& r) {
  const auto old = os.precision(17);
  os << "# dt=" << r.time_step << '\n';
  os << "step,time";
  for (const auto& l : r.dof_labels) os << ',' << l << "_u," << l << "_v," << l << "_a";
  os << '\n';
  for (Eigen::Index k = 0; k < r.displacement.rows(); ++k) {
    os << k << ',' << r.time_step * static_cast<double>(k);
    for (Eigen::Index c = 0; c < r.displacement.cols(); ++c) {
      os << ',' << r.displacement(k, c) << ',' << r.velocity(k, c) << ',' << r.acceleration(k, c);
    }
    os << '\n';
  }
  os.precision(old);
}

namespace {

bool finite_state(const NewmarkState& s) {
  return std::isfinite(s.displacement.sum()) && std::isfinite(s.velocity.sum());
}

}  // namespace

NewmarkIntegrator::NewmarkIntegrator(const BeamSystem& system, NewmarkParams params)
    : system_(&system),
      params_((params.validate(), params)),
      effective_([&] {
        const double dt = params.time_step;
        const double a0 = 1.0 / (params.beta * dt * dt);
        const double a1 = params.gamma / (params.beta * dt);
        BandedSymmetric keff =
            BandedSymmetric::combine(1.0, system.stiffness_matrix, a0, system.mass_matrix);
        keff = BandedSymmetric::combine(1.0, keff, a1, system.damping_matrix);
        return BandedCholesky(keff);
      }()) {
  const double dt = params_.time_step;
  const double b = params_.beta;
  const double g = params_.gamma;
  c0_ = 1.0 / (b * dt * dt);
  c1_ = g / (b * dt);
  c2_ = 1.0 / (b * dt);
  c3_ = 1.0 / (2.0 * b) - 1.0;
  c4_ = g / b - 1.0;
  c5_ = dt * (g / (2.0 * b) - 1.0);
  mass_factor_.emplace(system.mass_matrix);
  node_dof_.resize(system.node_count());
  for (std::size_t i = 0; i < node_dof_.size(); ++i) node_dof_[i] = system.translation_dof(i);
  const auto n = static_cast<Eigen::Index>(system.dof_count());
  work_p_.resize(n);
  work_q_.resize(n);
  work_t_.resize(n);
}

void NewmarkIntegrator::load_vector(ForceRow force, Eigen::VectorXd& out) const {
  out.setZero(static_cast<Eigen::Index>(system_->dof_count()));
  for (const auto& [node, f] : force) {
    if (node >= node_dof_.size()) throw ConfigError("newmark: force applied to unknown node");
    const long dof = node_dof_[node];
    if (dof >= 0) out(dof) += f;
  }
}

NewmarkState NewmarkIntegrator::initial_state(ForceRow force) const {
  const auto n = static_cast<Eigen::Index>(system_->dof_count());
  return initial_state(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), force);
}

NewmarkState NewmarkIntegrator::initial_state(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                              ForceRow force) const {
  const std::size_t n = system_->dof_count();
  if (static_cast<std::size_t>(u.size()) != n || static_cast<std::size_t>(v.size()) != n) {
    throw ConfigError("newmark: initial state size does not match the system");
  }
  NewmarkState s{u, v, Eigen::VectorXd()};
  Eigen::VectorXd rhs;
  load_vector(force, rhs);
  rhs -= system_->stiffness_matrix * u;
  rhs -= system_->damping_matrix * v;
  s.acceleration = mass_factor_->solve(rhs);
  return s;
}

void NewmarkIntegrator::step(const NewmarkState& prev, ForceRow force, NewmarkState& next) const {
  const std::size_t n = system_->dof_count();
  const Eigen::VectorXd& u = prev.displacement;
  const Eigen::VectorXd& v = prev.velocity;
  const Eigen::VectorXd& a = prev.acceleration;

  work_p_ = c0_ * u + c2_ * v + c3_ * a;
  work_q_ = c1_ * u + c4_ * v + c5_ * a;
  load_vector(force, next.displacement);
  system_->mass_matrix.multiply({work_p_.data(), n}, {work_t_.data(), n});
  next.displacement += work_t_;
  system_->damping_matrix.multiply({work_q_.data(), n}, {work_t_.data(), n});
  next.displacement += work_t_;
  effective_.solve_in_place({next.displacement.data(), n});

  next.acceleration = c0_ * (next.displacement - u) - c2_ * v - c3_ * a;
  next.velocity = v + params_.time_step * ((1.0 - params_.gamma) * a + params_.gamma * next.acceleration);
}

double NewmarkIntegrator::node_displacement(const NewmarkState& s, std::size_t node) const {
  const long dof = node_dof_.at(node);
  return dof >= 0 ? s.displacement(dof) : 0.0;
}

double NewmarkIntegrator::node_velocity(const NewmarkState& s, std::size_t node) const {
  const long dof = node_dof_.at(node);
  return dof >= 0 ? s.velocity(dof) : 0.0;
}

double NewmarkIntegrator::node_acceleration(const NewmarkState& s, std::size_t node) const {
  const long dof = node_dof_.at(node);
  return dof >= 0 ? s.acceleration(dof) : 0.0;
}

TimeSeriesResult newmark_solve(const NewmarkIntegrator& integrator,
                               std::span<const std::vector<std::pair<std::size_t, double>>> rows,
                               const std::vector<std::size_t>& recorded_nodes,
                               const NewmarkState* initial, const StepObserver& observer) {
  if (rows.empty()) throw ConfigError("newmark: empty force history");
  std::vector<std::size_t> nodes = recorded_nodes;
  if (nodes.empty()) {
    nodes.resize(integrator.system().node_count());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
  }
  const auto T = static_cast<Eigen::Index>(rows.size());
  const auto C = static_cast<Eigen::Index>(nodes.size());
  TimeSeriesResult out;
  out.time_step = integrator.params().time_step;
  for (std::size_t node : nodes) {
    if (node >= integrator.system().node_count()) throw ConfigError("newmark: recorded node out of range");
    out.dof_labels.push_back("node" + std::to_string(node));
  }
  out.displacement.resize(T, C);
  out.velocity.resize(T, C);
  out.acceleration.resize(T, C);

  auto record = [&](Eigen::Index k, const NewmarkState& s) {
    for (Eigen::Index c = 0; c < C; ++c) {
      const std::size_t node = nodes[static_cast<std::size_t>(c)];
      out.displacement(k, c) = integrator.node_displacement(s, node);
      out.velocity(k, c) = integrator.node_velocity(s, node);
      out.acceleration(k, c) = integrator.node_acceleration(s, node);
    }
  };

  NewmarkState state = initial ? *initial : integrator.initial_state(rows[0]);
  NewmarkState next = state;
  record(0, state);
  if (observer) observer(0, state);
  for (Eigen::Index k = 1; k < T; ++k) {
    integrator.step(state, rows[static_cast<std::size_t>(k)], next);
    if (!finite_state(next)) {
      std::ostringstream msg;
      msg << "newmark: non-finite response at step " << k;
      throw IntegrationError(msg.str(), static_cast<std::size_t>(k));
    }
    std::swap(state, next);
    record(k, state);
    if (observer) observer(static_cast<std::size_t>(k), state);
  }
  return out;
}

TimeSeriesResult newmark_solve(const BeamSystem& system, const TrafficLoadMatrix& load,
                               const NewmarkParams& params,
                               const std::vector<std::size_t>& recorded_nodes) {
  if (load.node_count != system.node_count()) {
    throw ConfigError("newmark: load column count does not match the bridge nodes");
  }
  if (std::abs(load.time_step - params.time_step) > 1e-12 * params.time_step) {
    throw ConfigError("newmark: load time_step differs from the integration time_step");
  }
  const NewmarkIntegrator integrator(system, params);
  return newmark_solve(integrator, load.rows, recorded_nodes);
}

NewmarkStepper::NewmarkStepper(const NewmarkIntegrator& integrator, NewmarkState initial)
    : integrator_(&integrator), previous_(initial), current_(std::move(initial)) {}

const NewmarkState& NewmarkStepper::advance(ForceRow force) {
  std::swap(previous_, current_);
  integrator_->step(previous_, force, current_);
  ++step_;
  if (!finite_state(current_)) {
    std::ostringstream msg;
    msg << "newmark: non-finite response at step " << step_;
    throw IntegrationError(msg.str(), step_);
  }
  return current_;
}

const NewmarkState& NewmarkStepper::resolve(ForceRow force) {
  if (step_ == 0) throw ConfigError("newmark: cannot re-solve step 0, no prior step exists");
  integrator_->step(previous_, force, current_);
  if (!finite_state(current_)) {
    std::ostringstream msg;
    msg << "newmark: non-finite response at step " << step_;
    throw IntegrationError(msg.str(), step_);
  }
  return current_;
}

// ---------------------------------------------------------------------------

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

}  // namespace

std::size_t DormandPrince::integrate(const Rhs& f, double t0, double t1, Vec& y,
                                     double& h_guess) const {
  constexpr std::size_t N = kDim;
  const double span = t1 - t0;
  if (!(span > 0.0)) throw ConfigError("runge-kutta: interval must be positive");
  double h = h_guess > 0.0 ? h_guess : span;
  double t = t0;
  Vec k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
  f(t, y, k1);
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  while (t < t1) {
    if (++attempts > options_.max_steps_per_interval) {
      throw IntegrationError("runge-kutta: too many steps in one output interval", 0);
    }
    double step = h;
    bool last = false;
    if (t + step >= t1 - 1e-12 * span) {
      step = t1 - t;
      last = true;
    }
    if (step < options_.min_step * span) {
      std::ostringstream msg;
      msg << "runge-kutta: step size underflow (h=" << step << " at t=" << t << ")";
      throw IntegrationError(msg.str(), 0);
    }
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + step * a21 * k1[i];
    f(t + c2 * step, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + step * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * step, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * step, tmp, k4);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    f(t + c5 * step, tmp, k5);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    const double t_end = last ? t1 : t + step;
    f(t_end, tmp, k6);
    for (std::size_t i = 0; i < N; ++i) {
      ynew[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    f(t_end, ynew, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                               e7 * k7[i]);
      const double sc = options_.abs_tol + options_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(N));
    if (!std::isfinite(err)) throw IntegrationError("runge-kutta: non-finite state", 0);

    const double factor =
        err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      t = t_end;
      y = ynew;
      k1 = k7;
      ++accepted;
      // Keep the unclipped proposal so landing on the grid does not shrink h.
      if (!last || step >= h) h = step * factor;
      else h = std::max(h, step * factor);
    } else {
      h = step * std::max(0.2, factor);
    }
  }
  h_guess = h;
  return accepted;
}

TwoDofOde::TwoDofOde(const TwoDofSystem& system) : sys_(system), mass_inverse_(system.mass.inverse()) {}

Eigen::Vector2d TwoDofOde::acceleration(const TwoDofState& s, double u, double v) const {
  return mass_inverse_ * (sys_.input_gain * u + sys_.rate_gain * v - sys_.damping * s.velocity -
                          sys_.stiffness * s.displacement);
}

void TwoDofOde::advance(TwoDofState& state, double dt, double u0, double v0, double u1, double v1,
                        const DormandPrince& rk, double& h_guess) const {
  const double du = (u1 - u0) / dt;
  const double dv = (v1 - v0) / dt;
  auto rhs = [&](double t, const DormandPrince::Vec& y, DormandPrince::Vec& dydt) {
    const double u = u0 + du * t;
    const double v = v0 + dv * t;
    const Eigen::Vector2d x(y[0], y[1]);
    const Eigen::Vector2d xd(y[2], y[3]);
    const Eigen::Vector2d acc = mass_inverse_ * (sys_.input_gain * u + sys_.rate_gain * v -
                                                 sys_.damping * xd - sys_.stiffness * x);
    dydt = {y[2], y[3], acc(0), acc(1)};
  };
  DormandPrince::Vec y = {state.displacement(0), state.displacement(1), state.velocity(0),
                          state.velocity(1)};
  rk.integrate(rhs, 0.0, dt, y, h_guess);
  state.displacement = {y[0], y[1]};
  state.velocity = {y[2], y[3]};
}

TimeSeriesResult rk_integrate(const TwoDofSystem& system, std::span<const double> input,
                              std::span<const double> input_rate, double dt_output,
                              const RkOptions& options, TwoDofState initial) {
  if (input.size() != input_rate.size()) throw ConfigError("runge-kutta: input series lengths differ");
  if (input.empty()) throw ConfigError("runge-kutta: empty input series");
  if (!(dt_output > 0.0)) throw ConfigError("runge-kutta: dt must be positive");
  if (!(options.rel_tol > 0.0) || !(options.abs_tol > 0.0)) {
    throw ConfigError("runge-kutta: tolerances must be positive");
  }
  const TwoDofOde ode(system);
  const DormandPrince rk(options);
  const auto T = static_cast<Eigen::Index>(input.size());
  TimeSeriesResult out;
  out.time_step = dt_output;
  out.dof_labels = {"dof0", "dof1"};
  out.displacement.resize(T, 2);
  out.velocity.resize(T, 2);
  out.acceleration.resize(T, 2);
  TwoDofState s = initial;
  auto record = [&](Eigen::Index k) {
    const auto kk = static_cast<std::size_t>(k);
    out.displacement.row(k) = s.displacement.transpose();
    out.velocity.row(k) = s.velocity.transpose();
    out.acceleration.row(k) = ode.acceleration(s, input[kk], input_rate[kk]).transpose();
  };
  record(0);
  double h = 0.0;
  for (Eigen::Index k = 1; k < T; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    try {
      ode.advance(s, dt_output, input[kk - 1], input_rate[kk - 1], input[kk], input_rate[kk], rk, h);
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string(e.what()) + " (output step " + std::to_string(k) + ")", kk);
    }
    record(k);
  }
  return out;
}

}  // namespace vbi
