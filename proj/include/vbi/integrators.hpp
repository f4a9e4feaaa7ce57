#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vbi/banded.hpp"
#include "vbi/excitation.hpp"
#include "vbi/model.hpp"

namespace vbi {

struct NewmarkParams {
  double beta = 0.25;
  double gamma = 0.5;
  double time_step = 0.01;

  void validate() const;
};

/// Recorded response history. Rows are time samples, columns the recorded DOFs.
struct TimeSeriesResult {
  double time_step = 0.0;
  std::vector<std::string> dof_labels;
  Eigen::MatrixXd displacement;
  Eigen::MatrixXd velocity;
  Eigen::MatrixXd acceleration;

  std::size_t steps() const { return static_cast<std::size_t>(displacement.rows()); }
  /// Column of `label`; throws ConfigError if absent.
  Eigen::Index column(const std::string& label) const;
};

/// CSV with header "# dt=<dt>" then "step,time,<label>_u,<label>_v,<label>_a,...".
void write_time_series_csv(std::ostream& os, const TimeSeriesResult& result);

struct NewmarkState {
  Eigen::VectorXd displacement;
  Eigen::VectorXd velocity;
  Eigen::VectorXd acceleration;
};

/// Nodal vertical forces for one time sample, sparse (node, force) pairs.
using ForceRow = std::span<const std::pair<std::size_t, double>>;

/// Newmark-beta recurrence for a BeamSystem with a cached factorization of the
/// effective stiffness K + M / (beta dt^2) + gamma C / (beta dt).
///
/// Loads are given per node (vertical); supports ignore their load and
/// rotations are never loaded.
class NewmarkIntegrator {
 public:
  NewmarkIntegrator(const BeamSystem& system, NewmarkParams params);

  const NewmarkParams& params() const { return params_; }
  const BeamSystem& system() const { return *system_; }

  /// State at t0 from displacement and velocity; acceleration from equilibrium.
  NewmarkState initial_state(ForceRow force) const;
  NewmarkState initial_state(const Eigen::VectorXd& displacement, const Eigen::VectorXd& velocity,
                             ForceRow force) const;

  /// Advances `previous` one step under `force`.
  void step(const NewmarkState& previous, ForceRow force, NewmarkState& next) const;

  /// Vertical translation / velocity of `node` (zero at supports).
  double node_displacement(const NewmarkState& s, std::size_t node) const;
  double node_velocity(const NewmarkState& s, std::size_t node) const;
  double node_acceleration(const NewmarkState& s, std::size_t node) const;

 private:
  void load_vector(ForceRow force, Eigen::VectorXd& out) const;

  const BeamSystem* system_;
  NewmarkParams params_;
  BandedCholesky effective_;
  std::optional<BandedCholesky> mass_factor_;
  std::vector<long> node_dof_;
  // Recurrence constants.
  double c0_, c1_, c2_, c3_, c4_, c5_;
  mutable Eigen::VectorXd work_p_, work_q_, work_t_;
};

/// Observer called after every computed step (including step 0).
using StepObserver = std::function<void(std::size_t step, const NewmarkState& state)>;

/// Full Newmark integration of a force history.
///
/// `rows` supplies one force row per time sample; the result records vertical
/// motion at `recorded_nodes` (all nodes when empty).
TimeSeriesResult newmark_solve(const NewmarkIntegrator& integrator,
                               std::span<const std::vector<std::pair<std::size_t, double>>> rows,
                               const std::vector<std::size_t>& recorded_nodes = {},
                               const NewmarkState* initial = nullptr,
                               const StepObserver& observer = {});

TimeSeriesResult newmark_solve(const BeamSystem& system, const TrafficLoadMatrix& load,
                               const NewmarkParams& params,
                               const std::vector<std::size_t>& recorded_nodes = {});

/// Step-wise driver that keeps the last two states so the current step can be
/// re-solved under a modified force row.
class NewmarkStepper {
 public:
  NewmarkStepper(const NewmarkIntegrator& integrator, NewmarkState initial);

  std::size_t step_index() const { return step_; }
  const NewmarkState& current() const { return current_; }

  /// Moves to the next step under `force`.
  const NewmarkState& advance(ForceRow force);

  /// Recomputes the current step from the previous state under `force`.
  /// Throws ConfigError at step 0 (no prior step exists).
  const NewmarkState& resolve(ForceRow force);

 private:
  const NewmarkIntegrator* integrator_;
  NewmarkState previous_;
  NewmarkState current_;
  std::size_t step_ = 0;
};

// ---------------------------------------------------------------------------
// Adaptive Runge-Kutta for small first-order systems.

struct RkOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double min_step = 1e-14;  // relative to the output interval
  std::size_t max_steps_per_interval = 100000;
};

/// Dormand-Prince 5(4) with step-size control. Integration restarts at every
/// output grid point: the last step in an interval is shortened to land on it.
class DormandPrince {
 public:
  static constexpr std::size_t kDim = 4;
  using Vec = std::array<double, kDim>;
  using Rhs = std::function<void(double t, const Vec& y, Vec& dydt)>;

  explicit DormandPrince(RkOptions options = {}) : options_(options) {}

  /// Integrates y from t0 to t1. `h_guess` carries the step size between
  /// calls (0 picks an initial step). Returns the number of accepted steps.
  std::size_t integrate(const Rhs& f, double t0, double t1, Vec& y, double& h_guess) const;

 private:
  RkOptions options_;
};

/// Linear time-invariant 2-DOF system M x'' + C x' + K x = B_u u + B_v v driven
/// by a scalar input u(t) and its rate v(t), both linearly interpolated on an
/// output grid. Returns the state histories on that grid.
struct TwoDofSystem {
  Eigen::Matrix2d mass;
  Eigen::Matrix2d damping;
  Eigen::Matrix2d stiffness;
  Eigen::Vector2d input_gain;  // multiplies u
  Eigen::Vector2d rate_gain;   // multiplies v
};

struct TwoDofState {
  Eigen::Vector2d displacement = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
};

/// Right-hand side of the 4-state form with inputs interpolated between
/// (u0, v0) at t0 and (u1, v1) at t1.
class TwoDofOde {
 public:
  explicit TwoDofOde(const TwoDofSystem& system);

  /// Advances one output interval [t0, t0 + dt].
  void advance(TwoDofState& state, double dt, double u0, double v0, double u1, double v1,
               const DormandPrince& rk, double& h_guess) const;

  Eigen::Vector2d acceleration(const TwoDofState& state, double u, double v) const;

 private:
  TwoDofSystem sys_;
  Eigen::Matrix2d mass_inverse_;
};

TimeSeriesResult rk_integrate(const TwoDofSystem& system, std::span<const double> input,
                              std::span<const double> input_rate, double dt_output,
                              const RkOptions& options = {}, TwoDofState initial = {});

}  // namespace vbi
