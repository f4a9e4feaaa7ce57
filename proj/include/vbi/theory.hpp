#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vbi {

/// Two-DOF bridge/vehicle idealization in ratio form: m_b = alpha m,
/// k_b = beta k, gamma = omega_e / omega_v with omega_v = sqrt(k / m).
struct TheoryConfig {
  double alpha = 10000.0;
  double beta = 10.0;
  double gamma = 0.1;
  double k = 1.0;          // N/m
  double amplitude = 1.0;  // N

  void validate() const;
};

struct EigenApprox {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  Eigen::Matrix2d mode_shapes;  // columns are modes; bridge row first
};

struct TheoryResult {
  double coupled_amp = 0.0;
  double uncoupled_amp = 0.0;
  double oracle_amp = 0.0;
  std::pair<double, double> eigenvalues;
  Eigen::Matrix2d mode_shapes;
  std::pair<double, double> modal_amps;
};

/// lambda = m omega^2 / k under alpha + beta + 1 ~ alpha + beta.
EigenApprox eigen_approx(const TheoryConfig& cfg);

/// Roots of the unapproximated characteristic quadratic, ascending.
std::pair<double, double> exact_eigenvalues(const TheoryConfig& cfg);

/// Modal amplitudes (q1, q2) of the closed-form derivation. PoleError at resonance.
std::pair<double, double> modal_amplitudes(const TheoryConfig& cfg);

/// Closed-form coupled bridge amplitude (absolute value, scaled by the load
/// amplitude). Throws PoleError at gamma = 1 or gamma^2 = beta / alpha.
double coupled_amplitude(const TheoryConfig& cfg);
std::optional<double> try_coupled_amplitude(const TheoryConfig& cfg);

/// Bridge alone under the same load: A / (k |beta - alpha gamma^2|).
/// `printed_form` selects the alternative denominator k (beta + alpha gamma^2)
/// for comparison only.
double uncoupled_amplitude(const TheoryConfig& cfg, bool printed_form = false);
std::optional<double> try_uncoupled_amplitude(const TheoryConfig& cfg, bool printed_form = false);

/// Direct 2x2 harmonic solve, no approximation. Returns |x_b|; throws
/// PoleError when the dynamic stiffness is singular.
double exact_oracle(const TheoryConfig& cfg);
std::optional<double> try_exact_oracle(const TheoryConfig& cfg);

/// Same solve in physical units (kg, N/m, rad/s, N). Returns (|x_b|, |x_v|).
std::pair<double, double> exact_oracle_physical(double bridge_mass, double bridge_stiffness,
                                                double vehicle_mass, double vehicle_stiffness,
                                                double omega, double amplitude);

TheoryResult evaluate_theory(const TheoryConfig& cfg);

struct SweepOptions {
  double alpha_start = 50.0;  // stiff end
  double alpha_end = 10000.0;
  double beta_start = 500.0;
  double beta_end = 10.0;
  double gamma_min = 1e-3;
  double gamma_max = 1e3;
  std::size_t path_points = 41;
  std::size_t gamma_points = 100;
  double k = 1.0;
  double amplitude = 1.0;
  /// Drop path points with alpha <= beta + 1 and renormalize the axis.
  bool clip_to_valid = true;
  bool printed_uncoupled = false;

  void validate() const;
};

struct PathPoint {
  double position = 0.0;  // 0 stiffest, 1 most flexible
  double alpha = 0.0;
  double beta = 0.0;
};

struct SweepPoint {
  std::size_t path_index = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double coupled = 0.0;
  double uncoupled = 0.0;
  double oracle = 0.0;
  double error_pct = 0.0;
  bool pole = false;
};

struct SweepResult {
  std::vector<PathPoint> path;
  std::vector<double> gammas;
  std::vector<SweepPoint> points;  // path-major, gamma-minor
  std::size_t clipped = 0;         // path points removed by clip_to_valid

  const SweepPoint& at(std::size_t path_index, std::size_t gamma_index) const {
    return points[path_index * gammas.size() + gamma_index];
  }
  /// Largest error over gamma at one path point, poles excluded. Returns the
  /// error and the gamma where it occurs.
  std::pair<double, double> peak(std::size_t path_index) const;
  std::size_t pole_count() const;
};

/// (alpha, beta) pairs linear in log space between the two ends.
std::vector<PathPoint> sweep_path(const SweepOptions& options);

SweepResult parametric_sweep(const SweepOptions& options);

/// Header: alpha,beta,gamma,coupled,uncoupled,oracle,error_pct. Pole rows
/// carry "nan" amplitudes.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// Header: position,alpha,beta.
void write_sweep_axis_csv(std::ostream& os, const SweepResult& result);

}  // namespace vbi
