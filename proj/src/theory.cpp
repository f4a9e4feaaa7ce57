#include "vbi/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "vbi/errors.hpp"

namespace vbi {

namespace {

constexpr double kPoleTol = 1e-12;

bool near_zero(double value, double scale) { return std::abs(value) <= kPoleTol * std::max(1.0, std::abs(scale)); }

std::string describe(const TheoryConfig& c) {
  std::ostringstream os;
  os.precision(10);
  os << "alpha=" << c.alpha << ", beta=" << c.beta << ", gamma=" << c.gamma;
  return os.str();
}

// Denominator polynomials of the modal amplitudes.
double d1(double a, double b) { return a * a - 2.0 * a * b - 4.0 * a + b * b + 3.0 * b + 2.0; }
double d2(double a, double b) { return a * a - 2.0 * a * b + b * b + b; }

}  // namespace

void TheoryConfig::validate() const {
  if (!(beta > 0.0)) throw ConfigError("theory: beta must be positive");
  if (!(alpha > beta)) throw ConfigError("theory: alpha must exceed beta");
  if (!(gamma > 0.0)) throw ConfigError("theory: gamma must be positive");
  if (!(k > 0.0)) throw ConfigError("theory: k must be positive");
  if (!std::isfinite(amplitude)) throw ConfigError("theory: amplitude must be finite");
}

EigenApprox eigen_approx(const TheoryConfig& cfg) {
  cfg.validate();
  const double a = cfg.alpha, b = cfg.beta;
  if (near_zero(b - a + 1.0, a)) {
    throw ConfigError("theory: beta - alpha + 1 = 0 gives a degenerate mode shape (" + describe(cfg) + ")");
  }
  EigenApprox e;
  e.lambda1 = 1.0;
  e.lambda2 = b / a;
  e.mode_shapes << 1.0 / (b - a + 1.0), (a - b) / a, 1.0, 1.0;
  return e;
}

std::pair<double, double> exact_eigenvalues(const TheoryConfig& cfg) {
  cfg.validate();
  const double a = cfg.alpha, b = cfg.beta;
  // alpha l^2 - (alpha + beta + 1) l + beta = 0, stable root pair.
  const double p = a + b + 1.0;
  const double disc = std::sqrt(p * p - 4.0 * a * b);
  const double hi = (p + disc) / (2.0 * a);
  const double lo = b / (a * hi);
  return {lo, hi};
}

std::pair<double, double> modal_amplitudes(const TheoryConfig& cfg) {
  cfg.validate();
  const double a = cfg.alpha, b = cfg.beta, g2 = cfg.gamma * cfg.gamma;
  const double den1 = (g2 - 1.0) * d1(a, b) * cfg.k;
  const double den2 = (b - a * g2) * d2(a, b) * cfg.k;
  if (near_zero(g2 - 1.0, 1.0) || near_zero(b - a * g2, b) || d1(a, b) == 0.0 || d2(a, b) == 0.0) {
    throw PoleError("closed-form amplitude has a pole at " + describe(cfg));
  }
  return {cfg.amplitude * (b - a + 1.0) / den1, cfg.amplitude * a * (a - b) / den2};
}

double coupled_amplitude(const TheoryConfig& cfg) {
  cfg.validate();
  const double a = cfg.alpha, b = cfg.beta, g2 = cfg.gamma * cfg.gamma;
  if (near_zero(g2 - 1.0, 1.0) || near_zero(b - a * g2, b) || d1(a, b) == 0.0 || d2(a, b) == 0.0) {
    throw PoleError("coupled amplitude has a pole at " + describe(cfg));
  }
  const double sum = 1.0 / ((g2 - 1.0) * d1(a, b)) + (a - b) * (a - b) / ((b - a * g2) * d2(a, b));
  return std::abs(cfg.amplitude * sum / cfg.k);
}

std::optional<double> try_coupled_amplitude(const TheoryConfig& cfg) {
  try {
    return coupled_amplitude(cfg);
  } catch (const PoleError&) {
    return std::nullopt;
  }
}

double uncoupled_amplitude(const TheoryConfig& cfg, bool printed_form) {
  cfg.validate();
  const double a = cfg.alpha, b = cfg.beta, g2 = cfg.gamma * cfg.gamma;
  if (printed_form) return std::abs(cfg.amplitude / (cfg.k * (b + a * g2)));
  if (near_zero(b - a * g2, b)) throw PoleError("uncoupled amplitude has a pole at " + describe(cfg));
  return std::abs(cfg.amplitude / (cfg.k * (b - a * g2)));
}

std::optional<double> try_uncoupled_amplitude(const TheoryConfig& cfg, bool printed_form) {
  try {
    return uncoupled_amplitude(cfg, printed_form);
  } catch (const PoleError&) {
    return std::nullopt;
  }
}

double exact_oracle(const TheoryConfig& cfg) {
  cfg.validate();
  const double a = cfg.alpha, b = cfg.beta, g2 = cfg.gamma * cfg.gamma;
  // k [[1 + b - a g2, -1], [-1, 1 - g2]] X = [A; 0]
  const double d11 = 1.0 + b - a * g2;
  const double d22 = 1.0 - g2;
  const double det = d11 * d22 - 1.0;
  if (near_zero(det, d11 * d22)) throw PoleError("2x2 dynamic stiffness is singular at " + describe(cfg));
  return std::abs(cfg.amplitude * d22 / (cfg.k * det));
}

std::optional<double> try_exact_oracle(const TheoryConfig& cfg) {
  try {
    return exact_oracle(cfg);
  } catch (const PoleError&) {
    return std::nullopt;
  }
}

std::pair<double, double> exact_oracle_physical(double mb, double kb, double mv, double kv,
                                                double omega, double amplitude) {
  if (!(mb > 0.0) || !(kb > 0.0) || mv < 0.0 || kv < 0.0) {
    throw ConfigError("oracle: masses and stiffnesses must be positive (vehicle may be zero)");
  }
  const double w2 = omega * omega;
  Eigen::Matrix2d D;
  D << kb + kv - mb * w2, -kv, -kv, kv - mv * w2;
  if (kv == 0.0 && mv == 0.0) {
    // Detached vehicle: the bridge is a plain SDOF.
    if (near_zero(D(0, 0), kb)) throw PoleError("oracle: bridge resonance");
    return {std::abs(amplitude / D(0, 0)), 0.0};
  }
  const double det = D.determinant();
  if (near_zero(det, std::abs(D(0, 0) * D(1, 1)))) throw PoleError("oracle: resonance");
  const Eigen::Vector2d x = D.inverse() * Eigen::Vector2d(amplitude, 0.0);
  return {std::abs(x(0)), std::abs(x(1))};
}

TheoryResult evaluate_theory(const TheoryConfig& cfg) {
  TheoryResult r;
  const EigenApprox e = eigen_approx(cfg);
  r.eigenvalues = {e.lambda1, e.lambda2};
  r.mode_shapes = e.mode_shapes;
  r.modal_amps = modal_amplitudes(cfg);
  r.coupled_amp = coupled_amplitude(cfg);
  r.uncoupled_amp = uncoupled_amplitude(cfg);
  r.oracle_amp = exact_oracle(cfg);
  return r;
}

void SweepOptions::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("theory.") + name + " must be positive");
  };
  positive(alpha_start, "alpha_start");
  positive(alpha_end, "alpha_end");
  positive(beta_start, "beta_start");
  positive(beta_end, "beta_end");
  positive(gamma_min, "gamma_min");
  positive(gamma_max, "gamma_max");
  positive(k, "k");
  if (gamma_min > gamma_max) throw ConfigError("theory.gamma_min must not exceed theory.gamma_max");
  if (path_points < 2) throw ConfigError("theory.path_points must be >= 2");
  if (gamma_points < 1) throw ConfigError("theory.gamma_points must be >= 1");
  if (gamma_points > 1 && gamma_min == gamma_max) {
    throw ConfigError("theory: gamma_min equals gamma_max with more than one gamma point");
  }
}

std::vector<PathPoint> sweep_path(const SweepOptions& o) {
  o.validate();
  std::vector<PathPoint> raw;
  const double la0 = std::log(o.alpha_start), la1 = std::log(o.alpha_end);
  const double lb0 = std::log(o.beta_start), lb1 = std::log(o.beta_end);
  for (std::size_t i = 0; i < o.path_points; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(o.path_points - 1);
    PathPoint p;
    p.position = s;
    p.alpha = std::exp(la0 + s * (la1 - la0));
    p.beta = std::exp(lb0 + s * (lb1 - lb0));
    // Pin the ends exactly.
    if (i == 0) p.alpha = o.alpha_start, p.beta = o.beta_start;
    if (i + 1 == o.path_points) p.alpha = o.alpha_end, p.beta = o.beta_end;
    raw.push_back(p);
  }
  if (!o.clip_to_valid) return raw;
  std::vector<PathPoint> kept;
  for (const PathPoint& p : raw) {
    if (p.alpha > p.beta + 1.0) kept.push_back(p);
  }
  if (kept.size() < 2) throw ConfigError("theory: fewer than two path points satisfy alpha > beta + 1");
  const double s0 = kept.front().position, s1 = kept.back().position;
  for (PathPoint& p : kept) p.position = (p.position - s0) / (s1 - s0);
  return kept;
}

SweepResult parametric_sweep(const SweepOptions& o) {
  SweepResult r;
  r.path = sweep_path(o);
  r.clipped = o.path_points - r.path.size();
  const double lg0 = std::log(o.gamma_min), lg1 = std::log(o.gamma_max);
  for (std::size_t j = 0; j < o.gamma_points; ++j) {
    const double t = o.gamma_points == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(o.gamma_points - 1);
    r.gammas.push_back(j + 1 == o.gamma_points && o.gamma_points > 1 ? o.gamma_max
                                                                      : std::exp(lg0 + t * (lg1 - lg0)));
  }
  r.gammas.front() = o.gamma_min;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  r.points.reserve(r.path.size() * r.gammas.size());
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    for (double g : r.gammas) {
      TheoryConfig c{r.path[i].alpha, r.path[i].beta, g, o.k, o.amplitude};
      SweepPoint p;
      p.path_index = i;
      p.alpha = c.alpha;
      p.beta = c.beta;
      p.gamma = g;
      const auto cp = try_coupled_amplitude(c);
      const auto un = try_uncoupled_amplitude(c, o.printed_uncoupled);
      const auto orc = try_exact_oracle(c);
      p.coupled = cp.value_or(nan);
      p.uncoupled = un.value_or(nan);
      p.oracle = orc.value_or(nan);
      p.pole = !cp || !un || *cp == 0.0;
      p.error_pct = p.pole ? nan : std::abs(*cp - *un) / *cp * 100.0;
      r.points.push_back(p);
    }
  }
  return r;
}

std::pair<double, double> SweepResult::peak(std::size_t path_index) const {
  double best = -1.0, at_gamma = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 0; j < gammas.size(); ++j) {
    const SweepPoint& p = at(path_index, j);
    if (!p.pole && p.error_pct > best) best = p.error_pct, at_gamma = p.gamma;
  }
  return {best, at_gamma};
}

std::size_t SweepResult::pole_count() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const SweepPoint& p) { return p.pole; }));
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  const auto old = os.precision(12);
  os << "alpha,beta,gamma,coupled,uncoupled,oracle,error_pct\n";
  auto put = [&os](double v) {
    if (std::isnan(v)) os << "nan";
    else os << v;
  };
  for (const SweepPoint& p : r.points) {
    os << p.alpha << ',' << p.beta << ',' << p.gamma << ',';
    put(p.coupled);
    os << ',';
    put(p.uncoupled);
    os << ',';
    put(p.oracle);
    os << ',';
    put(p.error_pct);
    os << '\n';
  }
  os.precision(old);
}

void write_sweep_axis_csv(std::ostream& os, const SweepResult& r) {
  const auto old = os.precision(12);
  os << "position,alpha,beta\n";
  for (const PathPoint& p : r.path) os << p.position << ',' << p.alpha << ',' << p.beta << '\n';
  os.precision(old);
}

}  // namespace vbi
