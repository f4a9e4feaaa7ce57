#include "vbi/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "vbi/errors.hpp"

namespace vbi {

namespace {

constexpr std::size_t kBandwidth = 3;

// Global DOF numbering: 2 * node is the translation, 2 * node + 1 the rotation.
// The end translations (0 and 2 * elements) are constrained.
long free_index(std::size_t global, std::size_t elements) {
  const std::size_t last_translation = 2 * elements;
  if (global == 0 || global == last_translation) return -1;
  if (global < last_translation) return static_cast<long>(global) - 1;
  return static_cast<long>(global) - 2;
}

}  // namespace

void BoxSection::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("box section: ") + name + " must be positive");
    }
  };
  positive(depth, "depth");
  positive(width, "width");
  positive(flange_thickness, "flange_thickness");
  positive(web_thickness, "web_thickness");
  if (2.0 * flange_thickness > depth) {
    throw ConfigError("box section: 2 * flange_thickness exceeds depth");
  }
  if (2.0 * web_thickness > width) {
    throw ConfigError("box section: 2 * web_thickness exceeds width");
  }
}

SectionProperties section_properties(const BoxSection& s) {
  s.validate();
  const double inner_w = s.width - 2.0 * s.web_thickness;
  const double inner_d = s.depth - 2.0 * s.flange_thickness;
  SectionProperties p;
  p.area = s.width * s.depth - inner_w * inner_d;
  p.second_moment = (s.width * std::pow(s.depth, 3) - inner_w * std::pow(inner_d, 3)) / 12.0;
  return p;
}

std::size_t BridgeSpec::element_count() const {
  return static_cast<std::size_t>(std::llround(span / node_spacing));
}

void BridgeSpec::validate() const {
  if (!(span > 0.0) || !std::isfinite(span)) throw ConfigError("bridge: span must be positive");
  if (!(node_spacing > 0.0)) throw ConfigError("bridge: node_spacing must be positive");
  const double ratio = span / node_spacing;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 2.0) {
    throw ConfigError("bridge: span / node_spacing must be an integer >= 2");
  }
  section.validate();
  if (!(elastic_modulus > 0.0)) throw ConfigError("bridge: elastic_modulus must be positive");
  if (!(mass_density > 0.0)) throw ConfigError("bridge: mass_density must be positive");
  if (!(damping_ratio >= 0.0 && damping_ratio < 1.0)) {
    throw ConfigError("bridge: damping_ratio must lie in [0, 1)");
  }
  const auto [mi, mj] = damping_calibration_modes;
  if (mi < 1 || mj < 1 || mi == mj) {
    throw ConfigError("bridge: damping calibration modes must be distinct and >= 1");
  }
}

const std::vector<ReferenceBridge>& reference_bridges() {
  static const std::vector<ReferenceBridge> table = {
      {15.0, {0.60, 0.30, 0.04, 0.02}, 8.03},   {30.0, {1.10, 0.50, 0.05, 0.03}, 3.63},
      {50.0, {1.60, 1.30, 0.10, 0.05}, 2.05},   {100.0, {2.40, 2.00, 0.15, 0.10}, 0.75},
      {200.0, {3.00, 2.50, 0.15, 0.10}, 0.24},  {500.0, {5.00, 4.00, 0.50, 0.25}, 0.06},
  };
  return table;
}

BridgeSpec reference_bridge(double span, double node_spacing) {
  for (const auto& ref : reference_bridges()) {
    if (std::abs(ref.span - span) < 1e-9) {
      BridgeSpec spec;
      spec.span = ref.span;
      spec.section = ref.section;
      spec.node_spacing = node_spacing;
      return spec;
    }
  }
  std::ostringstream msg;
  msg << "no reference bridge with span " << span << " m (known: 15, 30, 50, 100, 200, 500)";
  throw ConfigError(msg.str());
}

long BeamSystem::translation_dof(std::size_t node) const {
  if (lumped) return node < dof_count() ? static_cast<long>(node) : -1;
  const std::size_t elements = node_count() - 1;
  return free_index(2 * node, elements);
}

BeamSystem lumped_system(BandedSymmetric mass, BandedSymmetric stiffness, BandedSymmetric damping) {
  const std::size_t n = mass.size();
  if (n == 0 || stiffness.size() != n || damping.size() != n || stiffness.bandwidth() != mass.bandwidth() ||
      damping.bandwidth() != mass.bandwidth()) {
    throw ConfigError("lumped system: matrices must be non-empty with equal size and bandwidth");
  }
  BeamSystem s;
  s.mass_matrix = std::move(mass);
  s.stiffness_matrix = std::move(stiffness);
  s.damping_matrix = std::move(damping);
  s.node_positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.node_positions[i] = static_cast<double>(i);
  s.lumped = true;
  return s;
}

BeamSystem assemble_undamped(const BridgeSpec& spec) {
  spec.validate();
  const SectionProperties props = section_properties(spec.section);
  const std::size_t elements = spec.element_count();
  const double h = spec.span / static_cast<double>(elements);
  const double EI = spec.elastic_modulus * props.second_moment;
  const double rhoA = spec.mass_density * props.area;
  const std::size_t n_free = 2 * elements;

  // Cubic Hermite element, DOFs (w1, theta1, w2, theta2).
  const double k0 = EI / (h * h * h);
  const std::array<std::array<double, 4>, 4> ke = {{
      {12 * k0, 6 * h * k0, -12 * k0, 6 * h * k0},
      {6 * h * k0, 4 * h * h * k0, -6 * h * k0, 2 * h * h * k0},
      {-12 * k0, -6 * h * k0, 12 * k0, -6 * h * k0},
      {6 * h * k0, 2 * h * h * k0, -6 * h * k0, 4 * h * h * k0},
  }};
  const double m0 = rhoA * h / 420.0;
  const std::array<std::array<double, 4>, 4> me = {{
      {156 * m0, 22 * h * m0, 54 * m0, -13 * h * m0},
      {22 * h * m0, 4 * h * h * m0, 13 * h * m0, -3 * h * h * m0},
      {54 * m0, 13 * h * m0, 156 * m0, -22 * h * m0},
      {-13 * h * m0, -3 * h * h * m0, -22 * h * m0, 4 * h * h * m0},
  }};

  BeamSystem sys;
  sys.mass_matrix = BandedSymmetric(n_free, kBandwidth);
  sys.stiffness_matrix = BandedSymmetric(n_free, kBandwidth);
  sys.damping_matrix = BandedSymmetric(n_free, kBandwidth);
  sys.node_positions.resize(elements + 1);
  for (std::size_t i = 0; i <= elements; ++i) sys.node_positions[i] = h * static_cast<double>(i);
  sys.constrained_dofs = {0, 2 * elements};

  for (std::size_t e = 0; e < elements; ++e) {
    const std::array<long, 4> dofs = {free_index(2 * e, elements), free_index(2 * e + 1, elements),
                                      free_index(2 * e + 2, elements),
                                      free_index(2 * e + 3, elements)};
    for (std::size_t a = 0; a < 4; ++a) {
      if (dofs[a] < 0) continue;
      for (std::size_t b = 0; b <= a; ++b) {
        if (dofs[b] < 0) continue;
        const auto i = static_cast<std::size_t>(dofs[a]);
        const auto j = static_cast<std::size_t>(dofs[b]);
        // add() mirrors off-diagonals; a diagonal pair a == b is added once.
        sys.mass_matrix.add(i, j, me[a][b]);
        sys.stiffness_matrix.add(i, j, ke[a][b]);
      }
    }
  }
  return sys;
}

BeamSystem assemble_beam(const BridgeSpec& spec) {
  BeamSystem sys = assemble_undamped(spec);
  // Check positive definiteness up front so the error names the model, not the eigen solver.
  BandedCholesky check(sys.stiffness_matrix);
  (void)check;
  sys.damping_matrix = rayleigh_damping(sys.mass_matrix, sys.stiffness_matrix, spec.damping_ratio,
                                        spec.damping_calibration_modes, &sys.rayleigh);
  return sys;
}

std::vector<double> modal_frequencies(const BandedSymmetric& mass,
                                      const BandedSymmetric& stiffness, std::size_t count) {
  const std::size_t n = mass.size();
  if (stiffness.size() != n) throw ConfigError("modal_frequencies: M and K sizes differ");
  if (count == 0) return {};
  if (count > n) {
    std::ostringstream msg;
    msg << "modal_frequencies: requested " << count << " modes but only " << n
        << " free DOFs exist";
    throw ConfigError(msg.str());
  }
  const BandedCholesky K(stiffness);
  const std::size_t q = std::min(n, std::max(2 * count, count + 8));
  const auto N = static_cast<Eigen::Index>(n);
  const auto Q = static_cast<Eigen::Index>(q);

  Eigen::MatrixXd X(N, Q);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (Eigen::Index i = 0; i < N; ++i) X(i, 0) = mass(i, i);
  for (Eigen::Index c = 1; c < Q; ++c) {
    for (Eigen::Index i = 0; i < N; ++i) X(i, c) = unif(rng);
  }

  Eigen::MatrixXd Y(N, Q), Xb(N, Q), MXb(N, Q);
  Eigen::VectorXd previous = Eigen::VectorXd::Constant(Q, std::numeric_limits<double>::max());
  constexpr int kMaxIterations = 500;
  constexpr double kTolerance = 1e-12;
  for (int it = 0; it < kMaxIterations; ++it) {
    for (Eigen::Index c = 0; c < Q; ++c) {
      mass.multiply({X.col(c).data(), n}, {Y.col(c).data(), n});
      Xb.col(c) = Y.col(c);
      K.solve_in_place({Xb.col(c).data(), n});
      mass.multiply({Xb.col(c).data(), n}, {MXb.col(c).data(), n});
    }
    // K Xb = Y, so the projected stiffness is Xb^T Y.
    Eigen::MatrixXd Kr = Xb.transpose() * Y;
    Eigen::MatrixXd Mr = Xb.transpose() * MXb;
    Kr = 0.5 * (Kr + Kr.transpose()).eval();
    Mr = 0.5 * (Mr + Mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Kr, Mr);
    if (ges.info() != Eigen::Success) break;
    X = Xb * ges.eigenvectors();
    const Eigen::VectorXd lambda = ges.eigenvalues();

    bool converged = true;
    for (std::size_t i = 0; i < count; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (std::abs(lambda(ii) - previous(ii)) > kTolerance * std::abs(lambda(ii))) {
        converged = false;
      }
    }
    previous = lambda;
    if (converged || q == n) {
      std::vector<double> freqs(count);
      for (std::size_t i = 0; i < count; ++i) {
        freqs[i] = std::sqrt(std::max(0.0, lambda(static_cast<Eigen::Index>(i)))) /
                   (2.0 * std::numbers::pi);
      }
      return freqs;
    }
  }
  std::ostringstream msg;
  msg << "modal_frequencies: subspace iteration did not converge (stiffness pivot ratio "
      << K.pivot_ratio() << ", " << n << " DOFs)";
  throw ModelError(msg.str());
}

std::vector<double> modal_frequencies(const BeamSystem& system, std::size_t count) {
  return modal_frequencies(system.mass_matrix, system.stiffness_matrix, count);
}

RayleighCoefficients rayleigh_coefficients(double damping_ratio, double omega_i, double omega_j) {
  // zeta = a0 / (2 w) + a1 w / 2 at both frequencies.
  const double det = omega_j / omega_i - omega_i / omega_j;
  if (!(std::abs(det) > 1e-12)) {
    throw ConfigError("rayleigh damping: calibration frequencies coincide (singular 2x2 system)");
  }
  RayleighCoefficients c;
  c.mass = 2.0 * damping_ratio * omega_i * omega_j / (omega_i + omega_j);
  c.stiffness = 2.0 * damping_ratio / (omega_i + omega_j);
  return c;
}

BandedSymmetric rayleigh_damping(const BandedSymmetric& mass, const BandedSymmetric& stiffness,
                                 double damping_ratio, std::pair<int, int> calibration_modes,
                                 RayleighCoefficients* coefficients) {
  const auto [mi, mj] = calibration_modes;
  if (mi < 1 || mj < 1) throw ConfigError("rayleigh damping: mode indices are 1-based");
  if (mi == mj) throw ConfigError("rayleigh damping: calibration modes must be distinct");
  const auto highest = static_cast<std::size_t>(std::max(mi, mj));
  if (highest > mass.size()) {
    throw ConfigError("rayleigh damping: calibration mode beyond the computed spectrum");
  }
  RayleighCoefficients c;
  if (damping_ratio != 0.0) {
    const std::vector<double> f = modal_frequencies(mass, stiffness, highest);
    const double wi = 2.0 * std::numbers::pi * f[static_cast<std::size_t>(mi - 1)];
    const double wj = 2.0 * std::numbers::pi * f[static_cast<std::size_t>(mj - 1)];
    c = rayleigh_coefficients(damping_ratio, wi, wj);
  }
  if (coefficients) *coefficients = c;
  return BandedSymmetric::combine(c.mass, mass, c.stiffness, stiffness);
}

std::vector<double> static_deflection(const BeamSystem& system,
                                      const std::vector<double>& nodal_loads) {
  if (nodal_loads.size() != system.node_count()) {
    throw ConfigError("static_deflection: one load per node expected");
  }
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(system.dof_count()));
  for (std::size_t node = 0; node < system.node_count(); ++node) {
    const long dof = system.translation_dof(node);
    if (dof >= 0) f(dof) = nodal_loads[node];
  }
  const BandedCholesky K(system.stiffness_matrix);
  const Eigen::VectorXd u = K.solve(f);
  std::vector<double> w(system.node_count(), 0.0);
  for (std::size_t node = 0; node < system.node_count(); ++node) {
    const long dof = system.translation_dof(node);
    if (dof >= 0) w[node] = u(dof);
  }
  return w;
}

void write_matrix_market(std::ostream& os, const BandedSymmetric& matrix,
                         const std::string& comment) {
  const std::size_t n = matrix.size();
  const std::size_t bw = matrix.bandwidth();
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d <= std::min(bw, i); ++d) {
      if (matrix(i, i - d) != 0.0) ++nnz;
    }
  }
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  if (!comment.empty()) os << "% " << comment << "\n";
  os << n << ' ' << n << ' ' << nnz << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = std::min(bw, i) + 1; d-- > 0;) {
      const double v = matrix(i, i - d);
      if (v != 0.0) os << i + 1 << ' ' << i - d + 1 << ' ' << v << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace vbi
