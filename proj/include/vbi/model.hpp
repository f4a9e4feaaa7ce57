#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vbi/banded.hpp"

namespace vbi {

/// Hollow rectangular (box) girder cross-section. All dimensions in metres.
struct BoxSection {
  double depth = 0.0;
  double width = 0.0;
  double flange_thickness = 0.0;
  double web_thickness = 0.0;

  /// Throws ConfigError if any dimension is non-positive or the walls overlap.
  void validate() const;
};

struct SectionProperties {
  double area = 0.0;           // m^2
  double second_moment = 0.0;  // m^4, horizontal centroidal axis
};

SectionProperties section_properties(const BoxSection& section);

inline constexpr double kSteelModulus = 200e9;   // Pa
inline constexpr double kSteelDensity = 7850.0;  // kg/m^3

struct BridgeSpec {
  double span = 15.0;  // m
  BoxSection section{0.60, 0.30, 0.04, 0.02};
  double elastic_modulus = kSteelModulus;
  double mass_density = kSteelDensity;
  double node_spacing = 0.1;  // m
  double damping_ratio = 0.02;
  std::pair<int, int> damping_calibration_modes{1, 2};  // 1-based mode indices

  /// Number of beam elements; span / node_spacing rounded to the nearest integer.
  std::size_t element_count() const;
  std::size_t node_count() const { return element_count() + 1; }

  void validate() const;
};

/// One of the six reference girders (spans 15, 30, 50, 100, 200, 500 m) with
/// its tabulated box dimensions and first natural frequency.
struct ReferenceBridge {
  double span;
  BoxSection section;
  double fundamental_hz;
};

const std::vector<ReferenceBridge>& reference_bridges();

/// Steel girder with the reference section for `span`. Throws ConfigError for
/// spans not in the reference set.
BridgeSpec reference_bridge(double span, double node_spacing = 0.1);

struct RayleighCoefficients {
  double mass = 0.0;       // a0, multiplies M
  double stiffness = 0.0;  // a1, multiplies K

  /// Modal damping ratio this pair produces at circular frequency omega.
  double modal_ratio(double omega) const { return mass / (2.0 * omega) + stiffness * omega / 2.0; }
};

/// Assembled planar beam with simply supported ends.
///
/// Each node carries a vertical translation and a rotation. The translations
/// of the two end nodes are removed; the remaining free DOFs keep node order
/// so every matrix has half-bandwidth 3.
struct BeamSystem {
  BandedSymmetric mass_matrix;
  BandedSymmetric stiffness_matrix;
  BandedSymmetric damping_matrix;
  RayleighCoefficients rayleigh;
  std::vector<double> node_positions;
  std::vector<std::size_t> constrained_dofs;  // global DOF indices (2 * node, 2 * node + 1)
  /// Set for lumped systems: node i maps to free DOF i. Empty for beams.
  bool lumped = false;

  std::size_t dof_count() const { return mass_matrix.size(); }
  std::size_t node_count() const { return node_positions.size(); }

  /// Free-DOF index of the vertical translation at `node`, or -1 at a support.
  long translation_dof(std::size_t node) const;
  std::size_t midspan_node() const { return node_count() / 2; }
};

/// Beam assembly without damping. Used by assemble_beam and by callers that
/// want the raw mass and stiffness (the damping matrix is left empty-zero).
BeamSystem assemble_undamped(const BridgeSpec& spec);

/// Generic lumped system where every DOF is addressed as a "node" (used for
/// single- and few-DOF checks of the integrators). Matrices must share size
/// and bandwidth; the damping matrix may be all zero.
BeamSystem lumped_system(BandedSymmetric mass, BandedSymmetric stiffness, BandedSymmetric damping);

/// Full assembly: consistent mass, stiffness, Rayleigh damping calibrated on
/// spec.damping_calibration_modes.
BeamSystem assemble_beam(const BridgeSpec& spec);

/// Lowest `count` natural frequencies in Hz of the (K, M) pencil, ascending.
/// Subspace iteration on the banded Cholesky factor of K.
std::vector<double> modal_frequencies(const BandedSymmetric& mass,
                                      const BandedSymmetric& stiffness, std::size_t count);
std::vector<double> modal_frequencies(const BeamSystem& system, std::size_t count);

RayleighCoefficients rayleigh_coefficients(double damping_ratio, double omega_i, double omega_j);

/// C = a0 M + a1 K with equal damping `damping_ratio` at the two calibration
/// modes (1-based).
BandedSymmetric rayleigh_damping(const BandedSymmetric& mass, const BandedSymmetric& stiffness,
                                 double damping_ratio, std::pair<int, int> calibration_modes,
                                 RayleighCoefficients* coefficients = nullptr);

/// Static response to nodal vertical loads (one value per node, supports ignored).
/// Returns vertical displacement per node.
std::vector<double> static_deflection(const BeamSystem& system,
                                      const std::vector<double>& nodal_loads);

/// Matrix Market coordinate format, symmetric, lower triangle, 1-based.
void write_matrix_market(std::ostream& os, const BandedSymmetric& matrix,
                         const std::string& comment = {});

}  // namespace vbi
