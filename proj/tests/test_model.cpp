#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "vbi/errors.hpp"
#include "vbi/model.hpp"

using namespace vbi;

namespace {

double rel_asym(const BandedSymmetric& m) {
  const Eigen::MatrixXd d = m.to_dense();
  return (d - d.transpose()).norm() / d.norm();
}

// Dense generalized eigen-solve, the reference for the subspace iteration.
std::vector<double> dense_frequencies(const BeamSystem& s, std::size_t count) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(s.stiffness_matrix.to_dense(), s.mass_matrix.to_dense());
  std::vector<double> f;
  for (std::size_t i = 0; i < count; ++i) f.push_back(std::sqrt(es.eigenvalues()(static_cast<Eigen::Index>(i))) / (2 * std::numbers::pi));
  return f;
}

}  // namespace

TEST_CASE("box section properties") {
  const SectionProperties p = section_properties({0.60, 0.30, 0.04, 0.02});
  CHECK(p.area == doctest::Approx(0.0448).epsilon(1e-12));
  CHECK(p.second_moment == doctest::Approx(0.02824192 / 12.0).epsilon(1e-12));
  CHECK(p.second_moment == doctest::Approx(2.353e-3).epsilon(1e-3));

  SUBCASE("solid limit") {
    const SectionProperties s = section_properties({0.8, 0.4, 0.4, 0.2});
    CHECK(s.area == doctest::Approx(0.32));
    CHECK(s.second_moment == doctest::Approx(0.4 * 0.512 / 12.0));
  }
  SUBCASE("invalid walls") {
    CHECK_THROWS_AS(section_properties({0.6, 0.3, 0.0, 0.02}), ConfigError);
    CHECK_THROWS_AS(section_properties({0.6, 0.3, 0.31, 0.02}), ConfigError);
    CHECK_THROWS_AS(section_properties({0.6, 0.3, 0.04, 0.16}), ConfigError);
  }
}

TEST_CASE("bridge spec validation") {
  BridgeSpec s;
  CHECK(s.element_count() == 150);
  s.node_spacing = 0.7;  // 15 / 0.7 is not integral
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.node_spacing = 10.0;  // a single element
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = BridgeSpec{};
  s.damping_ratio = 1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(reference_bridge(42.0), ConfigError);
}

TEST_CASE("assembled matrices are symmetric and complete") {
  const BeamSystem s = assemble_beam(reference_bridge(15.0));
  CHECK(s.dof_count() == 2 * 151 - 2);
  CHECK(rel_asym(s.mass_matrix) < 1e-12);
  CHECK(rel_asym(s.stiffness_matrix) < 1e-12);
  CHECK(rel_asym(s.damping_matrix) < 1e-12);
  CHECK(s.translation_dof(0) == -1);
  CHECK(s.translation_dof(150) == -1);
  CHECK(s.translation_dof(75) >= 0);

  // Rigid vertical translation over the free nodes plus the supports' share:
  // evaluate on the unconstrained mass by summing u^T M u with u = 1 on every
  // translation, which the constrained system sees minus the end contributions.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.dof_count()));
  for (std::size_t n = 0; n < s.node_count(); ++n) {
    const long d = s.translation_dof(n);
    if (d >= 0) u(d) = 1.0;
  }
  const SectionProperties p = section_properties(reference_bridge(15.0).section);
  const double element = kSteelDensity * p.area * 0.1;
  // Interior elements move rigidly; the two end elements keep one translated
  // node each, contributing the 156/420 diagonal term.
  const double expected = element * (148.0 + 2.0 * 156.0 / 420.0);
  CHECK(u.dot(s.mass_matrix * u) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("midspan static deflection matches PL^3/48EI") {
  BridgeSpec spec = reference_bridge(15.0);
  const BeamSystem s = assemble_undamped(spec);
  std::vector<double> loads(s.node_count(), 0.0);
  const double P = -1.0e4;
  loads[s.midspan_node()] = P;
  const double w = static_deflection(s, loads)[s.midspan_node()];
  const double EI = spec.elastic_modulus * section_properties(spec.section).second_moment;
  CHECK(w == doctest::Approx(P * std::pow(15.0, 3) / (48.0 * EI)).epsilon(1e-3));

  SUBCASE("mesh refinement does not degrade") {
    for (double h : {1.5, 0.5}) {
      BridgeSpec coarse = spec;
      coarse.node_spacing = h;
      const BeamSystem c = assemble_undamped(coarse);
      std::vector<double> l(c.node_count(), 0.0);
      l[c.midspan_node()] = P;
      CHECK(static_deflection(c, l)[c.midspan_node()] == doctest::Approx(w).epsilon(1e-9));
    }
  }
}

TEST_CASE("modal frequencies: subspace iteration vs dense solve") {
  BridgeSpec spec = reference_bridge(15.0, 0.5);
  const BeamSystem s = assemble_undamped(spec);
  const auto f = modal_frequencies(s, 4);
  const auto ref = dense_frequencies(s, 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(f[i] == doctest::Approx(ref[i]).epsilon(1e-9));
  for (std::size_t i = 1; i < 4; ++i) CHECK(f[i] > f[i - 1]);

  SUBCASE("closed form for a pinned beam") {
    const SectionProperties p = section_properties(spec.section);
    const double f1 = std::numbers::pi / (2.0 * 15.0 * 15.0) *
                      std::sqrt(spec.elastic_modulus * p.second_moment / (spec.mass_density * p.area));
    CHECK(f[0] == doctest::Approx(f1).epsilon(1e-4));
  }
  SUBCASE("doubling E scales by sqrt 2") {
    BridgeSpec stiff = spec;
    stiff.elastic_modulus *= 2.0;
    const auto g = modal_frequencies(assemble_undamped(stiff), 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(g[i] == doctest::Approx(f[i] * std::sqrt(2.0)).epsilon(1e-9));
  }
  SUBCASE("too many modes") { CHECK_THROWS_AS(modal_frequencies(s, s.dof_count() + 1), ConfigError); }
}

TEST_CASE("reference bridges reproduce the tabulated fundamentals") {
  for (const ReferenceBridge& ref : reference_bridges()) {
    CAPTURE(ref.span);
    const double f1 = modal_frequencies(assemble_undamped(reference_bridge(ref.span)), 1)[0];
    CHECK(std::abs(f1 - ref.fundamental_hz) / ref.fundamental_hz < (ref.span == 15.0 ? 0.02 : 0.05));
  }
  CHECK(modal_frequencies(assemble_undamped(reference_bridge(15.0)), 1)[0] == doctest::Approx(8.0767).epsilon(1e-4));
}

TEST_CASE("rayleigh damping") {
  const BeamSystem s = assemble_beam(reference_bridge(50.0, 0.5));
  const auto f = modal_frequencies(s, 3);
  const double w1 = 2 * std::numbers::pi * f[0], w2 = 2 * std::numbers::pi * f[1], w3 = 2 * std::numbers::pi * f[2];
  CHECK(s.rayleigh.modal_ratio(w1) == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(s.rayleigh.modal_ratio(w2) == doctest::Approx(0.02).epsilon(1e-6));
  const double z3 = s.rayleigh.modal_ratio(w3);
  CHECK(z3 >= 0.0);
  CHECK(z3 > 0.02);  // stiffness-proportional part grows above the calibration band

  SUBCASE("zero ratio gives zero matrix") {
    BridgeSpec spec = reference_bridge(15.0, 0.5);
    spec.damping_ratio = 0.0;
    CHECK(assemble_beam(spec).damping_matrix.all_zero());
  }
  SUBCASE("coincident calibration frequencies rejected") {
    CHECK_THROWS_AS(rayleigh_coefficients(0.02, 3.0, 3.0), ConfigError);
  }
  SUBCASE("coefficients solve the two-mode conditions") {
    const RayleighCoefficients c = rayleigh_coefficients(0.05, 2.0, 9.0);
    CHECK(c.modal_ratio(2.0) == doctest::Approx(0.05));
    CHECK(c.modal_ratio(9.0) == doctest::Approx(0.05));
  }
}

TEST_CASE("banded Cholesky rejects an indefinite matrix") {
  BandedSymmetric a(3, 1);
  a.add(0, 0, 1.0);
  a.add(1, 1, -1.0);
  a.add(2, 2, 1.0);
  CHECK_THROWS_AS(BandedCholesky{a}, ModelError);
}

TEST_CASE("banded solve matches dense") {
  const BeamSystem s = assemble_undamped(reference_bridge(15.0, 1.0));
  const Eigen::MatrixXd K = s.stiffness_matrix.to_dense();
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(K.rows(), -1.0, 2.0);
  const Eigen::VectorXd x = BandedCholesky(s.stiffness_matrix).solve(b);
  CHECK((K * x - b).norm() / b.norm() < 1e-10);
}

TEST_CASE("matrix market export") {
  BandedSymmetric a(2, 1);
  a.add(0, 0, 2.0);
  a.add(1, 0, -1.0);
  a.add(1, 1, 3.0);
  std::ostringstream os;
  write_matrix_market(os, a, "test");
  const std::string t = os.str();
  CHECK(t.rfind("%%MatrixMarket matrix coordinate real symmetric", 0) == 0);
  CHECK(t.find("2 2 3") != std::string::npos);
  CHECK(t.find("2 1 -1") != std::string::npos);
}
