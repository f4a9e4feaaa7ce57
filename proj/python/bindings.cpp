#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vbi/analysis.hpp"
#include "vbi/commands.hpp"
#include "vbi/errors.hpp"
#include "vbi/theory.hpp"
#include "vbi/validation.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

vbi::ScenarioConfig scenario(double span, const std::string& vehicle, int n_vehicles, double node_spacing,
                             std::optional<std::uint64_t> seed, bool strict, bool roughness) {
  vbi::ScenarioConfig c;
  c.bridge = vbi::reference_bridge(span, node_spacing);
  c.vehicle = vbi::vehicle_preset(vehicle);
  c.traffic.n_vehicles = n_vehicles;
  if (seed) {
    c.traffic.seed = *seed;
    c.roughness.seed = *seed + 1;
  }
  c.strict_paper_mode = strict;
  c.roughness.enabled = roughness;
  return c;
}

py::dict series(const vbi::TimeSeriesResult& r) {
  return py::dict("dt"_a = r.time_step, "labels"_a = r.dof_labels, "displacement"_a = r.displacement,
                  "velocity"_a = r.velocity, "acceleration"_a = r.acceleration);
}

py::dict report(const vbi::ComparisonReport& r) {
  return py::dict("mse_time"_a = r.mse_time, "mse_freq"_a = r.mse_freq, "normalization"_a = r.normalization);
}

}  // namespace

PYBIND11_MODULE(_vbi, m) {
  m.doc() = "Vehicle-bridge interaction engine (C++ core)";
  m.attr("__version__") = vbi::version();

  py::register_exception<vbi::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<vbi::PoleError>(m, "PoleError", PyExc_ArithmeticError);
  py::register_exception<vbi::ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<vbi::BridgeSpec>(m, "BridgeSpec")
      .def(py::init<>())
      .def_readwrite("span", &vbi::BridgeSpec::span)
      .def_readwrite("node_spacing", &vbi::BridgeSpec::node_spacing)
      .def_readwrite("elastic_modulus", &vbi::BridgeSpec::elastic_modulus)
      .def_readwrite("mass_density", &vbi::BridgeSpec::mass_density)
      .def_readwrite("damping_ratio", &vbi::BridgeSpec::damping_ratio)
      .def_property_readonly("node_count", &vbi::BridgeSpec::node_count);

  py::class_<vbi::QuarterCarSpec>(m, "QuarterCarSpec")
      .def(py::init<>())
      .def_readwrite("name", &vbi::QuarterCarSpec::name)
      .def_readwrite("sprung_mass", &vbi::QuarterCarSpec::sprung_mass)
      .def_readwrite("unsprung_mass", &vbi::QuarterCarSpec::unsprung_mass)
      .def_readwrite("suspension_stiffness", &vbi::QuarterCarSpec::suspension_stiffness)
      .def_readwrite("suspension_damping", &vbi::QuarterCarSpec::suspension_damping)
      .def_readwrite("tire_stiffness", &vbi::QuarterCarSpec::tire_stiffness)
      .def_readwrite("tire_damping", &vbi::QuarterCarSpec::tire_damping)
      .def_readwrite("speed", &vbi::QuarterCarSpec::speed)
      .def("scaled", &vbi::QuarterCarSpec::scaled, "factor"_a);

  py::class_<vbi::TheoryConfig>(m, "TheoryConfig")
      .def(py::init([](double alpha, double beta, double gamma, double k, double amplitude) {
             return vbi::TheoryConfig{alpha, beta, gamma, k, amplitude};
           }),
           "alpha"_a = 1e4, "beta"_a = 10.0, "gamma"_a = 0.1, "k"_a = 1.0, "amplitude"_a = 1.0)
      .def_readwrite("alpha", &vbi::TheoryConfig::alpha)
      .def_readwrite("beta", &vbi::TheoryConfig::beta)
      .def_readwrite("gamma", &vbi::TheoryConfig::gamma)
      .def_readwrite("k", &vbi::TheoryConfig::k)
      .def_readwrite("amplitude", &vbi::TheoryConfig::amplitude);

  m.def("reference_bridge", &vbi::reference_bridge, "span"_a, "node_spacing"_a = 0.1);
  m.def(
      "modal_frequencies",
      [](const vbi::BridgeSpec& spec, std::size_t count) {
        return vbi::modal_frequencies(vbi::assemble_undamped(spec), count);
      },
      "spec"_a, "count"_a = 3, "Lowest natural frequencies in Hz.");
  m.def("vehicle_preset", &vbi::vehicle_preset, "name"_a);
  m.def("vehicle_frequencies", &vbi::vehicle_frequencies, "spec"_a);

  m.def("coupled_amplitude", &vbi::coupled_amplitude, "cfg"_a);
  m.def("uncoupled_amplitude", &vbi::uncoupled_amplitude, "cfg"_a, "printed_form"_a = false);
  m.def("exact_oracle", &vbi::exact_oracle, "cfg"_a);
  m.def(
      "eigen_approx",
      [](const vbi::TheoryConfig& c) {
        const vbi::EigenApprox e = vbi::eigen_approx(c);
        return py::dict("lambda1"_a = e.lambda1, "lambda2"_a = e.lambda2, "mode_shapes"_a = e.mode_shapes);
      },
      "cfg"_a);
  m.def(
      "parametric_sweep",
      [](std::size_t path_points, std::size_t gamma_points, bool clip) {
        vbi::SweepOptions o;
        o.path_points = path_points;
        o.gamma_points = gamma_points;
        o.clip_to_valid = clip;
        const vbi::SweepResult r = vbi::parametric_sweep(o);
        std::vector<double> pos, peak, peak_gamma;
        for (std::size_t i = 0; i < r.path.size(); ++i) {
          pos.push_back(r.path[i].position);
          const auto [e, g] = r.peak(i);
          peak.push_back(e);
          peak_gamma.push_back(g);
        }
        Eigen::MatrixXd err(static_cast<Eigen::Index>(r.path.size()), static_cast<Eigen::Index>(r.gammas.size()));
        for (std::size_t i = 0; i < r.path.size(); ++i)
          for (std::size_t j = 0; j < r.gammas.size(); ++j)
            err(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.at(i, j).error_pct;
        return py::dict("position"_a = pos, "gamma"_a = r.gammas, "error_pct"_a = err, "peak_error_pct"_a = peak,
                        "peak_gamma"_a = peak_gamma);
      },
      "path_points"_a = 41, "gamma_points"_a = 100, "clip"_a = true);

  m.def(
      "mse_time",
      [](const std::vector<double>& a, const std::vector<double>& b, double norm) { return vbi::mse_time(a, b, norm); },
      "reference"_a, "candidate"_a, "normalization"_a);
  m.def(
      "mse_freq",
      [](const std::vector<double>& a, const std::vector<double>& b, double norm, double dt, double cutoff) {
        return vbi::mse_freq(a, b, norm, dt, cutoff);
      },
      "reference"_a, "candidate"_a, "normalization"_a, "dt"_a, "cutoff_hz"_a = 25.0);

  m.def(
      "simulate",
      [](double span, const std::string& vehicle, int n_vehicles, const std::string& mode, double node_spacing,
         std::optional<std::uint64_t> seed, bool strict, bool roughness) {
        vbi::ScenarioConfig c = scenario(span, vehicle, n_vehicles, node_spacing, seed, strict, roughness);
        c.mode = vbi::parse_simulation_mode(mode);
        vbi::SimulationOutput out;
        {
          py::gil_scoped_release release;
          out = vbi::simulate(vbi::prepare_scenario(c));
        }
        return py::dict("bridge"_a = series(out.bridge_result), "vehicle"_a = series(out.vehicle_result),
                        "iterations"_a = out.iteration_counts, "wall_time"_a = out.wall_time,
                        "dof_count"_a = out.dof_count);
      },
      "span"_a = 15.0, "vehicle"_a = "commercial", "n_vehicles"_a = 0, "mode"_a = "coupled",
      "node_spacing"_a = 0.1, "seed"_a = py::none(), "strict"_a = false, "roughness"_a = true);

  m.def(
      "compare",
      [](double span, const std::string& vehicle, int n_vehicles, double node_spacing,
         std::optional<std::uint64_t> seed) {
        const vbi::ScenarioConfig c = scenario(span, vehicle, n_vehicles, node_spacing, seed, false, true);
        vbi::PairedRun p;
        {
          py::gil_scoped_release release;
          p = vbi::run_paired(c);
        }
        return py::dict("bridge"_a = report(p.bridge), "vehicle"_a = report(p.vehicle));
      },
      "span"_a = 15.0, "vehicle"_a = "commercial", "n_vehicles"_a = 0, "node_spacing"_a = 0.1,
      "seed"_a = py::none());

  m.def("validate", [] {
    py::list rows;
    for (const auto& c : vbi::run_validation()) {
      rows.append(py::dict("name"_a = c.name, "expected"_a = c.expected, "actual"_a = c.actual,
                           "tolerance"_a = c.tolerance, "passed"_a = c.passed));
    }
    return rows;
  });
}
