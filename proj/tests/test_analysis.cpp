#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vbi/analysis.hpp"
#include "vbi/errors.hpp"

using namespace vbi;

namespace {

std::vector<double> cosine(std::size_t n, double dt, double f, double a, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a * std::cos(2 * std::numbers::pi * f * dt * static_cast<double>(i) + phase);
  return x;
}

}  // namespace

TEST_CASE("time mse") {
  const std::vector<double> a{1.0, 2.0, 3.0}, b{1.5, 2.5, 3.5};
  CHECK(mse_time(a, b, 1.0) == doctest::Approx(0.25));
  CHECK(mse_time(a, b, 2.0) == doctest::Approx(0.0625));
  CHECK(mse_time(a, b, 1.0) == mse_time(b, a, 1.0));
  CHECK(mse_time(a, a, 1.0) == 0.0);
  const std::vector<double> short_one{1.0};
  CHECK_THROWS_AS(mse_time(a, short_one, 1.0), ConfigError);
  CHECK_THROWS_AS(mse_time(a, b, 0.0), ConfigError);
}

TEST_CASE("scaling both signals and the normalization leaves the mse unchanged") {
  const std::vector<double> a = cosine(200, 0.01, 3.0, 1.0), b = cosine(200, 0.01, 3.0, 0.8, 0.3);
  std::vector<double> a5(a), b5(b);
  for (auto& v : a5) v *= 5.0;
  for (auto& v : b5) v *= 5.0;
  CHECK(mse_time(a5, b5, 5.0) == doctest::Approx(mse_time(a, b, 1.0)).epsilon(1e-12));
  CHECK(mse_freq(a5, b5, 5.0, 0.01) == doctest::Approx(mse_freq(a, b, 1.0, 0.01)).epsilon(1e-12));
  CHECK(mse_freq(a, b, 1.0, 0.01) == doctest::Approx(mse_freq(b, a, 1.0, 0.01)).epsilon(1e-12));
}

TEST_CASE("amplitude spectrum of an on-bin cosine") {
  const double dt = 0.01;
  const std::size_t n = 400;  // bin spacing 0.25 Hz
  const Spectrum s = amplitude_spectrum(cosine(n, dt, 5.0, 2.0), dt, 25.0);
  CHECK(s.frequency.size() == 101);  // 0 .. 25 Hz
  CHECK(s.frequency[20] == doctest::Approx(5.0));
  CHECK(s.magnitude[20] == doctest::Approx(2.0).epsilon(1e-9));
  double others = 0.0;
  for (std::size_t j = 0; j < s.magnitude.size(); ++j) if (j != 20) others = std::max(others, s.magnitude[j]);
  CHECK(others < 1e-9);

  SUBCASE("constant signal lands in bin zero") {
    const Spectrum c = amplitude_spectrum(std::vector<double>(n, 0.7), dt, 25.0);
    CHECK(c.magnitude[0] == doctest::Approx(0.7));
  }
}

TEST_CASE("frequency mse ignores phase and sees amplitude") {
  const double dt = 0.01;
  const std::size_t n = 400;
  const auto ref = cosine(n, dt, 5.0, 1.0);
  const auto shifted = cosine(n, dt, 5.0, 1.0, 1.1);
  CHECK(mse_freq(ref, shifted, 1.0, dt) < 1e-20);
  CHECK(mse_time(ref, shifted, 1.0) > 0.1);
  // A 0.9-amplitude copy differs in one bin by 0.1 out of 101 bins.
  const auto smaller = cosine(n, dt, 5.0, 0.9);
  CHECK(mse_freq(ref, smaller, 1.0, dt) == doctest::Approx(0.01 / 101.0).epsilon(1e-6));
  CHECK(mse_time(ref, smaller, 1.0) == doctest::Approx(0.01 * 0.5).epsilon(1e-9));
}

TEST_CASE("comparison on a small paired run") {
  ScenarioConfig c;
  c.bridge = reference_bridge(15.0, 0.5);
  c.traffic.n_vehicles = 10;
  const PairedRun p = run_paired(c);
  CHECK(p.bridge.response == ResponseKind::bridge);
  CHECK(p.bridge.normalization == doctest::Approx(p.coupled.bridge_result.displacement.col(0).cwiseAbs().maxCoeff()));
  CHECK(p.vehicle.normalization == doctest::Approx(p.coupled.vehicle_result.displacement.col(0).cwiseAbs().maxCoeff()));
  CHECK(p.bridge.mse_time >= 0.0);
  CHECK(p.bridge.n_vehicles == 10);
  CHECK(to_string(ResponseKind::vehicle) == "vehicle");
  const ComparisonReport self = compare_outputs(p.coupled, p.coupled, ResponseKind::bridge);
  CHECK(self.mse_time == 0.0);
  CHECK(self.mse_freq == 0.0);
}

TEST_CASE("benchmark options") {
  BenchmarkOptions o;
  o.repetitions = 2;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = BenchmarkOptions{};
  o.spans = {15.0};
  o.node_spacing = 0.5;
  o.include_strict = false;
  const BenchmarkReport r = run_benchmark(o);
  REQUIRE(r.records.size() == 1);
  CHECK(r.find(15.0, false) != nullptr);
  CHECK(r.find(15.0, true) == nullptr);
  CHECK(r.records[0].deterministic);
  CHECK(r.records[0].steps == 31);
}
