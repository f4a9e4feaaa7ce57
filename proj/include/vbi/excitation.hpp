#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vbi {

inline constexpr double kGravity = 9.81;               // m/s^2
inline constexpr double kAverageVehicleMass = 2000.0;  // kg
/// Geometric mean of the ISO 8608 class A displacement PSD at n0 = 0.1 cycles/m.
inline constexpr double kClassACoefficient = 16e-6;  // m^3

struct RoughnessOptions {
  double class_coefficient = kClassACoefficient;  // G_d(n0), m^3
  double reference_frequency = 0.1;               // n0, cycles/m
  double band_low = 0.01;                         // cycles/m
  /// Upper band edge in cycles/m. Zero selects min(10, grid Nyquist).
  double band_high = 0.0;
  /// Spacing of the synthesis frequencies; zero selects 1 / length.
  double frequency_step = 0.0;
};

struct RoughnessProfile {
  std::vector<double> sample_positions;  // m
  std::vector<double> elevation;         // m, zero mean
  std::vector<double> slope;             // m/m, analytic derivative
  std::uint64_t seed = 0;
  double spacing = 0.0;
  RoughnessOptions options;

  std::size_t size() const { return elevation.size(); }
};

/// Target one-sided displacement PSD G_d(n) = G_d(n0) (n / n0)^-2.
double roughness_psd(const RoughnessOptions& options, double spatial_frequency);

/// Sum-of-cosines synthesis with uniform random phases on a grid of
/// length / spacing + 1 samples. The sample mean is removed; the slope is the
/// term-wise derivative.
RoughnessProfile generate_roughness(double length, double spacing, std::uint64_t seed,
                                    RoughnessOptions options = {});

/// A zero profile on the same grid (roughness disabled).
RoughnessProfile flat_roughness(double length, double spacing);

/// Random sparse traffic force matrix, rows = time samples, columns = nodes.
///
/// Stored by rows: each row lists (node, force) pairs. Forces are negative
/// (downward); each row's absolute sum is n_vehicles * 2000 * g.
struct TrafficLoadMatrix {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t node_count = 0;
  double time_step = 0.0;
  int vehicle_count_equivalent = 0;
  double density = 0.0;
  std::uint64_t seed = 0;

  std::size_t row_count() const { return rows.size(); }
  double row_total() const;
  Eigen::MatrixXd to_dense() const;
};

/// `duration / time_step + 1` rows. Per row ceil(density * interior) distinct
/// interior nodes carry uniform random magnitudes rescaled to the row total.
TrafficLoadMatrix generate_traffic(double duration, double time_step, std::size_t node_count,
                                   int n_vehicles, double density, std::uint64_t seed);

/// CSV exchange. First line is a comma-separated key=value metadata header.
void write_roughness_csv(std::ostream& os, const RoughnessProfile& profile);
RoughnessProfile read_roughness_csv(std::istream& is);
void write_traffic_csv(std::ostream& os, const TrafficLoadMatrix& traffic);
TrafficLoadMatrix read_traffic_csv(std::istream& is);

}  // namespace vbi
