#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace vbi {

/// Symmetric matrix stored by its lower band.
///
/// Entry (i, i - d) for 0 <= d <= bandwidth lives at data[i * (bandwidth + 1) + d].
/// Only the lower triangle is stored, so the matrix is exactly symmetric.
class BandedSymmetric {
 public:
  BandedSymmetric() = default;
  BandedSymmetric(std::size_t n, std::size_t bandwidth);

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return bw_; }

  /// Element access for any (i, j); entries outside the band read as zero.
  double operator()(std::size_t i, std::size_t j) const;

  /// Adds v to (i, j) and implicitly to (j, i). |i - j| must be within the band.
  void add(std::size_t i, std::size_t j, double v);

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

  /// a * A + b * B for matrices of identical size and bandwidth.
  static BandedSymmetric combine(double a, const BandedSymmetric& A, double b,
                                 const BandedSymmetric& B);

  double quadratic_form(std::span<const double> x) const;
  Eigen::MatrixXd to_dense() const;

  /// Largest absolute entry (used for relative comparisons).
  double max_abs() const;
  bool all_zero() const;

  std::span<const double> raw() const noexcept { return data_; }

 private:
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<double> data_;
};

/// Banded Cholesky factor L L^T of a symmetric positive definite band matrix.
class BandedCholesky {
 public:
  /// Throws ModelError when a non-positive pivot is met.
  explicit BandedCholesky(const BandedSymmetric& A);

  std::size_t size() const noexcept { return n_; }

  void solve_in_place(std::span<double> b) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  /// Squared ratio of the extreme diagonal pivots: a cheap conditioning indicator.
  double pivot_ratio() const noexcept;

 private:
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<double> data_;
  double min_pivot_ = 0.0;
  double max_pivot_ = 0.0;
};

}  // namespace vbi
