#include "vbi/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vbi/errors.hpp"

namespace vbi {

BandedSymmetric::BandedSymmetric(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(bandwidth), data_(n * (bandwidth + 1), 0.0) {}

double BandedSymmetric::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  const std::size_t d = i - j;
  if (d > bw_) return 0.0;
  return data_[i * (bw_ + 1) + d];
}

void BandedSymmetric::add(std::size_t i, std::size_t j, double v) {
  if (i < j) std::swap(i, j);
  const std::size_t d = i - j;
  if (i >= n_ || d > bw_) {
    throw ConfigError("banded add outside the stored band");
  }
  data_[i * (bw_ + 1) + d] += v;
}

void BandedSymmetric::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t w = bw_ + 1;
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = data_.data() + i * w;
    double acc = row[0] * x[i];
    const std::size_t dmax = std::min(bw_, i);
    for (std::size_t d = 1; d <= dmax; ++d) acc += row[d] * x[i - d];
    const std::size_t umax = std::min(bw_, n_ - 1 - i);
    for (std::size_t d = 1; d <= umax; ++d) acc += data_[(i + d) * w + d] * x[i + d];
    y[i] = acc;
  }
}

Eigen::VectorXd BandedSymmetric::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(n_));
  multiply({x.data(), n_}, {y.data(), n_});
  return y;
}

BandedSymmetric BandedSymmetric::combine(double a, const BandedSymmetric& A, double b,
                                         const BandedSymmetric& B) {
  if (A.n_ != B.n_ || A.bw_ != B.bw_) {
    throw ConfigError("cannot combine band matrices of different shape");
  }
  BandedSymmetric out(A.n_, A.bw_);
  for (std::size_t k = 0; k < out.data_.size(); ++k) {
    out.data_[k] = a * A.data_[k] + b * B.data_[k];
  }
  return out;
}

double BandedSymmetric::quadratic_form(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += x[i] * y[i];
  return s;
}

Eigen::MatrixXd BandedSymmetric::to_dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t d = 0; d <= std::min(bw_, i); ++d) {
      const double v = data_[i * (bw_ + 1) + d];
      const auto r = static_cast<Eigen::Index>(i);
      const auto c = static_cast<Eigen::Index>(i - d);
      D(r, c) = v;
      D(c, r) = v;
    }
  }
  return D;
}

double BandedSymmetric::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool BandedSymmetric::all_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

BandedCholesky::BandedCholesky(const BandedSymmetric& A)
    : n_(A.size()), bw_(A.bandwidth()), data_(A.raw().begin(), A.raw().end()) {
  const std::size_t w = bw_ + 1;
  auto L = [&](std::size_t i, std::size_t j) -> double& { return data_[i * w + (i - j)]; };
  min_pivot_ = std::numeric_limits<double>::infinity();
  max_pivot_ = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t k0 = i > bw_ ? i - bw_ : 0;
    for (std::size_t j = k0; j <= i; ++j) {
      double s = L(i, j);
      for (std::size_t k = std::max(k0, j > bw_ ? j - bw_ : 0); k < j; ++k) {
        s -= L(i, k) * L(j, k);
      }
      if (j == i) {
        if (!(s > 0.0) || !std::isfinite(s)) {
          std::ostringstream msg;
          msg << "ill-posed model: matrix is not positive definite (pivot " << s << " at row "
              << i << " of " << n_ << ")";
          throw ModelError(msg.str());
        }
        min_pivot_ = std::min(min_pivot_, s);
        max_pivot_ = std::max(max_pivot_, s);
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
}

void BandedCholesky::solve_in_place(std::span<double> b) const {
  const std::size_t w = bw_ + 1;
  const double* L = data_.data();
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = L + i * w;
    double s = b[i];
    const std::size_t dmax = std::min(bw_, i);
    for (std::size_t d = 1; d <= dmax; ++d) s -= row[d] * b[i - d];
    b[i] = s / row[0];
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = b[ii];
    const std::size_t umax = std::min(bw_, n_ - 1 - ii);
    for (std::size_t d = 1; d <= umax; ++d) s -= L[(ii + d) * w + d] * b[ii + d];
    b[ii] = s / L[ii * w];
  }
}

Eigen::VectorXd BandedCholesky::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = b;
  solve_in_place({x.data(), n_});
  return x;
}

double BandedCholesky::pivot_ratio() const noexcept {
  return min_pivot_ > 0.0 ? max_pivot_ / min_pivot_ : std::numeric_limits<double>::infinity();
}

}  // namespace vbi
