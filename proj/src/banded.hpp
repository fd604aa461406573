#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qlc::detail {

// Symmetric positive definite band matrix, lower band stored row-wise:
// band_[i * (bw + 1) + k] holds A(i, i - k).
class BandedSpd {
 public:
  BandedSpd(std::size_t n, std::size_t bandwidth)
      : n_(n), bw_(bandwidth), band_(n * (bandwidth + 1), 0.0) {}

  std::size_t size() const { return n_; }

  void add(std::size_t i, std::size_t j, double v) {
    if (j > i) std::swap(i, j);
    const std::size_t k = i - j;
    if (k > bw_) throw std::logic_error("BandedSpd: entry outside band");
    band_[i * (bw_ + 1) + k] += v;
  }

  // In-place banded Cholesky, A = L L^T.
  void factor() {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = i > bw_ ? i - bw_ : 0;
      for (std::size_t j = j0; j <= i; ++j) {
        double s = at(i, j);
        const std::size_t k0 = std::max(j0, j > bw_ ? j - bw_ : 0);
        for (std::size_t k = k0; k < j; ++k) s -= at(i, k) * at(j, k);
        if (j == i) {
          if (!(s > 0.0)) throw std::runtime_error("BandedSpd: matrix not positive definite");
          ref(i, i) = std::sqrt(s);
        } else {
          ref(i, j) = s / at(j, j);
        }
      }
    }
  }

  void solve(std::span<double> x) const {
    for (std::size_t i = 0; i < n_; ++i) {
      double s = x[i];
      const std::size_t j0 = i > bw_ ? i - bw_ : 0;
      for (std::size_t j = j0; j < i; ++j) s -= at(i, j) * x[j];
      x[i] = s / at(i, i);
    }
    for (std::size_t ii = n_; ii-- > 0;) {
      double s = x[ii];
      const std::size_t j1 = std::min(n_ - 1, ii + bw_);
      for (std::size_t j = ii + 1; j <= j1; ++j) s -= at(j, ii) * x[j];
      x[ii] = s / at(ii, ii);
    }
  }

 private:
  double at(std::size_t i, std::size_t j) const { return band_[i * (bw_ + 1) + (i - j)]; }
  double &ref(std::size_t i, std::size_t j) { return band_[i * (bw_ + 1) + (i - j)]; }

  std::size_t n_;
  std::size_t bw_;
  std::vector<double> band_;
};

}  // namespace qlc::detail
