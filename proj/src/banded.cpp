#include "annular/banded.hpp"

#include <algorithm>
#include <cmath>

namespace annular {

BandedLU::BandedLU(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), w_(2 * kl + ku + 1), a_(n * (2 * kl + ku + 1), 0.0), piv_(n) {}

bool BandedLU::in_band(std::size_t i, std::size_t j) const noexcept {
  return i < n_ && j < n_ && j + kl_ >= i && j <= i + kl_ + ku_;
}

void BandedLU::set(std::size_t i, std::size_t j, double v) {
  if (!in_band(i, j) || j > i + ku_) throw DimensionMismatch("BandedLU::set outside band");
  at(i, j) = v;
  factored_ = false;
}

double BandedLU::get(std::size_t i, std::size_t j) const {
  return in_band(i, j) ? at(i, j) : 0.0;
}

void BandedLU::factor() {
  double scale = 0.0;
  for (double v : a_) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t last_row = std::min(n_ - 1, k + kl_);
    const std::size_t last_col = std::min(n_ - 1, k + kl_ + ku_);
    std::size_t p = k;
    for (std::size_t i = k + 1; i <= last_row; ++i)
      if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
    piv_[k] = p;
    if (!(std::abs(at(p, k)) > scale * 1e-300) || !std::isfinite(at(p, k)))
      throw SingularMatrix("banded LU pivot vanished");
    if (p != k)
      for (std::size_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
    const double pivot = at(k, k);
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const double l = at(i, k) / pivot;
      at(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j <= last_col; ++j) at(i, j) -= l * at(k, j);
    }
  }
  factored_ = true;
}

Vec BandedLU::solve(std::span<const double> b) const {
  if (!factored_) throw SingularMatrix("BandedLU::solve before factor");
  if (b.size() != n_) throw DimensionMismatch("BandedLU::solve rhs size");
  Vec x(b.begin(), b.end());
  for (std::size_t k = 0; k < n_; ++k) {
    if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
    const std::size_t last_row = std::min(n_ - 1, k + kl_);
    for (std::size_t i = k + 1; i <= last_row; ++i) x[i] -= at(i, k) * x[k];
  }
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t last_col = std::min(n_ - 1, i + kl_ + ku_);
    double s = x[i];
    for (std::size_t j = i + 1; j <= last_col; ++j) s -= at(i, j) * x[j];
    x[i] = s / at(i, i);
  }
  return x;
}

}  // namespace annular
