#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "annular/linalg.hpp"

namespace annular {

/// LU with partial pivoting for a square band matrix with `kl` sub- and `ku`
/// super-diagonals. Storage and pivot order follow LAPACK's gbtrf: row swaps
/// widen the upper band to kl + ku.
class BandedLU {
 public:
  BandedLU(std::size_t n, std::size_t kl, std::size_t ku);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  /// Element (i, j); must lie within the band.
  void set(std::size_t i, std::size_t j, double v);
  [[nodiscard]] double get(std::size_t i, std::size_t j) const;

  /// Throws SingularMatrix when a pivot vanishes.
  void factor();
  [[nodiscard]] Vec solve(std::span<const double> b) const;

 private:
  [[nodiscard]] bool in_band(std::size_t i, std::size_t j) const noexcept;
  double& at(std::size_t i, std::size_t j) { return a_[i * w_ + (j + kl_ - i)]; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return a_[i * w_ + (j + kl_ - i)]; }

  std::size_t n_, kl_, ku_, w_;
  std::vector<double> a_;
  std::vector<std::size_t> piv_;
  bool factored_ = false;
};

}  // namespace annular
