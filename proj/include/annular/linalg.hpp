#pragma once

// Interval vectors and matrices, plain floating-point matrices, and the
// small amount of linear algebra the Krawczyk test needs.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "annular/interval.hpp"

namespace annular {

using Vec = std::vector<double>;

class IVec {
 public:
  IVec() = default;
  explicit IVec(std::size_t n, Interval fill = {}) : v_(n, fill) {}
  explicit IVec(std::vector<Interval> v) : v_(std::move(v)) {}
  IVec(std::initializer_list<Interval> v) : v_(v) {}
  static IVec from_point(std::span<const double> x);

  [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
  Interval& operator[](std::size_t i) { return v_[i]; }
  const Interval& operator[](std::size_t i) const { return v_[i]; }
  [[nodiscard]] auto begin() const noexcept { return v_.begin(); }
  [[nodiscard]] auto end() const noexcept { return v_.end(); }
  [[nodiscard]] std::span<const Interval> span() const noexcept { return v_; }

  [[nodiscard]] Vec mid() const;
  [[nodiscard]] double max_width() const;

  friend bool operator==(const IVec&, const IVec&) = default;

 private:
  std::vector<Interval> v_;
};

/// Row-major point matrix.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  static Mat identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {a_.data() + i * cols_, cols_};
  }
  [[nodiscard]] const double* data() const noexcept { return a_.data(); }

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

/// Row-major interval matrix.
class IMat {
 public:
  IMat() = default;
  IMat(std::size_t rows, std::size_t cols, Interval fill = {})
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  static IMat identity(std::size_t n);
  static IMat from_point(const Mat& m);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  Interval& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Interval& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  [[nodiscard]] Mat mid() const;

  friend bool operator==(const IMat&, const IMat&) = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Interval> a_;
};

/// Sparse interval matrix as (row, col, value) triplets; explicit zeros omitted.
struct SparseIMat {
  struct Entry {
    std::size_t row, col;
    Interval value;
  };
  std::size_t rows = 0, cols = 0;
  std::vector<Entry> entries;

  static SparseIMat from_dense(const IMat& m);
  [[nodiscard]] IMat to_dense() const;
  [[nodiscard]] Mat mid() const;
};

// Fixed 2D types used by the map families.
using Point = std::array<double, 2>;
using IPoint = std::array<Interval, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;
using IMat2 = std::array<std::array<Interval, 2>, 2>;

[[nodiscard]] IPoint to_ipoint(const Point& p);
[[nodiscard]] Point mid(const IPoint& p);
[[nodiscard]] IMat2 to_imat2(const Mat2& m);
[[nodiscard]] Mat2 mid(const IMat2& m);
[[nodiscard]] IPoint apply(const IMat2& m, const IPoint& v);
[[nodiscard]] IMat2 mul(const IMat2& a, const IMat2& b);
[[nodiscard]] Interval det(const IMat2& m);
/// Rigorous enclosure of the inverse of every matrix in `m` (Cramer's rule).
[[nodiscard]] IMat2 inverse(const IMat2& m);

// Set predicates.
[[nodiscard]] bool subset_interior(const IVec& inner, const IVec& outer);
[[nodiscard]] bool subset(const IVec& inner, const IVec& outer);
[[nodiscard]] bool contains(const IVec& box, std::span<const double> x);
[[nodiscard]] IVec hull(const IVec& a, const IVec& b);

[[nodiscard]] IVec imat_apply(const IMat& a, const IVec& v);
[[nodiscard]] IMat imat_mul(const IMat& a, const IMat& b);

/// Floating-point inverse by LU with partial pivoting. No rigor is claimed.
[[nodiscard]] Mat approx_inverse(const Mat& m);

/// Floating-point solve of m x = b by LU with partial pivoting.
[[nodiscard]] Vec solve(const Mat& m, std::span<const double> b);

}  // namespace annular
