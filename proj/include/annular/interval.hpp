#pragma once

// Closed real intervals with outward rounding.
//
// The FPU stays in round-to-nearest. Every endpoint is then moved outward
// only when an error-free transformation (TwoSum / FMA residual) shows that
// the rounded value lies on the wrong side of the exact result, so exactly
// representable results stay tight: [1,2] + [3,4] == [4,6].

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>

#include "annular/errors.hpp"

namespace annular {

namespace rounding {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMax = std::numeric_limits<double>::max();
// Below this magnitude FMA residuals may be inexact (gradual underflow).
inline constexpr double kTiny = 0x1p-960;

inline double next_up(double x) noexcept {
  if (x != x || x == kInf) return x;
  if (x == 0.0) return std::numeric_limits<double>::denorm_min();
  auto bits = std::bit_cast<std::uint64_t>(x);
  bits = x > 0 ? bits + 1 : bits - 1;
  return std::bit_cast<double>(bits);
}

inline double next_down(double x) noexcept { return -next_up(-x); }

inline double ulps_down(double x, int n) noexcept {
  for (int i = 0; i < n; ++i) x = next_down(x);
  return x;
}

inline double ulps_up(double x, int n) noexcept {
  for (int i = 0; i < n; ++i) x = next_up(x);
  return x;
}

// Error of s = fl(a + b), exact when no overflow occurred.
inline double two_sum_err(double a, double b, double s) noexcept {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

inline double add_down(double a, double b) noexcept {
  const double s = a + b;
  if (!std::isfinite(s)) return (s == kInf && std::isfinite(a) && std::isfinite(b)) ? kMax : s;
  return two_sum_err(a, b, s) < 0 ? next_down(s) : s;
}

inline double add_up(double a, double b) noexcept {
  const double s = a + b;
  if (!std::isfinite(s)) return (s == -kInf && std::isfinite(a) && std::isfinite(b)) ? -kMax : s;
  return two_sum_err(a, b, s) > 0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) noexcept { return add_down(a, -b); }
inline double sub_up(double a, double b) noexcept { return add_up(a, -b); }

inline double mul_down(double a, double b) noexcept {
  const double p = a * b;
  if (a == 0.0 || b == 0.0) return 0.0;
  if (!std::isfinite(p)) return (p == kInf && std::isfinite(a) && std::isfinite(b)) ? kMax : p;
  if (std::abs(p) < kTiny) return next_down(p);
  return std::fma(a, b, -p) < 0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) noexcept {
  const double p = a * b;
  if (a == 0.0 || b == 0.0) return 0.0;
  if (!std::isfinite(p)) return (p == -kInf && std::isfinite(a) && std::isfinite(b)) ? -kMax : p;
  if (std::abs(p) < kTiny) return next_up(p);
  return std::fma(a, b, -p) > 0 ? next_up(p) : p;
}

// Sign of (a/b - q) where q = fl(a/b); 0 when exact.
inline int div_residual_sign(double a, double b, double q) noexcept {
  const double r = std::fma(-q, b, a);
  if (r == 0.0) return 0;
  return ((r > 0) == (b > 0)) ? 1 : -1;
}

inline double div_down(double a, double b) noexcept {
  if (a == 0.0) return 0.0;
  const double q = a / b;
  if (!std::isfinite(q)) return (q == kInf && std::isfinite(a)) ? kMax : q;
  if (std::abs(q) < kTiny || std::abs(a) < kTiny || std::isinf(b)) return next_down(q);
  return div_residual_sign(a, b, q) < 0 ? next_down(q) : q;
}

inline double div_up(double a, double b) noexcept {
  if (a == 0.0) return 0.0;
  const double q = a / b;
  if (!std::isfinite(q)) return (q == -kInf && std::isfinite(a)) ? -kMax : q;
  if (std::abs(q) < kTiny || std::abs(a) < kTiny || std::isinf(b)) return next_up(q);
  return div_residual_sign(a, b, q) > 0 ? next_up(q) : q;
}

inline double sqrt_down(double x) noexcept {
  const double s = std::sqrt(x);
  if (x == 0.0 || std::isinf(x)) return s;
  if (x < kTiny) return next_down(s);
  return std::fma(-s, s, x) < 0 ? next_down(s) : s;
}

inline double sqrt_up(double x) noexcept {
  const double s = std::sqrt(x);
  if (x == 0.0 || std::isinf(x)) return s;
  if (x < kTiny) return next_up(s);
  return std::fma(-s, s, x) > 0 ? next_up(s) : s;
}

}  // namespace rounding

class Interval {
 public:
  constexpr Interval() noexcept = default;

  // NOLINTNEXTLINE(google-explicit-constructor): point values promote freely.
  constexpr Interval(double v) : lo_(v), hi_(v) {
    if (v != v) throw InvalidInterval("NaN interval endpoint");
  }

  constexpr Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (lo != lo || hi != hi) throw InvalidInterval("NaN interval endpoint");
    if (lo > hi) throw InvalidInterval("interval with lo > hi");
  }

  [[nodiscard]] constexpr double lo() const noexcept { return lo_; }
  [[nodiscard]] constexpr double hi() const noexcept { return hi_; }

  /// Point midpoint (not rigorous).
  [[nodiscard]] double mid() const noexcept {
    if (lo_ == -hi_) return 0.0;
    const double m = 0.5 * lo_ + 0.5 * hi_;
    return std::isfinite(m) ? m : (lo_ + hi_) / 2;
  }
  /// Upper bound of hi - lo.
  [[nodiscard]] double width() const noexcept { return rounding::sub_up(hi_, lo_); }
  /// Upper bound on the distance from mid() to either endpoint.
  [[nodiscard]] double rad() const noexcept {
    const double m = mid();
    return std::max(rounding::sub_up(hi_, m), rounding::sub_up(m, lo_));
  }
  /// Largest absolute value.
  [[nodiscard]] double mag() const noexcept { return std::max(std::abs(lo_), std::abs(hi_)); }
  /// Smallest absolute value (mignitude).
  [[nodiscard]] double mig() const noexcept {
    if (lo_ <= 0.0 && hi_ >= 0.0) return 0.0;
    return std::min(std::abs(lo_), std::abs(hi_));
  }

  [[nodiscard]] constexpr bool is_point() const noexcept { return lo_ == hi_; }
  [[nodiscard]] constexpr bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }
  [[nodiscard]] constexpr bool contains(const Interval& o) const noexcept {
    return lo_ <= o.lo_ && o.hi_ <= hi_;
  }
  /// Strict inclusion of `o` in the interior of *this.
  [[nodiscard]] constexpr bool interior_contains(const Interval& o) const noexcept {
    return lo_ < o.lo_ && o.hi_ < hi_;
  }
  [[nodiscard]] constexpr bool contains_zero() const noexcept { return lo_ <= 0.0 && 0.0 <= hi_; }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  friend Interval operator-(const Interval& a) noexcept { return raw(-a.hi_, -a.lo_); }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return checked(rounding::add_down(a.lo_, b.lo_), rounding::add_up(a.hi_, b.hi_));
  }

  friend Interval operator-(const Interval& a, const Interval& b) {
    return checked(rounding::sub_down(a.lo_, b.hi_), rounding::sub_up(a.hi_, b.lo_));
  }

  friend Interval operator*(const Interval& a, const Interval& b) {
    using namespace rounding;
    const double al = a.lo_, ah = a.hi_, bl = b.lo_, bh = b.hi_;
    if (al >= 0) {
      if (bl >= 0) return checked(mul_down(al, bl), mul_up(ah, bh));
      if (bh <= 0) return checked(mul_down(ah, bl), mul_up(al, bh));
      return checked(mul_down(ah, bl), mul_up(ah, bh));
    }
    if (ah <= 0) {
      if (bl >= 0) return checked(mul_down(al, bh), mul_up(ah, bl));
      if (bh <= 0) return checked(mul_down(ah, bh), mul_up(al, bl));
      return checked(mul_down(al, bh), mul_up(al, bl));
    }
    if (bl >= 0) return checked(mul_down(al, bh), mul_up(ah, bh));
    if (bh <= 0) return checked(mul_down(ah, bl), mul_up(al, bl));
    return checked(std::min(mul_down(al, bh), mul_down(ah, bl)),
                   std::max(mul_up(al, bl), mul_up(ah, bh)));
  }

  friend Interval operator/(const Interval& a, const Interval& b) {
    using namespace rounding;
    if (b.contains_zero()) throw DivisionByZeroInterval();
    const double al = a.lo_, ah = a.hi_, bl = b.lo_, bh = b.hi_;
    if (bl > 0) {
      if (al >= 0) return checked(div_down(al, bh), div_up(ah, bl));
      if (ah <= 0) return checked(div_down(al, bl), div_up(ah, bh));
      return checked(div_down(al, bl), div_up(ah, bl));
    }
    if (al >= 0) return checked(div_down(ah, bh), div_up(al, bl));
    if (ah <= 0) return checked(div_down(ah, bl), div_up(al, bh));
    return checked(div_down(ah, bh), div_up(al, bh));
  }

  friend bool operator==(const Interval& a, const Interval& b) noexcept = default;

 private:
  static Interval raw(double lo, double hi) noexcept {
    Interval r;
    r.lo_ = lo;
    r.hi_ = hi;
    return r;
  }
  static Interval checked(double lo, double hi) {
    if (lo != lo || hi != hi) throw DomainError("interval operation produced NaN");
    return raw(lo, hi);
  }

  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Enclosure of pi (lower bound is the double nearest pi, which lies below it).
inline constexpr Interval kPi{0x1.921fb54442d18p+1, 0x1.921fb54442d19p+1};
inline constexpr Interval kTwoPi{0x1.921fb54442d18p+2, 0x1.921fb54442d19p+2};
inline constexpr Interval kHalfPi{0x1.921fb54442d18p+0, 0x1.921fb54442d19p+0};

[[nodiscard]] inline bool contains(const Interval& a, double x) noexcept { return a.contains(x); }
[[nodiscard]] inline double width(const Interval& a) noexcept { return a.width(); }
[[nodiscard]] inline double midpoint(const Interval& a) noexcept { return a.mid(); }
[[nodiscard]] inline Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}
[[nodiscard]] inline bool subset_interior(const Interval& inner, const Interval& outer) noexcept {
  return outer.interior_contains(inner);
}
/// Intersection; throws InvalidInterval when empty.
[[nodiscard]] inline Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi())};
}
[[nodiscard]] inline bool overlaps(const Interval& a, const Interval& b) noexcept {
  return a.lo() <= b.hi() && b.lo() <= a.hi();
}

[[nodiscard]] Interval sqr(const Interval& x);
[[nodiscard]] Interval sqrt(const Interval& x);
[[nodiscard]] Interval exp(const Interval& x);
[[nodiscard]] Interval log(const Interval& x);
[[nodiscard]] Interval sin(const Interval& x);
[[nodiscard]] Interval cos(const Interval& x);
[[nodiscard]] Interval tan(const Interval& x);
[[nodiscard]] Interval asin(const Interval& x);
[[nodiscard]] Interval abs(const Interval& x);
[[nodiscard]] Interval min(const Interval& a, const Interval& b);
[[nodiscard]] Interval max(const Interval& a, const Interval& b);

enum class Elem { Sin, Cos, Tan, Exp, Log, Sqrt, Asin, Sqr };

/// Dispatch by tag; used by tests and the textual map grammar.
[[nodiscard]] Interval elem(Elem f, const Interval& x);

std::ostream& operator<<(std::ostream& os, const Interval& x);

}  // namespace annular
