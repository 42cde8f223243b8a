#include "annular/interval.hpp"

#include <cmath>
#include <ostream>

namespace annular {

namespace {

using rounding::next_down;
using rounding::next_up;
using rounding::ulps_down;
using rounding::ulps_up;

// Error budget for libm transcendental results, in ulps.
constexpr int kLibmUlps = 2;

double libm_down(double v) { return ulps_down(v, kLibmUlps); }
double libm_up(double v) { return ulps_up(v, kLibmUlps); }

// True unless it is certain that no point phase + 2*pi*k lies in x.
bool may_hit_phase(const Interval& x, const Interval& phase, const Interval& period) {
  const Interval tl = (Interval(x.lo()) - phase) / period;
  const Interval th = (Interval(x.hi()) - phase) / period;
  return std::floor(th.hi()) >= std::ceil(tl.lo());
}

Interval clamp_unit(double lo, double hi) {
  return {std::max(lo, -1.0), std::min(hi, 1.0)};
}

// sin/cos share this: `max_phase` is where the function reaches +1,
// the minimum sits half a period later.
Interval periodic_unit(const Interval& x, double (*f)(double), const Interval& max_phase) {
  if (!std::isfinite(x.lo()) || !std::isfinite(x.hi())) return {-1.0, 1.0};
  if (x.width() >= kTwoPi.lo()) return {-1.0, 1.0};
  const double fl = f(x.lo());
  const double fh = f(x.hi());
  double lo = libm_down(std::min(fl, fh));
  double hi = libm_up(std::max(fl, fh));
  if (may_hit_phase(x, max_phase, kTwoPi)) hi = 1.0;
  if (may_hit_phase(x, max_phase + kPi, kTwoPi)) lo = -1.0;
  return clamp_unit(lo, hi);
}

}  // namespace

Interval sqr(const Interval& x) {
  using namespace rounding;
  if (x.lo() >= 0) return {mul_down(x.lo(), x.lo()), mul_up(x.hi(), x.hi())};
  if (x.hi() <= 0) return {mul_down(x.hi(), x.hi()), mul_up(x.lo(), x.lo())};
  const double m = x.mag();
  return {0.0, mul_up(m, m)};
}

Interval sqrt(const Interval& x) {
  if (x.lo() < 0) throw DomainError("sqrt: argument interval has negative part");
  return {rounding::sqrt_down(x.lo()), rounding::sqrt_up(x.hi())};
}

Interval exp(const Interval& x) {
  const double lo = x.lo() == 0.0 ? 1.0 : std::max(0.0, libm_down(std::exp(x.lo())));
  const double hi = x.hi() == 0.0 ? 1.0 : libm_up(std::exp(x.hi()));
  return {lo, hi};
}

Interval log(const Interval& x) {
  if (!(x.lo() > 0)) throw DomainError("log: argument interval must be positive");
  const double lo = x.lo() == 1.0 ? 0.0 : libm_down(std::log(x.lo()));
  const double hi = x.hi() == 1.0 ? 0.0 : libm_up(std::log(x.hi()));
  return {lo, hi};
}

Interval sin(const Interval& x) {
  if (x.lo() == 0.0 && x.hi() == 0.0) return {0.0, 0.0};
  return periodic_unit(x, [](double v) { return std::sin(v); }, kHalfPi);
}

Interval cos(const Interval& x) {
  if (x.lo() == 0.0 && x.hi() == 0.0) return {1.0, 1.0};
  return periodic_unit(x, [](double v) { return std::cos(v); }, Interval(0.0));
}

Interval tan(const Interval& x) {
  if (!std::isfinite(x.lo()) || !std::isfinite(x.hi())) throw TanPoleError();
  if (x.width() >= kPi.lo()) throw TanPoleError();
  // poles at pi/2 + k*pi
  if (may_hit_phase(x, kHalfPi, kPi)) throw TanPoleError();
  if (x.lo() == 0.0 && x.hi() == 0.0) return {0.0, 0.0};
  return {libm_down(std::tan(x.lo())), libm_up(std::tan(x.hi()))};
}

Interval asin(const Interval& x) {
  if (x.lo() < -1.0 || x.hi() > 1.0) throw DomainError("asin: argument interval leaves [-1,1]");
  const double lo = x.lo() == 0.0 ? 0.0 : std::max(-kHalfPi.hi(), libm_down(std::asin(x.lo())));
  const double hi = x.hi() == 0.0 ? 0.0 : std::min(kHalfPi.hi(), libm_up(std::asin(x.hi())));
  return {lo, hi};
}

Interval abs(const Interval& x) {
  if (x.lo() >= 0) return x;
  if (x.hi() <= 0) return -x;
  return {0.0, x.mag()};
}

Interval min(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi())};
}

Interval max(const Interval& a, const Interval& b) {
  return {std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval elem(Elem f, const Interval& x) {
  switch (f) {
    case Elem::Sin: return sin(x);
    case Elem::Cos: return cos(x);
    case Elem::Tan: return tan(x);
    case Elem::Exp: return exp(x);
    case Elem::Log: return log(x);
    case Elem::Sqrt: return sqrt(x);
    case Elem::Asin: return asin(x);
    case Elem::Sqr: return sqr(x);
  }
  throw Unsupported("unknown elementary function");
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  return os << '[' << x.lo() << ", " << x.hi() << ']';
}

}  // namespace annular
