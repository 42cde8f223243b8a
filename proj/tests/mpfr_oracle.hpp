#pragma once

// MPFR oracle for interval soundness checks, 256-bit working precision.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "annular/interval.hpp"

namespace annular::oracle {

constexpr mpfr_prec_t kPrec = 256;

class Big {
 public:
  Big() { mpfr_init2(v_, kPrec); }
  explicit Big(double x) : Big() { mpfr_set_d(v_, x, MPFR_RNDN); }
  ~Big() { mpfr_clear(v_); }
  Big(const Big&) = delete;
  Big& operator=(const Big&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

inline bool encloses(const Interval& iv, const Big& x) {
  return mpfr_cmp_d(x.get(), iv.lo()) >= 0 && mpfr_cmp_d(x.get(), iv.hi()) <= 0;
}

// Exact 2 pi x at high precision.
inline void two_pi_times(Big& out, double x) {
  mpfr_const_pi(out.get(), MPFR_RNDN);
  mpfr_mul_d(out.get(), out.get(), 2.0 * x, MPFR_RNDN);
}

inline double sample(std::mt19937_64& rng, const Interval& iv) {
  std::uniform_real_distribution<double> t(0, 1);
  const double u = t(rng);
  if (u < 0.05) return iv.lo();
  if (u > 0.95) return iv.hi();
  const double x = iv.lo() + (iv.hi() - iv.lo()) * t(rng);
  return std::min(std::max(x, iv.lo()), iv.hi());
}

inline Interval random_interval(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1, 1), e(-20, 20), w(0, 1);
  const double centre = c(rng) * std::pow(2.0, e(rng));
  const double width = w(rng) < 0.2 ? 0.0 : w(rng) * std::pow(2.0, e(rng));
  return {centre, centre + width};
}

/// Random +, -, *, / on random intervals, checked at random member points.
/// Returns the number of enclosure violations.
inline long arithmetic_violations(std::uint64_t seed, long count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> op(0, 3);
  long violations = 0, done = 0;
  Big x, y, r;
  while (done < count) {
    const Interval a = random_interval(rng), b = random_interval(rng);
    const int k = op(rng);
    if (k == 3 && b.contains_zero()) continue;
    Interval res;
    switch (k) {
      case 0: res = a + b; break;
      case 1: res = a - b; break;
      case 2: res = a * b; break;
      default: res = a / b; break;
    }
    const double px = sample(rng, a), py = sample(rng, b);
    mpfr_set_d(x.get(), px, MPFR_RNDN);
    mpfr_set_d(y.get(), py, MPFR_RNDN);
    switch (k) {
      case 0: mpfr_add(r.get(), x.get(), y.get(), MPFR_RNDN); break;
      case 1: mpfr_sub(r.get(), x.get(), y.get(), MPFR_RNDN); break;
      case 2: mpfr_mul(r.get(), x.get(), y.get(), MPFR_RNDN); break;
      default: mpfr_div(r.get(), x.get(), y.get(), MPFR_RNDN); break;
    }
    if (!encloses(res, r)) ++violations;
    ++done;
  }
  return violations;
}

/// sin, cos (also of 2 pi x), exp, log, sqrt, asin and tan; `count` rounds
/// of eight calls each. Returns the number of enclosure violations.
inline long elementary_violations(std::uint64_t seed, long count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-6, 6), w(0, 0.5), p(0.01, 40), s(-0.99, 0.99);
  long violations = 0;
  Big x, r;
  for (long i = 0; i < count; ++i) {
    // sin(2 pi x) and cos(2 pi x) as the maps use them.
    {
      const double lo = u(rng);
      const Interval a(lo, lo + (i % 3 == 0 ? 0.0 : w(rng)));
      const double px = sample(rng, a);
      const Interval sv = sin(kTwoPi * a), cv = cos(kTwoPi * a);
      two_pi_times(x, px);
      mpfr_sin(r.get(), x.get(), MPFR_RNDN);
      violations += !encloses(sv, r);
      mpfr_cos(r.get(), x.get(), MPFR_RNDN);
      violations += !encloses(cv, r);
      mpfr_set_d(x.get(), px, MPFR_RNDN);
      mpfr_sin(r.get(), x.get(), MPFR_RNDN);
      violations += !encloses(sin(a), r);
      mpfr_exp(r.get(), x.get(), MPFR_RNDN);
      violations += !encloses(exp(a), r);
    }
    {
      const double lo = p(rng);
      const Interval a(lo, lo + (i % 3 == 0 ? 0.0 : w(rng)));
      const double px = sample(rng, a);
      mpfr_set_d(x.get(), px, MPFR_RNDN);
      mpfr_log(r.get(), x.get(), MPFR_RNDN);
      violations += !encloses(log(a), r);
      mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
      violations += !encloses(sqrt(a), r);
    }
    {
      const double lo = s(rng);
      const Interval a(lo, std::min(0.99, lo + (i % 3 == 0 ? 0.0 : w(rng))));
      const double px = sample(rng, a);
      mpfr_set_d(x.get(), px, MPFR_RNDN);
      mpfr_asin(r.get(), x.get(), MPFR_RNDN);
      violations += !encloses(asin(a), r);
      mpfr_tan(r.get(), x.get(), MPFR_RNDN);
      violations += !encloses(tan(a), r);
    }
  }
  return violations;
}

}  // namespace annular::oracle
