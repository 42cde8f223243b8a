// Interval soundness against MPFR at 256 bits.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mpfr_oracle.hpp"

using namespace annular;
using oracle::Big;
using oracle::encloses;

TEST_CASE("one third and logarithms against the oracle") {
  const Interval q = Interval(1.0) / Interval(3.0);
  Big third;
  mpfr_set_ui(third.get(), 1, MPFR_RNDN);
  mpfr_div_ui(third.get(), third.get(), 3, MPFR_RNDN);
  CHECK(encloses(q, third));
  CHECK(q.width() > 0);
  CHECK(rounding::next_up(q.lo()) == q.hi());

  const Interval l = log(Interval(2, 3));
  Big l2, l3;
  mpfr_set_d(l2.get(), 2.0, MPFR_RNDN);
  mpfr_log(l2.get(), l2.get(), MPFR_RNDN);
  mpfr_set_d(l3.get(), 3.0, MPFR_RNDN);
  mpfr_log(l3.get(), l3.get(), MPFR_RNDN);
  CHECK(encloses(l, l2));
  CHECK(encloses(l, l3));
  CHECK(l.width() < 0.41);
}

TEST_CASE("arithmetic fuzz: 100000 operations") {
  CHECK(oracle::arithmetic_violations(20240601, 100000) == 0);
}

TEST_CASE("elementary function fuzz: 1000 rounds") {
  CHECK(oracle::elementary_violations(77, 1000) == 0);
}

TEST_CASE("point elementary functions stay within a few ulps") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    for (const Interval& r : {sin(Interval(v)), cos(Interval(v)), exp(Interval(v))}) {
      CHECK(r.hi() <= rounding::ulps_up(r.lo(), 8));
    }
  }
}

TEST_CASE("pi constants enclose pi") {
  Big pi, two;
  mpfr_const_pi(pi.get(), MPFR_RNDN);
  CHECK(encloses(kPi, pi));
  CHECK(rounding::next_up(kPi.lo()) == kPi.hi());
  mpfr_mul_ui(two.get(), pi.get(), 2, MPFR_RNDN);
  CHECK(encloses(kTwoPi, two));
  mpfr_div_ui(two.get(), pi.get(), 2, MPFR_RNDN);
  CHECK(encloses(kHalfPi, two));
}
