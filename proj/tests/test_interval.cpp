#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "annular/format.hpp"
#include "annular/interval.hpp"

using namespace annular;

TEST_CASE("binary operations on exact endpoints stay tight") {
  CHECK(Interval(1, 2) + Interval(3, 4) == Interval(4, 6));
  CHECK(Interval(-1, 2) * Interval(3, 4) == Interval(-4, 8));
  CHECK(Interval(1, 2) - Interval(3, 4) == Interval(-3, -1));
  CHECK(Interval(1, 2) / Interval(4, 8) == Interval(0.125, 0.5));
}

TEST_CASE("one third is enclosed with positive width") {
  const Interval q = Interval(1.0) / Interval(3.0);
  CHECK(q.width() > 0);
  CHECK(q.contains(1.0 / 3.0));
  CHECK(q.hi() == rounding::next_up(q.lo()));
  // 3 * [q] must straddle 1 since 1/3 is not a double.
  const Interval back = q * Interval(3.0);
  CHECK(back.contains(1.0));
}

TEST_CASE("division by an interval containing zero throws") {
  CHECK_THROWS_AS(Interval(1.0) / Interval(-1, 1), DivisionByZeroInterval);
  CHECK_THROWS_AS(Interval(1.0) / Interval(0.0), DivisionByZeroInterval);
}

TEST_CASE("construction rejects lo > hi and NaN") {
  CHECK_THROWS_AS(Interval(2, 1), InvalidInterval);
  CHECK_THROWS_AS(Interval(std::nan(""), 1), InvalidInterval);
  CHECK_THROWS_AS(Interval(std::nan("")), InvalidInterval);
}

TEST_CASE("elementary functions at special points") {
  const Interval s0 = sin(Interval(0.0));
  CHECK(s0.contains(0.0));
  CHECK(s0.hi() <= rounding::ulps_up(0.0, 2));
  CHECK(s0.lo() >= rounding::ulps_down(0.0, 2));
  CHECK(sin(kTwoPi * Interval(0.25)).contains(1.0));
  CHECK(cos(Interval(0.0)).contains(1.0));
  CHECK(exp(Interval(0.0)).contains(1.0));
  CHECK(log(Interval(1.0)).contains(0.0));
  CHECK(sqrt(Interval(4.0)).contains(2.0));
  CHECK(asin(Interval(1.0)).contains(kHalfPi.mid()));
}

TEST_CASE("critical points inside the argument are covered") {
  const Interval s = sin(Interval(1.0, 2.0));  // contains pi/2
  CHECK(s.hi() >= 1.0);
  const Interval c = cos(Interval(3.0, 3.3));  // contains pi
  CHECK(c.lo() <= -1.0);
  const Interval w = sin(Interval(-100, 100));
  CHECK(w.lo() <= -1.0);
  CHECK(w.hi() >= 1.0);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS((void)log(Interval(-1, 1)), DomainError);
  CHECK_THROWS_AS((void)log(Interval(0.0)), DomainError);
  CHECK_THROWS_AS((void)sqrt(Interval(-1, 1)), DomainError);
  CHECK_THROWS_AS((void)asin(Interval(0.5, 1.5)), DomainError);
  CHECK_THROWS_AS((void)tan(Interval(1.5, 1.6)), TanPoleError);
  CHECK_NOTHROW((void)tan(Interval(-1, 1)));
}

TEST_CASE("set predicates") {
  CHECK(subset_interior(Interval(1.995, 2.005), Interval(1.9, 2.1)));
  CHECK_FALSE(subset_interior(Interval(1.9, 2.0), Interval(1.9, 2.1)));
  CHECK(midpoint(Interval(4, 6)) == 5.0);
  CHECK(contains(Interval(1, 2), 1.5));
  CHECK_FALSE(contains(Interval(1, 2), 2.5));
  CHECK(hull(Interval(1, 2), Interval(5, 6)) == Interval(1, 6));
  CHECK(width(Interval(1, 3)) == 2.0);
  // Irreflexive on degenerate boxes.
  CHECK_FALSE(subset_interior(Interval(2.0), Interval(2.0)));
}

TEST_CASE("range invariants of sin and sqr") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-50, 50), w(0, 10);
  for (int i = 0; i < 2000; ++i) {
    const double lo = c(rng);
    const Interval x(lo, lo + w(rng));
    const Interval s = sin(x);
    CHECK(s.lo() >= -1.0);
    CHECK(s.hi() <= 1.0);
    CHECK(sqr(x).lo() >= 0.0);
  }
}

TEST_CASE("inclusion isotonicity on nested pairs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-10, 10), w(0, 2);
  for (int i = 0; i < 5000; ++i) {
    const double al = c(rng), bl = c(rng);
    const Interval a(al, al + w(rng)), b(bl, bl + w(rng));
    const Interval A(a.lo() - w(rng), a.hi() + w(rng)), B(b.lo() - w(rng), b.hi() + w(rng));
    CHECK(A.contains(a));
    CHECK((A + B).contains(a + b));
    CHECK((A - B).contains(a - b));
    CHECK((A * B).contains(a * b));
    if (!B.contains_zero()) CHECK((A / B).contains(a / b));
    CHECK(exp(A).contains(exp(a)));
    CHECK(sin(A).contains(sin(a)));
    CHECK(cos(A).contains(cos(a)));
  }
}

TEST_CASE("overflow goes to the largest finite bound or infinity, never NaN") {
  const double big = std::numeric_limits<double>::max();
  const Interval x = Interval(big) + Interval(big);
  CHECK(x.hi() == rounding::kInf);
  CHECK(x.lo() == big);
  CHECK(exp(Interval(1000.0)).hi() == rounding::kInf);
}

TEST_CASE("decimal formatting round-trips exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(parse_double(format_double(x)) == x);
    const Interval iv(x, rounding::next_up(x));
    CHECK(parse_interval(format_interval(iv)) == iv);
  }
  CHECK(parse_interval("0.5") == Interval(0.5));
  CHECK(parse_interval("[-1,2]") == Interval(-1, 2));
  CHECK_THROWS_AS(parse_interval("[2,1]"), Error);
  CHECK_THROWS_AS(parse_double("abc"), ParseError);
}
