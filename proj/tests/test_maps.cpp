#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "annular/maps.hpp"

using namespace annular;

namespace {

bool encloses(const IPoint& box, const Point& p) {
  return box[0].contains(p[0]) && box[1].contains(p[1]);
}

IPoint pt(double x, double y) { return {Interval(x), Interval(y)}; }

const MapSpec kVsfSpecs[] = {
    MapSpec::vsf(HChoice::Identity, VChoice::Linear),
    MapSpec::vsf(HChoice::Identity, VChoice::Quadratic),
    MapSpec::vsf(HChoice::Identity, VChoice::Log),
    MapSpec::vsf(HChoice::Sine, VChoice::Exp),
    MapSpec::vsf(HChoice::Sine, VChoice::Tan),
};

}  // namespace

TEST_CASE("fixed points of the conservative families") {
  const MapSpec vsf = MapSpec::vsf(HChoice::Identity, VChoice::Linear, Interval(0.0));
  CHECK(encloses(eval_map(vsf, pt(0, 0)), {0, 0}));
  const MapSpec ntsf = MapSpec::ntsf(Interval(1.0), Interval(0.0));
  CHECK(encloses(eval_map(ntsf, pt(0, 1)), {0, 1}));
}

TEST_CASE("dissipative forward and inverse maps round-trip") {
  const MapSpec fwd = MapSpec::dsf(Interval(4.0), Interval(0.5));
  CHECK(encloses(eval_map(fwd.inverse(), eval_map(fwd, pt(0.3, 0.7))), {0.3, 0.7}));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ua(2.1, 10), ub(0.05, 0.95), ux(-3, 3), uy(-5, 5);
  for (int i = 0; i < 1000; ++i) {
    const MapSpec f = MapSpec::dsf(Interval(ua(rng)), Interval(ub(rng)));
    const Point p{ux(rng), uy(rng)};
    CHECK(encloses(eval_map(f, eval_map(f.inverse(), to_ipoint(p))), p));
    CHECK(encloses(eval_map(f.inverse(), eval_map(f, to_ipoint(p))), p));
  }
}

TEST_CASE("jacobian closed forms") {
  const MapSpec vsf = MapSpec::vsf(HChoice::Identity, VChoice::Linear, Interval(0.0));
  const IMat2 J = jacobian(vsf, pt(0, 0));
  const double tp = 2 * std::numbers::pi;
  CHECK(J[0][0].contains(1.0));
  CHECK(J[0][1].contains(1.0));
  CHECK(J[1][0].contains(tp));
  CHECK(J[1][1].contains(1 + tp));
  CHECK(J[1][0].width() < 1e-14);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(-2, 2), ua(0.1, 3), ub(-1, 1), uc(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const Point p{ux(rng), ux(rng)};
    const double b = uc(rng);
    CHECK(det(jacobian(MapSpec::dsf(Interval(ua(rng) + 2), Interval(b)), to_ipoint(p))).contains(b));
    CHECK(det(jacobian(MapSpec::ntsf(Interval(ua(rng)), Interval(ub(rng))), to_ipoint(p)))
              .contains(1.0));
  }
}

TEST_CASE("jacobian encloses central differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::vector<MapSpec> specs(std::begin(kVsfSpecs), std::end(kVsfSpecs));
  specs.push_back(MapSpec::ntsf(Interval(0.7), Interval(0.4)));
  specs.push_back(MapSpec::dsf(Interval(4.0), Interval(0.5)));
  specs.push_back(MapSpec::dsf(Interval(4.0), Interval(0.5), true));
  const double h = 1e-6;
  for (const auto& spec : specs) {
    for (int i = 0; i < 100; ++i) {
      const Point p{u(rng), u(rng) * 0.25};
      const IMat2 J = jacobian(spec, to_ipoint(p));
      for (int j = 0; j < 2; ++j) {
        Point lo = p, hi = p;
        lo[j] -= h;
        hi[j] += h;
        const Point fl = eval_point(spec, lo), fh = eval_point(spec, hi);
        for (int r = 0; r < 2; ++r) {
          const double fd = (fh[r] - fl[r]) / (2 * h);
          // Truncation error h^2 |f'''| / 6 plus cancellation, generously bounded.
          const double tol = 1e-4 * (1 + std::abs(fd));
          CHECK(J[r][j].lo() - tol <= fd);
          CHECK(fd <= J[r][j].hi() + tol);
        }
      }
    }
  }
}

TEST_CASE("lifts commute with the deck translation") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<MapSpec> specs(std::begin(kVsfSpecs), std::end(kVsfSpecs));
  specs.push_back(MapSpec::ntsf(Interval(0.5), Interval(0.25)));
  for (const auto& spec : specs) {
    for (int i = 0; i < 200; ++i) {
      double y = u(rng);
      if (spec.v == VChoice::Tan && spec.family == Family::VSF) y *= 0.1;
      const Point p{u(rng), y};
      const IPoint a = eval_map(spec, pt(p[0] + 1, p[1]));
      const IPoint b = eval_map(spec, to_ipoint(p));
      const Interval shifted = a[0] - Interval(1.0);
      CHECK(overlaps(shifted, b[0]));
      CHECK(overlaps(a[1], b[1]));
      const Point fp = eval_point(spec, p);
      CHECK(shifted.lo() - 1e-12 <= fp[0]);
      CHECK(fp[0] <= shifted.hi() + 1e-12);
    }
  }
}

TEST_CASE("NTSF fixed point family") {
  // With kappa = 0 the points (0, +-sqrt(1 - 0/a)) = (0, +-1) are fixed for b = 0.
  for (double a : {1.0, 2.0}) {
    const MapSpec f = MapSpec::ntsf(Interval(a), Interval(0.0));
    for (double s : {1.0, -1.0}) {
      const IPoint img = eval_map(f, pt(0, s));
      CHECK((img[0] - Interval(0.0)).contains(0.0));
      CHECK((img[1] - Interval(s)).contains(0.0));
    }
  }
  // kappa = 1, a = 2: y = +-sqrt(1/2) moves by exactly (1, 0).
  const MapSpec f = MapSpec::ntsf(Interval(2.0), Interval(0.0));
  for (double s : {1.0, -1.0}) {
    const Interval y = Interval(s) * sqrt(Interval(0.5));
    const IPoint img = eval_map(f, {Interval(0.0), y});
    CHECK(img[0].contains(1.0));
    CHECK((img[1] - y).contains(0.0));
  }
}

TEST_CASE("vertical bound") {
  CHECK(vertical_bound(MapSpec::vsf(HChoice::Identity, VChoice::Linear, Interval(0.0)))
            .contains(1.0));
  const Interval nb = vertical_bound(MapSpec::ntsf(Interval(1.0), Interval(0.3)));
  CHECK(nb.contains(0.3));
  CHECK(nb.width() == 0.0);
  const Interval nt = vertical_bound(MapSpec::vsf(HChoice::Identity, VChoice::Tan, Interval(0.0)));
  CHECK(nt.hi() >= std::tan(1.0L));
  CHECK(nt.hi() <= std::tan(1.0) + 1e-5);
  CHECK_THROWS_AS(vertical_bound(MapSpec::dsf(Interval(4.0), Interval(0.5))), Unsupported);
}

TEST_CASE("vertical bound dominates sampled displacements") {
  for (const auto& spec : kVsfSpecs) {
    const double hi = vertical_bound(spec).hi();
    for (int i = 0; i <= 10000; ++i) {
      const double s = -1.0 + 2.0 * i / 10000.0;
      const double v = detail::v_shape(spec.v, s) + spec.c.mid();
      CHECK(std::abs(v) <= hi + 1e-7);
    }
  }
}

TEST_CASE("diffusion thresholds") {
  const Thresholds tw = diffusion_threshold(MapSpec::vsf(HChoice::Identity, VChoice::Linear));
  CHECK(tw.N.hi() <= 2);
  CHECK(tw.M.hi() <= 6);
  CHECK(twist_threshold(Interval(2.0)) == Interval(6.0));
  CHECK(nontwist_threshold(Interval(2.0), 2) == Interval(10.0));
  CHECK(nontwist_threshold(Interval(2.0), 1) == Interval(14.0));
  CHECK(nontwist_threshold(Interval(2.0), 5) == Interval(6.0));
  const Thresholds nt = diffusion_threshold(MapSpec::vsf(HChoice::Sine, VChoice::Linear), 2);
  CHECK(nt.M.hi() <= 10);
  CHECK(nt.B == kVsfLine);
  CHECK(tw.B == kVsfLine);
  CHECK_THROWS_AS(diffusion_threshold(MapSpec::vsf(HChoice::Sine, VChoice::Linear)), MissingRho);
  CHECK(ntsf_threshold(Interval(1.0), Interval(1.0)).contains(5.0));
  CHECK(ntsf_threshold(Interval(1.0), Interval(1.0)).width() < 1e-14);
  const Thresholds n = diffusion_threshold(MapSpec::ntsf(Interval(1.0), Interval(1.0)));
  CHECK(n.B > n.M.hi());
  CHECK(n.B <= 5 + kNtsfLineMargin + 1e-12);
  CHECK(ntsf_threshold(Interval(1.0), Interval(-0.1, 0.1)).hi() == rounding::kInf);
}

TEST_CASE("threshold line sits at or above half the threshold") {
  for (const auto& spec : kVsfSpecs) {
    const auto rho = spec.h == HChoice::Sine ? std::optional<int>(2) : std::nullopt;
    const Thresholds t = diffusion_threshold(spec, rho);
    CHECK(t.B >= t.M.hi() / 2);
  }
}

TEST_CASE("dissipative fixed points") {
  CHECK_THROWS_AS(dsf_fixed_pair(Interval(4.0), Interval(0.5), 9), NoFixedPoint);
  const FixedPointPair fp = dsf_fixed_pair(Interval(4.0), Interval(0.5), 1);
  CHECK(fp.p_plus[1].contains(-0.25));
  const long double x = std::asin(-0.125L) / (2 * std::numbers::pi_v<long double>);
  CHECK(fp.p_plus[0].lo() <= x);
  CHECK(x <= fp.p_plus[0].hi());
  CHECK(std::abs(static_cast<double>(x) - (-0.019947)) < 1e-6);
  CHECK(fp.p_plus[0].width() < 1e-14);

  const MapSpec inv = MapSpec::dsf(Interval(4.0), Interval(0.5), true);
  const IPoint ip = eval_map(inv, fp.p_plus);
  CHECK((ip[0] - fp.p_plus[0] - Interval(1.0)).contains(0.0));
  CHECK((ip[1] - fp.p_plus[1]).contains(0.0));
  const IPoint im = eval_map(inv, fp.p_minus);
  CHECK((im[0] - fp.p_minus[0] + Interval(1.0)).contains(0.0));
  CHECK((im[1] - fp.p_minus[1]).contains(0.0));
}

TEST_CASE("dissipative shooting line") {
  CHECK(dsf_B(Interval(0.5)) == 2.0);
  CHECK(dsf_B(Interval(0.9)) >= 10.0);
  CHECK(dsf_B(Interval(0.9)) <= 10.0 + 1e-12);
  CHECK(dsf_B(Interval(0.8)) >= 5.0);
  CHECK(dsf_B(Interval(0.8)) <= 5.0 + 1e-12);
}

TEST_CASE("riemann enclosures") {
  const Interval s = riemann_enclosure(VChoice::Linear, 1000);
  CHECK(s.contains(0.0));
  CHECK(s.width() <= 0.05);

  const Interval lg = riemann_enclosure_adaptive(VChoice::Log, 1e-5);
  CHECK(overlaps(-lg, Interval(-1.8714651070, -1.8713991910)));
  const Interval ex = riemann_enclosure_adaptive(VChoice::Exp, 1e-5);
  CHECK(overlaps(-ex, Interval(-0.2660893818, -0.2660423737)));

  for (const auto& spec : kVsfSpecs) CHECK(zero_drift_holds(spec));
  CHECK_FALSE(zero_drift_holds(MapSpec::vsf(HChoice::Identity, VChoice::Exp, Interval(0.0))));
}

TEST_CASE("map spec text form round-trips") {
  const MapSpec specs[] = {
      MapSpec::vsf(HChoice::Identity, VChoice::Tan),
      MapSpec::vsf(HChoice::Sine, VChoice::Log),
      MapSpec::ntsf(Interval(0.5), Interval(0.25)),
      MapSpec::dsf(Interval(4.0), Interval(0.5)),
      MapSpec::dsf(Interval(4.0, 4.05), Interval(0.5), true),
  };
  for (const auto& s : specs) CHECK(MapSpec::parse(s.to_string()) == s);
  CHECK(MapSpec::parse("ntsf:a=0.5,b=0.25").to_string() == "ntsf:a=0.5,b=0.25");
  CHECK_THROWS_AS(MapSpec::parse("dsf:a=1,b=0.5"), DomainError);
  CHECK_THROWS_AS(MapSpec::parse("ntsf:a=-1,b=0"), DomainError);
  CHECK_THROWS_AS(MapSpec::parse("henon:a=1"), ParseError);
}
