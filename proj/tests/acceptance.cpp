// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails. Sweep outputs go to argv[1]
// (default: ./acceptance_out).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "annular/certificate.hpp"
#include "annular/diffusion.hpp"
#include "annular/format.hpp"
#include "annular/krawczyk.hpp"
#include "annular/maps.hpp"
#include "annular/sweep.hpp"
#include "mpfr_oracle.hpp"

using namespace annular;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& fn) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::ostringstream t;
  t.precision(1);
  t << std::fixed << seconds_since(t0);
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << title << ": " << o.detail
            << " (" << t.str() << " s)" << std::endl;
}

struct Row {
  HChoice h;
  VChoice v;
  double seed;
  int m;
};

Outcome table(const Row* rows, std::size_t n) {
  Outcome o{true, ""};
  std::ostringstream d;
  d << "m =";
  for (std::size_t i = 0; i < n; ++i) {
    const Row& r = rows[i];
    const MapSpec map = MapSpec::vsf(r.h, r.v);
    DiffusionOptions opts;
    opts.seed = r.seed;
    const auto t0 = Clock::now();
    const DiffusionResult res = validate_diffusion(
        map, r.h == HChoice::Sine ? std::optional<int>(2) : std::nullopt, opts);
    const double secs = seconds_since(t0);
    const bool ok = res.status == DiffusionStatus::Verified && res.m == r.m &&
                    res.thresholds.B == 5.0 && secs < 5.0 &&
                    recheck(diffusion_certificate(res, r.h == HChoice::Sine
                                                           ? std::optional<int>(2)
                                                           : std::nullopt))
                        .ok;
    d << ' ' << res.m << (ok ? "" : "!");
    o.pass = o.pass && ok;
  }
  o.detail = d.str();
  return o;
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Rechecks every certificate referenced by the report; returns the failures.
std::size_t recheck_all(const SweepReport& rep, const fs::path& dir, std::size_t& checked) {
  std::size_t bad = 0;
  auto one = [&](const std::string& rel) {
    if (rel.empty()) {
      ++bad;
      return;
    }
    ++checked;
    if (!recheck(read_json_file(dir / rel)).ok) ++bad;
  };
  for (const auto& u : rep.records) {
    if (rep.config.mode == SweepMode::Mesh) {
      if (u.status == "Verified") one(u.cert_path);
    } else {
      for (const auto& l : u.leaves)
        if (l.status == "Chaos") one(l.cert_path);
    }
  }
  return bad;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);

  const Row twist[] = {
      {HChoice::Identity, VChoice::Linear, 0.2647, 11},
      {HChoice::Identity, VChoice::Quadratic, 0.3695, 15},
      {HChoice::Identity, VChoice::Tan, 0.5266, 12},
      {HChoice::Identity, VChoice::Log, 0.4387, 10},
      {HChoice::Identity, VChoice::Exp, 0.3693, 12},
  };
  const Row nontwist[] = {
      {HChoice::Sine, VChoice::Linear, 0.4454, 11},
      {HChoice::Sine, VChoice::Quadratic, 0.4185, 14},
      {HChoice::Sine, VChoice::Tan, 0.3332, 7},
      {HChoice::Sine, VChoice::Log, 0.4614, 9},
      {HChoice::Sine, VChoice::Exp, 0.3046, 8},
  };

  report(1, "twist variations validate with the tabulated iterate counts",
         [&] { return table(twist, 5); });
  report(2, "non-twist variations validate with the tabulated iterate counts",
         [&] { return table(nontwist, 5); });

  report(3, "c-intervals of the log and exp variations", [] {
    const Interval lg = -riemann_enclosure_adaptive(VChoice::Log, 1e-5);
    const Interval ex = -riemann_enclosure_adaptive(VChoice::Exp, 1e-5);
    const bool ok = overlaps(lg, Interval(-1.8714651070, -1.8713991910)) &&
                    overlaps(ex, Interval(-0.2660893818, -0.2660423737)) &&
                    lg.width() <= 1e-4 && ex.width() <= 1e-4;
    return Outcome{ok, "log " + format_interval(lg) + ", exp " + format_interval(ex)};
  });

  report(4, "NTSF 50x50 mesh on [0,1]^2", [&] {
    SweepConfig c;
    c.family = SweepFamily::NTSF;
    c.nx = c.ny = 50;
    c.out_dir = out / "ntsf_50x50";
    c.unit_budget_s = 0;
    fs::remove_all(c.out_dir);
    const auto t0 = Clock::now();
    const SweepReport r = run_sweep(c);
    const double secs = seconds_since(t0);
    std::size_t checked = 0;
    const std::size_t bad = recheck_all(r, c.out_dir, checked);
    const double f = r.fraction();
    const bool ok = std::abs(f - 0.240359) <= 0.10 && bad == 0 && secs < 1800 && r.total() == 2500;
    return Outcome{ok, "verified " + std::to_string(r.verified()) + "/2500 = " + fmt(100 * f) +
                           "%, sweep " + fmt(secs) + " s, " + std::to_string(checked) +
                           " certificates rechecked, " + std::to_string(bad) + " failed"};
  });

  report(5, "DSF [4,5]x[0.2,0.4], 20x10 boxes, depth 2", [&] {
    SweepConfig c;
    c.family = SweepFamily::DSF;
    c.mode = SweepMode::Subdivide;
    c.x0 = 4;
    c.x1 = 5;
    c.y0 = 0.2;
    c.y1 = 0.4;
    c.nx = 20;
    c.ny = 10;
    c.max_depth = 2;
    c.unit_budget_s = 0;
    c.out_dir = out / "dsf_20x10_d2";
    fs::remove_all(c.out_dir);
    const auto t0 = Clock::now();
    const SweepReport r = run_sweep(c);
    const double secs = seconds_since(t0);
    std::size_t checked = 0;
    const std::size_t bad = recheck_all(r, c.out_dir, checked);
    const double f = r.area_fraction();
    const bool ok = f >= 0.90 && bad == 0 && secs < 3600;
    return Outcome{ok, "verified area " + std::to_string(r.area_num()) + "/" +
                           std::to_string(r.area_den()) + " = " + fmt(100 * f, 5) + "%, sweep " +
                           fmt(secs) + " s, " + std::to_string(checked) +
                           " leaf certificates rechecked, " + std::to_string(bad) + " failed"};
  });

  report(6, "scalar Krawczyk example", [] {
    const auto F = [](const IVec& x) { return IVec{sqr(x[0]) - Interval(4.0)}; };
    const auto DF = [](const IVec& x) { return IMat(1, 1, Interval(2.0) * x[0]); };
    const double X0[] = {2.0};
    const Certificate c = krawczyk_test(F, DF, IVec{Interval(1.9, 2.1)}, X0, Mat(1, 1, 0.25));
    const double Xm[] = {0.5};
    const Certificate w = krawczyk_test(F, DF, IVec{Interval(-3, 3)}, Xm, Mat(1, 1, 0.25));
    const Interval K = c.K[0];
    // K must contain [1.995, 2.005] (outward rounding) and exceed it by at
    // most two ulps per side.
    const bool tight = K.lo() <= 1.995 && K.hi() >= 2.005 &&
                       K.lo() >= rounding::ulps_down(1.995, 2) &&
                       K.hi() <= rounding::ulps_up(2.005, 2);
    const bool ok = c.verified && subset_interior(K, Interval(1.9, 2.1)) && tight && !w.verified;
    return Outcome{ok, "K = " + format_interval(K) + ", [-3,3] verified=" +
                           (w.verified ? "true" : "false")};
  });

  report(7, "interval soundness against MPFR", [] {
    const long a = oracle::arithmetic_violations(12345, 100000);
    const long e = oracle::elementary_violations(54321, 1000);
    return Outcome{a == 0 && e == 0, std::to_string(a) + " violations in 100000 operations, " +
                                         std::to_string(e) + " in 8000 elementary calls"};
  });

  report(8, "threshold formulas", [] {
    const Thresholds tw = diffusion_threshold(MapSpec::vsf(HChoice::Identity, VChoice::Linear));
    const Thresholds nt = diffusion_threshold(MapSpec::vsf(HChoice::Sine, VChoice::Linear), 2);
    const Interval m6 = twist_threshold(Interval(2.0));
    const Interval m10 = nontwist_threshold(Interval(2.0), 2);
    const Interval m5 = ntsf_threshold(Interval(1.0), Interval(1.0));
    const bool ok = m6 == Interval(6.0) && m10 == Interval(10.0) && m5.contains(5.0) &&
                    m5.width() <= 2 * (rounding::next_up(5.0) - 5.0) && tw.M.hi() <= 6 &&
                    nt.M.hi() <= 10 && tw.B == 5 && nt.B == 5;
    return Outcome{ok, "M(2) = " + format_interval(m6) + ", M_2(2) = " + format_interval(m10) +
                           ", M_{1,1} = " + format_interval(m5)};
  });

  report(9, "summary JSON independent of worker count", [&] {
    bool ok = true;
    std::string detail;
    for (const SweepFamily fam : {SweepFamily::NTSF, SweepFamily::DSF}) {
      SweepConfig c;
      c.family = fam;
      c.unit_budget_s = 0;
      if (fam == SweepFamily::NTSF) {
        c.nx = c.ny = 12;
      } else {
        c.mode = SweepMode::Subdivide;
        c.x0 = 4;
        c.x1 = 5;
        c.y0 = 0.2;
        c.y1 = 0.4;
        c.nx = 4;
        c.ny = 2;
        c.max_depth = 1;
      }
      std::string first;
      for (int workers : {1, 2, 4, 0}) {
        c.workers = workers;
        c.exec = workers == 0 ? kernels::Exec::Serial : kernels::Exec::Parallel;
        c.out_dir = out / ("determinism_" + std::string(to_string(fam)) + "_" +
                           std::to_string(workers));
        fs::remove_all(c.out_dir);
        run_sweep(c);
        const std::string s = slurp(c.out_dir / "summary.json");
        if (first.empty()) first = s;
        ok = ok && !s.empty() && s == first;
      }
      detail += std::string(to_string(fam)) + (ok ? " identical; " : " differs; ");
    }
    return Outcome{ok, detail + "workers 1, 2, 4 and the serial loop"};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
