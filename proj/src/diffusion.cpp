#include "annular/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "annular/format.hpp"

namespace annular {

std::string_view to_string(DiffusionStatus s) {
  switch (s) {
    case DiffusionStatus::Verified: return "Verified";
    case DiffusionStatus::NoCandidate: return "NoCandidate";
    case DiffusionStatus::ValidationFailed: return "ValidationFailed";
  }
  return "?";
}

namespace {

// Escape time only; cheaper than orbit_from during scans. Returns max_m + 1
// when the orbit does not escape, with the final height in `y_end`.
int escape_time(const MapSpec& map, double x, double B, int max_m, double& y_end) {
  Point p{x, -B};
  for (int i = 1; i <= max_m; ++i) {
    p = eval_point(map, p);
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) break;
    if (p[1] > B) {
      y_end = p[1];
      return i;
    }
  }
  y_end = -rounding::kInf;
  return max_m + 1;
}

struct Hit {
  double x;
  int m;
  double y;
};

bool better(const Hit& a, const Hit& b) {
  if (a.m != b.m) return a.m < b.m;
  if (a.y != b.y) return a.y > b.y;
  return a.x < b.x;
}

void scan(const MapSpec& map, double B, int max_m, double x0, double x1, int count,
          std::vector<Hit>& hits) {
  for (int i = 0; i < count; ++i) {
    const double x = x0 + (x1 - x0) * i / count;
    double y = 0.0;
    const int m = escape_time(map, x, B, max_m, y);
    if (m >= 2 && m <= max_m) hits.push_back({x, m, y});
  }
}

}  // namespace

std::optional<CandidateOrbit> orbit_from(const MapSpec& map, double x, double B, int max_m) {
  CandidateOrbit c;
  c.x_start = x;
  c.B = B;
  c.points.push_back({x, -B});
  for (int i = 1; i <= max_m; ++i) {
    const Point p = eval_point(map, c.points.back());
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) return std::nullopt;
    c.points.push_back(p);
    if (p[1] > B) {
      c.m = i;
      return c;
    }
  }
  return std::nullopt;
}

std::vector<CandidateOrbit> find_candidates(const MapSpec& map, double B, int max_m, int grid,
                                            std::optional<double> seed, std::size_t count) {
  if (!(B > 0)) throw DomainError("find_candidate needs B > 0");
  if (max_m < 1) throw DomainError("find_candidate needs max_m >= 1");
  std::vector<CandidateOrbit> out;
  if (!std::isfinite(B)) return out;
  // Each step moves y by at most N; skip maps that cannot climb 2B in time.
  if (map.family == Family::NTSF) {
    const double b = map.b.mag();
    if (b == 0.0 || 2.0 * B > b * max_m) return out;
  }

  std::vector<Hit> hits;
  if (seed) {
    double y = 0.0;
    const int m = escape_time(map, *seed, B, max_m, y);
    if (m >= 2 && m <= max_m) hits.push_back({*seed, m, y});
    std::vector<Hit> near;
    scan(map, B, max_m, *seed - 1e-4, *seed + 1e-4, 200, near);
    std::sort(near.begin(), near.end(), better);
    hits.insert(hits.end(), near.begin(), near.end());
  } else {
    if (grid < 1) throw DomainError("find_candidate needs grid >= 1");
    scan(map, B, max_m, 0.0, 1.0, grid, hits);
    double h = 1.0 / grid;
    for (int round = 0; round < 2 && !hits.empty(); ++round) {
      const Hit best = *std::min_element(hits.begin(), hits.end(), better);
      scan(map, B, best.m, best.x - h, best.x + h, 64, hits);
      h /= 32.0;
    }
    std::sort(hits.begin(), hits.end(), better);
  }

  for (const Hit& h : hits) {
    if (out.size() >= count) break;
    if (auto c = orbit_from(map, h.x, B, max_m)) out.push_back(std::move(*c));
  }
  return out;
}

std::optional<CandidateOrbit> find_candidate(const MapSpec& map, double B, int max_m, int grid,
                                             std::optional<double> seed) {
  auto c = find_candidates(map, B, max_m, grid, seed, 1);
  if (c.empty()) return std::nullopt;
  return std::move(c.front());
}

int default_max_m(const MapSpec& map) { return map.family == Family::NTSF ? 300 : 50; }

DiffusionResult validate_diffusion(const MapSpec& map, std::optional<int> rho,
                                   const DiffusionOptions& opts) {
  if (map.family != Family::VSF && map.family != Family::NTSF)
    throw DomainError("validate_diffusion handles the conservative families only");
  DiffusionResult res;
  res.thresholds = diffusion_threshold(map, rho);
  if (opts.B) {
    if (map.family == Family::VSF && *opts.B < res.thresholds.M.hi() / 2.0)
      throw DomainError("shooting line B = " + format_double(*opts.B) +
                        " is below M/2 = " + format_double(res.thresholds.M.hi() / 2.0));
    if (map.family == Family::NTSF && !(*opts.B > res.thresholds.M.hi()))
      throw DomainError("shooting line B must exceed M_{a,b}");
    res.thresholds.B = *opts.B;
  }
  const double B = res.thresholds.B;
  const int max_m = opts.max_m > 0 ? opts.max_m : default_max_m(map);
  if (!std::isfinite(B)) {
    res.reason = "threshold is infinite";
    return res;
  }

  const auto candidates = find_candidates(map, B, max_m, opts.grid, opts.seed, opts.max_attempts);
  if (candidates.empty()) {
    res.reason = "no orbit reaches y > B within " + std::to_string(max_m) + " iterates";
    return res;
  }
  res.status = DiffusionStatus::ValidationFailed;
  res.m = candidates.front().m;
  res.x_start = candidates.front().x_start;

  for (const auto& cand : candidates) {
    for (const Point v1 : {Point{1.0, 0.0}, Point{0.0, 1.0}}) {
      ShootingProblem prob;
      prob.map = map;
      prob.m = cand.m;
      prob.q0 = {Interval(cand.x_start), Interval(-B)};
      prob.q1 = cand.points.back();
      prob.v0 = Point{1.0, 0.0};
      prob.v1 = v1;
      prob.candidate.assign(prob.dim(), 0.0);
      for (int k = 1; k < cand.m; ++k) {
        prob.candidate[2 * k] = cand.points[k][0];
        prob.candidate[2 * k + 1] = cand.points[k][1];
      }
      Certificate cert = certify(prob, opts.certify);
      if (!cert.verified) {
        res.reason = cert.reason;
        continue;
      }
      if (!(cert.endpoint_enclosure[1].lo() > B)) {
        res.reason = "endpoint not strictly above B";
        continue;
      }
      res.status = DiffusionStatus::Verified;
      res.m = cand.m;
      res.x_start = cand.x_start;
      res.certificate = std::move(cert);
      res.problem = std::move(prob);
      res.reason.clear();
      return res;
    }
  }
  return res;
}

DiffusionResult validate_diffusion(const MapSpec& map, std::optional<int> rho, int max_m) {
  DiffusionOptions opts;
  opts.max_m = max_m;
  return validate_diffusion(map, rho, opts);
}

std::vector<IPoint> trajectory(const ShootingProblem& prob, const Certificate& cert) {
  const IVec& X = cert.solution();
  if (X.size() != prob.dim()) throw DimensionMismatch("trajectory: certificate size");
  std::vector<IPoint> pts;
  Pair<Interval> v0{Interval(1.0), Interval(0.0)};
  if (const auto* v = std::get_if<Point>(&prob.v0)) {
    v0 = {Interval((*v)[0]), Interval((*v)[1])};
  } else {
    const auto& f = std::get<FrameFamily>(prob.v0);
    const Interval zl = Interval(f.L) * prob.z_domain.value_or(Interval(0.0));
    v0 = {Interval(f.A[0][0]) + Interval(f.A[0][1]) * zl,
          Interval(f.A[1][0]) + Interval(f.A[1][1]) * zl};
  }
  pts.push_back({prob.q0[0] + X[0] * v0[0], prob.q0[1] + X[0] * v0[1]});
  for (int k = 1; k < prob.m; ++k) pts.push_back({X[2 * k], X[2 * k + 1]});
  pts.push_back({cert.endpoint_enclosure[0], cert.endpoint_enclosure[1]});
  return pts;
}

void write_trajectory_csv(std::ostream& os, const std::vector<IPoint>& points) {
  os << "i,x_lo,x_hi,y_lo,y_hi\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << i << ',' << format_double(points[i][0].lo()) << ',' << format_double(points[i][0].hi())
       << ',' << format_double(points[i][1].lo()) << ',' << format_double(points[i][1].hi())
       << '\n';
  }
}

}  // namespace annular
