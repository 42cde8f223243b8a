#include "annular/dsf.hpp"

#include <algorithm>
#include <cmath>

namespace annular {

IPoint LocalFrame::U_tilde() const { return {Interval(-alpha, alpha), Interval(-beta, beta)}; }

std::string_view to_string(Which w) { return w == Which::Plus ? "plus" : "minus"; }
std::string_view to_string(Direction d) { return d == Direction::Up ? "up" : "down"; }

std::string_view to_string(BranchFailure f) {
  switch (f) {
    case BranchFailure::None: return "None";
    case BranchFailure::NoCandidate: return "NoCandidate";
    case BranchFailure::KrawczykFailed: return "KrawczykFailed";
    case BranchFailure::EndpointNotBeyond: return "EndpointNotBeyond";
    case BranchFailure::SegmentOutsideU: return "SegmentOutsideU";
    case BranchFailure::DegenerateSegment: return "DegenerateSegment";
    case BranchFailure::EndpointRunsFailed: return "EndpointRunsFailed";
  }
  return "?";
}

namespace {

Point eigenvector(const Mat2& J, double lambda) {
  const Point e1{J[0][1], lambda - J[0][0]};
  const Point e2{lambda - J[1][1], J[1][0]};
  const Point& e = std::hypot(e1[0], e1[1]) >= std::hypot(e2[0], e2[1]) ? e1 : e2;
  const double n = std::hypot(e[0], e[1]);
  if (!(n > 0)) return {1.0, 0.0};  // J = lambda Id: any direction
  Point v{e[0] / n, e[1] / n};
  const double lead = std::abs(v[0]) >= std::abs(v[1]) ? v[0] : v[1];
  if (lead < 0) v = {-v[0], -v[1]};
  return v;
}

}  // namespace

LocalFrame local_frame_from_jacobian(const Mat2& J, double L, double alpha, double beta) {
  if (!(L > 0) || !(alpha > 0) || !(beta / alpha > L))
    throw FrameError("frame needs L > 0, alpha > 0 and beta/alpha > L");
  const double tr = J[0][0] + J[1][1];
  const double dt = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  const double disc = tr * tr / 4.0 - dt;
  if (!(disc > 0)) throw ComplexEigenvalues();
  const double r = std::sqrt(disc);
  // Avoid cancellation in the smaller root.
  const double l1 = tr >= 0 ? tr / 2.0 + r : tr / 2.0 - r;
  const double l2 = l1 != 0.0 ? dt / l1 : 0.0;
  const double lu = std::abs(l1) >= std::abs(l2) ? l1 : l2;
  const double ls = std::abs(l1) >= std::abs(l2) ? l2 : l1;
  if (!(std::abs(lu) > 1.0 && std::abs(ls) < 1.0))
    throw FrameError("fixed point is not a saddle");
  const Point u = eigenvector(J, lu);
  const Point s = eigenvector(J, ls);
  LocalFrame f;
  f.A = {{{u[0], s[0]}, {u[1], s[1]}}};
  if (std::abs(u[0] * s[1] - u[1] * s[0]) < 1e-8)
    throw NearSingularFrame("eigenvectors are nearly parallel");
  try {
    f.A_inv = inverse(to_imat2(f.A));
  } catch (const SingularMatrix&) {
    throw NearSingularFrame("frame matrix may be singular");
  }
  f.L = L;
  f.alpha = alpha;
  f.beta = beta;
  return f;
}

LocalFrame local_frame(const MapSpec& map, const IPoint& fp, double L, double alpha,
                       double beta) {
  return local_frame_from_jacobian(jacobian_point(map, mid(fp)), L, alpha, beta);
}

bool cone_condition(const IMat2& C, double L) {
  const Interval y(-L, L);
  const Interval px = C[0][0] + C[0][1] * y;
  const Interval py = C[1][0] + C[1][1] * y;
  return px.mig() > 1.0 && py.mag() <= L;
}

IPoint local_map(const MapSpec& map, const IPoint& fp, const LocalFrame& frame, int shift,
                 const IPoint& p) {
  const IPoint Ap = annular::apply(to_imat2(frame.A), p);
  const IPoint img = eval_map(map, {fp[0] + Ap[0], fp[1] + Ap[1]});
  const IPoint d{img[0] - fp[0] - Interval(static_cast<double>(shift)), img[1] - fp[1]};
  return annular::apply(frame.A_inv, d);
}

IMat2 local_derivative(const MapSpec& map, const IPoint& fp, const LocalFrame& frame) {
  const IMat2 A = to_imat2(frame.A);
  const IPoint AU = annular::apply(A, frame.U_tilde());
  const IMat2 J = jacobian(map, {fp[0] + AU[0], fp[1] + AU[1]});
  return mul(frame.A_inv, mul(J, A));
}

bool cone_check(const MapSpec& map, const IPoint& fp, const LocalFrame& frame) {
  try {
    return cone_condition(local_derivative(map, fp, frame), frame.L);
  } catch (const Error&) {
    return false;
  }
}

bool geometry_check(const LocalFrame& frame) {
  const IPoint AU = annular::apply(to_imat2(frame.A), frame.U_tilde());
  return Interval(-0.5, 0.5).interior_contains(AU[0]) &&
         Interval(-1.0, 1.0).interior_contains(AU[1]);
}

int box_chain_length(int kappa) {
  if (kappa < 1) throw DomainError("box chain length needs kappa >= 1");
  return 34 / (2 * kappa) + 1;
}

int max_kappa(const Interval& a, const Interval& b) {
  const double r = (Interval(a.lo()) / (Interval(1.0) - Interval(b.lo()))).lo();
  // Ratios that are integers in decimal input land a few ulps above the
  // integer; such kappa give merging fixed points and are excluded.
  const double k = std::ceil(r * (1.0 - 1e-12)) - 1.0;
  return k < 1 ? 0 : static_cast<int>(std::min(k, 1e6));
}

std::optional<DsfCase> make_case(const Interval& a, const Interval& b, int kappa,
                                 const DsfOptions& opts) {
  DsfCase c;
  c.a = a;
  c.b = b;
  c.kappa = kappa;
  c.pair = dsf_fixed_pair(a, b, kappa);
  c.N = box_chain_length(kappa);
  c.B = dsf_B(b);
  const MapSpec map = c.map();
  for (double alpha : opts.alphas) {
    for (double L : opts.slopes) {
      bool ok = true;
      for (int i = 0; i < 2 && ok; ++i) {
        const IPoint& fp = i == 0 ? c.pair.p_plus : c.pair.p_minus;
        try {
          c.frames[i] = local_frame(map, fp, L, alpha, 1.5 * L * alpha);
        } catch (const FrameError&) {
          return std::nullopt;
        }
        ok = geometry_check(c.frames[i]) && cone_check(map, fp, c.frames[i]);
      }
      if (ok) return c;
    }
  }
  return std::nullopt;
}

void check_branch(const DsfCase& c, BranchResult& r, const CertifyOptions& opts) {
  const Certificate& cert = *r.certificate;
  const ShootingProblem& prob = *r.problem;
  const LocalFrame& f = c.frame(r.which);
  const Interval ey = cert.endpoint_enclosure[1];
  const bool beyond = r.direction == Direction::Up ? ey.lo() > c.B : ey.hi() < -c.B;
  if (!beyond) {
    r.failure = BranchFailure::EndpointNotBeyond;
    return;
  }
  r.h0 = cert.solution()[0];
  if (r.h0.contains_zero()) {
    r.failure = BranchFailure::DegenerateSegment;
    return;
  }
  const Interval vy = r.h0 * Interval(-f.L, f.L);
  if (!Interval(-f.alpha, f.alpha).interior_contains(r.h0) ||
      !Interval(-f.beta, f.beta).interior_contains(vy)) {
    r.failure = BranchFailure::SegmentOutsideU;
    return;
  }
  const IVec& box = cert.X_enclosure;
  const Vec X0 = box.mid();
  for (double z : {-1.0, 1.0}) {
    Certificate end;
    try {
      const Mat C = shooting_preconditioner(prob, box, Interval(z));
      end = krawczyk_test(prob, box, X0, C, Interval(z), opts.exec);
    } catch (const Error& e) {
      end.reason = e.what();
    }
    if (!end.verified) {
      r.failure = BranchFailure::EndpointRunsFailed;
      r.detail = end.reason;
      return;
    }
    (z < 0 ? r.h0_minus : r.h0_plus) = intersect(end.K[0], box[0]);
  }
  r.failure = BranchFailure::None;
}

namespace {

struct Launch {
  double h0;
  int m;
  std::vector<Point> pts;
};

std::vector<Launch> launches(const DsfCase& c, Which which, Direction dir, const DsfOptions& o) {
  const MapSpec map = c.map();
  const LocalFrame& f = c.frame(which);
  const Point fp = mid(c.fixed_point(which));
  const double top = f.alpha / 2.0;
  std::vector<double> sizes;
  for (int k = 0; k <= 16; ++k) {
    const double s = 1e-6 * std::pow(10.0, k / 4.0);
    if (s > top) break;
    sizes.push_back(s);
  }
  if (sizes.empty()) sizes.push_back(top);

  std::vector<Launch> out;
  for (double sign : {1.0, -1.0}) {
    for (double s : sizes) {
      const double h = sign * s;
      Launch l{h, 0, {{fp[0] + h * f.A[0][0], fp[1] + h * f.A[1][0]}}};
      for (int i = 1; i <= o.max_m; ++i) {
        const Point p = eval_point(map, l.pts.back());
        if (!std::isfinite(p[0]) || !std::isfinite(p[1])) break;
        l.pts.push_back(p);
        const bool hit = dir == Direction::Up ? p[1] > c.B : p[1] < -c.B;
        if (hit) {
          if (i >= 2) {
            l.m = i;
            out.push_back(std::move(l));
          }
          break;
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Launch& x, const Launch& y) {
    if (x.m != y.m) return x.m < y.m;
    if (std::abs(x.h0) != std::abs(y.h0)) return std::abs(x.h0) > std::abs(y.h0);
    return x.h0 > y.h0;
  });
  return out;
}

}  // namespace

BranchResult validate_branch(const DsfCase& c, Which which, Direction dir,
                             const DsfOptions& opts) {
  BranchResult best;
  best.which = which;
  best.direction = dir;
  const auto cands = launches(c, which, dir, opts);
  if (cands.empty()) {
    best.detail = "no launch from the fixed point crosses the line";
    return best;
  }
  best.failure = BranchFailure::KrawczykFailed;
  const LocalFrame& f = c.frame(which);
  for (std::size_t i = 0; i < std::min(cands.size(), opts.max_attempts); ++i) {
    const Launch& l = cands[i];
    for (const Point v1 : {Point{1.0, 0.0}, Point{0.0, 1.0}}) {
      BranchResult r;
      r.which = which;
      r.direction = dir;
      ShootingProblem prob;
      prob.map = c.map();
      prob.m = l.m;
      prob.q0 = c.fixed_point(which);
      prob.q1 = l.pts.back();
      prob.v0 = FrameFamily{f.A, f.L};
      prob.v1 = v1;
      prob.z_domain = Interval(-1.0, 1.0);
      prob.candidate.assign(prob.dim(), 0.0);
      prob.candidate[0] = l.h0;
      for (int k = 1; k < l.m; ++k) {
        prob.candidate[2 * k] = l.pts[k][0];
        prob.candidate[2 * k + 1] = l.pts[k][1];
      }
      Certificate cert = certify(prob, opts.certify);
      r.problem = std::move(prob);
      if (!cert.verified) {
        r.failure = BranchFailure::KrawczykFailed;
        r.detail = cert.reason;
        r.certificate = std::move(cert);
        if (best.failure == BranchFailure::KrawczykFailed) best = std::move(r);
        continue;
      }
      r.certificate = std::move(cert);
      check_branch(c, r, opts.certify);
      if (r.ok()) return r;
      best = std::move(r);
    }
  }
  return best;
}

DsfResult validate_dsf(const Interval& a, const Interval& b, const DsfOptions& opts) {
  if (!(a.lo() > 2)) throw DomainError("validate_dsf needs a > 2");
  if (!(b.lo() > 0 && b.hi() < 1)) throw DomainError("validate_dsf needs 0 < b < 1");
  DsfResult res;
  if (opts.kappa && *opts.kappa < 1) throw DomainError("kappa must be >= 1");
  const int kmax = max_kappa(a, b);
  const int kfirst = opts.kappa.value_or(1);
  const int klast = opts.kappa ? std::min(*opts.kappa, kmax) : kmax;
  if (kfirst > klast)
    res.reason = "kappa " + std::to_string(kfirst) + " exceeds the largest admissible " +
                 std::to_string(kmax);
  for (int kappa = kfirst; kappa <= klast; ++kappa) {
    std::optional<DsfCase> c;
    try {
      c = make_case(a, b, kappa, opts);
    } catch (const NoFixedPoint& e) {
      if (res.reason.empty()) res.reason = e.what();
      continue;
    }
    if (!c) {
      if (res.reason.empty())
        res.reason = "kappa " + std::to_string(kappa) + ": cone or geometry check failed";
      continue;
    }
    std::vector<BranchResult> branches;
    bool all = true;
    for (const auto& [w, d] : {std::pair{Which::Plus, Direction::Up},
                               {Which::Minus, Direction::Up},
                               {Which::Plus, Direction::Down},
                               {Which::Minus, Direction::Down}}) {
      branches.push_back(validate_branch(*c, w, d, opts));
      if (!branches.back().ok()) {
        all = false;
        if (res.reason.empty())
          res.reason = "kappa " + std::to_string(kappa) + " " + std::string(to_string(w)) + "/" +
                       std::string(to_string(d)) + ": " +
                       std::string(to_string(branches.back().failure)) +
                       (branches.back().detail.empty() ? "" : " (" + branches.back().detail + ")");
        break;
      }
    }
    if (all) {
      res.chaos = true;
      res.kappa = kappa;
      res.dsf_case = std::move(c);
      res.branches = std::move(branches);
      res.reason.clear();
      return res;
    }
  }
  if (res.reason.empty()) res.reason = "no admissible kappa";
  return res;
}

}  // namespace annular
