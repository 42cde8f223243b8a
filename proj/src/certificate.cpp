#include "annular/certificate.hpp"

#include <fstream>
#include <sstream>

#include "annular/errors.hpp"
#include "annular/format.hpp"

namespace annular {

namespace {

constexpr const char* kFormat = "annular-certificate/1";

json num(double x) { return format_double(x); }
json ival(const Interval& x) { return format_interval(x); }

double get_num(const json& j) {
  if (!j.is_string()) throw ParseError("expected a decimal string, got " + j.dump());
  return parse_double(j.get<std::string>());
}
Interval get_ival(const json& j) {
  if (!j.is_string()) throw ParseError("expected an interval string, got " + j.dump());
  return parse_interval(j.get<std::string>());
}

json point_json(const Point& p) { return json::array({num(p[0]), num(p[1])}); }
json ipoint_json(const IPoint& p) { return json::array({ival(p[0]), ival(p[1])}); }
json ivec_json(const IVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(ival(x));
  return a;
}
json mat2_json(const Mat2& m) { return json::array({point_json(m[0]), point_json(m[1])}); }

Point get_point(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected a 2-vector");
  return {get_num(j[0]), get_num(j[1])};
}
IPoint get_ipoint(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected a 2-vector of intervals");
  return {get_ival(j[0]), get_ival(j[1])};
}
IVec get_ivec(const json& j) {
  if (!j.is_array()) throw ParseError("expected an interval array");
  IVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = get_ival(j[i]);
  return v;
}
Mat2 get_mat2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected a 2x2 matrix");
  const Point r0 = get_point(j[0]);
  const Point r1 = get_point(j[1]);
  return {{{r0[0], r0[1]}, {r1[0], r1[1]}}};
}

json frame_json(const LocalFrame& f) {
  return {{"A", mat2_json(f.A)},
          {"L", num(f.L)},
          {"alpha", num(f.alpha)},
          {"beta", num(f.beta)}};
}

LocalFrame get_frame(const json& j) {
  LocalFrame f;
  f.A = get_mat2(j.at("A"));
  f.L = get_num(j.at("L"));
  f.alpha = get_num(j.at("alpha"));
  f.beta = get_num(j.at("beta"));
  if (!(f.L > 0) || !(f.alpha > 0) || !(f.beta / f.alpha > f.L))
    throw ParseError("frame needs L > 0, alpha > 0 and beta/alpha > L");
  try {
    f.A_inv = inverse(to_imat2(f.A));
  } catch (const SingularMatrix&) {
    throw ParseError("frame matrix is singular");
  }
  return f;
}

Which get_which(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "plus") return Which::Plus;
  if (s == "minus") return Which::Minus;
  throw ParseError("unknown fixed point '" + s + "'");
}
Direction get_direction(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "up") return Direction::Up;
  if (s == "down") return Direction::Down;
  throw ParseError("unknown direction '" + s + "'");
}

bool beyond(const Interval& y, double line, Direction d) {
  return d == Direction::Up ? y.lo() > line : y.hi() < -line;
}

// Recomputes everything the stored shooting record claims. Returns the fresh
// certificate when the Krawczyk rerun succeeded.
std::optional<Certificate> audit_shooting(const json& j, const ShootingProblem& prob, double line,
                                          Direction dir, const std::string& tag,
                                          RecheckReport& rep) {
  auto fail = [&](const std::string& s) { rep.failures.push_back(tag + s); };
  const IVec box = get_ivec(j.at("box"));
  const IVec K = get_ivec(j.at("K"));
  const IVec endpoint = get_ivec(j.at("endpoint"));
  if (box.size() != prob.dim() || K.size() != prob.dim() || endpoint.size() != 2) {
    fail("stored enclosures have the wrong dimension");
    return std::nullopt;
  }
  if (!j.at("verified").get<bool>()) fail("certificate is not marked verified");
  if (!subset_interior(K, box)) fail("stored K is not inside the stored box");
  if (!beyond(endpoint[1], line, dir)) fail("stored endpoint is not beyond the line");

  const IVec F = eval_F(prob, box, prob.z_domain);
  for (std::size_t i = 0; i < F.size(); ++i)
    if (!F[i].contains_zero())
      fail("residual violation: row " + std::to_string(i) + " encloses " + format_interval(F[i]) +
           ", which excludes 0");

  Certificate fresh;
  try {
    const Mat C = shooting_preconditioner(prob, box, prob.z_domain);
    fresh = krawczyk_test(prob, box, box.mid(), C, prob.z_domain);
  } catch (const Error& e) {
    fail(std::string("Krawczyk rerun raised: ") + e.what());
    return std::nullopt;
  }
  if (!fresh.verified) {
    fail("Krawczyk rerun: " + fresh.reason);
    return std::nullopt;
  }
  if (!beyond(fresh.endpoint_enclosure[1], line, dir))
    fail("recomputed endpoint y " + format_interval(fresh.endpoint_enclosure[1]) +
         " is not beyond the line");
  return fresh;
}

void recheck_diffusion(const json& j, RecheckReport& rep) {
  const MapSpec map = MapSpec::parse(j.at("map").get<std::string>());
  if (map.family != Family::VSF && map.family != Family::NTSF)
    throw ParseError("diffusion certificates need a conservative family");
  const std::optional<int> rho =
      j.contains("rho") && !j.at("rho").is_null() ? std::optional<int>(j.at("rho").get<int>())
                                                  : std::nullopt;
  const double line = get_num(j.at("line").at("y"));
  const json& s = j.at("shooting");
  const ShootingProblem prob = problem_from_json(s.at("problem"));
  prob.check();
  if (!(prob.map == map)) rep.failures.push_back("shooting map differs from the declared map");

  try {
    const Thresholds t = diffusion_threshold(map, rho);
    const bool enough = map.family == Family::VSF ? line >= t.M.hi() / 2 : line > t.M.hi();
    if (!enough)
      rep.failures.push_back("line y = " + format_double(line) + " is below the threshold M = " +
                             format_interval(t.M));
    rep.notes.push_back("M = " + format_interval(t.M));
  } catch (const Error& e) {
    rep.failures.push_back(std::string("threshold: ") + e.what());
  }
  if (map.family == Family::VSF && !zero_drift_holds(map))
    rep.failures.push_back("c does not enclose the zero-drift constant");

  const auto* v0 = std::get_if<Point>(&prob.v0);
  if (!v0 || (*v0)[0] != 1.0 || (*v0)[1] != 0.0 || prob.z_domain)
    rep.failures.push_back("start direction must be (1, 0)");
  if (!(prob.q0[1] == Interval(-line)) || !prob.q0[0].is_point())
    rep.failures.push_back("start point does not lie on y = -B");
  audit_shooting(s, prob, line, Direction::Up, "", rep);
}

void recheck_dsf(const json& j, RecheckReport& rep) {
  DsfCase c;
  c.a = get_ival(j.at("a"));
  c.b = get_ival(j.at("b"));
  c.kappa = j.at("kappa").get<int>();
  if (!(c.a.lo() > 2) || !(c.b.lo() > 0 && c.b.hi() < 1))
    throw ParseError("parameters outside a > 2, 0 < b < 1");
  if (c.kappa < 1 || c.kappa > max_kappa(c.a, c.b))
    rep.failures.push_back("kappa " + std::to_string(c.kappa) + " is not admissible");
  c.N = j.at("N").get<int>();
  if (c.kappa >= 1 && c.N != box_chain_length(c.kappa))
    rep.failures.push_back("box chain length does not match kappa");
  c.B = get_num(j.at("B"));
  if (!(c.B >= dsf_B(c.b))) rep.failures.push_back("line B is below 1/(1-b)");
  if (!rep.failures.empty()) return;

  const MapSpec map = c.map();
  if (MapSpec::parse(j.at("map").get<std::string>()) != map)
    rep.failures.push_back("declared map differs from the inverse family at (a, b)");
  c.pair.kappa = c.kappa;
  c.pair.p_plus = get_ipoint(j.at("fixed_points").at("plus"));
  c.pair.p_minus = get_ipoint(j.at("fixed_points").at("minus"));
  c.frames[0] = get_frame(j.at("frames").at("plus"));
  c.frames[1] = get_frame(j.at("frames").at("minus"));

  try {
    const FixedPointPair fresh = dsf_fixed_pair(c.a, c.b, c.kappa);
    for (const Which w : {Which::Plus, Which::Minus}) {
      const IPoint& got = w == Which::Plus ? fresh.p_plus : fresh.p_minus;
      const IPoint& stored = c.fixed_point(w);
      if (!stored[0].contains(got[0]) || !stored[1].contains(got[1]))
        rep.failures.push_back(std::string(to_string(w)) +
                               " fixed point enclosure misses the recomputed one");
    }
  } catch (const Error& e) {
    rep.failures.push_back(std::string("fixed points: ") + e.what());
  }
  for (const Which w : {Which::Plus, Which::Minus}) {
    if (!geometry_check(c.frame(w)))
      rep.failures.push_back(std::string(to_string(w)) + " frame fails the geometry check");
    if (!cone_check(map, c.fixed_point(w), c.frame(w)))
      rep.failures.push_back(std::string(to_string(w)) + " frame fails the cone condition");
  }

  const json& br = j.at("branches");
  if (!br.is_array() || br.size() != 4) throw ParseError("expected four branches");
  bool seen[2][2] = {{false, false}, {false, false}};
  for (const json& b : br) {
    BranchResult r;
    r.which = get_which(b.at("which"));
    r.direction = get_direction(b.at("direction"));
    seen[r.which == Which::Plus ? 0 : 1][r.direction == Direction::Up ? 0 : 1] = true;
    const std::string tag =
        std::string(to_string(r.which)) + "/" + std::string(to_string(r.direction)) + ": ";
    const json& s = b.at("shooting");
    ShootingProblem prob = problem_from_json(s.at("problem"));
    prob.check();
    const auto* fam = std::get_if<FrameFamily>(&prob.v0);
    const LocalFrame& f = c.frame(r.which);
    if (!(prob.map == map) || !(prob.q0 == c.fixed_point(r.which)) || !fam ||
        !(fam->A == f.A) || fam->L != f.L || !prob.z_domain ||
        !(*prob.z_domain == Interval(-1.0, 1.0))) {
      rep.failures.push_back(tag + "shooting data does not match the case geometry");
      continue;
    }
    auto fresh = audit_shooting(s, prob, c.B, r.direction, tag, rep);
    if (!fresh) continue;
    r.problem = prob;
    r.certificate = std::move(*fresh);
    check_branch(c, r);
    if (!r.ok())
      rep.failures.push_back(tag + std::string(to_string(r.failure)) +
                             (r.detail.empty() ? "" : " (" + r.detail + ")"));
  }
  for (auto& row : seen)
    for (bool s : row)
      if (!s) rep.failures.push_back("a fixed point/direction branch is missing");
}

}  // namespace

json problem_to_json(const ShootingProblem& prob) {
  json j;
  j["map"] = prob.map.to_string();
  j["m"] = prob.m;
  j["q0"] = ipoint_json(prob.q0);
  j["q1"] = point_json(prob.q1);
  if (const auto* p = std::get_if<Point>(&prob.v0)) {
    j["v0"] = {{"type", "point"}, {"v", point_json(*p)}};
  } else {
    const auto& f = std::get<FrameFamily>(prob.v0);
    j["v0"] = {{"type", "frame"}, {"A", mat2_json(f.A)}, {"L", num(f.L)}};
  }
  j["v1"] = point_json(prob.v1);
  json cand = json::array();
  for (double x : prob.candidate) cand.push_back(num(x));
  j["candidate"] = cand;
  j["z_domain"] = prob.z_domain ? ival(*prob.z_domain) : json();
  return j;
}

ShootingProblem problem_from_json(const json& j) {
  try {
    ShootingProblem p;
    p.map = MapSpec::parse(j.at("map").get<std::string>());
    p.m = j.at("m").get<int>();
    p.q0 = get_ipoint(j.at("q0"));
    p.q1 = get_point(j.at("q1"));
    const json& v0 = j.at("v0");
    const auto type = v0.at("type").get<std::string>();
    if (type == "point") {
      p.v0 = get_point(v0.at("v"));
    } else if (type == "frame") {
      p.v0 = FrameFamily{get_mat2(v0.at("A")), get_num(v0.at("L"))};
    } else {
      throw ParseError("unknown v0 type '" + type + "'");
    }
    p.v1 = get_point(j.at("v1"));
    for (const json& x : j.at("candidate")) p.candidate.push_back(get_num(x));
    if (j.contains("z_domain") && !j.at("z_domain").is_null())
      p.z_domain = get_ival(j.at("z_domain"));
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed shooting problem: ") + e.what());
  }
}

json shooting_to_json(const ShootingProblem& prob, const Certificate& cert) {
  return {{"problem", problem_to_json(prob)},
          {"box", ivec_json(cert.X_enclosure)},
          {"K", ivec_json(cert.K)},
          {"h1", ival(cert.h1_enclosure)},
          {"endpoint", ivec_json(cert.endpoint_enclosure)},
          {"verified", cert.verified}};
}

json diffusion_certificate(const DiffusionResult& r, std::optional<int> rho) {
  if (r.status != DiffusionStatus::Verified || !r.problem || !r.certificate)
    throw DomainError("only verified diffusion results have certificates");
  json j;
  j["format"] = kFormat;
  j["kind"] = "diffusion";
  j["map"] = r.problem->map.to_string();
  j["rho"] = rho ? json(*rho) : json();
  j["line"] = {{"y", num(r.thresholds.B)}, {"side", "above"}};
  j["thresholds"] = {{"N", ival(r.thresholds.N)}, {"M", ival(r.thresholds.M)}};
  j["shooting"] = shooting_to_json(*r.problem, *r.certificate);
  return j;
}

json dsf_certificate(const DsfResult& r) {
  if (!r.chaos || !r.dsf_case) throw DomainError("only chaos results have certificates");
  const DsfCase& c = *r.dsf_case;
  json j;
  j["format"] = kFormat;
  j["kind"] = "dsf";
  j["map"] = c.map().to_string();
  j["a"] = ival(c.a);
  j["b"] = ival(c.b);
  j["kappa"] = c.kappa;
  j["N"] = c.N;
  j["B"] = num(c.B);
  j["fixed_points"] = {{"plus", ipoint_json(c.pair.p_plus)},
                       {"minus", ipoint_json(c.pair.p_minus)}};
  j["frames"] = {{"plus", frame_json(c.frames[0])}, {"minus", frame_json(c.frames[1])}};
  json br = json::array();
  for (const BranchResult& b : r.branches) {
    json e;
    e["which"] = std::string(to_string(b.which));
    e["direction"] = std::string(to_string(b.direction));
    e["h0"] = ival(b.h0);
    if (b.h0_minus) e["h0_minus"] = ival(*b.h0_minus);
    if (b.h0_plus) e["h0_plus"] = ival(*b.h0_plus);
    e["shooting"] = shooting_to_json(*b.problem, *b.certificate);
    br.push_back(std::move(e));
  }
  j["branches"] = std::move(br);
  return j;
}

RecheckReport recheck(const json& cert) {
  RecheckReport rep;
  try {
    if (!cert.is_object() || cert.value("format", "") != kFormat)
      throw ParseError("not an annular certificate");
    const auto kind = cert.at("kind").get<std::string>();
    if (kind == "diffusion") {
      recheck_diffusion(cert, rep);
    } else if (kind == "dsf") {
      recheck_dsf(cert, rep);
    } else {
      throw ParseError("unknown certificate kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  } catch (const DimensionMismatch& e) {
    rep.failures.push_back(e.what());
  }
  rep.ok = rep.failures.empty();
  return rep;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace annular
