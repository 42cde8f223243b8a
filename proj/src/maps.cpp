#include "annular/maps.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <vector>

#include "annular/format.hpp"

namespace annular {

Interval default_c(VChoice v) {
  switch (v) {
    case VChoice::Linear: return Interval(0.0);
    case VChoice::Quadratic: return Interval(0.5);
    case VChoice::Tan: return Interval(0.0);
    case VChoice::Log: return {-1.8714651070, -1.8713991910};
    case VChoice::Exp: return {-0.2660893818, -0.2660423737};
  }
  return Interval(0.0);
}

std::string_view to_string(HChoice h) { return h == HChoice::Identity ? "id" : "sin"; }

std::string_view to_string(VChoice v) {
  switch (v) {
    case VChoice::Linear: return "lin";
    case VChoice::Quadratic: return "quad";
    case VChoice::Tan: return "tan";
    case VChoice::Log: return "log";
    case VChoice::Exp: return "exp";
  }
  return "?";
}

HChoice parse_hchoice(std::string_view s) {
  if (s == "id") return HChoice::Identity;
  if (s == "sin") return HChoice::Sine;
  throw ParseError("unknown h choice '" + std::string(s) + "' (id|sin)");
}

VChoice parse_vchoice(std::string_view s) {
  if (s == "lin") return VChoice::Linear;
  if (s == "quad") return VChoice::Quadratic;
  if (s == "tan") return VChoice::Tan;
  if (s == "log") return VChoice::Log;
  if (s == "exp") return VChoice::Exp;
  throw ParseError("unknown v choice '" + std::string(s) + "' (lin|quad|tan|log|exp)");
}

MapSpec MapSpec::vsf(HChoice h, VChoice v, std::optional<Interval> c) {
  MapSpec s;
  s.family = Family::VSF;
  s.h = h;
  s.v = v;
  s.c = c.value_or(default_c(v));
  return s;
}

MapSpec MapSpec::ntsf(Interval a, Interval b) {
  if (!(a.lo() > 0)) throw DomainError("ntsf: need a > 0");
  MapSpec s;
  s.family = Family::NTSF;
  s.a = a;
  s.b = b;
  return s;
}

MapSpec MapSpec::dsf(Interval a, Interval b, bool inverse) {
  if (!(a.lo() > 2)) throw DomainError("dsf: need a > 2");
  if (!(b.lo() > 0 && b.hi() < 1)) throw DomainError("dsf: need 0 < b < 1");
  MapSpec s;
  s.family = inverse ? Family::DSF_INV : Family::DSF_FWD;
  s.a = a;
  s.b = b;
  return s;
}

MapSpec MapSpec::inverse() const {
  if (family == Family::DSF_FWD) return dsf(a, b, true);
  if (family == Family::DSF_INV) return dsf(a, b, false);
  throw Unsupported("closed-form inverse only for the dissipative family");
}

namespace {

std::string param_text(const Interval& x) {
  return x.is_point() ? format_double(x.lo()) : format_interval(x);
}

// Splits "k1=v1,k2=v2" at top-level commas (commas inside [] are kept).
std::vector<std::pair<std::string, std::string>> split_params(std::string_view body) {
  std::vector<std::pair<std::string, std::string>> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i < body.size()) {
      if (body[i] == '[') ++depth;
      if (body[i] == ']') --depth;
      if (body[i] != ',' || depth != 0) continue;
    }
    const auto item = body.substr(start, i - start);
    start = i + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected key=value in map spec, got '" + std::string(item) + "'");
    out.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
  }
  return out;
}

}  // namespace

std::string MapSpec::to_string() const {
  switch (family) {
    case Family::VSF:
      return "vsf:h=" + std::string(annular::to_string(h)) + ",v=" +
             std::string(annular::to_string(v)) + ",c=" + format_interval(c);
    case Family::NTSF: return "ntsf:a=" + param_text(a) + ",b=" + param_text(b);
    case Family::DSF_FWD: return "dsf:a=" + param_text(a) + ",b=" + param_text(b);
    case Family::DSF_INV: return "dsfinv:a=" + param_text(a) + ",b=" + param_text(b);
  }
  return {};
}

MapSpec MapSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("map spec needs 'family:params'");
  const auto fam = text.substr(0, colon);
  const auto params = split_params(text.substr(colon + 1));
  auto get = [&](const char* key) -> std::optional<std::string> {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return std::nullopt;
  };
  auto require = [&](const char* key) {
    auto v = get(key);
    if (!v) throw ParseError(std::string("map spec is missing '") + key + "'");
    return *v;
  };
  auto reject_unknown = [&](std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, v] : params)
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        throw ParseError("unknown map parameter '" + k + "'");
  };
  if (fam == "vsf") {
    reject_unknown({"h", "v", "c"});
    const auto h = parse_hchoice(require("h"));
    const auto v = parse_vchoice(require("v"));
    const auto c = get("c");
    return vsf(h, v, c ? std::optional<Interval>(parse_interval(*c)) : std::nullopt);
  }
  reject_unknown({"a", "b"});
  const Interval a = parse_interval(require("a"));
  const Interval b = parse_interval(require("b"));
  if (fam == "ntsf") return ntsf(a, b);
  if (fam == "dsf") return dsf(a, b, false);
  if (fam == "dsfinv") return dsf(a, b, true);
  throw ParseError("unknown map family '" + std::string(fam) + "'");
}

IPoint eval_map(const MapSpec& spec, const IPoint& p) { return apply_map<Interval>(spec, p); }

IMat2 jacobian(const MapSpec& spec, const IPoint& p) { return map_jacobian<Interval>(spec, p); }

Point eval_point(const MapSpec& spec, const Point& p) { return apply_map<double>(spec, p); }

Mat2 jacobian_point(const MapSpec& spec, const Point& p) {
  return map_jacobian<double>(spec, p);
}

Interval twist_threshold(const Interval& N) {
  return min(Interval(3.0) * N + Interval(2.0), N + Interval(4.0));
}

Interval nontwist_threshold(const Interval& N, int rho) {
  if (rho < 1) throw DomainError("rotational difference must be >= 1");
  const double factor = rho == 1 ? 6.0 : rho == 2 ? 4.0 : 2.0;
  return Interval(factor) * N + Interval(2.0);
}

Interval ntsf_threshold(const Interval& a, const Interval& b) {
  if (!(a.lo() > 0)) throw DomainError("ntsf threshold needs a > 0");
  const Interval first = Interval(2.0) * sqrt(Interval(1.0) + Interval(3.0) / a) + abs(b);
  const Interval ab = a * abs(b);
  if (ab.contains_zero()) return {first.lo(), rounding::kInf};
  return max(first, Interval(2.0) / ab);
}

Interval vertical_bound(const MapSpec& spec, double tolerance) {
  if (spec.family == Family::NTSF) return abs(spec.b);
  if (spec.family != Family::VSF)
    throw Unsupported("vertical_bound is defined for the conservative families only");

  auto v_abs = [&](const Interval& s) { return abs(detail::v_shape(spec.v, s) + spec.c); };
  struct Piece {
    Interval s;
    double upper;
  };
  auto cmp = [](const Piece& l, const Piece& r) { return l.upper < r.upper; };
  std::priority_queue<Piece, std::vector<Piece>, decltype(cmp)> queue(cmp);

  const Interval domain{-1.0, 1.0};
  double best_lower = std::max(v_abs(Interval(-1.0)).lo(), v_abs(Interval(1.0)).lo());
  queue.push({domain, v_abs(domain).hi()});
  while (true) {
    Piece top = queue.top();
    if (top.s.width() <= tolerance) return {std::min(best_lower, top.upper), top.upper};
    queue.pop();
    const double m = top.s.mid();
    best_lower = std::max(best_lower, v_abs(Interval(m)).lo());
    for (const Interval half : {Interval(top.s.lo(), m), Interval(m, top.s.hi())}) {
      const double up = v_abs(half).hi();
      if (up >= best_lower) queue.push({half, up});
    }
  }
}

Thresholds diffusion_threshold(const MapSpec& spec, std::optional<int> rho) {
  Thresholds t;
  t.N = vertical_bound(spec);
  if (spec.family == Family::NTSF) {
    t.M = ntsf_threshold(spec.a, spec.b);
    t.B = std::isfinite(t.M.hi()) ? rounding::add_up(t.M.hi(), kNtsfLineMargin)
                                  : rounding::kInf;
    return t;
  }
  if (spec.is_twist()) {
    t.M = twist_threshold(t.N);
  } else {
    if (!rho) throw MissingRho();
    t.M = nontwist_threshold(t.N, *rho);
  }
  // y = -B to y > B is a displacement above 2B, which must reach M.
  const double half = t.M.hi() / 2.0;
  t.B = half <= kVsfLine ? kVsfLine : std::ceil(2.0 * half) / 2.0;
  return t;
}

FixedPointPair dsf_fixed_pair(const Interval& a, const Interval& b, int kappa) {
  if (kappa == 0) throw NoFixedPoint("kappa must be nonzero");
  if (!(a.lo() > 0)) throw NoFixedPoint("need a > 0");
  const Interval k(static_cast<double>(kappa));
  const Interval s = k * (b - Interval(1.0)) / a;
  if (!(s.mag() < 1.0))
    throw NoFixedPoint("|kappa (b-1)/a| < 1 fails for kappa = " + std::to_string(kappa));
  FixedPointPair pair;
  pair.kappa = kappa;
  pair.p_plus = {asin(s) / kTwoPi, -k / a};
  pair.p_minus = {asin(-s) / kTwoPi, k / a};

  const auto inv = MapSpec::dsf(a, b, true);
  auto check = [&](const IPoint& p, double shift) {
    const IPoint img = eval_map(inv, p);
    return (img[0] - p[0]).contains(shift) && (img[1] - p[1]).contains(0.0);
  };
  if (!check(pair.p_plus, kappa) || !check(pair.p_minus, -kappa))
    throw NoFixedPoint("fixed point residual check failed");
  return pair;
}

double dsf_B(const Interval& b) {
  if (!(b.lo() > 0 && b.hi() < 1)) throw DomainError("dsf_B needs 0 < b < 1");
  return (Interval(1.0) / (Interval(1.0) - b)).hi();
}

Interval riemann_enclosure(VChoice v, std::size_t k) {
  if (k == 0) throw DomainError("riemann_enclosure needs k >= 1");
  const Interval kk(static_cast<double>(k));
  const Interval h = Interval(1.0) / kk;
  Interval sum = 0.0;
  Interval left = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const Interval right = i == k ? Interval(1.0) : Interval(static_cast<double>(i)) / kk;
    const Interval cell{left.lo(), right.hi()};
    sum += detail::v_shape(v, detail::sin2pi(cell)) * h;
    left = right;
  }
  return sum;
}

Interval riemann_enclosure_adaptive(VChoice v, double max_width, std::size_t k0,
                                    std::size_t k_max) {
  std::size_t k = std::max<std::size_t>(k0, 1);
  while (true) {
    const Interval r = riemann_enclosure(v, k);
    if (r.width() <= max_width || k >= k_max) return r;
    k *= 2;
  }
}

bool zero_drift_holds(const MapSpec& spec, std::size_t k) {
  if (spec.family != Family::VSF) throw Unsupported("zero drift check is for VSF maps");
  return (riemann_enclosure(spec.v, k) + spec.c).contains_zero();
}

}  // namespace annular
