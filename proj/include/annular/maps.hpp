#pragma once

// Lifted annulus map families, their Jacobians, the diffusion thresholds
// that turn an observed vertical displacement into a diffusion certificate,
// and the closed-form fixed points of the dissipative family.
//
// All lifts keep the x coordinate unreduced; f(p + (1,0)) = f(p) + (1,0).

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include "annular/interval.hpp"
#include "annular/linalg.hpp"

namespace annular {

enum class Family { VSF, NTSF, DSF_FWD, DSF_INV };

/// Horizontal shear h(y) of the standard-family variation.
enum class HChoice { Identity, Sine };

/// Vertical kick v(s), s = sin(2 pi (x + h(y))), before adding c.
enum class VChoice { Linear, Quadratic, Tan, Log, Exp };

struct MapSpec {
  Family family = Family::VSF;
  HChoice h = HChoice::Identity;
  VChoice v = VChoice::Linear;
  Interval c{0.0};
  Interval a{0.0};
  Interval b{0.0};

  /// Variation of the standard family; c defaults to the tabulated constant
  /// that makes the vertical drift vanish.
  static MapSpec vsf(HChoice h, VChoice v, std::optional<Interval> c = std::nullopt);
  /// Non-twist standard family, a > 0.
  static MapSpec ntsf(Interval a, Interval b);
  /// Dissipative standard family, a > 2 and 0 < b < 1.
  static MapSpec dsf(Interval a, Interval b, bool inverse = false);

  [[nodiscard]] bool is_twist() const noexcept {
    return family == Family::VSF && h == HChoice::Identity;
  }
  /// Forward <-> inverse for the dissipative family.
  [[nodiscard]] MapSpec inverse() const;

  /// Canonical text form, e.g. "vsf:h=id,v=tan,c=[0,0]", "ntsf:a=0.5,b=0.25",
  /// "dsf:a=4,b=0.5", "dsfinv:a=[4,4.05],b=0.5".
  [[nodiscard]] std::string to_string() const;
  static MapSpec parse(std::string_view text);

  friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

/// Tabulated c making the zero-drift integral vanish.
Interval default_c(VChoice v);
std::string_view to_string(HChoice h);
std::string_view to_string(VChoice v);
HChoice parse_hchoice(std::string_view s);
VChoice parse_vchoice(std::string_view s);

namespace detail {

template <class T>
inline constexpr bool is_interval_v = std::is_same_v<T, Interval>;

template <class T>
T param(const Interval& p) {
  if constexpr (is_interval_v<T>) {
    return p;
  } else {
    return p.mid();
  }
}

template <class T>
T sin2pi(const T& x) {
  if constexpr (is_interval_v<T>) {
    return sin(kTwoPi * x);
  } else {
    return std::sin(2.0 * std::numbers::pi * x);
  }
}

template <class T>
T cos2pi(const T& x) {
  if constexpr (is_interval_v<T>) {
    return cos(kTwoPi * x);
  } else {
    return std::cos(2.0 * std::numbers::pi * x);
  }
}

template <class T>
T two_pi() {
  if constexpr (is_interval_v<T>) {
    return kTwoPi;
  } else {
    return 2.0 * std::numbers::pi;
  }
}

template <class T>
T square(const T& x) {
  if constexpr (is_interval_v<T>) {
    return sqr(x);
  } else {
    return x * x;
  }
}

template <class T>
T fn_tan(const T& x) {
  using std::tan;
  return tan(x);
}
template <class T>
T fn_log(const T& x) {
  using std::log;
  return log(x);
}
template <class T>
T fn_exp(const T& x) {
  using std::exp;
  return exp(x);
}

template <class T>
T h_value(HChoice h, const T& y) {
  return h == HChoice::Identity ? y : sin2pi(y);
}

template <class T>
T h_deriv(HChoice h, const T& y) {
  return h == HChoice::Identity ? T(1.0) : T(two_pi<T>() * cos2pi(y));
}

/// v(s) without the additive constant.
template <class T>
T v_shape(VChoice v, const T& s) {
  switch (v) {
    case VChoice::Linear: return s;
    case VChoice::Quadratic: return s - square(s);
    case VChoice::Tan: return fn_tan(s);
    case VChoice::Log: return T(3.0) * fn_log(s + T(2.0));
    case VChoice::Exp: return fn_exp(s) - T(1.0);
  }
  return s;
}

template <class T>
T v_deriv(VChoice v, const T& s) {
  switch (v) {
    case VChoice::Linear: return T(1.0);
    case VChoice::Quadratic: return T(1.0) - T(2.0) * s;
    case VChoice::Tan: return T(1.0) + square(fn_tan(s));
    case VChoice::Log: return T(3.0) / (s + T(2.0));
    case VChoice::Exp: return fn_exp(s);
  }
  return T(1.0);
}

}  // namespace detail

template <class T>
using Pair = std::array<T, 2>;
template <class T>
using Mat2T = std::array<std::array<T, 2>, 2>;

/// Image of p under the lift. With T = Interval the result encloses the
/// image of every point of p for every parameter in the spec's intervals;
/// with T = double parameters are taken at their midpoints.
template <class T>
Pair<T> apply_map(const MapSpec& spec, const Pair<T>& p) {
  using detail::param;
  const T& x = p[0];
  const T& y = p[1];
  switch (spec.family) {
    case Family::VSF: {
      const T u = x + detail::h_value(spec.h, y);
      const T s = detail::sin2pi(u);
      return {u, y + detail::v_shape(spec.v, s) + param<T>(spec.c)};
    }
    case Family::NTSF: {
      const T a = param<T>(spec.a), b = param<T>(spec.b);
      const T w = y - b * detail::sin2pi(x);
      return {x + a * (T(1.0) - detail::square(w)), w};
    }
    case Family::DSF_FWD: {
      const T a = param<T>(spec.a), b = param<T>(spec.b);
      const T u = x + a * y;
      return {u, b * y + detail::sin2pi(u)};
    }
    case Family::DSF_INV: {
      const T a = param<T>(spec.a), b = param<T>(spec.b);
      const T w = (y - detail::sin2pi(x)) / b;
      return {x - a * w, w};
    }
  }
  return p;
}

/// Derivative of the lift; encloses Df over p (and the parameter box) for intervals.
template <class T>
Mat2T<T> map_jacobian(const MapSpec& spec, const Pair<T>& p) {
  using detail::param;
  const T& x = p[0];
  const T& y = p[1];
  switch (spec.family) {
    case Family::VSF: {
      const T hp = detail::h_deriv(spec.h, y);
      const T u = x + detail::h_value(spec.h, y);
      const T s = detail::sin2pi(u);
      const T k = detail::v_deriv(spec.v, s) * (detail::two_pi<T>() * detail::cos2pi(u));
      return {{{T(1.0), hp}, {k, T(1.0) + k * hp}}};
    }
    case Family::NTSF: {
      const T a = param<T>(spec.a), b = param<T>(spec.b);
      const T w = y - b * detail::sin2pi(x);
      const T g = -(b * (detail::two_pi<T>() * detail::cos2pi(x)));
      const T aw2 = T(2.0) * a * w;
      return {{{T(1.0) - aw2 * g, -aw2}, {g, T(1.0)}}};
    }
    case Family::DSF_FWD: {
      const T a = param<T>(spec.a), b = param<T>(spec.b);
      const T u = x + a * y;
      const T k = detail::two_pi<T>() * detail::cos2pi(u);
      return {{{T(1.0), a}, {k, b + a * k}}};
    }
    case Family::DSF_INV: {
      const T a = param<T>(spec.a), b = param<T>(spec.b);
      const T g = -(detail::two_pi<T>() * detail::cos2pi(x)) / b;
      return {{{T(1.0) - a * g, -(a / b)}, {g, T(1.0) / b}}};
    }
  }
  return {};
}

/// Number of parameters carried by the family: c for VSF, (a, b) otherwise.
inline int param_count(const MapSpec& spec) { return spec.family == Family::VSF ? 1 : 2; }
inline Interval& param_slot(MapSpec& spec, int j) {
  if (spec.family == Family::VSF) return spec.c;
  return j == 0 ? spec.a : spec.b;
}

/// Column j is the derivative of the lift with respect to parameter j.
template <class T>
std::array<Pair<T>, 2> map_param_jacobian(const MapSpec& spec, const Pair<T>& p) {
  using detail::param;
  const T& x = p[0];
  const T& y = p[1];
  switch (spec.family) {
    case Family::VSF: return {{{T(0.0), T(1.0)}, {T(0.0), T(0.0)}}};
    case Family::NTSF: {
      const T a = param<T>(spec.a), b = param<T>(spec.b);
      const T s = detail::sin2pi(x);
      const T w = y - b * s;
      return {{{T(1.0) - detail::square(w), T(0.0)}, {T(2.0) * a * w * s, -s}}};
    }
    case Family::DSF_FWD: {
      const T a = param<T>(spec.a);
      const T u = x + a * y;
      return {{{y, detail::two_pi<T>() * detail::cos2pi(u) * y}, {T(0.0), y}}};
    }
    case Family::DSF_INV: {
      const T a = param<T>(spec.a), b = param<T>(spec.b);
      const T w = (y - detail::sin2pi(x)) / b;
      const T wb = w / b;
      return {{{-w, T(0.0)}, {a * wb, -wb}}};
    }
  }
  return {};
}

/// Rigorous enclosure of the image of a 2D box.
IPoint eval_map(const MapSpec& spec, const IPoint& p);
/// Rigorous enclosure of the Jacobian over a 2D box.
IMat2 jacobian(const MapSpec& spec, const IPoint& p);
/// Plain floating-point image (non-rigorous).
Point eval_point(const MapSpec& spec, const Point& p);
Mat2 jacobian_point(const MapSpec& spec, const Point& p);

struct Thresholds {
  Interval N;  ///< maximal vertical displacement of one iterate
  Interval M;  ///< displacement that certifies unbounded diffusion
  double B = 0.0;  ///< shooting lines y = -B and y = B
};

/// M = min{3N + 2, N + 4} for twist maps homotopic to a Dehn twist.
Interval twist_threshold(const Interval& N);
/// M_1 = 6N + 2, M_2 = 4N + 2, M_rho = 2N + 2 for rho >= 3.
Interval nontwist_threshold(const Interval& N, int rho);
/// M_{a,b} = max{2 sqrt(1 + 3/a) + |b|, 2 / (a |b|)}; hi = +inf when b may vanish.
Interval ntsf_threshold(const Interval& a, const Interval& b);

/// Upper enclosure of N(f). VSF: branch and bound of |v| over [-1,1];
/// NTSF: |b|. Throws Unsupported for the dissipative family.
Interval vertical_bound(const MapSpec& spec, double tolerance = 1e-6);

/// Thresholds for the conservative families. `rho` is required for the
/// non-twist variation and ignored otherwise.
Thresholds diffusion_threshold(const MapSpec& spec, std::optional<int> rho = std::nullopt);

/// Gap added above M_{a,b} when choosing the NTSF shooting line.
inline constexpr double kNtsfLineMargin = 1e-3;
/// Shooting line used for every VSF configuration while M <= 10.
inline constexpr double kVsfLine = 5.0;

struct FixedPointPair {
  int kappa = 0;
  IPoint p_plus;   ///< f(p) = p + (kappa, 0) under the inverse map
  IPoint p_minus;  ///< f(p) = p - (kappa, 0)
};

/// Fixed points of the inverse dissipative map rotating by +-kappa, for every
/// (a, b) in the given boxes. Throws NoFixedPoint when |kappa (b-1)/a| < 1
/// cannot be verified.
FixedPointPair dsf_fixed_pair(const Interval& a, const Interval& b, int kappa);

/// Upward-rounded 1/(1-b) over the box b.
double dsf_B(const Interval& b);

/// Sum over the uniform k-partition of [0,1] of w(cell) * |cell|, where
/// w(x) = v_shape(sin 2 pi x). Contains the integral of w over [0,1].
Interval riemann_enclosure(VChoice v, std::size_t k);
/// Doubles k from `k0` until the enclosure is narrower than `max_width`.
Interval riemann_enclosure_adaptive(VChoice v, double max_width, std::size_t k0 = 1024,
                                    std::size_t k_max = std::size_t{1} << 22);
/// True when the drift integral of the spec's v (with its c) may vanish,
/// i.e. the enclosure with c added contains 0.
bool zero_drift_holds(const MapSpec& spec, std::size_t k = 1 << 17);

}  // namespace annular
