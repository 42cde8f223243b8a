#pragma once

// Parallel shooting for orbit segments that join a start segment to a target
// line, and the Krawczyk existence/uniqueness test.
//
// Unknowns are ordered X = (h0, h1, p1, ..., p_{m-1}) and the residual is
//
//   f(p_k) - p_{k+1}            k = 1 .. m-2
//   f(p_{m-1}) - (q1 + h1 v1)
//   f(q0 + h0 v0(z)) - p1
//
// so every block row has at most three nonzero blocks in DF.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "annular/interval.hpp"
#include "annular/kernels.hpp"
#include "annular/linalg.hpp"
#include "annular/maps.hpp"

namespace annular {

/// Start directions v0(z) = A (1, z L), z in [-1, 1].
struct FrameFamily {
  Mat2 A{};
  double L = 1.0;
  friend bool operator==(const FrameFamily&, const FrameFamily&) = default;
};

struct ShootingProblem {
  MapSpec map;
  int m = 2;
  IPoint q0{};
  Point q1{};
  std::variant<Point, FrameFamily> v0 = Point{1.0, 0.0};
  Point v1{1.0, 0.0};
  Vec candidate;
  std::optional<Interval> z_domain;

  [[nodiscard]] std::size_t dim() const noexcept { return 2 * static_cast<std::size_t>(m); }
  /// Throws DimensionMismatch / DomainError when the invariants fail.
  void check() const;
};

struct Certificate {
  IVec X_enclosure;
  IVec K;
  Interval h1_enclosure{0.0};
  IVec endpoint_enclosure;
  bool verified = false;
  std::string reason;  ///< empty when verified

  /// Tightest enclosure of the solution: K once verified, else the box.
  [[nodiscard]] const IVec& solution() const noexcept { return verified ? K : X_enclosure; }
};

IVec eval_F(const ShootingProblem& prob, const IVec& X, std::optional<Interval> z = std::nullopt);
IMat eval_DF(const ShootingProblem& prob, const IVec& X, std::optional<Interval> z = std::nullopt);
SparseIMat eval_DF_sparse(const ShootingProblem& prob, const IVec& X,
                          std::optional<Interval> z = std::nullopt);
/// Floating-point residual with all interval data at midpoints.
Vec eval_F_point(const ShootingProblem& prob, std::span<const double> X, double z = 0.0);

using FEval = std::function<IVec(const IVec&)>;
using DFEval = std::function<IMat(const IVec&)>;

/// K = X0 - C F(X0) + (Id - C [DF(box)]) (box - X0); verified iff K lies in
/// the interior of box. Evaluation errors give verified = false.
Certificate krawczyk_test(const FEval& F, const DFEval& DF, const IVec& box,
                          std::span<const double> X0, const Mat& C,
                          kernels::Exec exec = kernels::Exec::Auto);

using FZEval = std::function<IVec(const IVec&, const Interval&)>;
using DFZEval = std::function<IMat(const IVec&, const Interval&)>;

/// Krawczyk test with F(X0) and DF(box) evaluated over the whole parameter
/// interval Z.
Certificate krawczyk_test_param(const FZEval& F, const DFZEval& DF, const IVec& box,
                                std::span<const double> X0, const Mat& C, const Interval& Z,
                                kernels::Exec exec = kernels::Exec::Auto);

/// Shooting version on the sparse Jacobian. `z` must be given exactly when the
/// problem has a z domain. Fills h1 and the endpoint enclosure.
Certificate krawczyk_test(const ShootingProblem& prob, const IVec& box,
                          std::span<const double> X0, const Mat& C,
                          std::optional<Interval> z = std::nullopt,
                          kernels::Exec exec = kernels::Exec::Auto);

Certificate krawczyk_test_param(const ShootingProblem& prob, const IVec& box,
                                std::span<const double> X0, const Mat& C, const Interval& Z,
                                kernels::Exec exec = kernels::Exec::Auto);

/// Componentwise [x - r, x + r] with r = eps_abs + eps_rel |x|, rounded outward.
IVec inflate_candidate(std::span<const double> x, double eps_rel, double eps_abs);
/// Same widening applied to both ends of every component of a box.
IVec inflate_box(const IVec& box, double eps_rel, double eps_abs);

/// Floating-point inverse of mid([DF(box)]) by banded elimination.
Mat shooting_preconditioner(const ShootingProblem& prob, const IVec& box,
                            std::optional<Interval> z = std::nullopt);

/// Plain Newton iteration on F(., z) with interval data at midpoints.
/// Returns nullopt when it fails to converge.
std::optional<Vec> newton_refine(const ShootingProblem& prob, Vec x, double z = 0.0,
                                 int max_iter = 40);

/// Hull of Newton solutions over every corner of the problem's interval data
/// (map parameters, q0) and z in {-1, -1/2, 0, 1/2, 1} when a z domain is set.
std::optional<IVec> newton_hull(const ShootingProblem& prob, int max_iter = 40);

struct CertifyOptions {
  std::vector<double> radii{1e-12, 1e-10, 1e-8, 1e-6};
  /// Each component of the Newton hull is first widened by this multiple of
  /// its own width; matters only when the problem carries interval data.
  std::vector<double> hull_growth{1.0, 3.0};
  kernels::Exec exec = kernels::Exec::Auto;
};

/// Refines the candidate, then tries each hull growth and inflation radius
/// around the Newton hull until the Krawczyk test verifies. Returns the last
/// attempt otherwise.
Certificate certify(ShootingProblem& prob, const CertifyOptions& opts = {});

}  // namespace annular
