#pragma once

// Rotational horseshoes for the dissipative standard family, certified on
// the inverse map from a pair of fixed points that rotate by +kappa and
// -kappa. Each fixed point gets a local frame in which the derivative
// satisfies a cone condition; four parameter-dependent shooting problems then
// show that arbitrarily small segments through both fixed points reach above
// y = B and below y = -B.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "annular/krawczyk.hpp"
#include "annular/maps.hpp"

namespace annular {

struct LocalFrame {
  Mat2 A{};        ///< columns: unstable, stable eigenvector
  IMat2 A_inv{};   ///< encloses A^{-1}
  double L = 1.0;
  double alpha = 0.0;
  double beta = 0.0;

  /// [-alpha, alpha] x [-beta, beta]
  [[nodiscard]] IPoint U_tilde() const;
};

/// Frame from a point Jacobian. Throws ComplexEigenvalues, or FrameError when
/// the eigenvalues do not split as |lambda_u| > 1 > |lambda_s|, or
/// NearSingularFrame when the eigenvectors are almost parallel.
LocalFrame local_frame_from_jacobian(const Mat2& J, double L, double alpha, double beta);
/// Frame at the midpoint of fp for the given map.
LocalFrame local_frame(const MapSpec& map, const IPoint& fp, double L, double alpha,
                       double beta);

/// inf |c11 + c12 [-L, L]| > 1 and sup |c21 + c22 [-L, L]| <= L.
bool cone_condition(const IMat2& C, double L);
/// Encloses A^{-1} (f(fp + A p) - fp - (shift, 0)).
IPoint local_map(const MapSpec& map, const IPoint& fp, const LocalFrame& frame, int shift,
                 const IPoint& p);
/// Encloses A^{-1} Df(fp + A U) A.
IMat2 local_derivative(const MapSpec& map, const IPoint& fp, const LocalFrame& frame);
bool cone_check(const MapSpec& map, const IPoint& fp, const LocalFrame& frame);
/// A U lies strictly inside [-1/2, 1/2] x [-1, 1].
bool geometry_check(const LocalFrame& frame);

/// floor(34 / (2 kappa)) + 1.
int box_chain_length(int kappa);
/// Largest kappa with kappa < a/(1-b) on the whole box (0 when none).
int max_kappa(const Interval& a, const Interval& b);

enum class Which { Plus, Minus };
enum class Direction { Up, Down };
std::string_view to_string(Which w);
std::string_view to_string(Direction d);

struct DsfCase {
  Interval a{0.0}, b{0.0};
  int kappa = 0;
  FixedPointPair pair;
  int N = 0;
  std::array<LocalFrame, 2> frames;  ///< plus, minus
  double B = 0.0;
  [[nodiscard]] MapSpec map() const { return MapSpec::dsf(a, b, true); }
  [[nodiscard]] const IPoint& fixed_point(Which w) const {
    return w == Which::Plus ? pair.p_plus : pair.p_minus;
  }
  [[nodiscard]] const LocalFrame& frame(Which w) const {
    return frames[w == Which::Plus ? 0 : 1];
  }
};

enum class BranchFailure {
  None,
  NoCandidate,
  KrawczykFailed,
  EndpointNotBeyond,
  SegmentOutsideU,
  DegenerateSegment,
  EndpointRunsFailed
};
std::string_view to_string(BranchFailure f);

struct BranchResult {
  Which which = Which::Plus;
  Direction direction = Direction::Up;
  BranchFailure failure = BranchFailure::NoCandidate;
  std::string detail;
  std::optional<ShootingProblem> problem;
  std::optional<Certificate> certificate;
  Interval h0{0.0};
  std::optional<Interval> h0_minus, h0_plus;  ///< enclosures of h0(-1), h0(1)
  [[nodiscard]] bool ok() const noexcept { return failure == BranchFailure::None; }
};

struct DsfOptions {
  /// For each alpha in order, slopes are tried in order; the first pair that
  /// passes both frame checks is used.
  std::vector<double> slopes{1.0, 4.0, 16.0};
  std::vector<double> alphas{1e-2, 1e-3, 1e-4, 1e-5};
  int max_m = 60;
  std::size_t max_attempts = 4;
  std::optional<int> kappa;  ///< restrict the search to this rotation
  CertifyOptions certify;
};

/// Frames for both fixed points at the first (slope, alpha) pair from the
/// ladders that passes both checks; nullopt when none does.
std::optional<DsfCase> make_case(const Interval& a, const Interval& b, int kappa,
                                 const DsfOptions& opts = {});

/// Checks on a verified parameter certificate: endpoint beyond the line,
/// segment inside U, h0 bounded away from 0, and plain runs at z = -1, 1.
void check_branch(const DsfCase& c, BranchResult& r, const CertifyOptions& opts = {});

BranchResult validate_branch(const DsfCase& c, Which which, Direction dir,
                             const DsfOptions& opts = {});

struct DsfResult {
  bool chaos = false;
  int kappa = 0;
  std::optional<DsfCase> dsf_case;
  std::vector<BranchResult> branches;  ///< four entries when chaos
  std::string reason;
};

/// Tries kappa = 1 .. max_kappa (or only opts.kappa) and returns at the first
/// kappa whose four branches all validate. Throws DomainError unless a > 2
/// and 0 < b < 1, or when opts.kappa < 1.
DsfResult validate_dsf(const Interval& a, const Interval& b, const DsfOptions& opts = {});

}  // namespace annular
