#pragma once

// Diffusion certification for the conservative families: a floating-point
// search for an orbit from y = -B to y > B, then a Krawczyk proof that a true
// orbit with the same itinerary exists.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "annular/krawczyk.hpp"
#include "annular/maps.hpp"

namespace annular {

struct CandidateOrbit {
  double x_start = 0.0;
  int m = 0;
  std::vector<Point> points;  ///< points[0] = (x_start, -B), points[m] above B
  double B = 0.0;
};

/// Escape time of (x, -B) to {y > B} within max_m steps, or nullopt.
std::optional<CandidateOrbit> orbit_from(const MapSpec& map, double x, double B, int max_m);

/// Candidates ranked by (m ascending, final height descending). With a seed
/// only the seed and its 1e-4 neighbourhood are scanned; otherwise `grid`
/// uniform starts on [0, 1) followed by local refinement around the best one.
std::vector<CandidateOrbit> find_candidates(const MapSpec& map, double B, int max_m, int grid,
                                            std::optional<double> seed, std::size_t count);

/// Best candidate, or nullopt when none escapes within max_m.
std::optional<CandidateOrbit> find_candidate(const MapSpec& map, double B, int max_m,
                                             int grid = 10000,
                                             std::optional<double> seed = std::nullopt);

enum class DiffusionStatus { Verified, NoCandidate, ValidationFailed };
std::string_view to_string(DiffusionStatus s);

struct DiffusionOptions {
  int max_m = 0;  ///< 0 selects 50 for VSF and 300 for NTSF
  int grid = 10000;
  std::optional<double> seed;
  std::optional<double> B;  ///< override of the shooting line
  std::size_t max_attempts = 8;
  CertifyOptions certify;
};

struct DiffusionResult {
  DiffusionStatus status = DiffusionStatus::NoCandidate;
  std::optional<Certificate> certificate;
  std::optional<ShootingProblem> problem;
  int m = 0;
  Thresholds thresholds;
  double x_start = 0.0;
  std::string reason;
};

int default_max_m(const MapSpec& map);

/// Verified means the Krawczyk test passed and the endpoint enclosure lies
/// strictly above y = B. Throws DomainError for the dissipative family or
/// when an overriding B is below M/2.
DiffusionResult validate_diffusion(const MapSpec& map, std::optional<int> rho,
                                   const DiffusionOptions& opts = {});
DiffusionResult validate_diffusion(const MapSpec& map, std::optional<int> rho, int max_m);

/// Enclosures of p_0 .. p_m of a verified shooting orbit.
std::vector<IPoint> trajectory(const ShootingProblem& prob, const Certificate& cert);
/// CSV with columns i,x_lo,x_hi,y_lo,y_hi.
void write_trajectory_csv(std::ostream& os, const std::vector<IPoint>& points);

}  // namespace annular
