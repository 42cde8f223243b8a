#pragma once

// Self-contained JSON certificates and their independent audit. Every
// floating value is stored as its shortest round-trip decimal string and every
// interval as "[lo,hi]", so a reader reconstructs the exact bounds.
//
// recheck trusts only the stored problem data and the claimed box: residuals,
// the preconditioner, K, the endpoint and (for the dissipative family) the
// fixed points and the cone condition are all recomputed.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "annular/diffusion.hpp"
#include "annular/dsf.hpp"
#include "annular/krawczyk.hpp"

namespace annular {

using json = nlohmann::json;

json problem_to_json(const ShootingProblem& prob);
ShootingProblem problem_from_json(const json& j);

/// Problem, box, K, h1 and endpoint enclosures plus the verified flag.
json shooting_to_json(const ShootingProblem& prob, const Certificate& cert);

/// Certificate for a Verified diffusion result. Throws DomainError otherwise.
json diffusion_certificate(const DiffusionResult& r, std::optional<int> rho);
/// Certificate bundle for a chaos result: case geometry and four branches.
/// Throws DomainError when r.chaos is false.
json dsf_certificate(const DsfResult& r);

struct RecheckReport {
  bool ok = false;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
};

/// Audits a certificate produced by diffusion_certificate or dsf_certificate.
/// Malformed input throws ParseError.
RecheckReport recheck(const json& cert);

json read_json_file(const std::filesystem::path& path);
/// Writes `j` (indented) creating parent directories; throws IoError.
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace annular
