#pragma once

// Parameter sweeps. Mesh mode runs the diffusion pipeline at the corner points
// of a uniform NTSF mesh; subdivide mode validates DSF parameter boxes and
// splits failing boxes into branching x branching children up to max_depth.
//
// Units (mesh points or initial boxes) are evaluated independently, in
// parallel when allowed, and appended to records.jsonl as they finish. Every
// aggregate is rebuilt from the records sorted by unit id, so reports do not
// depend on the worker count or on how a run was interrupted and resumed.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "annular/interval.hpp"
#include "annular/kernels.hpp"

namespace annular {

enum class SweepFamily { NTSF, DSF };
enum class SweepMode { Mesh, Subdivide };
std::string_view to_string(SweepFamily f);
std::string_view to_string(SweepMode m);

struct SweepConfig {
  SweepFamily family = SweepFamily::NTSF;
  double x0 = 0.0, x1 = 1.0;  ///< a range
  double y0 = 0.0, y1 = 1.0;  ///< b range
  SweepMode mode = SweepMode::Mesh;
  int nx = 1, ny = 1;
  int branching = 5;
  int max_depth = 3;
  int workers = 0;  ///< 0 uses the OpenMP default
  std::filesystem::path out_dir;  ///< empty keeps everything in memory
  bool resume = false;
  bool write_certs = true;
  double unit_budget_s = 60.0;  ///< 0 disables the per-unit budget
  int max_m = 0;                ///< NTSF iterate cap, 0 for the default
  int search_grid = 10000;      ///< NTSF start points on y = -B
  /// Serial runs the reference loop; anything else distributes units.
  kernels::Exec exec = kernels::Exec::Auto;

  /// Throws DomainError when the grid, depth or region is invalid.
  void check() const;
  /// Every field that can change a record, in a fixed textual form.
  [[nodiscard]] std::string canonical() const;
  /// FNV-1a of canonical(), as 16 hex digits.
  [[nodiscard]] std::string hash() const;
  [[nodiscard]] std::size_t unit_count() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static SweepConfig from_json(const nlohmann::json& j);
};

std::uint64_t fnv1a64(std::string_view s);

/// Value i of n inclusive corner points on [lo, hi]; exact at both ends.
double mesh_point(double lo, double hi, int i, int n);
/// Boundary i of n equal cells on [lo, hi]; exact at both ends.
double cell_edge(double lo, double hi, int i, int n);

struct LeafRecord {
  std::string path;  ///< child indices from the initial box, "" at depth 0
  Interval a{0.0}, b{0.0};
  int depth = 0;
  std::string status;  ///< Chaos, Failed or TimedOut
  int kappa = 0;
  std::string cert_path;
};

struct UnitRecord {
  std::size_t unit_id = 0;
  std::string status;
  Interval a{0.0}, b{0.0};  ///< point intervals in mesh mode
  std::optional<int> kappa, m;
  std::string cert_path;
  std::string reason;
  double ms = 0.0;
  std::uint64_t area_num = 0;  ///< verified measure in leaves of the finest depth
  std::vector<LeafRecord> leaves;

  [[nodiscard]] nlohmann::json to_json(const std::string& config_hash,
                                       SweepFamily family) const;
  static UnitRecord from_json(const nlohmann::json& j);
};

struct SweepReport {
  SweepConfig config;
  std::vector<UnitRecord> records;  ///< sorted by unit id

  [[nodiscard]] std::size_t total() const { return records.size(); }
  [[nodiscard]] std::size_t verified() const;
  [[nodiscard]] double fraction() const;
  /// (branching^2)^max_depth per initial box.
  [[nodiscard]] std::uint64_t area_per_unit() const;
  [[nodiscard]] std::uint64_t area_num() const;
  [[nodiscard]] std::uint64_t area_den() const;
  [[nodiscard]] double area_fraction() const;

  /// Deterministic summary: counts, fractions and the config hash only.
  [[nodiscard]] nlohmann::json summary() const;
  /// Mesh: a,b,status. Subdivide: one row per leaf at its centre, followed by
  /// the leaf bounds and depth.
  void write_plot_csv(std::ostream& os) const;
};

/// Runs (or resumes, when config.resume is set) a sweep and writes
/// config.json, records.jsonl, summary.json, plot.csv and certs/ under
/// config.out_dir. Throws IoError on file problems and ConfigMismatch when a
/// resumed directory belongs to a different configuration.
SweepReport run_sweep(const SweepConfig& config);
/// run_sweep for mesh mode; throws DomainError for any other mode.
SweepReport run_mesh(const SweepConfig& config);
/// run_sweep for subdivide mode on the dissipative family.
SweepReport run_subdivide(const SweepConfig& config);
/// Continues the sweep stored in `dir`, skipping completed units.
SweepReport resume(SweepConfig config, const std::filesystem::path& dir);

/// Reloads config.json and records.jsonl from a sweep directory.
SweepReport load_sweep(const std::filesystem::path& dir);
/// Writes summary.json and plot.csv into `dir`.
void write_report_files(const SweepReport& report, const std::filesystem::path& dir);

}  // namespace annular
