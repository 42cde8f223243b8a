#include "annular/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "annular/certificate.hpp"
#include "annular/diffusion.hpp"
#include "annular/dsf.hpp"
#include "annular/errors.hpp"
#include "annular/format.hpp"
#include "annular/maps.hpp"

namespace annular {

namespace fs = std::filesystem;

std::string_view to_string(SweepFamily f) { return f == SweepFamily::NTSF ? "ntsf" : "dsf"; }
std::string_view to_string(SweepMode m) { return m == SweepMode::Mesh ? "mesh" : "subdivide"; }

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double mesh_point(double lo, double hi, int i, int n) {
  if (n <= 1 || i <= 0) return lo;
  if (i >= n - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

double cell_edge(double lo, double hi, int i, int n) {
  if (i <= 0) return lo;
  if (i >= n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
}

void SweepConfig::check() const {
  if (nx < 1 || ny < 1) throw DomainError("sweep grid needs nx, ny >= 1");
  if (max_depth < 0) throw DomainError("sweep depth must be >= 0");
  if (branching < 2) throw DomainError("sweep branching must be >= 2");
  if (!(x0 <= x1) || !(y0 <= y1) || !std::isfinite(x0) || !std::isfinite(x1) ||
      !std::isfinite(y0) || !std::isfinite(y1))
    throw DomainError("sweep region needs finite x0 <= x1 and y0 <= y1");
  if (!(unit_budget_s >= 0)) throw DomainError("unit budget must be >= 0");
  if (family == SweepFamily::NTSF) {
    if (mode != SweepMode::Mesh) throw DomainError("the NTSF sweep runs on a mesh");
    if (x0 < 0) throw DomainError("NTSF needs a >= 0");
  } else {
    if (mode != SweepMode::Subdivide) throw DomainError("the DSF sweep runs by subdivision");
    if (!(x0 > 2) || !(y0 > 0) || !(y1 < 1)) throw DomainError("DSF needs a > 2 and 0 < b < 1");
    if (!(x0 < x1) || !(y0 < y1)) throw DomainError("DSF boxes need a nonempty region");
    double per = 1;
    for (int d = 0; d < max_depth; ++d) per *= static_cast<double>(branching) * branching;
    if (per * static_cast<double>(unit_count()) > 9e15)
      throw DomainError("subdivision too deep for exact area bookkeeping");
  }
}

std::string SweepConfig::canonical() const {
  std::ostringstream os;
  os << "family=" << to_string(family) << ";mode=" << to_string(mode)
     << ";region=" << format_double(x0) << "," << format_double(x1) << ","
     << format_double(y0) << "," << format_double(y1) << ";grid=" << nx << "," << ny;
  if (mode == SweepMode::Subdivide) os << ";branching=" << branching << ";depth=" << max_depth;
  if (family == SweepFamily::NTSF) os << ";max_m=" << max_m << ";search_grid=" << search_grid;
  os << ";budget=" << format_double(unit_budget_s) << ";certs=" << (write_certs ? 1 : 0);
  return os.str();
}

std::string SweepConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

std::size_t SweepConfig::unit_count() const {
  return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
}

nlohmann::json SweepConfig::to_json() const {
  return {{"family", std::string(to_string(family))},
          {"mode", std::string(to_string(mode))},
          {"region", {format_double(x0), format_double(x1), format_double(y0), format_double(y1)}},
          {"grid", {nx, ny}},
          {"branching", branching},
          {"depth", max_depth},
          {"max_m", max_m},
          {"search_grid", search_grid},
          {"budget_s", format_double(unit_budget_s)},
          {"certs", write_certs},
          {"config_hash", hash()}};
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
  try {
    SweepConfig c;
    const auto fam = j.at("family").get<std::string>();
    if (fam != "ntsf" && fam != "dsf") throw ParseError("unknown sweep family '" + fam + "'");
    c.family = fam == "ntsf" ? SweepFamily::NTSF : SweepFamily::DSF;
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "mesh" && mode != "subdivide") throw ParseError("unknown sweep mode '" + mode + "'");
    c.mode = mode == "mesh" ? SweepMode::Mesh : SweepMode::Subdivide;
    const auto& r = j.at("region");
    c.x0 = parse_double(r.at(0).get<std::string>());
    c.x1 = parse_double(r.at(1).get<std::string>());
    c.y0 = parse_double(r.at(2).get<std::string>());
    c.y1 = parse_double(r.at(3).get<std::string>());
    c.nx = j.at("grid").at(0).get<int>();
    c.ny = j.at("grid").at(1).get<int>();
    c.branching = j.at("branching").get<int>();
    c.max_depth = j.at("depth").get<int>();
    c.max_m = j.at("max_m").get<int>();
    c.search_grid = j.at("search_grid").get<int>();
    c.unit_budget_s = parse_double(j.at("budget_s").get<std::string>());
    c.write_certs = j.at("certs").get<bool>();
    if (j.contains("config_hash") && j.at("config_hash").get<std::string>() != c.hash())
      throw ConfigMismatch("config.json hash does not match its contents");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed sweep config: ") + e.what());
  }
}

nlohmann::json UnitRecord::to_json(const std::string& config_hash, SweepFamily family) const {
  nlohmann::json j;
  j["unit_id"] = unit_id;
  j["config_hash"] = config_hash;
  j["family"] = std::string(to_string(family));
  if (family == SweepFamily::NTSF)
    j["params"] = {format_double(a.lo()), format_double(b.lo())};
  else
    j["box"] = {format_interval(a), format_interval(b)};
  j["status"] = status;
  if (kappa) j["kappa"] = *kappa;
  if (m) j["m"] = *m;
  if (!cert_path.empty()) j["cert_path"] = cert_path;
  if (!reason.empty()) j["reason"] = reason;
  j["ms"] = ms;
  if (family == SweepFamily::DSF) {
    j["area_num"] = area_num;
    nlohmann::json leaves = nlohmann::json::array();
    for (const auto& l : this->leaves) {
      nlohmann::json e{{"path", l.path},
                       {"box", {format_interval(l.a), format_interval(l.b)}},
                       {"depth", l.depth},
                       {"status", l.status}};
      if (l.kappa) e["kappa"] = l.kappa;
      if (!l.cert_path.empty()) e["cert_path"] = l.cert_path;
      leaves.push_back(std::move(e));
    }
    j["leaves"] = std::move(leaves);
  }
  return j;
}

UnitRecord UnitRecord::from_json(const nlohmann::json& j) {
  UnitRecord r;
  r.unit_id = j.at("unit_id").get<std::size_t>();
  r.status = j.at("status").get<std::string>();
  if (j.contains("params")) {
    r.a = Interval(parse_double(j.at("params").at(0).get<std::string>()));
    r.b = Interval(parse_double(j.at("params").at(1).get<std::string>()));
  } else {
    r.a = parse_interval(j.at("box").at(0).get<std::string>());
    r.b = parse_interval(j.at("box").at(1).get<std::string>());
  }
  if (j.contains("kappa")) r.kappa = j.at("kappa").get<int>();
  if (j.contains("m")) r.m = j.at("m").get<int>();
  r.cert_path = j.value("cert_path", "");
  r.reason = j.value("reason", "");
  r.ms = j.value("ms", 0.0);
  r.area_num = j.value("area_num", std::uint64_t{0});
  if (j.contains("leaves")) {
    for (const auto& e : j.at("leaves")) {
      LeafRecord l;
      l.path = e.at("path").get<std::string>();
      l.a = parse_interval(e.at("box").at(0).get<std::string>());
      l.b = parse_interval(e.at("box").at(1).get<std::string>());
      l.depth = e.at("depth").get<int>();
      l.status = e.at("status").get<std::string>();
      l.kappa = e.value("kappa", 0);
      l.cert_path = e.value("cert_path", "");
      r.leaves.push_back(std::move(l));
    }
  }
  return r;
}

std::size_t SweepReport::verified() const {
  const char* ok = config.mode == SweepMode::Mesh ? "Verified" : "Chaos";
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const UnitRecord& r) { return r.status == ok; }));
}

double SweepReport::fraction() const {
  return records.empty() ? 0.0 : static_cast<double>(verified()) / static_cast<double>(total());
}

std::uint64_t SweepReport::area_per_unit() const {
  std::uint64_t per = 1;
  const auto cells = static_cast<std::uint64_t>(config.branching) * config.branching;
  for (int d = 0; d < config.max_depth; ++d) per *= cells;
  return per;
}

std::uint64_t SweepReport::area_num() const {
  std::uint64_t s = 0;
  for (const auto& r : records) s += r.area_num;
  return s;
}

std::uint64_t SweepReport::area_den() const { return area_per_unit() * records.size(); }

double SweepReport::area_fraction() const {
  const std::uint64_t den = area_den();
  return den == 0 ? 0.0 : static_cast<double>(area_num()) / static_cast<double>(den);
}

nlohmann::json SweepReport::summary() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) ++counts[r.status];
  nlohmann::json j;
  j["config_hash"] = config.hash();
  j["family"] = std::string(to_string(config.family));
  j["mode"] = std::string(to_string(config.mode));
  j["total"] = total();
  j["expected_total"] = config.unit_count();
  j["verified"] = verified();
  j["fraction"] = fraction();
  j["counts"] = counts;
  if (config.mode == SweepMode::Subdivide) {
    j["area_num"] = area_num();
    j["area_den"] = area_den();
    j["area_fraction"] = area_fraction();
  }
  return j;
}

void SweepReport::write_plot_csv(std::ostream& os) const {
  if (config.mode == SweepMode::Mesh) {
    os << "a,b,status\n";
    for (const auto& r : records)
      os << format_double(r.a.lo()) << ',' << format_double(r.b.lo()) << ',' << r.status << '\n';
    return;
  }
  os << "a,b,status,a_lo,a_hi,b_lo,b_hi,depth\n";
  for (const auto& r : records)
    for (const auto& l : r.leaves)
      os << format_double(l.a.mid()) << ',' << format_double(l.b.mid()) << ',' << l.status << ','
         << format_double(l.a.lo()) << ',' << format_double(l.a.hi()) << ','
         << format_double(l.b.lo()) << ',' << format_double(l.b.hi()) << ',' << l.depth << '\n';
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string unit_name(std::size_t id, const std::string& path) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "unit_%06zu", id);
  return std::string(buf) + (path.empty() ? "" : "-" + path) + ".json";
}

// Certificates go to certs/ under the output directory; the record keeps the
// path relative to it.
std::string store_cert(const SweepConfig& cfg, const std::string& name, const json& cert) {
  if (cfg.out_dir.empty() || !cfg.write_certs) return "";
  const fs::path rel = fs::path("certs") / name;
  write_json_file(cfg.out_dir / rel, cert);
  return rel.generic_string();
}

UnitRecord mesh_unit(const SweepConfig& cfg, std::size_t id) {
  const auto t0 = Clock::now();
  const int ix = static_cast<int>(id % static_cast<std::size_t>(cfg.nx));
  const int iy = static_cast<int>(id / static_cast<std::size_t>(cfg.nx));
  UnitRecord r;
  r.unit_id = id;
  const double a = mesh_point(cfg.x0, cfg.x1, ix, cfg.nx);
  const double b = mesh_point(cfg.y0, cfg.y1, iy, cfg.ny);
  r.a = Interval(a);
  r.b = Interval(b);
  if (a == 0.0 || b == 0.0) {
    // b = 0 leaves y invariant; a = 0 makes the threshold infinite.
    r.status = std::string(to_string(DiffusionStatus::NoCandidate));
    r.reason = b == 0.0 ? "b = 0 is integrable" : "a = 0: threshold is infinite";
    r.ms = ms_since(t0);
    return r;
  }
  DiffusionOptions opts;
  opts.max_m = cfg.max_m;
  opts.grid = cfg.search_grid;
  opts.certify.exec = kernels::Exec::Serial;
  const DiffusionResult res = validate_diffusion(MapSpec::ntsf(a, b), std::nullopt, opts);
  r.ms = ms_since(t0);
  if (cfg.unit_budget_s > 0 && r.ms > cfg.unit_budget_s * 1000.0) {
    r.status = "TimedOut";
    r.reason = "unit exceeded its time budget";
    return r;
  }
  r.status = std::string(to_string(res.status));
  r.reason = res.reason;
  if (res.status == DiffusionStatus::Verified) {
    r.m = res.m;
    r.cert_path = store_cert(cfg, unit_name(id, ""), diffusion_certificate(res, std::nullopt));
  }
  return r;
}

struct Subdivider {
  const SweepConfig& cfg;
  UnitRecord& rec;
  Clock::time_point deadline;
  bool timed_out = false;
  DsfOptions opts;

  std::uint64_t weight(int depth) const {
    std::uint64_t w = 1;
    const auto cells = static_cast<std::uint64_t>(cfg.branching) * cfg.branching;
    for (int d = depth; d < cfg.max_depth; ++d) w *= cells;
    return w;
  }

  void leaf(const std::string& path, const Interval& a, const Interval& b, int depth,
            std::string status, int kappa = 0, std::string cert = "") {
    rec.leaves.push_back({path, a, b, depth, std::move(status), kappa, std::move(cert)});
  }

  void visit(const std::string& path, const Interval& a, const Interval& b, int depth) {
    if (timed_out || (cfg.unit_budget_s > 0 && Clock::now() > deadline)) {
      timed_out = true;
      leaf(path, a, b, depth, "TimedOut");
      return;
    }
    const DsfResult res = validate_dsf(a, b, opts);
    if (res.chaos) {
      rec.area_num += weight(depth);
      leaf(path, a, b, depth, "Chaos", res.kappa,
           store_cert(cfg, unit_name(rec.unit_id, path), dsf_certificate(res)));
      return;
    }
    if (depth == cfg.max_depth) {
      leaf(path, a, b, depth, "Failed");
      return;
    }
    const int n = cfg.branching;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Interval ca(cell_edge(a.lo(), a.hi(), i, n), cell_edge(a.lo(), a.hi(), i + 1, n));
        const Interval cb(cell_edge(b.lo(), b.hi(), j, n), cell_edge(b.lo(), b.hi(), j + 1, n));
        const std::string child = std::to_string(j * n + i);
        visit(path.empty() ? child : path + "." + child, ca, cb, depth + 1);
      }
  }
};

UnitRecord subdivide_unit(const SweepConfig& cfg, std::size_t id) {
  const auto t0 = Clock::now();
  const int ix = static_cast<int>(id % static_cast<std::size_t>(cfg.nx));
  const int iy = static_cast<int>(id / static_cast<std::size_t>(cfg.nx));
  UnitRecord r;
  r.unit_id = id;
  r.a = Interval(cell_edge(cfg.x0, cfg.x1, ix, cfg.nx), cell_edge(cfg.x0, cfg.x1, ix + 1, cfg.nx));
  r.b = Interval(cell_edge(cfg.y0, cfg.y1, iy, cfg.ny), cell_edge(cfg.y0, cfg.y1, iy + 1, cfg.ny));
  DsfOptions opts;
  opts.certify.exec = kernels::Exec::Serial;
  Subdivider s{cfg, r,
               t0 + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(cfg.unit_budget_s)),
               false, opts};
  s.visit("", r.a, r.b, 0);
  const std::uint64_t full = s.weight(0);
  if (s.timed_out) {
    r.status = "TimedOut";
  } else if (r.area_num == full) {
    r.status = "Chaos";
    r.kappa = r.leaves.front().kappa;
    r.cert_path = r.leaves.front().cert_path;
  } else {
    r.status = r.area_num > 0 ? "Partial" : "Failed";
  }
  r.ms = ms_since(t0);
  return r;
}

UnitRecord run_unit(const SweepConfig& cfg, std::size_t id) {
  try {
    return cfg.mode == SweepMode::Mesh ? mesh_unit(cfg, id) : subdivide_unit(cfg, id);
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    UnitRecord r;
    r.unit_id = id;
    r.status = "Error";
    r.reason = e.what();
    return r;
  }
}

// Reads records.jsonl; a torn final line from an interrupted run is dropped.
std::vector<UnitRecord> read_records(const fs::path& file, const std::string& hash) {
  std::vector<UnitRecord> out;
  std::ifstream in(file);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      continue;
    }
    if (j.value("config_hash", "") != hash)
      throw ConfigMismatch("record in " + file.string() + " belongs to another configuration");
    out.push_back(UnitRecord::from_json(j));
  }
  return out;
}

void sort_unique(std::vector<UnitRecord>& recs) {
  std::stable_sort(recs.begin(), recs.end(),
                   [](const UnitRecord& x, const UnitRecord& y) { return x.unit_id < y.unit_id; });
  recs.erase(std::unique(recs.begin(), recs.end(),
                         [](const UnitRecord& x, const UnitRecord& y) {
                           return x.unit_id == y.unit_id;
                         }),
             recs.end());
}

}  // namespace

SweepReport run_sweep(const SweepConfig& config) {
  config.check();
  SweepReport rep;
  rep.config = config;
  const std::string hash = config.hash();
  const bool to_disk = !config.out_dir.empty();
  const fs::path records_file = config.out_dir / "records.jsonl";

  std::vector<UnitRecord> done;
  if (to_disk) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create " + config.out_dir.string() + ": " + ec.message());
    const fs::path cfg_file = config.out_dir / "config.json";
    if (config.resume && fs::exists(cfg_file)) {
      const SweepConfig prior = SweepConfig::from_json(read_json_file(cfg_file));
      if (prior.hash() != hash)
        throw ConfigMismatch("sweep in " + config.out_dir.string() +
                             " was started with a different configuration");
    }
    if (config.resume) done = read_records(records_file, hash);
    sort_unique(done);
    write_json_file(cfg_file, config.to_json());
    // Rewrite the kept records so a torn line never precedes new output.
    std::ofstream out(records_file, std::ios::trunc);
    if (!out) throw IoError("cannot write " + records_file.string());
    for (const auto& r : done) out << r.to_json(hash, config.family).dump() << '\n';
  }

  std::set<std::size_t> have;
  for (const auto& r : done) have.insert(r.unit_id);
  std::vector<std::size_t> todo;
  for (std::size_t id = 0; id < config.unit_count(); ++id)
    if (!have.count(id)) todo.push_back(id);

  std::ofstream out;
  if (to_disk) {
    out.open(records_file, std::ios::app);
    if (!out) throw IoError("cannot append to " + records_file.string());
  }
  std::vector<UnitRecord> fresh;
  fresh.reserve(todo.size());
  std::exception_ptr error;
  auto emit = [&](UnitRecord&& r) {
    if (to_disk) {
      out << r.to_json(hash, config.family).dump() << '\n';
      out.flush();
    }
    fresh.push_back(std::move(r));
  };

  const auto n = static_cast<std::ptrdiff_t>(todo.size());
  if (config.exec == kernels::Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) emit(run_unit(config, todo[static_cast<std::size_t>(i)]));
  } else {
#ifdef _OPENMP
    const int workers = config.workers > 0 ? config.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      std::optional<UnitRecord> r;
      std::exception_ptr err;
      try {
        r = run_unit(config, todo[static_cast<std::size_t>(i)]);
      } catch (...) {
        err = std::current_exception();
      }
#ifdef _OPENMP
#pragma omp critical(annular_sweep_writer)
#endif
      {
        if (err) {
          if (!error) error = err;
        } else {
          emit(std::move(*r));
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
  if (to_disk && !out) throw IoError("write failed for " + records_file.string());

  rep.records = std::move(done);
  rep.records.insert(rep.records.end(), std::make_move_iterator(fresh.begin()),
                     std::make_move_iterator(fresh.end()));
  sort_unique(rep.records);
  if (to_disk) write_report_files(rep, config.out_dir);
  return rep;
}

SweepReport run_mesh(const SweepConfig& config) {
  if (config.mode != SweepMode::Mesh) throw DomainError("run_mesh needs mesh mode");
  return run_sweep(config);
}

SweepReport run_subdivide(const SweepConfig& config) {
  if (config.mode != SweepMode::Subdivide) throw DomainError("run_subdivide needs subdivide mode");
  return run_sweep(config);
}

SweepReport resume(SweepConfig config, const fs::path& dir) {
  config.out_dir = dir;
  config.resume = true;
  return run_sweep(config);
}

SweepReport load_sweep(const fs::path& dir) {
  SweepReport rep;
  rep.config = SweepConfig::from_json(read_json_file(dir / "config.json"));
  rep.config.out_dir = dir;
  if (!fs::exists(dir / "records.jsonl")) throw IoError("no records.jsonl in " + dir.string());
  rep.records = read_records(dir / "records.jsonl", rep.config.hash());
  sort_unique(rep.records);
  return rep;
}

void write_report_files(const SweepReport& report, const fs::path& dir) {
  write_json_file(dir / "summary.json", report.summary());
  std::ofstream csv(dir / "plot.csv", std::ios::trunc);
  if (!csv) throw IoError("cannot write " + (dir / "plot.csv").string());
  report.write_plot_csv(csv);
  if (!csv) throw IoError("write failed for " + (dir / "plot.csv").string());
}

}  // namespace annular
