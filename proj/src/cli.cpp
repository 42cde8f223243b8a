#include "annular/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "annular/certificate.hpp"
#include "annular/diffusion.hpp"
#include "annular/dsf.hpp"
#include "annular/errors.hpp"
#include "annular/format.hpp"
#include "annular/maps.hpp"
#include "annular/sweep.hpp"

namespace annular {

namespace {

std::vector<double> parse_list(const std::string& s, std::size_t n, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.size() != n)
    throw ParseError(std::string(what) + " needs " + std::to_string(n) + " comma separated values");
  return out;
}

void print_certificate(std::ostream& out, const Certificate& cert) {
  out << "h0=" << format_interval(cert.solution()[0]) << '\n'
      << "h1=" << format_interval(cert.h1_enclosure) << '\n'
      << "endpoint_y=" << format_interval(cert.endpoint_enclosure[1]) << '\n';
}

int finish_diffusion(std::ostream& out, const DiffusionResult& r, std::optional<int> rho,
                     const std::string& cert_path) {
  out << "status=" << to_string(r.status) << '\n'
      << "N=" << format_interval(r.thresholds.N) << '\n'
      << "M=" << format_interval(r.thresholds.M) << '\n'
      << "B=" << format_double(r.thresholds.B) << '\n';
  if (r.status != DiffusionStatus::Verified) {
    if (!r.reason.empty()) out << "reason=" << r.reason << '\n';
    return kExitNotValidated;
  }
  out << "m=" << r.m << '\n' << "x_start=" << format_double(r.x_start) << '\n';
  print_certificate(out, *r.certificate);
  write_json_file(cert_path, diffusion_certificate(r, rho));
  out << "cert=" << cert_path << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified diffusion and rotational chaos for annulus maps", "annular"};
  // vsf takes --h, so help is --help only; subcommands inherit this.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  std::string h, v, json_path, c_text;
  std::optional<double> seed_x;
  int rho = 0, max_m = 0, grid = 10000;
  auto* vsf = app.add_subcommand("vsf", "certify diffusion for a standard family variation");
  vsf->add_option("--h", h, "horizontal shear: id|sin")->required();
  vsf->add_option("--v", v, "vertical kick: lin|quad|tan|log|exp")->required();
  vsf->add_option("--seed-x", seed_x, "start the search near this x on y = -B");
  vsf->add_option("--json", json_path, "certificate output path");
  vsf->add_option("--rho", rho, "rotational difference for the non-twist maps (default 2)");
  vsf->add_option("--c", c_text, "override c, e.g. 0.5 or [lo,hi]");
  vsf->add_option("--max-m", max_m, "iterate cap (default 50)");
  vsf->add_option("--grid", grid, "start points scanned on y = -B");

  std::string a_text, b_text;
  auto* ntsf = app.add_subcommand("ntsf", "certify diffusion for the non-twist standard family");
  ntsf->add_option("--a", a_text, "a > 0")->required();
  ntsf->add_option("--b", b_text, "b")->required();
  ntsf->add_option("--max-m", max_m, "iterate cap (default 300)");
  ntsf->add_option("--grid", grid, "start points scanned on y = -B");
  ntsf->add_option("--json", json_path, "certificate output path");

  std::optional<int> kappa;
  auto* dsf = app.add_subcommand("dsf", "certify a rotational horseshoe for the dissipative family");
  dsf->add_option("--a", a_text, "a > 2, a number or [lo,hi]")->required();
  dsf->add_option("--b", b_text, "0 < b < 1, a number or [lo,hi]")->required();
  dsf->add_option("--kappa", kappa, "only try this rotation");
  dsf->add_option("--json", json_path, "certificate output path");

  std::string map_text, csv_path;
  double x = 0, y = 0;
  int n = 0;
  auto* orbit = app.add_subcommand("orbit", "floating-point orbit (not rigorous)");
  orbit->add_option("--map", map_text, "map spec, e.g. ntsf:a=0.5,b=0.5")->required();
  orbit->add_option("--x", x)->required();
  orbit->add_option("--y", y)->required();
  orbit->add_option("--n", n, "number of iterates")->required()->check(CLI::NonNegativeNumber);
  orbit->add_option("--csv", csv_path, "output path (stdout when absent)");

  std::string family, region, grid_text, out_dir;
  bool subdivide = false, resume_flag = false, no_certs = false, serial = false;
  int depth = 3, workers = 0, search_grid = 10000;
  double budget = 60.0;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep");
  sweep->add_option("--family", family, "ntsf|dsf")->required();
  sweep->add_option("--region", region, "x0,x1,y0,y1")->required();
  sweep->add_option("--grid", grid_text, "NX,NY")->required();
  sweep->add_flag("--subdivide", subdivide, "validate boxes with adaptive subdivision");
  sweep->add_option("--depth", depth, "maximal subdivision depth");
  sweep->add_option("--workers", workers, "worker threads (0 = default)");
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_flag("--resume", resume_flag, "continue a previous run in --out");
  sweep->add_option("--budget", budget, "seconds per unit, 0 for none");
  sweep->add_option("--max-m", max_m, "NTSF iterate cap");
  sweep->add_option("--search-grid", search_grid, "NTSF start points per mesh point");
  sweep->add_flag("--no-certs", no_certs, "do not write certificate files");
  sweep->add_flag("--serial", serial, "run the serial reference loop");

  std::string cert_file;
  auto* re = app.add_subcommand("recheck", "audit a certificate");
  re->add_option("--cert", cert_file)->required();

  std::string dir;
  auto* report = app.add_subcommand("report", "rebuild summary.json and plot.csv");
  report->add_option("--dir", dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "annular: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (vsf->parsed()) {
      const HChoice hc = parse_hchoice(h);
      const VChoice vc = parse_vchoice(v);
      const MapSpec map = MapSpec::vsf(
          hc, vc, c_text.empty() ? std::nullopt : std::optional<Interval>(parse_interval(c_text)));
      std::optional<int> r;
      if (hc == HChoice::Sine) r = rho > 0 ? rho : 2;
      DiffusionOptions opts;
      opts.max_m = max_m;
      opts.grid = grid;
      opts.seed = seed_x;
      const DiffusionResult res = validate_diffusion(map, r, opts);
      out << "map=" << map.to_string() << '\n';
      return finish_diffusion(out, res, r,
                              json_path.empty() ? "vsf_" + h + "_" + v + ".cert.json" : json_path);
    }
    if (ntsf->parsed()) {
      const Interval a = parse_interval(a_text);
      const Interval b = parse_interval(b_text);
      const MapSpec map = MapSpec::ntsf(a, b);
      DiffusionOptions opts;
      opts.max_m = max_m;
      opts.grid = grid;
      const DiffusionResult res = validate_diffusion(map, std::nullopt, opts);
      out << "map=" << map.to_string() << '\n';
      return finish_diffusion(out, res, std::nullopt,
                              json_path.empty() ? "ntsf.cert.json" : json_path);
    }
    if (dsf->parsed()) {
      DsfOptions opts;
      opts.kappa = kappa;
      const DsfResult res = validate_dsf(parse_interval(a_text), parse_interval(b_text), opts);
      if (!res.chaos) {
        out << "status=Failed\n" << "reason=" << res.reason << '\n';
        return kExitNotValidated;
      }
      const DsfCase& c = *res.dsf_case;
      out << "status=Chaos\n"
          << "map=" << c.map().to_string() << '\n'
          << "kappa=" << res.kappa << '\n'
          << "N=" << c.N << '\n'
          << "B=" << format_double(c.B) << '\n';
      for (const auto& b : res.branches)
        out << "branch=" << to_string(b.which) << '/' << to_string(b.direction)
            << " m=" << b.problem->m << " h0=" << format_interval(b.h0) << " endpoint_y="
            << format_interval(b.certificate->endpoint_enclosure[1]) << '\n';
      const std::string path = json_path.empty() ? "dsf.cert.json" : json_path;
      write_json_file(path, dsf_certificate(res));
      out << "cert=" << path << '\n';
      return kExitOk;
    }
    if (orbit->parsed()) {
      const MapSpec map = MapSpec::parse(map_text);
      std::ofstream file;
      if (!csv_path.empty()) {
        file.open(csv_path);
        if (!file) throw IoError("cannot write " + csv_path);
      }
      std::ostream& os = csv_path.empty() ? out : file;
      os << "i,x,y\n";
      Point p{x, y};
      for (int i = 0; i <= n; ++i) {
        os << i << ',' << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
        if (i < n) p = eval_point(map, p);
      }
      if (!os) throw IoError("write failed");
      return kExitOk;
    }
    if (sweep->parsed()) {
      SweepConfig cfg;
      if (family == "ntsf") {
        cfg.family = SweepFamily::NTSF;
      } else if (family == "dsf") {
        cfg.family = SweepFamily::DSF;
      } else {
        throw ParseError("--family must be ntsf or dsf");
      }
      const auto r = parse_list(region, 4, "--region");
      cfg.x0 = r[0];
      cfg.x1 = r[1];
      cfg.y0 = r[2];
      cfg.y1 = r[3];
      const auto g = parse_list(grid_text, 2, "--grid");
      if (g[0] != std::floor(g[0]) || g[1] != std::floor(g[1]) || g[0] > 1e6 || g[1] > 1e6)
        throw ParseError("--grid needs integers");
      cfg.nx = static_cast<int>(g[0]);
      cfg.ny = static_cast<int>(g[1]);
      cfg.mode = subdivide ? SweepMode::Subdivide : SweepMode::Mesh;
      cfg.max_depth = depth;
      cfg.workers = workers;
      cfg.out_dir = out_dir;
      cfg.resume = resume_flag;
      cfg.unit_budget_s = budget;
      cfg.max_m = max_m;
      cfg.search_grid = search_grid;
      cfg.write_certs = !no_certs;
      cfg.exec = serial ? kernels::Exec::Serial : kernels::Exec::Auto;
      const SweepReport rep = run_sweep(cfg);
      out << rep.summary().dump(2) << '\n';
      return kExitOk;
    }
    if (re->parsed()) {
      const RecheckReport rep = recheck(read_json_file(cert_file));
      for (const auto& s : rep.notes) out << "note: " << s << '\n';
      if (!rep.ok) {
        for (const auto& s : rep.failures) out << "FAIL: " << s << '\n';
        out << "recheck failed\n";
        return kExitNotValidated;
      }
      out << "recheck ok\n";
      return kExitOk;
    }
    if (report->parsed()) {
      const SweepReport rep = load_sweep(dir);
      write_report_files(rep, dir);
      out << rep.summary().dump(2) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "annular: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace annular
