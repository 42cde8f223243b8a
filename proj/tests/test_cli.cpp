#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "annular/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

std::string binary() {
  const char* p = std::getenv("ANNULAR_CLI");
  REQUIRE_MESSAGE(p != nullptr, "ANNULAR_CLI must point at the annular executable");
  return p;
}

fs::path scratch() {
  const fs::path p = fs::temp_directory_path() / "annular_test_cli";
  fs::create_directories(p);
  return p;
}

Run run(const std::string& args) {
  const std::string cmd = "cd '" + scratch().string() + "' && '" + binary() + "' " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string value_of(const std::string& out, const std::string& key) {
  std::istringstream is(out);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == annular::kExitUsage);
  CHECK(run("bogus").code == annular::kExitUsage);
  CHECK(run("vsf --h id").code == annular::kExitUsage);
  CHECK(run("vsf --h nope --v lin").code == annular::kExitUsage);
  CHECK(run("orbit --map ntsf:a=-1,b=0 --x 0 --y 0 --n 2").code == annular::kExitUsage);
  CHECK(run("--help").code == annular::kExitOk);
}

TEST_CASE("twist family certificate from the command line") {
  const Run r = run("vsf --h id --v lin --seed-x 0.2647");
  REQUIRE(r.code == annular::kExitOk);
  CHECK(value_of(r.out, "status") == "Verified");
  CHECK(value_of(r.out, "m") == "11");
  const std::string cert = value_of(r.out, "cert");
  CHECK(cert == "vsf_id_lin.cert.json");
  REQUIRE(fs::exists(scratch() / cert));

  const Run ok = run("recheck --cert " + cert);
  CHECK(ok.code == annular::kExitOk);
  CHECK(ok.out.find("recheck ok") != std::string::npos);

  // Perturb one endpoint of the stored solution box.
  nlohmann::json j;
  std::ifstream(scratch() / cert) >> j;
  auto& box = j["shooting"]["box"];
  std::string first = box[0].get<std::string>();
  box[0] = "[0.25,0.25]";
  CHECK(box[0].get<std::string>() != first);
  std::ofstream(scratch() / "tampered.json") << j.dump(2);
  const Run bad = run("recheck --cert tampered.json");
  CHECK(bad.code == annular::kExitNotValidated);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  CHECK(bad.out.find("residual violation") != std::string::npos);
}

TEST_CASE("integrable NTSF fails validation with exit 1") {
  const Run r = run("ntsf --a 0.3 --b 0 --grid 500");
  CHECK(r.code == annular::kExitNotValidated);
  CHECK(value_of(r.out, "status") == "NoCandidate");
}

TEST_CASE("orbit output") {
  const Run zero = run("orbit --map ntsf:a=0.5,b=0.25 --x 0.1 --y 0.2 --n 0");
  REQUIRE(zero.code == 0);
  CHECK(zero.out == "i,x,y\n0,0.1,0.2\n");
  const Run many = run("orbit --map dsf:a=4,b=0.5 --x 0.3 --y 0.7 --n 25 --csv orbit.csv");
  REQUIRE(many.code == 0);
  std::ifstream in(scratch() / "orbit.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 26);
}

TEST_CASE("dissipative certificate and audit") {
  const Run r = run("dsf --a 5 --b 0.3");
  REQUIRE(r.code == annular::kExitOk);
  CHECK(value_of(r.out, "status") == "Chaos");
  CHECK(value_of(r.out, "kappa") == "1");
  CHECK(value_of(r.out, "N") == "18");
  CHECK(run("recheck --cert dsf.cert.json").code == annular::kExitOk);
}

TEST_CASE("sweep and report") {
  const fs::path dir = scratch() / "sweep";
  fs::remove_all(dir);
  const Run r = run("sweep --family ntsf --region 0.4,1,0.5,1 --grid 2,2 --search-grid 1000 "
                    "--budget 0 --out sweep");
  REQUIRE(r.code == 0);
  const auto s = nlohmann::json::parse(r.out);
  CHECK(s.at("total") == 4);
  CHECK(s.at("verified") == 3);
  const Run rep = run("report --dir sweep");
  REQUIRE(rep.code == 0);
  CHECK(nlohmann::json::parse(rep.out) == s);
  CHECK(run("sweep --family ntsf --region 0.4,1,0.5,1 --grid 3,2 --out sweep --resume").code ==
        annular::kExitUsage);
}
