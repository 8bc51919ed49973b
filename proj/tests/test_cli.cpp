#include "fbmcalc/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace fbmcalc;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "fbmcalc_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(FBMCALC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

std::string dir(const std::string& name) { return (kWork / name).string(); }

struct Scratch {
  Scratch() { fs::remove_all(kWork); }
  ~Scratch() { fs::remove_all(kWork); }
};

}  // namespace

TEST_CASE("generate is deterministic and hashed") {
  Scratch s;
  const std::string args = "generate --hurst 0.75 --steps 1024 --tmax 1 --seed 42 --out ";
  REQUIRE(run(args + dir("a")) == 0);
  REQUIRE(run(args + dir("b")) == 0);
  const std::string a = slurp(kWork / "a" / "path_0000.csv");
  CHECK(a == slurp(kWork / "b" / "path_0000.csv"));
  CHECK(a.rfind("#hurst=0.75\n#seed=42\n", 0) == 0);
  CHECK(a.find("\nt,value\n") != std::string::npos);

  const Json m = Json::parse(slurp(kWork / "a" / "manifest.json"));
  REQUIRE(m["artifacts"].size() == 1);
  CHECK(m["artifacts"][0]["path"] == "path_0000.csv");
  CHECK(m["artifacts"][0]["sha256"] == sha256_hex(a));
  CHECK(Json::parse(slurp(kWork / "b" / "manifest.json"))["artifacts"] == m["artifacts"]);
}

TEST_CASE("usage errors exit with 2") {
  Scratch s;
  CHECK(run("generate --hurst 1.5 --out " + dir("x")) == 2);
  CHECK(run("verify --suite E99 --out " + dir("v")) == 2);
  CHECK(run("no-such-command") == 2);
  spit(kWork / "bad.csv", "t,value\n0,0\n0.5,oops\n");
  CHECK(run("stats --input " + dir("bad.csv")) == 2);
  spit(kWork / "short.csv", "t,value\n0,0\n0.1,1\n0.2,0\n0.3,1\n0.4,0\n0.5,1\n0.6,0\n0.7,1\n0.8,0\n0.9,1\n");
  CHECK(run("stats --input " + dir("short.csv") + " --estimators rs") == 2);
}

TEST_CASE("config file with flag override") {
  Scratch s;
  spit(kWork / "run.cfg", "# test\nhurst=0.25\nsteps=128\nseed=3\nreplicates=2\n");
  REQUIRE(run("generate --config " + dir("run.cfg") + " --hurst 0.75 --out " + dir("c")) == 0);
  const std::string p0 = slurp(kWork / "c" / "path_0000.csv");
  CHECK(p0.rfind("#hurst=0.75\n#seed=3\n", 0) == 0);
  CHECK(fs::exists(kWork / "c" / "path_0001.csv"));
  const ImportedSeries series = parse_series_csv(p0);
  CHECK(series.values.size() == 129);
}

TEST_CASE("stats round trip on an exported path") {
  Scratch s;
  REQUIRE(run("generate --hurst 0.75 --steps 16384 --generator fbm-circulant --seed 9 --out " + dir("g")) == 0);
  REQUIRE(run("stats --input " + dir("g/path_0000.csv") + " --estimators rs,vi,qv --out " + dir("s")) == 0);
  const Json r = Json::parse(slurp(kWork / "s" / "stats.json"));
  const double rs = r["estimates"]["rs"]["h_hat"];
  const double vi = r["estimates"]["vi"]["h_hat"];
  CHECK(std::abs(rs - 0.75) <= 0.1);
  CHECK(vi >= 0.6);
  CHECK(vi <= 0.9);
  CHECK(r["estimates"]["qv"].get<double>() < 0.05);
}

TEST_CASE("verify writes records, summary and manifest") {
  Scratch s;
  REQUIRE(run("verify --suite E2 --out " + dir("v")) == 0);
  const Json rec = Json::parse(slurp(kWork / "v" / "E2.json"));
  CHECK(rec["id"] == "E2");
  CHECK(rec["verdict"] == "pass");
  const std::string csv = slurp(kWork / "v" / "summary.csv");
  CHECK(csv.rfind("experiment,check,target,estimate,tolerance,relation,verdict\n", 0) == 0);
  const Json m = Json::parse(slurp(kWork / "v" / "manifest.json"));
  CHECK(m["all_pass"] == true);
  CHECK(m["artifacts"].size() == 2);
}
