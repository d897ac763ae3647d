// Drives the built homogeig binary end to end through the shell.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBinary = HOMOGEIG_BINARY;
const std::string kConfigs = HOMOGEIG_CONFIG_DIR;

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void dump(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// A fresh scratch directory per test case.
class Scratch {
 public:
  explicit Scratch(const std::string& name) : dir_(fs::temp_directory_path() / ("homogeig_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }
  fs::path operator/(const std::string& s) const { return dir_ / s; }

  Result run(const std::string& args, const std::string& env = "") const {
    const fs::path o = dir_ / ".stdout", e = dir_ / ".stderr";
    const std::string cmd = "cd '" + dir_.string() + "' && env -u HOMOGEIG_OUT " + env + " '" + kBinary + "' " + args +
                            " >'" + o.string() + "' 2>'" + e.string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
  }

 private:
  fs::path dir_;
};

std::string demo(const std::string& name) { return kConfigs + "/" + name + ".json"; }

json load(const std::string& path) { return json::parse(slurp(path)); }

// Every regular file below `root` except status files, keyed by relative path.
std::map<std::string, std::string> reports(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& f : fs::recursive_directory_iterator(root)) {
    if (!f.is_regular_file()) continue;
    const std::string rel = fs::relative(f.path(), root).string();
    if (rel.find(".status.json") != std::string::npos) continue;
    files[rel] = slurp(f.path());
  }
  return files;
}

std::string config_hash(const Scratch& s, const std::string& config) {
  const Result r = s.run("sweep --config '" + config + "' --out o");
  REQUIRE(r.code == 0);
  const json status = json::parse(slurp(s / "o/demo1d/sweep.status.json"));
  return status.at("config_hash").get<std::string>();
}

}  // namespace

TEST_CASE("solve on the 1D demo prints five eigenvalues and writes both files") {
  Scratch s("solve");
  const Result r = s.run("solve --config '" + demo("demo1d") + "' --out o --bc dirichlet");
  REQUIRE(r.code == 0);
  int rows = 0;
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    std::istringstream cols(line);
    int k = 0;
    double lambda = 0.0;
    if (cols >> k >> lambda && lambda > 0.0) ++rows;
  }
  CHECK(rows == 5);
  CHECK(fs::exists(s / "o/demo1d/solve_dirichlet_averaged.json"));
  const std::string csv = slurp(s / "o/demo1d/solve_dirichlet_averaged.csv");
  CHECK(csv.rfind("experiment,bc,k,epsilon,lambda,tol,solver,wall_ms\n", 0) == 0);
  const json spec = json::parse(slurp(s / "o/demo1d/solve_dirichlet_averaged.json"));
  CHECK(spec.at("spectrum").at("values").size() == 5);
}

TEST_CASE("an invalid boundary tag exits 1 and names the field") {
  Scratch s("badbc");
  json cfg = load(demo("demo1d"));
  cfg["problem"]["bcs"][1] = "bogus";
  dump(s / "bad.json", cfg.dump());
  const Result r = s.run("solve --config bad.json --out o");
  CHECK(r.code == 1);
  CHECK(r.err.find("problem.bcs[1]") != std::string::npos);

  const Result flag = s.run("solve --config '" + demo("demo1d") + "' --out o --bc bogus");
  CHECK(flag.code == 1);
  CHECK(flag.err.find("--bc") != std::string::npos);
}

TEST_CASE("a tiny lambda_cap exits 2 with NO_CONVERGENCE") {
  Scratch s("cap");
  json cfg = load(demo("demo1d"));
  cfg["solver"]["lambda_cap"] = 5.0;
  dump(s / "cap.json", cfg.dump());
  const Result r = s.run("solve --config cap.json --out o --bc dirichlet");
  CHECK(r.code == 2);
  CHECK(r.err.find("NO_CONVERGENCE(1)") != std::string::npos);
}

TEST_CASE("unknown keys are rejected before any computation") {
  Scratch s("unknown");
  json cfg = load(demo("demo1d"));
  cfg["solver"]["tolerance"] = 1e-9;
  dump(s / "unk.json", cfg.dump());
  const Result r = s.run("sweep --config unk.json --out o");
  CHECK(r.code == 1);
  CHECK(r.err.find("solver.tolerance") != std::string::npos);
  CHECK_FALSE(fs::exists(s / "o/cache"));
}

TEST_CASE("sweep then rates produces slopes per condition and k") {
  Scratch s("pipeline");
  REQUIRE(s.run("sweep --config '" + demo("demo1d") + "' --out o").code == 0);
  const Result r = s.run("rates --config '" + demo("demo1d") + "' --out o");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("cache hit") != std::string::npos);
  const json rep = json::parse(slurp(s / "o/demo1d/rates.json"));
  const json cfg = load(demo("demo1d"));
  REQUIRE(rep.at("bcs").size() == cfg["problem"]["bcs"].size());
  for (const auto& b : rep.at("bcs")) {
    CHECK(b.at("cells").size() == 5);
    for (const auto& c : b.at("cells")) CHECK(c.contains("slope"));
  }
}

TEST_CASE("reruns hit the cache and reproduce every report byte for byte") {
  Scratch s("rerun");
  const std::string cfg = " --config '" + demo("demo1d") + "'";
  const char* cmds[] = {"sweep", "rates", "audit", "oscillation", "check-operator", "plot"};
  for (const char* c : cmds) REQUIRE(s.run(std::string(c) + cfg + " --out a").code == 0);
  const auto first = reports(s / "a/demo1d");
  CHECK(first.count("plot_dirichlet.svg") == 1);

  for (const char* c : cmds) {
    const Result r = s.run(std::string(c) + cfg + " --out a");
    REQUIRE(r.code == 0);
    if (std::string(c) == "sweep" || std::string(c) == "oscillation") CHECK(r.out.find("cache hit") != std::string::npos);
  }
  CHECK(reports(s / "a/demo1d") == first);

  for (const char* c : cmds) REQUIRE(s.run(std::string(c) + cfg + " --out b --no-cache --jobs 2").code == 0);
  CHECK(reports(s / "b/demo1d") == first);
  CHECK_FALSE(fs::exists(s / "b/cache"));
}

TEST_CASE("changing any field changes the config hash") {
  Scratch s("hash");
  json cfg = load(demo("demo1d"));
  dump(s / "base.json", cfg.dump());
  const std::string base = config_hash(s, (s / "base.json").string());
  CHECK(base.size() == 64);

  // Reformatting and key order do not matter; the output directory does not either.
  dump(s / "pretty.json", cfg.dump(4));
  CHECK(config_hash(s, (s / "pretty.json").string()) == base);
  json moved = cfg;
  moved["output"] = "elsewhere";
  dump(s / "moved.json", moved.dump());
  CHECK(config_hash(s, (s / "moved.json").string()) == base);

  json tol = cfg;
  tol["solver"]["tol"] = 1e-8;
  dump(s / "tol.json", tol.dump());
  CHECK(config_hash(s, (s / "tol.json").string()) != base);

  json rho = cfg;
  rho["problem"]["rho"]["values"][0] = 1.5;
  dump(s / "rho.json", rho.dump());
  CHECK(config_hash(s, (s / "rho.json").string()) != base);

  const Result seeded = s.run("sweep --config base.json --out o --seed 7");
  REQUIRE(seeded.code == 0);
  const json status = json::parse(slurp(s / "o/demo1d/sweep.status.json"));
  CHECK(status.at("config_hash").get<std::string>() != base);
  CHECK(seeded.out.find("cache miss") != std::string::npos);
}

TEST_CASE("HOMOGEIG_OUT overrides --out") {
  Scratch s("env");
  const Result r = s.run("solve --config '" + demo("demo1d") + "' --out flag", "HOMOGEIG_OUT=fromenv");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(s / "fromenv/demo1d/solve_dirichlet_averaged.json"));
  CHECK_FALSE(fs::exists(s / "flag"));
}

TEST_CASE("audit on the 2D demo writes an all-pass ordering matrix") {
  Scratch s("audit2d");
  const Result r = s.run("audit --config '" + demo("demo2d") + "' --out o");
  REQUIRE(r.code == 0);
  const json rep = json::parse(slurp(s / "o/demo2d/audit.json"));
  REQUIRE(rep.at("checks").size() > 0);
  bool chain_has_steklov = false;
  for (const auto& c : rep.at("checks")) {
    CHECK(c.at("pass").get<bool>());
    if (c.at("relation").get<std::string>().find("steklov") != std::string::npos) chain_has_steklov = true;
  }
  CHECK(chain_has_steklov);
  CHECK(fs::exists(s / "o/demo2d/audit.csv"));
}

TEST_CASE("plot rejects empty and malformed reports") {
  Scratch s("plotbad");
  dump(s / "empty.json", "");
  dump(s / "object.json", "{}");
  for (const char* f : {"empty.json", "object.json", "missing.json"}) {
    const Result r = s.run("plot --config '" + demo("demo1d") + "' --out o --report " + f);
    CHECK(r.code == 1);
    CHECK(r.err.find("--report") != std::string::npos);
  }
}

TEST_CASE("plot output depends only on the report") {
  Scratch s("plotdet");
  REQUIRE(s.run("rates --config '" + demo("demo1d") + "' --out o").code == 0);
  fs::create_directories(s / "copy");
  fs::copy_file(s / "o/demo1d/rates.json", s / "copy/rates.json");
  REQUIRE(s.run("plot --config '" + demo("demo1d") + "' --out o").code == 0);
  REQUIRE(s.run("plot --config '" + demo("demo1d") + "' --out o --report copy/rates.json").code == 0);
  int svgs = 0;
  for (const auto& f : fs::directory_iterator(s / "copy")) {
    if (f.path().extension() != ".svg") continue;
    ++svgs;
    const std::string original = slurp(s / "o/demo1d" / f.path().filename());
    CHECK(original == slurp(f.path()));
    CHECK(original.rfind("<?xml", 0) == 0);
  }
  CHECK(svgs == 4);
}
