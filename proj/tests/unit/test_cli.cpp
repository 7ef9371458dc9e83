#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "hmfx/error.hpp"
#include "hmfx/io.hpp"
#include "hmfx/profile.hpp"

using namespace hmfx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hmfx_cli_test" / name;
  fs::remove_all(dir);
  return dir;
}

int run(const std::string& command, const fs::path& out, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{command, "--out", out.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return cli::run_cli(args);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config parsing") {
    const auto c = cli::RunConfig::parse(
        "# comment\n[problem]\nn = 4   # trailing\nK = 1, 10,100\n\n[grid]\nspacing=0.05\n");
    CHECK(c.integer("problem.n", 3) == 4);
    CHECK(c.numbers("problem.K", {}) == std::vector<double>{1, 10, 100});
    CHECK(c.number("grid.spacing", 0) == 0.05);
    CHECK(c.number("grid.r_max", 40) == 40);
    CHECK(c.to_json()["problem.n"] == "4");
    CHECK_THROWS_AS(cli::RunConfig::parse("[a]\nx = 1\nx = 2\n"), Error);
    CHECK_THROWS_AS(cli::RunConfig::parse("[a\nx = 1\n"), Error);
    CHECK_THROWS_AS(cli::RunConfig::parse("x 1\n"), Error);
    const auto bad = cli::RunConfig::parse("n = 3.5\nv = abc\n");
    CHECK_THROWS_AS(bad.integer("n", 3), Error);
    CHECK_THROWS_AS(bad.number("v", 0), Error);
    CHECK(cli::tolerance_scale("strict") == 0.1);
    CHECK_THROWS_AS(cli::tolerance_scale("sloppy"), Error);
  }

  TEST_CASE("solve-corot outcomes and exit codes") {
    const auto zero = scratch("zero");
    REQUIRE(run("solve-corot", zero, {"--set", "problem.h_inf=0"}) == 0);
    const auto p = read_profile(zero / "profile.csv", zero / "profile.json");
    for (double h : p.h) CHECK(h == 0.0);

    const auto ok = scratch("ok");
    REQUIRE(run("solve-corot", ok, {"--set", "problem.h_inf=0.1"}) == 0);
    const auto s = read_json(ok / "summary.json");
    CHECK(s["status"] == "ok");
    CHECK(s["results"]["residual"].get<double>() < 1e-8);
    CHECK(s["config"]["entries"]["problem.h_inf"] == "0.1");

    const auto far = scratch("far");
    CHECK(run("solve-corot", far, {"--set", "problem.h_inf=3.0"}) == 3);
    const auto f = read_json(far / "summary.json");
    CHECK(f["error"]["kind"] == "not-attained");
    CHECK(f["results"]["reachable_range"][1].get<double>() > 1.5);
    CHECK(f["results"]["reachable_range"][1].get<double>() < 3.0);
  }

  TEST_CASE("configuration errors exit 2 and still write a summary") {
    const auto dir = scratch("bad");
    CHECK(run("solve-corot", dir / "key", {"--set", "problem.nope=1"}) == 2);
    CHECK(read_json(dir / "key" / "summary.json")["exit_code"] == 2);
    CHECK(run("solve-corot", dir / "num", {"--set", "problem.h_inf=abc"}) == 2);
    CHECK(read_json(dir / "num" / "summary.json")["error"]["kind"] == "config");
    CHECK(run("solve-corot", dir / "file", {"--config", (dir / "missing.cfg").string()}) == 2);
    CHECK(fs::exists(dir / "file" / "summary.json"));
    CHECK(cli::run_cli({"no-such-command"}) == 2);
    CHECK(run("solve-corot", dir / "profile", {"--tolerance-profile", "sloppy"}) == 2);
  }

  TEST_CASE("config file is echoed verbatim") {
    const auto dir = scratch("echo");
    fs::create_directories(dir);
    const std::string text = "[problem]\nh_inf = 0.2  # angle at infinity\n";
    std::ofstream(dir / "run.cfg") << text;
    REQUIRE(run("solve-corot", dir / "out", {"--config", (dir / "run.cfg").string()}) == 0);
    const auto s = read_json(dir / "out" / "summary.json");
    CHECK(s["config"]["text"] == text);
    CHECK(s["results"]["h_inf"] == 0.2);
  }

  TEST_CASE("output root from the environment") {
    const auto dir = scratch("env");
    ::setenv("HMFX_OUT", dir.string().c_str(), 1);
    const int code = cli::run_cli({"solve-corot", "--set", "problem.h_inf=0.05"});
    ::unsetenv("HMFX_OUT");
    CHECK(code == 0);
    CHECK(fs::exists(dir / "solve-corot" / "summary.json"));
  }

  TEST_CASE("asymptotics on the equator map") {
    const auto dir = scratch("asym");
    REQUIRE(run("asymptotics", dir, {"--set", "problem.boundary=equator", "--set", "problem.order=3"}) == 0);
    const auto s = read_json(dir / "summary.json");
    const auto& sup = s["results"]["coefficient_sup"];
    REQUIRE(sup.size() == 4);
    for (int i = 1; i <= 3; ++i) CHECK(sup[i].get<double>() < 1e-8);
    CHECK(s["results"]["verdicts"][0]["pass"] == true);
  }

  TEST_CASE("diagnose on the shipped reference profiles") {
    for (const char* name : {"corot_n3_h0.3", "corot_n4_h0.2", "gl_n3_K100_h0.1"}) {
      const auto dir = scratch(std::string("diag_") + name);
      const auto profile = fs::path(HMFX_DATA_DIR) / "reference" / (std::string(name) + ".csv");
      INFO(name);
      REQUIRE(run("diagnose", dir, {"--set", "diagnose.profile=" + profile.string()}) == 0);
      const auto s = read_json(dir / "summary.json");
      CHECK(s["results"]["all_pass"] == true);
      // Every verdict value appears in verdicts.csv.
      const std::string rows = slurp(dir / "verdicts.csv");
      for (const auto& v : s["results"]["verdicts"])
        CHECK(rows.find(v["check"].get<std::string>() + ",") != std::string::npos);
    }
    const auto missing = scratch("diag_missing");
    CHECK(run("diagnose", missing, {"--set", "diagnose.profile=/nonexistent.csv"}) == 2);
  }

  TEST_CASE("sweep fans out and reports partial failure") {
    const auto dir = scratch("sweep");
    REQUIRE(run("sweep", dir, {"--jobs", "2", "--set", "sweep.command=solve-gl", "--set",
                               "sweep.key=problem.K", "--set", "sweep.values=1,10,100"}) == 0);
    const auto m = read_json(dir / "manifest.json");
    REQUIRE(m["children"].size() == 3);
    for (int i = 0; i < 3; ++i) {
      const auto child = read_json(dir / m["children"][i]["dir"].get<std::string>() / "summary.json");
      CHECK(child["exit_code"] == 0);
      CHECK(child["config"]["entries"]["problem.K"] == m["children"][i]["value"]);
    }

    const auto part = scratch("sweep_partial");
    CHECK(run("sweep", part, {"--set", "sweep.command=solve-corot", "--set", "sweep.key=problem.h_inf",
                              "--set", "sweep.values=0.1, 3.0"}) == 4);
    const auto pm = read_json(part / "manifest.json");
    CHECK(pm["children"][0]["exit_code"] == 0);
    CHECK(pm["children"][1]["exit_code"] == 3);
    CHECK(read_json(part / "summary.json")["results"]["succeeded"] == 1);
  }

  TEST_CASE("identical configs give identical CSV bytes") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    for (const auto& d : {a, b}) REQUIRE(run("solve-gl", d, {"--set", "problem.K=1,10"}) == 0);
    CHECK(slurp(a / "profile.csv") == slurp(b / "profile.csv"));
    CHECK(slurp(a / "rungs.csv") == slurp(b / "rungs.csv"));
  }
}
