#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "phaseforge-cli-tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Shell out to the built binary; stdout/stderr captured through temp files.
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const auto out_path = scratch_dir() / ("out." + std::to_string(counter));
  const auto err_path = scratch_dir() / ("err." + std::to_string(counter));
  ++counter;
  const std::string cmd = env_prefix + " " + std::string(PHASEFORGE_BIN) + " " + args + " > " +
                          out_path.string() + " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

}  // namespace

TEST_CASE("build writes a canonical family file with a member preview") {
  const auto r = run_cli("build " + quoted(R"({"kind":"nathanson","r":3,"W":[2]})"));
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("family").at("kind") == "nathanson");
  const auto preview = j.at("preview");
  REQUIRE(preview.size() >= 4);
  CHECK(preview[0] == "3");
  CHECK(preview[1] == "4");
  CHECK(preview[2] == "12");
  CHECK(preview[3] == "15");
}

TEST_CASE("build round trip is byte-identical") {
  const auto family_file = scratch_dir() / "family.json";
  const auto first = run_cli("build " + quoted(R"({"kind":"lemma3s","s":3})") + " --out " + family_file.string());
  CHECK(first.exit_code == 0);
  const auto text = slurp(family_file);
  // building from the written file reproduces it exactly
  const auto second = run_cli("build " + family_file.string());
  CHECK(second.exit_code == 0);
  CHECK(second.out == text);
}

TEST_CASE("build rejects invalid descriptors with exit 2 and a named field") {
  const auto even_s = run_cli("build " + quoted(R"({"kind":"lemma2s","s":4})"));
  CHECK(even_s.exit_code == 2);
  CHECK(even_s.err.find("s must be odd") != std::string::npos);

  const auto empty_w = run_cli("build " + quoted(R"({"kind":"naturals_except","W":[]})"));
  CHECK(empty_w.exit_code == 2);
  CHECK(empty_w.err.find("W must be nonempty") != std::string::npos);

  const auto garbage = run_cli("build " + quoted(R"({"kind":)"));
  CHECK(garbage.exit_code == 2);
}

TEST_CASE("table emits certified entries") {
  const auto r = run_cli("table " + quoted(R"({"kind":"naturals_except","W":[5]})") +
                         " --window 10 --cap 3 --no-cache");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("window") == 10);
  CHECK(j.at("cap") == 3);
  CHECK(j.at("certified") == true);
  bool found_five = false, found_zero = false;
  for (const auto& row : j.at("entries")) {
    if (row[0].at("free")[0] == "5") {
      CHECK(row[1] == 2);
      found_five = true;
    }
    if (row[0].at("free")[0] == "0") {
      CHECK(row[1] == 0);
      found_zero = true;
    }
  }
  CHECK(found_five);
  CHECK(found_zero);
}

TEST_CASE("forced truncation is stamped uncertified") {
  const auto r = run_cli("table " + quoted(R"({"kind":"nathanson","r":3,"W":[2]})") +
                         " --window 6 --cap 3 --K 1");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("certified") == false);
  CHECK(j.at("K") == 1);
  const auto csv = run_cli("table " + quoted(R"({"kind":"nathanson","r":3,"W":[2]})") +
                           " --window 6 --cap 3 --K 1 --format csv");
  CHECK(csv.out.find("uncertified") != std::string::npos);
}

TEST_CASE("cache round trip: cached retrieval equals recomputation") {
  const auto cache_dir = scratch_dir() / "cache";
  const std::string env = "PHASEFORGE_CACHE=" + cache_dir.string();
  const std::string args = "table " + quoted(R"({"kind":"one_union_multiples","m":4})") + " --window 8 --cap 4";
  const auto first = run_cli(args, env);
  CHECK(first.exit_code == 0);
  CHECK(fs::exists(cache_dir));
  bool has_entry = false;
  for (const auto& entry : fs::directory_iterator(cache_dir)) has_entry |= entry.is_regular_file();
  CHECK(has_entry);
  const auto second = run_cli(args, env);
  CHECK(second.exit_code == 0);
  CHECK(second.out == first.out);
  const auto uncached = run_cli(args + " --no-cache", env);
  CHECK(uncached.out == first.out);
}

TEST_CASE("stale or corrupt cache entries are ignored") {
  const auto cache_dir = scratch_dir() / "cache-corrupt";
  const std::string env = "PHASEFORGE_CACHE=" + cache_dir.string();
  const std::string args = "table " + quoted(R"({"kind":"naturals_except","W":[2]})") + " --window 5 --cap 3";
  const auto first = run_cli(args, env);
  CHECK(first.exit_code == 0);
  for (const auto& entry : fs::directory_iterator(cache_dir)) {
    std::ofstream clobber(entry.path(), std::ios::trunc);
    clobber << "{\"version\":\"other/9\"}";
  }
  const auto second = run_cli(args, env);
  CHECK(second.exit_code == 0);
  CHECK(second.out == first.out);
}

TEST_CASE("transition reports phase transitions") {
  const auto r = run_cli("transition " + quoted(R"({"kind":"lemma2s","s":3})") + " --windows 4,6,8 --cap 3");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("r") == 2);
  CHECK(j.at("s") == 3);

  const auto axes = run_cli("transition " + quoted(R"({"kind":"coordinate_axes","r":2})") +
                            " --windows 3,5,8 --cap 4");
  CHECK(axes.exit_code == 0);
  CHECK(nlohmann::json::parse(axes.out).at("s") == "window-growing");
}

TEST_CASE("transition surfaces consistency violations as exit 3") {
  const auto r = run_cli("transition " + quoted(R"({"kind":"naturals_except","W":[2,9]})") +
                         " --windows 3,4,10 --cap 3");
  CHECK(r.exit_code == 3);
}

TEST_CASE("verify runs expectation files") {
  const auto expect_path = scratch_dir() / "expect.json";
  {
    std::ofstream out(expect_path);
    out << R"({"r":2,"s":4,"set":{"type":"w_symmetric","W":[3,7]}})";
  }
  const auto pass = run_cli("verify --family " + quoted(R"({"kind":"naturals_except","W":[3,7]})") +
                            " --expect " + expect_path.string() + " --windows 10,20,40 --cap 3");
  CHECK(pass.exit_code == 0);
  const auto fail = run_cli("verify --family " + quoted(R"({"kind":"naturals_except","W":[3,8]})") +
                            " --expect " + expect_path.string() + " --windows 10,20,40 --cap 3");
  CHECK(fail.exit_code == 1);
  CHECK(fail.out.find("FAIL") != std::string::npos);
}

TEST_CASE("unknown suite exits 2") {
  const auto r = run_cli("verify no-such-suite");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("unknown suite") != std::string::npos);
}

TEST_CASE("named suite runs end to end") {
  const auto r = run_cli("verify lemma2s");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("ALL PASS") != std::string::npos);
}

TEST_CASE("profile emits the CSV contract") {
  const auto r = run_cli("profile " + quoted(R"({"kind":"one_union_multiples","m":5})") +
                         " --windows 15,20,25 --cap 4");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("radius,window,count,class\n", 0) == 0);
  CHECK(r.out.find("0,15,1,finite-stable") != std::string::npos);
  CHECK(r.out.find("window-growing") != std::string::npos);
}

TEST_CASE("counting subcommand") {
  const auto r = run_cli("counting " + quoted(R"({"kind":"one_union_multiples","m":5})") + " --t 20 --format text");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "5\n");
  const auto bad = run_cli("counting " + quoted(R"({"kind":"primes"})") + " --t 20");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("repeated runs are byte-identical") {
  const std::string args = "transition " + quoted(R"({"kind":"nathanson","r":3,"W":[2]})") +
                           " --windows 4,12,15 --cap 3";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("table").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("table " + quoted(R"({"kind":"primes"})") + " --window 5 --cap 3 --format yaml").exit_code == 2);
}
