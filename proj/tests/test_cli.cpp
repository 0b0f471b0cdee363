#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "test_util.hpp"
#include "unitscheck/cli.hpp"

using namespace unitscheck;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run_mode(CliConfig::Mode mode, const std::vector<std::string>& files,
                   bool json = false, bool burden = false) {
  CliConfig config;
  config.mode = mode;
  config.files = files;
  config.json = json;
  config.show_burden = burden;
  std::ostringstream out;
  std::ostringstream err;
  int code = run(config, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return testutil::fixture_path(name); }

fs::path temp_copy(const std::string& fixture, const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "unitscheck_test";
  fs::create_directories(dir);
  fs::path dst = dir / name;
  fs::copy_file(fx(fixture), dst, fs::copy_options::overwrite_existing);
  return dst;
}

}  // namespace

TEST_CASE("suggest exits 1 when suggestions exist") {
  RunResult r = run_mode(CliConfig::Mode::Suggest, {fx("sample.f90")});
  CHECK(r.code == 1);
  CHECK(r.out.find("2 variable declarations suggested") != std::string::npos);
  CHECK(r.out.find("(3:11)    t") != std::string::npos);
  CHECK(r.err.empty());
}

TEST_CASE("suggest exits 0 when nothing is suggested") {
  RunResult r = run_mode(CliConfig::Mode::Suggest, {fx("sample_xt.f90")});
  CHECK(r.code == 0);
}

TEST_CASE("check verdicts set the exit code") {
  RunResult ok = run_mode(CliConfig::Mode::Check, {fx("annotated_sample.f90")});
  CHECK(ok.code == 0);
  CHECK(ok.out.find(": consistent") != std::string::npos);

  RunResult bad = run_mode(CliConfig::Mode::Check, {fx("conflict.f90")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find(": inconsistent") != std::string::npos);
}

TEST_CASE("missing files and parse errors exit 2 via stderr") {
  RunResult missing = run_mode(CliConfig::Mode::Check, {fx("no_such.f90")});
  CHECK(missing.code == 2);
  CHECK(missing.out.empty());
  CHECK(missing.err.find("cannot read") != std::string::npos);

  fs::path broken = fs::temp_directory_path() / "unitscheck_test" / "broken.f90";
  fs::create_directories(broken.parent_path());
  std::ofstream(broken) << "  real ::\n";
  RunResult parse = run_mode(CliConfig::Mode::Check, {broken.string()});
  CHECK(parse.code == 2);
  CHECK(parse.err.find("expected") != std::string::npos);
}

TEST_CASE("multiple files are reported in argument order with the max exit code") {
  RunResult r = run_mode(CliConfig::Mode::Check, {fx("annotated_sample.f90"), fx("conflict.f90")});
  CHECK(r.code == 1);
  std::size_t first = r.out.find("annotated_sample.f90: consistent");
  std::size_t second = r.out.find("conflict.f90: inconsistent");
  REQUIRE(first != std::string::npos);
  REQUIRE(second != std::string::npos);
  CHECK(first < second);
}

TEST_CASE("repeated runs are byte identical") {
  RunResult a = run_mode(CliConfig::Mode::Infer, {fx("sample_xt.f90")});
  RunResult b = run_mode(CliConfig::Mode::Infer, {fx("sample_xt.f90")});
  CHECK(a.out == b.out);
  CHECK(a.code == b.code);
}

TEST_CASE("infer never writes files") {
  fs::path copy = temp_copy("sample_xt.f90", "infer_input.f90");
  std::string before = testutil::slurp(copy.string());
  RunResult r = run_mode(CliConfig::Mode::Infer, {copy.string()});
  CHECK(r.code == 0);
  CHECK(testutil::slurp(copy.string()) == before);
}

TEST_CASE("synth writes to stdout by default") {
  RunResult r = run_mode(CliConfig::Mode::Synth, {fx("sample_xt.f90")});
  CHECK(r.code == 0);
  CHECK(r.out == testutil::slurp(fx("annotated_sample.f90")));
}

TEST_CASE("synth --in-place rewrites the file") {
  fs::path copy = temp_copy("sample_xt.f90", "inplace.f90");
  CliConfig config;
  config.mode = CliConfig::Mode::Synth;
  config.files = {copy.string()};
  config.in_place = true;
  std::ostringstream out;
  std::ostringstream err;
  CHECK(run(config, out, err) == 0);
  CHECK(out.str().empty());
  CHECK(testutil::slurp(copy.string()) == testutil::slurp(fx("annotated_sample.f90")));
}

TEST_CASE("synth --output writes the given path") {
  fs::path dst = fs::temp_directory_path() / "unitscheck_test" / "synth_out.f90";
  fs::create_directories(dst.parent_path());
  CliConfig config;
  config.mode = CliConfig::Mode::Synth;
  config.files = {fx("sample_xt.f90")};
  config.output_path = dst.string();
  std::ostringstream out;
  std::ostringstream err;
  CHECK(run(config, out, err) == 0);
  CHECK(testutil::slurp(dst.string()) == testutil::slurp(fx("annotated_sample.f90")));

  config.files = {fx("sample_xt.f90"), fx("intro.f90")};
  CHECK(run(config, out, err) == 2);  // --output needs exactly one file
}

TEST_CASE("synth refuses to rewrite inconsistent programs") {
  fs::path copy = temp_copy("conflict.f90", "conflict_copy.f90");
  std::string before = testutil::slurp(copy.string());
  CliConfig config;
  config.mode = CliConfig::Mode::Synth;
  config.files = {copy.string()};
  config.in_place = true;
  std::ostringstream out;
  std::ostringstream err;
  CHECK(run(config, out, err) == 1);
  CHECK(testutil::slurp(copy.string()) == before);
  CHECK(out.str().find("inconsistent") != std::string::npos);
}

TEST_CASE("json suggest output") {
  RunResult r = run_mode(CliConfig::Mode::Suggest, {fx("sample.f90")}, /*json=*/true);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["mode"] == "suggest");
  REQUIRE(doc["entries"].size() == 2);
  CHECK(doc["entries"][0]["name"] == "t");
  CHECK(doc["entries"][0]["line"] == 3);
  CHECK(doc["entries"][0]["column"] == 11);
  CHECK(doc["entries"][1]["name"] == "x");
}

TEST_CASE("json check output") {
  RunResult r = run_mode(CliConfig::Mode::Check, {fx("annotated_sample.f90")}, /*json=*/true);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["mode"] == "check");
  CHECK(doc["verdict"] == "consistent");
  CHECK(doc["conflicts"].empty());

  RunResult bad = run_mode(CliConfig::Mode::Check, {fx("conflict.f90")}, /*json=*/true);
  auto bad_doc = nlohmann::json::parse(bad.out);
  CHECK(bad_doc["verdict"] == "inconsistent");
  REQUIRE(bad_doc["conflicts"].size() == 1);
  CHECK(bad_doc["conflicts"][0]["spans"].size() == 3);
}

TEST_CASE("json infer output") {
  RunResult r = run_mode(CliConfig::Mode::Infer, {fx("sample_xt.f90")}, /*json=*/true);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["mode"] == "infer");
  REQUIRE(doc["entries"].size() == 4);
  std::vector<std::string> units;
  for (const auto& e : doc["entries"]) units.push_back(e["unit"]);
  CHECK(units == std::vector<std::string>{"m**2", "s**2", "('a)**2", "'a"});
  CHECK(doc["entries"][2]["polymorphic"] == true);
  CHECK(doc["underdetermined"].empty());
}

TEST_CASE("json burden output") {
  RunResult r = run_mode(CliConfig::Mode::Suggest, {fx("sample.f90")}, /*json=*/true,
                         /*burden=*/true);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["burden"]["total"] == 5);
  CHECK(doc["burden"]["critical"] == 2);
  CHECK(doc["burden"]["reduction"] == 0.6);
}

TEST_CASE("burden footer renders after the entries") {
  RunResult r = run_mode(CliConfig::Mode::Suggest, {fx("sample.f90")}, /*json=*/false,
                         /*burden=*/true);
  CHECK(r.out.find("    annotation reduction: 0.6 (2 critical of 5 declared)\n") !=
        std::string::npos);
}

TEST_CASE("inconsistent input makes every mode report the conflict") {
  for (CliConfig::Mode mode : {CliConfig::Mode::Suggest, CliConfig::Mode::Infer,
                               CliConfig::Mode::Check, CliConfig::Mode::Synth}) {
    RunResult r = run_mode(mode, {fx("conflict.f90")});
    CHECK(r.code == 1);
    CHECK(r.out.find("inconsistent") != std::string::npos);
  }
}

TEST_CASE("empty file analyzes cleanly in every mode") {
  fs::path empty = fs::temp_directory_path() / "unitscheck_test" / "empty.f90";
  fs::create_directories(empty.parent_path());
  std::ofstream(empty).close();
  CHECK(run_mode(CliConfig::Mode::Suggest, {empty.string()}).code == 0);
  CHECK(run_mode(CliConfig::Mode::Check, {empty.string()}).code == 0);
  CHECK(run_mode(CliConfig::Mode::Infer, {empty.string()}).code == 0);
  RunResult synth = run_mode(CliConfig::Mode::Synth, {empty.string()});
  CHECK(synth.code == 0);
  CHECK(synth.out.empty());
}
