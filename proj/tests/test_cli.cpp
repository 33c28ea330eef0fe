#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dflab/commands.hpp"
#include "dflab/error.hpp"
#include "dflab/schema.hpp"

using namespace dflab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dflab_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& cmd, const nlohmann::json& cfg, const fs::path& dir, std::string* err_text = nullptr) {
  const auto path = dir / "config.json";
  std::ofstream(path) << cfg.dump();
  CliOverrides ov;
  ov.out = (dir / "out").string();
  std::ostringstream out, err;
  const int code = run_command(cmd, path, ov, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("schema fills every default and rejects unknown keys") {
  const auto cfg = load_experiment_config(nlohmann::json::object());
  CHECK(cfg["model"]["n"] == 1);
  CHECK(cfg["model"]["metric"]["type"] == "fubini-study");
  CHECK(cfg["quadrature"]["resolution"] == 32);
  CHECK(cfg["tolerances"]["mass"] == 1e-6);
  CHECK(cfg["tolerances"]["newton"] == 1e-12);
  CHECK(cfg["s_grid"].size() == 13);
  CHECK_THROWS_AS(load_experiment_config({{"model", {{"n", "two"}}}}), ConfigError);
  CHECK_THROWS_AS(load_experiment_config({{"extra", 1}}), ConfigError);
  CHECK_THROWS_AS(load_experiment_config({{"tolerances", {{"alignment", 1e-3}}}}), ConfigError);
  CHECK_THROWS_AS(load_experiment_config({{"model", {{"metric", {{"eps", 0.5}}}}}}), ConfigError);
}

TEST_CASE("every tolerance property carries a default") {
  for (const auto& [name, sub] : experiment_schema()["properties"]["tolerances"]["properties"].items())
    CHECK_MESSAGE(sub.contains("default"), name);
}

TEST_CASE("validator reports paths") {
  const auto errors = validate(experiment_schema(), {{"quadrature", {{"resolution", 0}}}});
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("/quadrature/resolution") == 0);
}

TEST_CASE("gram writes the closed-form diagonal for P1 at ell = 2") {
  const auto dir = scratch("gram");
  CHECK(run("gram", {{"exponents", {2}}}, dir) == kExitOk);
  const auto report = read_json(dir / "out" / "report.json");
  CHECK(report["passed"] == true);
  CHECK(report["checks"].size() == 2);
  std::ifstream csv(dir / "out" / "gram_ell2.csv");
  std::string header, line;
  std::getline(csv, header);
  CHECK(header == "row,col,re,im");
  std::vector<double> diag;
  while (std::getline(csv, line)) {
    int r, c;
    double re, im;
    char comma;
    std::istringstream ls(line);
    ls >> r >> comma >> c >> comma >> re >> comma >> im;
    if (r == c) diag.push_back(re);
  }
  REQUIRE(diag.size() == 3);
  CHECK(diag[0] == doctest::Approx(1.0 / 3));
  CHECK(diag[1] == doctest::Approx(1.0 / 6));
  CHECK(diag[2] == doctest::Approx(1.0 / 3));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  std::string err;
  CHECK(run("gram", {{"exponents", {8}}, {"quadrature", {{"resolution", 2}}}}, dir, &err) == kExitNumerical);
  CHECK(err.find("exactness") != std::string::npos);
  CHECK(run("gram", {{"exponents", {2}}, {"tolerances", {{"gram_closed_form", 1e-300}}}}, dir) == kExitCheckFailed);
  CHECK(run("f1", {{"sequence", {{"generator", "trivial"}, {"exponents", {4, 2}}}}}, dir) == kExitConfig);
  CHECK(run("df", {{"df", {{"samples", {{{"ell", 1}, {"N", 2}, {"w", 1}}}}}}}, dir) == kExitConfig);
  CHECK(run("nope", nlohmann::json::object(), dir) == kExitConfig);
  CHECK(run("f1", {{"sequence", {{"generator", "trivial"}, {"exponents", {2, 4}}}}}, dir) == kExitOk);
  CHECK(read_json(dir / "out" / "f1.json")["estimate"] == 0.0);
}

TEST_CASE("df from explicit samples emits exact rationals") {
  const auto dir = scratch("df");
  const nlohmann::json samples = {{{"ell", 1}, {"N", 2}, {"w", 1}},
                                  {{"ell", 2}, {"N", 3}, {"w", 4}},
                                  {{"ell", 3}, {"N", 4}, {"w", 9}}};
  CHECK(run("df", {{"df", {{"samples", samples}}}}, dir) == kExitOk);
  const auto j = read_json(dir / "out" / "df.json");
  CHECK(j["df"]["F1"] == "-1");
  CHECK(j["df"]["F0"] == "1");
}
