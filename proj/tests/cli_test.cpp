#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "biosec/cli.hpp"
#include "biosec/grid.hpp"

using biosec::cli::run_command;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(const std::vector<std::string>& args) {
  const Outcome o = run(args);
  REQUIRE_MESSAGE(o.code == 0, o.err);
  return json::parse(o.out);
}

double value_of(const json& quantity) { return std::stod(quantity.at("value").get<std::string>()); }

}  // namespace

TEST_CASE("ci command") {
  const json j = run_json({"ci", "--fmr-hat", "0.5", "--n", "10001", "--alpha", "0.05", "--sided", "two"});
  CHECK(j["command"] == "ci");
  CHECK(j["inputs"]["fmr-hat"] == "0.5");
  CHECK(j["inputs"]["n"] == "10001");
  CHECK(j["precision_bits"] == 256);
  CHECK(value_of(j["result"]["upper"]) == doctest::Approx(0.5098).epsilon(1e-4));
  CHECK(j["warnings"].empty());

  const json counts = run_json({"ci", "--false-matches", "0", "--total", "1000"});
  CHECK(counts["result"]["degenerate"] == true);
  CHECK(counts["warnings"].size() == 1);
}

TEST_CASE("attack critical-fmr command") {
  const json j = run_json({"attack", "critical-fmr", "--n-users", "10", "--security-bits", "112"});
  CHECK(value_of(j["result"]["critical_fmr"]) == doctest::Approx(1.335e-35).epsilon(1e-3));
  CHECK(j["result"]["critical_fmr"]["log10"].get<double>() == doctest::Approx(-34.8745).epsilon(1e-5));
  const std::string text = j["result"]["critical_fmr"]["value"];
  CHECK(text.size() == std::string("1.3349529109079848e-35").size());
}

TEST_CASE("birthday exact command") {
  const json j = run_json({"birthday", "exact", "--fmr", "0.2", "--k-users", "5", "--n-users", "3"});
  CHECK(value_of(j["result"]["probability"]) == doctest::Approx(8.0 / 15.0).epsilon(1e-15));
  CHECK(j["result"]["k_pairs"] == 10);
  CHECK(j["result"]["n_pairs"] == 3);
}

TEST_CASE("attack and birthday subcommands") {
  json j = run_json({"attack", "bounds", "--fmr", "1e-3", "--n-users", "10"});
  CHECK(value_of(j["result"]["bounds"]["lower"]) == doctest::Approx(69.2454).epsilon(1e-5));
  CHECK(j["result"]["median_rounds"] == 70);

  j = run_json({"attack", "bounds", "--fmr-hat", "1e-3", "--n", "1000000", "--n-users", "10", "--model", "dependent"});
  CHECK(j["result"]["bounds"]["fmr_basis"] == "ci");
  CHECK(j["result"]["bounds"]["model"] == "dependent");

  j = run_json({"attack", "bounds", "--fmr", "1e-3", "--n-users", "8", "--authentication-mode"});
  CHECK(j["result"]["unit"] == "attempts");

  j = run_json({"attack", "critical-population", "--fmr", "1e-6", "--security-bits", "10"});
  CHECK(j["result"]["n_users"] == 676);

  j = run_json({"attack", "critical-population", "--fmr", "1e-6", "--security-bits", "30"});
  CHECK(j["result"]["unattainable"] == true);
  CHECK(j["warnings"].size() == 1);

  j = run_json({"attack", "paradox-n", "--n-users", "1000", "--security-bits", "50"});
  CHECK(value_of(j["result"]["log2_comparisons"]) > 60.0);

  j = run_json({"birthday", "approx", "--fmr", "1e-6", "--n-users", "1178"});
  CHECK(value_of(j["result"]["probability"]) == doctest::Approx(0.5).epsilon(0.01));

  j = run_json({"birthday", "critical-population", "--fmr", "1e-6", "--p-max", "0.5"});
  CHECK(j["result"]["n_users"] == 1177);

  j = run_json({"birthday", "critical-fmr", "--n-users", "1e9", "--p-max", "0.5"});
  CHECK(value_of(j["result"]["critical_fmr"]) == doctest::Approx(1.386e-18).epsilon(1e-3));

  j = run_json({"birthday", "gap", "--fmr", "1e-3", "--n-users", "10", "--k-users", "1e3,1e4", "--k-users", "1e5,1e6"});
  CHECK(j["result"]["points"].size() == 4);
  CHECK(j["result"]["strictly_decreasing"] == true);
}

TEST_CASE("estimate-fmr reads a score file") {
  const auto path = std::filesystem::temp_directory_path() / "biosec_scores.txt";
  {
    std::ofstream out(path);
    out << "# scores\n0.1\n0.9\n0.5\n0.7\n";
  }
  const json j = run_json({"estimate-fmr", "--scores", path.string(), "--threshold", "0.5"});
  CHECK(value_of(j["result"]["fmr_hat"]) == 0.5);
  CHECK(j["result"]["n"] == 4);
  CHECK(j["result"]["false_matches"] == 2);
  std::filesystem::remove(path);
  CHECK(run({"estimate-fmr", "--scores", path.string(), "--threshold", "0.5"}).code == 2);
}

TEST_CASE("simulate attack command") {
  const std::vector<std::string> args = {"simulate", "attack", "--fmr", "1e-3", "--n-users", "10", "--trials",
                                         "100000", "--seed", "42"};
  const Outcome first = run(args);
  REQUIRE(first.code == 0);
  const json j = json::parse(first.out);
  CHECK(j["result"]["median_rounds"] == 70);
  CHECK(j["result"]["verdict"] == "PASS");
  CHECK(run(args).out == first.out);

  const Outcome zero = run({"simulate", "attack", "--fmr", "1e-3", "--n-users", "10", "--trials", "0", "--seed", "1"});
  CHECK(zero.code == 2);
  CHECK(zero.err.find("trials") != std::string::npos);
}

TEST_CASE("validation failures exit with code 2") {
  CHECK(run({"attack", "critical-fmr", "--n-users", "10"}).code == 2);
  CHECK(run({"attack", "critical-fmr", "--n-users", "10", "--security-bits", "1", "--bogus", "1"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"birthday", "critical-fmr", "--n-users", "1", "--p-max", "0.5"}).code == 2);
  CHECK(run({"attack", "critical-fmr", "--n-users", "abc", "--security-bits", "1"}).code == 2);
  const Outcome dep = run({"attack", "bounds", "--fmr", "0.5", "--n-users", "10", "--model", "dependent"});
  CHECK(dep.code == 2);
  CHECK(dep.err.find("1/(2N)") != std::string::npos);
  CHECK(run({"attack", "bounds", "--n-users", "10"}).code == 2);
  CHECK(run({"--precision-bits", "16", "attack", "critical-fmr", "--n-users", "1", "--security-bits", "1"}).code == 2);
}

TEST_CASE("help exits cleanly") {
  const Outcome o = run({"--help"});
  CHECK(o.code == 0);
  CHECK(o.out.find("attack") != std::string::npos);
}

TEST_CASE("precision is configurable and recorded") {
  json j = run_json({"--precision-bits", "512", "attack", "critical-fmr", "--n-users", "10", "--security-bits", "112"});
  CHECK(j["precision_bits"] == 512);
  ::setenv("BIOSEC_PRECISION_BITS", "128", 1);
  j = run_json({"attack", "critical-fmr", "--n-users", "10", "--security-bits", "112"});
  ::unsetenv("BIOSEC_PRECISION_BITS");
  CHECK(j["precision_bits"] == 128);
}

TEST_CASE("csv output for single results") {
  const Outcome o = run({"--format", "csv", "attack", "critical-fmr", "--n-users", "10", "--security-bits", "112"});
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("field,value,log10\n", 0) == 0);
  CHECK(o.out.find("result.critical_fmr,1.3349529109079848e-35,") != std::string::npos);
}

TEST_CASE("grid command writes the preset CSV") {
  const auto path = std::filesystem::temp_directory_path() / "biosec_cli_grid.csv";
  const json j = run_json({"grid", "--preset", "fig2", "--steps", "5", "--out", path.string()});
  CHECK(j["result"]["rows"] == 25);
  std::ifstream in(path);
  const auto parsed = biosec::grid::read_csv(in);
  CHECK(parsed.cells.size() == 25);
  std::filesystem::remove(path);

  const auto custom = std::filesystem::temp_directory_path() / "biosec_cli_custom.csv";
  const json c = run_json({"grid", "--x-param", "fmr", "--x-min", "-6", "--x-max", "-3", "--x-scale", "log10",
                           "--x-steps", "2", "--y-param", "n_users", "--y-min", "10", "--y-max", "20", "--y-steps",
                           "2", "--value", "birthday_collision_probability", "--out", custom.string()});
  CHECK(c["result"]["rows"] == 4);
  std::filesystem::remove(custom);

  CHECK(run({"grid", "--out", custom.string()}).code == 2);
  CHECK(run({"grid", "--preset", "fig1", "--steps", "2", "--out", "/nonexistent-dir/x.csv"}).code == 1);
}
