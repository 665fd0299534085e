#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "biosec/error.hpp"
#include "biosec/grid.hpp"

using namespace biosec;
using namespace biosec::grid;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path temp_path(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_CASE("axis coordinates and values") {
  const Context ctx;
  const Axis lin{"security_bits", 0.0, 256.0, Scale::linear, 257};
  CHECK(lin.coordinate(0) == 0.0);
  CHECK(lin.coordinate(112) == 112.0);
  CHECK(lin.coordinate(256) == 256.0);
  const Axis lg{"n_users", 0.0, 10.0, Scale::log10, 11};
  CHECK(lg.parameter_value(ctx, 1) == 10.0);
  CHECK(lg.parameter_value(ctx, 9) == 1e9);
  CHECK(parse_scale("log10") == Scale::log10);
  CHECK_THROWS_AS(parse_scale("ln"), PreconditionError);
}

TEST_CASE("spec validation") {
  GridSpec spec{Axis{"n_users", 0.0, 1.0, Scale::log10, 2}, Axis{"security_bits", 0.0, 1.0, Scale::linear, 2}, {},
                "log10_critical_fmr"};
  CHECK_NOTHROW(spec.validate());
  auto bad = spec;
  bad.x.steps = 1;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = spec;
  bad.y.max = bad.y.min;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = spec;
  bad.y.parameter = "n_users";
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = spec;
  bad.output_value = "log10_critical_population";
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = spec;
  bad.fixed["n_users"] = "3";
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = spec;
  bad.fixed["colour"] = "3";
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  CHECK_THROWS_AS(preset("fig4"), PreconditionError);
}

TEST_CASE("figure-1 style cell at N = 10, S = 2^112") {
  const Context ctx;
  const GridSpec spec{Axis{"n_users", 0.0, 10.0, Scale::log10, 11}, Axis{"security_bits", 0.0, 256.0, Scale::linear, 257},
                      {}, "log10_critical_fmr"};
  const auto cells = evaluate_grid(spec, ctx);
  REQUIRE(cells.size() == 11 * 257);
  const Cell& cell = cells[112 * 11 + 1];
  CHECK(cell.x == 1.0);
  CHECK(cell.y == 112.0);
  CHECK(cell.value == doctest::Approx(-34.8745).epsilon(1e-5));
}

TEST_CASE("figure-2 style cell at N = 1e9, p = 0.5") {
  const Context ctx;
  const GridSpec spec{Axis{"n_users", 1.0, 10.0, Scale::log10, 10}, Axis{"p_max", 0.25, 0.75, Scale::linear, 3}, {},
                      "log10_birthday_critical_fmr"};
  const auto cells = evaluate_grid(spec, ctx);
  CHECK(cells[1 * 10 + 8].value == doctest::Approx(-17.858).epsilon(1e-4));
}

TEST_CASE("figure-3 preset sweeps comparisons at a fixed security level") {
  const Context ctx;
  const auto spec = preset("fig3", 12);
  CHECK(spec.y.steps == 6);
  const auto cells = evaluate_grid(spec, ctx);
  REQUIRE(cells.size() == 72);
  // More comparisons tighten CIU, so the critical population cannot shrink.
  for (std::size_t col = 0; col < 12; ++col) {
    for (std::size_t row = 1; row < 6; ++row) CHECK(cells[row * 12 + col].value >= cells[(row - 1) * 12 + col].value);
  }
}

TEST_CASE("degenerate 2x2 grid writes four rows and round-trips") {
  const Context ctx;
  const GridSpec spec{Axis{"fmr", -6.0, -3.0, Scale::log10, 2}, Axis{"n_users", 1.0, 3.0, Scale::log10, 2}, {},
                      "birthday_collision_probability"};
  const auto path = temp_path("biosec_grid_test.csv");
  const auto cells = emit_grid(spec, ctx, path);
  CHECK(cells.size() == 4);
  const std::string text = read_file(path);
  std::istringstream in(text);
  const ParsedGrid parsed = read_csv(in);
  CHECK(parsed.cells.size() == 4);
  REQUIRE(parsed.comments.size() == 3);
  CHECK(parsed.comments[0] == "precision_bits=256");
  std::ostringstream again;
  write_csv(again, parsed.cells, parsed.comments);
  CHECK(again.str() == text);
  std::filesystem::remove(path);
}

TEST_CASE("grid results do not depend on the worker count") {
  const Context ctx;
  const auto spec = preset("fig1", 9);
  const auto one = evaluate_grid(spec, ctx, 1);
  const auto many = evaluate_grid(spec, ctx, 5);
  REQUIRE(one.size() == many.size());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].value == many[i].value);
}

TEST_CASE("evaluation errors propagate out of the worker pool") {
  const Context ctx;
  const GridSpec spec{Axis{"n_users", 0.0, 2.0, Scale::log10, 3}, Axis{"p_max", 0.1, 0.9, Scale::linear, 3}, {},
                      "log10_birthday_critical_fmr"};
  CHECK_THROWS_AS(evaluate_grid(spec, ctx, 3), PreconditionError);
}

TEST_CASE("numbers are written with 17 significant digits") {
  CHECK(format_number(0.1) == "1.0000000000000001e-01");
  CHECK(format_number(-2.5) == "-2.5000000000000000e+00");
  CHECK(format_number(1e-300) == "1.0000000000000000e-300");
  double back = 0.0;
  const std::string text = format_number(2.0370e-48);
  std::istringstream(text) >> back;
  CHECK(back == 2.0370e-48);
}

TEST_CASE("malformed CSV is rejected") {
  std::istringstream no_header("1,2,3\n");
  CHECK_THROWS_AS(read_csv(no_header), PreconditionError);
  std::istringstream short_row("x,y,value\n1,2\n");
  CHECK_THROWS_AS(read_csv(short_row), PreconditionError);
}
