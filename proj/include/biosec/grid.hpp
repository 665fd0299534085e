#pragma once

// Two-dimensional parameter sweeps written as plot-ready CSV.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biosec/numerics.hpp"

namespace biosec::grid {

enum class Scale { linear, log10 };

std::string_view to_string(Scale scale);
Scale parse_scale(std::string_view text);

/// One swept parameter. Coordinates are evenly spaced in the axis scale; for
/// log10 axes the parameter value at coordinate c is 10^c.
struct Axis {
  std::string parameter;
  double min = 0.0;
  double max = 1.0;
  Scale scale = Scale::linear;
  std::size_t steps = 2;

  double coordinate(std::size_t index) const;
  BigReal parameter_value(const Context& ctx, std::size_t index) const;
};

/// Known parameters: n_users, security_bits, p_max, fmr, n_comparisons, alpha.
/// Known outputs: log10_critical_fmr, log10_birthday_critical_fmr,
/// log10_critical_population, birthday_collision_probability.
struct GridSpec {
  Axis x;
  Axis y;
  std::map<std::string, std::string> fixed;
  std::string output_value;

  /// Throws PreconditionError describing the first problem found.
  void validate() const;
  std::string to_json() const;
};

std::vector<std::string> known_parameters();
std::vector<std::string> known_outputs();

/// Named presets "fig1", "fig2", "fig3" with `steps` points per continuous axis.
GridSpec preset(std::string_view name, std::size_t steps = 100);

struct Cell {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

/// Evaluates one output quantity from named parameter values.
BigReal evaluate(const Context& ctx, std::string_view output_value, const std::map<std::string, BigReal>& params);

/// Row-major over (y, x): x varies fastest. Order is fixed regardless of `workers`.
std::vector<Cell> evaluate_grid(const GridSpec& spec, const Context& ctx, unsigned workers = 0);

/// Header `x,y,value`, one row per cell, then the `#`-prefixed comment lines.
void write_csv(std::ostream& out, std::span<const Cell> cells, std::span<const std::string> comments);

/// Comment lines recorded after the data rows of an emitted grid.
std::vector<std::string> provenance_comments(const GridSpec& spec, const Context& ctx);

struct ParsedGrid {
  std::vector<Cell> cells;
  /// Comment lines without the leading "# ".
  std::vector<std::string> comments;
};

ParsedGrid read_csv(std::istream& in);

/// Evaluates `spec` and writes it to `path`. Returns the cells written.
std::vector<Cell> emit_grid(const GridSpec& spec, const Context& ctx, const std::filesystem::path& path,
                            unsigned workers = 0);

std::string format_number(double value);

}  // namespace biosec::grid
