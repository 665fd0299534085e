#include "biosec/grid.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "biosec/attack.hpp"
#include "biosec/birthday.hpp"
#include "biosec/error.hpp"
#include "biosec/stats.hpp"

namespace biosec::grid {

namespace {

const std::vector<std::string> kParameters = {"n_users", "security_bits", "p_max", "fmr", "n_comparisons", "alpha"};

struct OutputInfo {
  std::string name;
  std::vector<std::string> required;
};

const std::vector<OutputInfo> kOutputs = {
    {"log10_critical_fmr", {"n_users", "security_bits"}},
    {"log10_birthday_critical_fmr", {"n_users", "p_max"}},
    {"log10_critical_population", {"fmr", "security_bits"}},
    {"birthday_collision_probability", {"fmr", "n_users"}},
};

const OutputInfo* find_output(std::string_view name) {
  for (const auto& info : kOutputs) {
    if (info.name == name) return &info;
  }
  return nullptr;
}

bool is_parameter(std::string_view name) {
  return std::find(kParameters.begin(), kParameters.end(), name) != kParameters.end();
}

void validate_axis(const Axis& axis, const char* label) {
  const std::string prefix = std::string(label) + " axis: ";
  if (!is_parameter(axis.parameter)) throw PreconditionError(prefix + "unknown parameter '" + axis.parameter + "'");
  if (axis.steps < 2) throw PreconditionError(prefix + "needs at least 2 steps");
  if (!std::isfinite(axis.min) || !std::isfinite(axis.max) || !(axis.min < axis.max)) {
    throw PreconditionError(prefix + "range must satisfy min < max");
  }
}

std::uint64_t as_count(const BigReal& value, const char* name) {
  const BigReal rounded = round(value);
  if (!(rounded >= 2.0) || !(rounded < 1.8e19)) {
    throw PreconditionError(std::string(name) + " must be an integer count in [2, 1.8e19)");
  }
  return mpfr_get_uj(rounded.get(), MPFR_RNDN);
}

}  // namespace

std::string_view to_string(Scale scale) { return scale == Scale::linear ? "linear" : "log10"; }

Scale parse_scale(std::string_view text) {
  if (text == "linear") return Scale::linear;
  if (text == "log10") return Scale::log10;
  throw PreconditionError("axis scale must be 'linear' or 'log10', got '" + std::string(text) + "'");
}

double Axis::coordinate(std::size_t index) const {
  if (index + 1 == steps) return max;
  return min + (max - min) * static_cast<double>(index) / static_cast<double>(steps - 1);
}

BigReal Axis::parameter_value(const Context& ctx, std::size_t index) const {
  const BigReal c = ctx.real(coordinate(index));
  if (scale == Scale::linear) return c;
  return pow(ctx.real(10.0), c);
}

void GridSpec::validate() const {
  validate_axis(x, "x");
  validate_axis(y, "y");
  if (x.parameter == y.parameter) throw PreconditionError("x and y axes must sweep different parameters");
  const OutputInfo* info = find_output(output_value);
  if (info == nullptr) throw PreconditionError("unknown output value '" + output_value + "'");
  for (const auto& [name, value] : fixed) {
    if (!is_parameter(name)) throw PreconditionError("unknown fixed parameter '" + name + "'");
    if (name == x.parameter || name == y.parameter) {
      throw PreconditionError("parameter '" + name + "' is both swept and fixed");
    }
  }
  for (const auto& name : info->required) {
    if (name != x.parameter && name != y.parameter && !fixed.contains(name)) {
      throw PreconditionError("output '" + output_value + "' needs parameter '" + name + "'");
    }
  }
}

std::string GridSpec::to_json() const {
  auto axis_json = [](const Axis& a) {
    return nlohmann::ordered_json{{"parameter", a.parameter},
                                  {"min", a.min},
                                  {"max", a.max},
                                  {"scale", std::string(to_string(a.scale))},
                                  {"steps", a.steps}};
  };
  nlohmann::ordered_json j;
  j["x"] = axis_json(x);
  j["y"] = axis_json(y);
  j["fixed"] = fixed;
  j["output_value"] = output_value;
  return j.dump();
}

std::vector<std::string> known_parameters() { return kParameters; }

std::vector<std::string> known_outputs() {
  std::vector<std::string> out;
  for (const auto& info : kOutputs) out.push_back(info.name);
  return out;
}

GridSpec preset(std::string_view name, std::size_t steps) {
  if (name == "fig1") {
    return GridSpec{Axis{"n_users", 0.0, 10.0, Scale::log10, steps},
                    Axis{"security_bits", 0.0, 256.0, Scale::linear, steps},
                    {},
                    "log10_critical_fmr"};
  }
  if (name == "fig2") {
    return GridSpec{Axis{"n_users", 1.0, 10.0, Scale::log10, steps},
                    Axis{"p_max", 0.01, 0.99, Scale::linear, steps},
                    {},
                    "log10_birthday_critical_fmr"};
  }
  if (name == "fig3") {
    return GridSpec{Axis{"fmr", -12.0, -1.0, Scale::log10, steps},
                    Axis{"n_comparisons", 3.0, 8.0, Scale::log10, 6},
                    {{"security_bits", "10"}, {"alpha", "0.05"}},
                    "log10_critical_population"};
  }
  throw PreconditionError("unknown preset '" + std::string(name) + "' (expected fig1, fig2 or fig3)");
}

BigReal evaluate(const Context& ctx, std::string_view output_value, const std::map<std::string, BigReal>& params) {
  auto need = [&](const std::string& name) -> const BigReal& {
    auto it = params.find(name);
    if (it == params.end()) {
      throw PreconditionError("output '" + std::string(output_value) + "' needs parameter '" + name + "'");
    }
    return it->second;
  };
  if (output_value == "log10_critical_fmr") {
    return log10(attack::critical_fmr_untargeted(attack::Population(need("n_users")),
                                                 attack::SecurityLevel(need("security_bits"))));
  }
  if (output_value == "log10_birthday_critical_fmr") {
    return log10(birthday::birthday_critical_fmr(attack::Population(need("n_users")), need("p_max")));
  }
  if (output_value == "log10_critical_population") {
    BigReal fmr = need("fmr");
    if (params.contains("n_comparisons")) {
      const double alpha = params.contains("alpha") ? need("alpha").to_double() : stats::kDefaultAlpha;
      const stats::FmrEstimate estimate{fmr, as_count(need("n_comparisons"), "n_comparisons"), alpha};
      fmr = stats::confidence_interval(estimate, stats::Sided::two_sided).upper;
    }
    const auto result = attack::critical_population(fmr, attack::SecurityLevel(need("security_bits")));
    return result.log2_raw / log2(ctx.real(10.0));
  }
  if (output_value == "birthday_collision_probability") {
    return birthday::birthday_approx(need("fmr"), attack::Population(need("n_users"))).probability;
  }
  throw PreconditionError("unknown output value '" + std::string(output_value) + "'");
}

std::vector<Cell> evaluate_grid(const GridSpec& spec, const Context& ctx, unsigned workers) {
  spec.validate();
  std::map<std::string, BigReal> base;
  for (const auto& [name, text] : spec.fixed) base.emplace(name, ctx.parse(text));

  std::vector<BigReal> x_values;
  for (std::size_t i = 0; i < spec.x.steps; ++i) x_values.push_back(spec.x.parameter_value(ctx, i));

  std::vector<Cell> cells(spec.x.steps * spec.y.steps);
  std::atomic<std::size_t> next_row{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      for (std::size_t row = next_row++; row < spec.y.steps && !failed; row = next_row++) {
        auto params = base;
        params.insert_or_assign(spec.y.parameter, spec.y.parameter_value(ctx, row));
        for (std::size_t col = 0; col < spec.x.steps; ++col) {
          params.insert_or_assign(spec.x.parameter, x_values[col]);
          const BigReal value = evaluate(ctx, spec.output_value, params);
          cells[row * spec.x.steps + col] = Cell{spec.x.coordinate(col), spec.y.coordinate(row), value.to_double()};
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  unsigned count = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  count = static_cast<unsigned>(std::min<std::size_t>(count, spec.y.steps));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < count; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
  return cells;
}

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::scientific, 16);
  return std::string(buffer, result.ptr);
}

void write_csv(std::ostream& out, std::span<const Cell> cells, std::span<const std::string> comments) {
  out << "x,y,value\n";
  for (const Cell& cell : cells) {
    out << format_number(cell.x) << ',' << format_number(cell.y) << ',' << format_number(cell.value) << '\n';
  }
  for (const std::string& line : comments) out << "# " << line << '\n';
}

std::vector<std::string> provenance_comments(const GridSpec& spec, const Context& ctx) {
  return {"precision_bits=" + std::to_string(ctx.precision_bits()), std::string("version=") + BIOSEC_VERSION,
          "spec=" + spec.to_json()};
}

ParsedGrid read_csv(std::istream& in) {
  ParsedGrid grid;
  std::string line;
  if (!std::getline(in, line) || line != "x,y,value") {
    throw PreconditionError("grid CSV must start with the header 'x,y,value'");
  }
  auto parse = [](std::string_view field) {
    double value = 0.0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
    if (result.ec != std::errc() || result.ptr != field.data() + field.size()) {
      throw PreconditionError("grid CSV: bad number '" + std::string(field) + "'");
    }
    return value;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      grid.comments.push_back(line.size() > 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    const auto first = line.find(',');
    const auto second = first == std::string::npos ? first : line.find(',', first + 1);
    if (second == std::string::npos) throw PreconditionError("grid CSV: row needs three fields: '" + line + "'");
    const std::string_view view(line);
    grid.cells.push_back(Cell{parse(view.substr(0, first)), parse(view.substr(first + 1, second - first - 1)),
                              parse(view.substr(second + 1))});
  }
  return grid;
}

std::vector<Cell> emit_grid(const GridSpec& spec, const Context& ctx, const std::filesystem::path& path,
                            unsigned workers) {
  std::vector<Cell> cells = evaluate_grid(spec, ctx, workers);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_csv(out, cells, provenance_comments(spec, ctx));
  if (!out.flush()) throw std::runtime_error("failed writing '" + path.string() + "'");
  return cells;
}

}  // namespace biosec::grid
