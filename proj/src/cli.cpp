#include "biosec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "biosec/attack.hpp"
#include "biosec/birthday.hpp"
#include "biosec/error.hpp"
#include "biosec/grid.hpp"
#include "biosec/numerics.hpp"
#include "biosec/oracle.hpp"
#include "biosec/stats.hpp"

namespace biosec::cli {

namespace {

using json = nlohmann::ordered_json;

struct Report {
  json result = json::object();
  std::vector<std::string> warnings;
};

using Handler = std::function<Report(const Context&)>;

json quantity(const BigReal& value) {
  json q;
  q["value"] = value.to_string(17);
  if (value.is_finite() && !value.is_zero()) {
    q["log10"] = log10(abs(value)).to_double();
  } else {
    q["log10"] = nullptr;
  }
  return q;
}

json count(const BigReal& value) {
  if (value.is_integer() && value >= 0.0 && value < 1.8e19) return mpfr_get_uj(value.get(), MPFR_RNDN);
  return quantity(value);
}

// Where a command takes an FMR: either a point value (--fmr) or an empirical
// estimate with its confidence interval (--fmr-hat/--n or --false-matches/--total).
struct FmrSource {
  std::string fmr;
  std::string fmr_hat;
  std::uint64_t n = 0;
  std::uint64_t false_matches = 0;
  std::uint64_t total = 0;
  double alpha = stats::kDefaultAlpha;
  std::string sided = "two";
  CLI::Option* fmr_opt = nullptr;
  CLI::Option* fmr_hat_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* false_matches_opt = nullptr;
  CLI::Option* total_opt = nullptr;

  void add_point(CLI::App* cmd, const std::string& help) { fmr_opt = cmd->add_option("--fmr", fmr, help); }

  void add_interval(CLI::App* cmd) {
    fmr_hat_opt = cmd->add_option("--fmr-hat", fmr_hat, "Empirical FMR (use with --n)");
    n_opt = cmd->add_option("--n", n, "Number of impostor comparisons behind --fmr-hat");
    false_matches_opt = cmd->add_option("--false-matches", false_matches, "Observed false matches (with --total)");
    total_opt = cmd->add_option("--total", total, "Total impostor comparisons (with --false-matches)");
    cmd->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--sided", sided, "Confidence interval: one or two sided")
        ->check(CLI::IsMember({"one", "two"}));
    if (fmr_opt != nullptr) {
      for (CLI::Option* opt : {fmr_hat_opt, n_opt, false_matches_opt, total_opt}) fmr_opt->excludes(opt);
    }
    fmr_hat_opt->needs(n_opt);
    n_opt->needs(fmr_hat_opt);
    false_matches_opt->needs(total_opt);
    total_opt->needs(false_matches_opt);
    fmr_hat_opt->excludes(false_matches_opt);
  }

  bool uses_interval() const {
    return (fmr_hat_opt != nullptr && fmr_hat_opt->count() > 0) ||
           (false_matches_opt != nullptr && false_matches_opt->count() > 0);
  }

  bool has_point() const { return fmr_opt != nullptr && fmr_opt->count() > 0; }

  void require_any() const {
    if (!has_point() && !uses_interval()) {
      throw PreconditionError("an FMR is required: give --fmr, --fmr-hat with --n, or --false-matches with --total");
    }
  }

  BigReal point(const Context& ctx) const { return ctx.parse(fmr); }

  stats::FmrEstimate estimate(const Context& ctx) const {
    if (false_matches_opt != nullptr && false_matches_opt->count() > 0) {
      return stats::FmrEstimate::from_counts(ctx, false_matches, total, alpha);
    }
    return stats::FmrEstimate{ctx.parse(fmr_hat), n, alpha};
  }

  stats::ConfidenceInterval interval(const Context& ctx) const {
    return stats::confidence_interval(estimate(ctx), stats::parse_sided(sided));
  }
};

json interval_json(const stats::ConfidenceInterval& ci) {
  json j;
  j["estimate"] = quantity(ci.estimate);
  j["lower"] = quantity(ci.lower);
  j["upper"] = quantity(ci.upper);
  j["c_alpha"] = quantity(ci.c_alpha);
  j["sided"] = std::string(stats::to_string(ci.sided));
  j["degenerate"] = ci.degenerate;
  return j;
}

void note_degenerate(const stats::ConfidenceInterval& ci, Report& report) {
  if (ci.degenerate) {
    report.warnings.push_back("FMR estimate is 0 or 1: zero sample variance, interval collapses to a point");
  }
}

json bounds_json(const attack::AttackBounds& bounds) {
  json j;
  j["log2_lower"] = quantity(bounds.log2_lower);
  j["log2_upper"] = quantity(bounds.log2_upper);
  j["lower"] = quantity(bounds.lower());
  j["upper"] = quantity(bounds.upper());
  j["model"] = std::string(attack::to_string(bounds.model));
  j["fmr_basis"] = std::string(attack::to_string(bounds.fmr_basis));
  return j;
}

json collision_json(const birthday::CollisionResult& r) {
  json j;
  j["probability"] = quantity(r.probability);
  if (r.lower) j["lower"] = quantity(*r.lower);
  if (r.upper) j["upper"] = quantity(*r.upper);
  j["n_pairs"] = count(r.pairs.n_pairs);
  j["method"] = std::string(birthday::to_string(r.method));
  return j;
}

json echo_inputs(const CLI::App* cmd) {
  json inputs = json::object();
  for (const CLI::App* level = cmd; level != nullptr; level = level->get_parent()) {
    for (const CLI::Option* opt : level->get_options()) {
      if (opt->count() == 0 || opt->get_name() == "--help" || opt->get_name() == "--version") continue;
      std::string name = opt->get_name();
      name.erase(0, name.find_first_not_of('-'));
      if (inputs.contains(name)) continue;
      const auto& results = opt->results();
      if (opt->get_type_size() == 0) {
        inputs[name] = true;
      } else if (results.size() == 1) {
        inputs[name] = results.front();
      } else {
        inputs[name] = results;
      }
    }
  }
  return inputs;
}

std::string command_path(const CLI::App* cmd) {
  std::string path;
  for (const CLI::App* level = cmd; level != nullptr && level->get_parent() != nullptr; level = level->get_parent()) {
    path = path.empty() ? level->get_name() : level->get_name() + " " + path;
  }
  return path;
}

void write_csv_row(std::ostream& out, const std::string& field, const json& value) {
  if (value.is_object() && value.contains("value")) {
    out << field << ',' << value["value"].get<std::string>() << ',';
    if (!value["log10"].is_null()) out << grid::format_number(value["log10"].get<double>());
    out << '\n';
  } else if (value.is_object()) {
    for (const auto& [key, inner] : value.items()) write_csv_row(out, field + "." + key, inner);
  } else if (value.is_array()) {
    for (std::size_t i = 0; i < value.size(); ++i) write_csv_row(out, field + "." + std::to_string(i), value[i]);
  } else if (value.is_string()) {
    out << field << ',' << value.get<std::string>() << ",\n";
  } else {
    out << field << ',' << value.dump() << ",\n";
  }
}

void emit(std::ostream& out, const std::string& format, const json& document) {
  if (format == "csv") {
    out << "field,value,log10\n";
    for (const auto& [key, value] : document.items()) write_csv_row(out, key, value);
  } else {
    out << document.dump(2) << '\n';
  }
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream stream(item);
    std::string piece;
    while (std::getline(stream, piece, ',')) {
      if (!piece.empty()) out.push_back(piece);
    }
  }
  return out;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Security limits of biometric systems derived from their false match rate", "biosec"};
  app.require_subcommand(1);
  app.fallthrough();
  int precision_bits = kDefaultPrecisionBits;
  std::string format = "json";
  app.add_option("--precision-bits", precision_bits, "Working precision in mantissa bits")
      ->envname("BIOSEC_PRECISION_BITS")
      ->check(CLI::Range(kMinPrecisionBits, 1 << 20));
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.set_version_flag("--version", BIOSEC_VERSION);

  std::vector<std::pair<CLI::App*, Handler>> handlers;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& description) {
    CLI::App* cmd = parent->add_subcommand(name, description);
    cmd->fallthrough();
    return cmd;
  };

  // ci
  FmrSource ci_source;
  CLI::App* ci_cmd = leaf(&app, "ci", "Confidence interval on an empirical FMR");
  ci_source.add_interval(ci_cmd);
  handlers.emplace_back(ci_cmd, [&](const Context& ctx) {
    if (!ci_source.uses_interval()) {
      throw PreconditionError("ci needs --fmr-hat with --n, or --false-matches with --total");
    }
    Report report;
    const auto estimate = ci_source.estimate(ctx);
    const auto ci = stats::confidence_interval(estimate, stats::parse_sided(ci_source.sided));
    report.result = interval_json(ci);
    report.result["n"] = estimate.n;
    report.result["alpha"] = estimate.alpha;
    note_degenerate(ci, report);
    return report;
  });

  // estimate-fmr
  std::string scores_path;
  double threshold = 0.0;
  double score_alpha = stats::kDefaultAlpha;
  std::string score_sided = "two";
  CLI::App* est_cmd = leaf(&app, "estimate-fmr", "Empirical FMR from a file of impostor scores (one per line)");
  est_cmd->add_option("--scores", scores_path, "Score file, '-' for standard input")->required();
  est_cmd->add_option("--threshold", threshold, "Decision threshold T")->required();
  est_cmd->add_option("--alpha", score_alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  est_cmd->add_option("--sided", score_sided, "one or two")->check(CLI::IsMember({"one", "two"}));
  handlers.emplace_back(est_cmd, [&](const Context& ctx) {
    std::vector<double> scores;
    if (scores_path == "-") {
      scores = stats::read_scores(std::cin);
    } else {
      std::ifstream in(scores_path);
      if (!in) throw PreconditionError("cannot read score file '" + scores_path + "'");
      scores = stats::read_scores(in);
    }
    const auto estimate = stats::estimate_fmr(ctx, stats::ScoreVector{std::move(scores), threshold}, score_alpha);
    Report report;
    report.result["fmr_hat"] = quantity(estimate.fmr_hat);
    report.result["n"] = estimate.n;
    report.result["false_matches"] = count(round(estimate.fmr_hat * ctx.integer(estimate.n)));
    report.result["convention"] = "score v counts as a false match when T - v >= 0";
    if (estimate.n >= 2) {
      const auto ci = stats::confidence_interval(estimate, stats::parse_sided(score_sided));
      report.result["interval"] = interval_json(ci);
      note_degenerate(ci, report);
    } else {
      report.warnings.push_back("a single score gives no confidence interval");
    }
    return report;
  });

  // attack
  CLI::App* attack_cmd = app.add_subcommand("attack", "Untargeted-attack complexity");
  attack_cmd->require_subcommand(1);
  attack_cmd->fallthrough();

  FmrSource bounds_source;
  std::string bounds_users;
  std::string bounds_model = "independent";
  bool authentication_mode = false;
  CLI::App* bounds_cmd = leaf(attack_cmd, "bounds", "Bounds on the median number of attacker rounds");
  bounds_source.add_point(bounds_cmd, "Point FMR");
  bounds_source.add_interval(bounds_cmd);
  bounds_cmd->add_option("--n-users", bounds_users, "Enrolled users N")->required();
  bounds_cmd->add_option("--model", bounds_model, "independent or dependent")
      ->check(CLI::IsMember({"independent", "dependent"}));
  bounds_cmd->add_flag("--authentication-mode", authentication_mode,
                       "Count attempts rather than rounds: each round tries all N identities");
  handlers.emplace_back(bounds_cmd, [&](const Context& ctx) {
    bounds_source.require_any();
    const attack::Population population(ctx.parse(bounds_users));
    const attack::Model model = attack::parse_model(bounds_model);
    Report report;
    attack::AttackBounds bounds = [&] {
      if (bounds_source.uses_interval()) {
        const auto ci = bounds_source.interval(ctx);
        report.result["interval"] = interval_json(ci);
        note_degenerate(ci, report);
        return attack::untargeted_bounds(ci, population, model);
      }
      return attack::untargeted_bounds(bounds_source.point(ctx), population, model);
    }();
    if (!bounds_source.uses_interval()) {
      const BigReal p = one_minus_pow(bounds_source.point(ctx), population.n_users());
      if (p > 0.0 && p < 1.0) report.result["median_rounds"] = count(attack::geometric_median(p));
    }
    if (authentication_mode) bounds = attack::scale_for_authentication(bounds, population);
    report.result["bounds"] = bounds_json(bounds);
    report.result["unit"] = authentication_mode ? "attempts" : "rounds";
    return report;
  });

  FmrSource cpop_source;
  std::string cpop_bits;
  CLI::App* cpop_cmd = leaf(attack_cmd, "critical-population", "Largest population meeting a security level");
  cpop_source.add_point(cpop_cmd, "Point FMR");
  cpop_source.add_interval(cpop_cmd);
  cpop_cmd->add_option("--security-bits", cpop_bits, "Security level log2(S)")->required();
  handlers.emplace_back(cpop_cmd, [&](const Context& ctx) {
    cpop_source.require_any();
    Report report;
    BigReal fmr = ctx.zero();
    if (cpop_source.uses_interval()) {
      const auto ci = cpop_source.interval(ctx);
      report.result["interval"] = interval_json(ci);
      note_degenerate(ci, report);
      fmr = ci.upper;
    } else {
      fmr = cpop_source.point(ctx);
    }
    const auto result = attack::critical_population(fmr, attack::SecurityLevel(ctx.parse(cpop_bits)));
    report.result["fmr_used"] = quantity(fmr);
    report.result["n_users"] = count(result.n_users);
    report.result["log2_raw"] = quantity(result.log2_raw);
    report.result["log10_raw"] = quantity(result.log2_raw / log2(ctx.real(10.0)));
    report.result["unattainable"] = result.unattainable;
    if (result.unattainable) report.warnings.push_back("security level unattainable even for a single user");
    return report;
  });

  std::string cfmr_users;
  std::string cfmr_bits;
  CLI::App* cfmr_cmd = leaf(attack_cmd, "critical-fmr", "Largest FMR meeting a security level for N users");
  cfmr_cmd->add_option("--n-users", cfmr_users, "Enrolled users N")->required();
  cfmr_cmd->add_option("--security-bits", cfmr_bits, "Security level log2(S)")->required();
  handlers.emplace_back(cfmr_cmd, [&](const Context& ctx) {
    Report report;
    report.result["critical_fmr"] = quantity(attack::critical_fmr_untargeted(
        attack::Population(ctx.parse(cfmr_users)), attack::SecurityLevel(ctx.parse(cfmr_bits))));
    return report;
  });

  std::string paradox_users;
  std::string paradox_bits;
  double paradox_alpha = stats::kDefaultAlpha;
  CLI::App* paradox_cmd =
      leaf(attack_cmd, "paradox-n", "Comparisons needed for a confidence interval below the critical FMR");
  paradox_cmd->add_option("--n-users", paradox_users, "Enrolled users N")->required();
  paradox_cmd->add_option("--security-bits", paradox_bits, "Security level log2(S)")->required();
  paradox_cmd->add_option("--alpha", paradox_alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  handlers.emplace_back(paradox_cmd, [&](const Context& ctx) {
    const auto estimate = attack::confidence_paradox_n(attack::Population(ctx.parse(paradox_users)),
                                                       attack::SecurityLevel(ctx.parse(paradox_bits)), paradox_alpha);
    Report report;
    report.result["comparisons"] = count(estimate.comparisons);
    report.result["log2_comparisons"] = quantity(estimate.log2_comparisons);
    report.result["critical_fmr"] = quantity(estimate.critical_fmr);
    report.result["gap"] = quantity(estimate.gap);
    report.result["quantile"] = quantity(estimate.quantile);
    return report;
  });

  // birthday
  CLI::App* birthday_cmd = app.add_subcommand("birthday", "Database collision (biometric birthday) analysis");
  birthday_cmd->require_subcommand(1);
  birthday_cmd->fallthrough();

  FmrSource approx_source;
  std::string approx_users;
  CLI::App* approx_cmd = leaf(birthday_cmd, "approx", "Collision probability, independent-pairs approximation");
  approx_source.add_point(approx_cmd, "Point FMR");
  approx_source.add_interval(approx_cmd);
  approx_cmd->add_option("--n-users", approx_users, "Enrolled users N")->required();
  handlers.emplace_back(approx_cmd, [&](const Context& ctx) {
    approx_source.require_any();
    const attack::Population population(ctx.parse(approx_users));
    Report report;
    if (approx_source.uses_interval()) {
      const auto ci = approx_source.interval(ctx);
      report.result = collision_json(birthday::birthday_approx(ci, population));
      report.result["interval"] = interval_json(ci);
      note_degenerate(ci, report);
    } else {
      report.result = collision_json(birthday::birthday_approx(approx_source.point(ctx), population));
    }
    return report;
  });

  FmrSource bpop_source;
  std::string bpop_p;
  CLI::App* bpop_cmd =
      leaf(birthday_cmd, "critical-population", "Largest population keeping collision probability <= p");
  bpop_source.add_point(bpop_cmd, "Point FMR");
  bpop_source.add_interval(bpop_cmd);
  bpop_cmd->add_option("--p-max", bpop_p, "Maximum collision probability p")->required();
  handlers.emplace_back(bpop_cmd, [&](const Context& ctx) {
    bpop_source.require_any();
    Report report;
    BigReal fmr = ctx.zero();
    if (bpop_source.uses_interval()) {
      const auto ci = bpop_source.interval(ctx);
      report.result["interval"] = interval_json(ci);
      note_degenerate(ci, report);
      fmr = ci.lower;
    } else {
      fmr = bpop_source.point(ctx);
    }
    const auto result = birthday::birthday_critical_population(fmr, ctx.parse(bpop_p));
    report.result["fmr_used"] = quantity(fmr);
    report.result["n_users"] = count(result.n_users);
    report.result["exact_root"] = quantity(result.exact_root);
    report.result["sqrt_approximation"] = quantity(result.sqrt_approximation);
    return report;
  });

  std::string bfmr_users;
  std::string bfmr_p;
  CLI::App* bfmr_cmd = leaf(birthday_cmd, "critical-fmr", "Largest FMR keeping collision probability <= p");
  bfmr_cmd->add_option("--n-users", bfmr_users, "Enrolled users N")->required();
  bfmr_cmd->add_option("--p-max", bfmr_p, "Maximum collision probability p")->required();
  handlers.emplace_back(bfmr_cmd, [&](const Context& ctx) {
    Report report;
    report.result["critical_fmr"] =
        quantity(birthday::birthday_critical_fmr(attack::Population(ctx.parse(bfmr_users)), ctx.parse(bfmr_p)));
    return report;
  });

  std::string exact_fmr;
  std::string exact_k;
  std::string exact_users;
  bool round_false_pairs = false;
  CLI::App* exact_cmd = leaf(birthday_cmd, "exact", "Exact collision probability over a finite reference pool");
  exact_cmd->add_option("--fmr", exact_fmr, "FMR measured on the reference pool")->required();
  exact_cmd->add_option("--k-users", exact_k, "Users K in the reference pool")->required();
  exact_cmd->add_option("--n-users", exact_users, "Enrolled users N")->required();
  exact_cmd->add_flag("--round-false-pairs", round_false_pairs,
                      "Round the non-matching reference pair count to an integer");
  handlers.emplace_back(exact_cmd, [&](const Context& ctx) {
    const birthday::ReferencePool pool(ctx.parse(exact_k));
    const auto result = birthday::birthday_exact(ctx.parse(exact_fmr), pool, attack::Population(ctx.parse(exact_users)),
                                                 birthday::ExactOptions{round_false_pairs});
    Report report;
    report.result = collision_json(result);
    report.result["k_pairs"] = count(pool.k_pairs());
    report.result["exhausted"] = result.exhausted;
    report.result["exhausted_loose"] = result.exhausted_loose;
    if (result.exhausted != result.exhausted_loose) {
      report.warnings.push_back("exhaustion tests disagree: (1-f)K - N + 1 <= 0 is " +
                                std::string(result.exhausted ? "true" : "false") + ", (1-f)K - 1 <= N is " +
                                std::string(result.exhausted_loose ? "true" : "false"));
    }
    return report;
  });

  std::string gap_fmr;
  std::string gap_users;
  std::vector<std::string> gap_k;
  CLI::App* gap_cmd = leaf(birthday_cmd, "gap", "Exact minus approximate collision probability over a K sweep");
  gap_cmd->add_option("--fmr", gap_fmr, "FMR")->required();
  gap_cmd->add_option("--n-users", gap_users, "Enrolled users N")->required();
  gap_cmd->add_option("--k-users", gap_k, "Reference pool sizes (comma separated or repeated)")->required();
  handlers.emplace_back(gap_cmd, [&](const Context& ctx) {
    std::vector<BigReal> sweep;
    for (const auto& text : split_list(gap_k)) sweep.push_back(ctx.parse(text));
    const BigReal fmr = ctx.parse(gap_fmr);
    const attack::Population population(ctx.parse(gap_users));
    const auto points = birthday::exact_vs_approx_gap(fmr, population, sweep);
    Report report;
    report.result["approx_probability"] = quantity(birthday::birthday_approx(fmr, population).probability);
    json rows = json::array();
    bool decreasing = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
      rows.push_back(json{{"k_users", count(points[i].k_users)}, {"gap", quantity(points[i].gap)}});
      if (i > 0 && !(points[i].gap < points[i - 1].gap)) decreasing = false;
    }
    report.result["points"] = rows;
    report.result["strictly_decreasing"] = decreasing;
    return report;
  });

  // grid
  std::string preset_name;
  std::size_t preset_steps = 100;
  std::string out_path;
  unsigned grid_workers = 0;
  grid::GridSpec custom;
  std::string x_scale = "linear";
  std::string y_scale = "linear";
  std::vector<std::string> fixed_pairs;
  CLI::App* grid_cmd = leaf(&app, "grid", "Evaluate a quantity over a 2-D parameter grid and write CSV");
  auto* preset_opt = grid_cmd->add_option("--preset", preset_name, "fig1, fig2 or fig3")
                         ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  grid_cmd->add_option("--steps", preset_steps, "Points per continuous preset axis")->check(CLI::Range(2, 100000));
  grid_cmd->add_option("--out", out_path, "Output CSV path")->required();
  grid_cmd->add_option("--workers", grid_workers, "Worker threads (0 = all cores)");
  auto* x_param = grid_cmd->add_option("--x-param", custom.x.parameter, "x-axis parameter");
  grid_cmd->add_option("--x-min", custom.x.min);
  grid_cmd->add_option("--x-max", custom.x.max);
  grid_cmd->add_option("--x-scale", x_scale)->check(CLI::IsMember({"linear", "log10"}));
  grid_cmd->add_option("--x-steps", custom.x.steps);
  auto* y_param = grid_cmd->add_option("--y-param", custom.y.parameter, "y-axis parameter");
  grid_cmd->add_option("--y-min", custom.y.min);
  grid_cmd->add_option("--y-max", custom.y.max);
  grid_cmd->add_option("--y-scale", y_scale)->check(CLI::IsMember({"linear", "log10"}));
  grid_cmd->add_option("--y-steps", custom.y.steps);
  auto* value_opt = grid_cmd->add_option("--value", custom.output_value, "Output quantity");
  grid_cmd->add_option("--fixed", fixed_pairs, "Fixed parameter as name=value (repeatable)");
  preset_opt->excludes(x_param)->excludes(y_param)->excludes(value_opt);
  handlers.emplace_back(grid_cmd, [&](const Context& ctx) {
    grid::GridSpec spec;
    if (preset_opt->count() > 0) {
      spec = grid::preset(preset_name, preset_steps);
    } else {
      if (x_param->count() == 0 || y_param->count() == 0 || value_opt->count() == 0) {
        throw PreconditionError("grid needs --preset, or --x-param, --y-param and --value");
      }
      spec = custom;
      spec.x.scale = grid::parse_scale(x_scale);
      spec.y.scale = grid::parse_scale(y_scale);
    }
    for (const auto& pair : fixed_pairs) {
      const auto eq = pair.find('=');
      if (eq == std::string::npos) throw PreconditionError("--fixed expects name=value, got '" + pair + "'");
      spec.fixed[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    const auto cells = grid::emit_grid(spec, ctx, out_path, grid_workers);
    Report report;
    report.result["path"] = out_path;
    report.result["rows"] = cells.size();
    report.result["spec"] = json::parse(spec.to_json());
    return report;
  });

  // simulate
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo audit runs");
  simulate_cmd->require_subcommand(1);
  simulate_cmd->fallthrough();
  std::string sim_fmr;
  std::uint64_t sim_users = 0;
  std::uint64_t sim_trials = 0;
  std::uint64_t sim_seed = 0;
  unsigned sim_workers = 0;
  CLI::App* sim_attack = leaf(simulate_cmd, "attack", "Simulate the untargeted attack and check the median bounds");
  sim_attack->add_option("--fmr", sim_fmr, "FMR")->required();
  sim_attack->add_option("--n-users", sim_users, "Enrolled users N")->required();
  sim_attack->add_option("--trials", sim_trials, "Number of simulated attacks")->required();
  sim_attack->add_option("--seed", sim_seed, "RNG seed")->required();
  sim_attack->add_option("--workers", sim_workers, "Worker threads (0 = all cores); does not affect results");
  handlers.emplace_back(sim_attack, [&](const Context& ctx) {
    if (sim_trials < 1) throw PreconditionError("--trials must be at least 1");
    const BigReal fmr = ctx.parse(sim_fmr);
    const auto report_sim =
        oracle::simulate_untargeted(oracle::SimConfig{fmr, sim_users, sim_trials, sim_seed, sim_workers});
    const attack::Population population(ctx.integer(sim_users));
    const auto bounds = attack::untargeted_bounds(fmr, population, attack::Model::independent);
    const BigReal lo = floor(bounds.lower()) - 1.0;
    const BigReal hi = ceil(bounds.upper()) + 1.0;
    const BigReal median = ctx.integer(report_sim.median_rounds);
    const bool pass = median >= lo && median <= hi;
    Report report;
    report.result["median_rounds"] = report_sim.median_rounds;
    report.result["q1"] = report_sim.q1;
    report.result["q3"] = report_sim.q3;
    report.result["empirical_success_prob"] = grid::format_number(report_sim.empirical_success_prob);
    report.result["success_prob"] = grid::format_number(report_sim.success_prob);
    report.result["trials"] = report_sim.trials;
    report.result["seed"] = report_sim.seed;
    report.result["generator"] = report_sim.generator;
    report.result["bounds"] = bounds_json(bounds);
    report.result["containment_interval"] = json::array({count(lo), count(hi)});
    report.result["verdict"] = pass ? "PASS" : "FAIL";
    return report;
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << BIOSEC_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  for (auto& [cmd, handler] : handlers) {
    if (!cmd->parsed()) continue;
    try {
      const Context ctx(precision_bits);
      Report report = handler(ctx);
      json document;
      document["command"] = command_path(cmd);
      document["inputs"] = echo_inputs(cmd);
      document["precision_bits"] = precision_bits;
      document["result"] = std::move(report.result);
      document["warnings"] = report.warnings;
      emit(out, format, document);
      return kExitOk;
    } catch (const PreconditionError& e) {
      err << "error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const DomainError& e) {
      err << "error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const std::exception& e) {
      err << "internal error: " << e.what() << '\n';
      return kExitInternal;
    }
  }
  err << "error: no command given\n";
  return kExitValidation;
}

}  // namespace biosec::cli
