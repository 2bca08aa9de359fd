// renyi-sc: command-line front end.
//
// Exit codes: 0 success, 1 suite failure or bound violation, 2 usage or input error.

#include "renyisc/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace renyisc;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string output;
  std::string format;
};

std::vector<std::string> split_labels(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) throw UsageError("empty system label in '" + s + "'");
    out.push_back(item);
  }
  return out;
}

/// Shortest round-trip form, always with a decimal point or exponent.
std::string scalar_text(double v) {
  std::string s = format_double(v);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output);
  if (!out) throw FileError(c.output, "", "cannot write file");
  out << text;
}

void emit_scalar(const Common& c, const std::string& quantity, double alpha, double value) {
  if (c.format == "json") {
    emit(c, Json{{"quantity", quantity}, {"alpha", alpha}, {"value", value}}.dump(2) + "\n");
  } else if (c.format == "csv") {
    emit(c, "quantity,alpha,value\n" + quantity + "," + format_double(alpha) + "," + format_double(value) + "\n");
  } else {
    emit(c, scalar_text(value) + "\n");
  }
}

Rates parse_rates(const std::vector<std::string>& items) {
  Rates rates;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("rate must be key=value, got '" + item + "'");
    std::size_t used = 0;
    double v = 0.0;
    const std::string value = item.substr(eq + 1);
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw UsageError("rate must be key=value, got '" + item + "'");
    rates[item.substr(0, eq)] = v;
  }
  return rates;
}

/// The first entry of `formats` is the default.
void add_output(CLI::App* cmd, Common& c, const std::vector<std::string>& formats) {
  cmd->add_option("-o,--output", c.output, "Write the result to this file instead of stdout");
  cmd->add_option("--format", c.format, "Output format (default " + formats.front() + ")")
      ->check(CLI::IsMember(formats));
}

/// Merit against every bound at every grid point; returns the number of violations.
int bound_checks(const ProtocolOutcome& outcome, const std::vector<ExponentCurve>& curves, Json* out) {
  Checker checker(0, 0, kClosedFormTolerance, kOptimizerTolerance);
  check_outcome_against_bounds(checker, outcome, curves);
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) min_slack = std::min(min_slack, std::exp2(p.log2_merit_bound) - outcome.merit);
  }
  Json violations = Json::array();
  for (const auto& f : checker.failures()) violations.push_back(Json{{"check", f.check}, {"slack", f.slack}});
  *out = Json{{"checks", checker.checks()}, {"min_slack", min_slack}, {"violations", std::move(violations)}};
  return static_cast<int>(checker.failures().size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renyi entropic quantities, protocol simulation and strong-converse bounds"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string input;
  std::string sigma_path;
  std::string systems;
  std::string a_labels;
  std::string b_labels;
  std::string c_labels;
  double alpha = 1.0;
  int starts = 8;
  std::uint64_t seed = 0;
  double tol = kClosedFormTolerance;
  std::string grid_spec = "0.51:0.99:25";
  std::vector<std::string> rate_items;
  std::string final_state;
  std::string suite;
  std::string protocol;
  std::string dims_spec;
  int trials = 200;
  int falsify_trials = 10000;
  std::string output_dir = ".";
  std::vector<double> epsilons{1e-2, 5e-3};
  Common common;

  auto* entropy = app.add_subcommand("entropy", "Renyi entropy S_alpha of a state or one of its marginals");
  entropy->add_option("-i,--input", input, "State file")->required();
  entropy->add_option("--alpha", alpha, "Order alpha >= 0")->capture_default_str();
  entropy->add_option("--systems", systems, "Comma-separated marginal (default: all systems)");
  add_output(entropy, common, {"text", "json", "csv"});

  auto* divergence = app.add_subcommand("divergence", "Sandwiched Renyi divergence D~_alpha(rho||sigma)");
  divergence->add_option("-i,--input", input, "State file for rho")->required();
  divergence->add_option("--sigma", sigma_path, "State or positive operator file for sigma")->required();
  divergence->add_option("--alpha", alpha, "Order alpha > 0")->capture_default_str();
  add_output(divergence, common, {"text", "json", "csv"});

  const auto add_optimized = [&](CLI::App* cmd, bool third) {
    cmd->add_option("-i,--input", input, "State file")->required();
    cmd->add_option("--a", a_labels, "Comma-separated systems of A")->required();
    cmd->add_option("--b", b_labels, "Comma-separated systems of B")->required();
    if (third) cmd->add_option("--c", c_labels, "Comma-separated systems of C")->required();
    cmd->add_option("--alpha", alpha, "Order alpha >= 1/2")->capture_default_str();
    cmd->add_option("--starts", starts, "Optimizer starts")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", seed, "Seed of the random starts")->capture_default_str();
    add_output(cmd, common, {"text", "json", "csv"});
  };
  auto* cond = app.add_subcommand("conditional-entropy", "S~_alpha(A|B)");
  add_optimized(cond, false);
  auto* mutual = app.add_subcommand("mutual-info", "I~_alpha(A;B)");
  add_optimized(mutual, false);
  auto* cmi = app.add_subcommand("cmi", "I~_alpha(A;B|C)");
  add_optimized(cmi, true);

  auto* curve = app.add_subcommand("exponent-curve", "Strong-converse bounds of a protocol instance over an alpha grid");
  curve->add_option("-i,--input", input, "Protocol instance file")->required();
  curve->add_option("--grid", grid_spec, "start:end:count with 1/2 < start <= end < 1")->capture_default_str();
  curve->add_option("--rate", rate_items, "key=value rate in bits per copy; replaces the simulated costs");
  add_output(curve, common, {"csv", "json"});

  auto* simulate = app.add_subcommand("simulate", "Run a protocol instance and check its merit against every bound");
  simulate->add_option("-i,--input", input, "Protocol instance file")->required();
  simulate->add_option("--grid", grid_spec, "start:end:count for the bound check")->capture_default_str();
  simulate->add_option("--final-state", final_state, "Also write the final state to this file");
  add_output(simulate, common, {"json"});

  auto* verify = app.add_subcommand("verify", "Run inequality suites or protocol soundness sweeps");
  verify->add_option("--suite", suite, "Suite id or 'all' (default when --protocol is absent)");
  verify->add_option("--protocol", protocol, "Protocol kind or 'all'");
  verify->add_option("--trials", trials, "Trials per suite")->check(CLI::PositiveNumber)->capture_default_str();
  verify->add_option("--dims", dims_spec, "Comma-separated dims of a single suite or protocol");
  verify->add_option("--seed", seed, "Seed")->capture_default_str();
  verify->add_option("--tol", tol, "Closed-form tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  add_output(verify, common, {"json"});

  auto* falsify = app.add_subcommand("falsify", "Search classical states for counterexamples to either bound ordering");
  falsify->add_option("--trials", falsify_trials, "Samples")->check(CLI::NonNegativeNumber)->capture_default_str();
  falsify->add_option("--seed", seed, "Seed")->capture_default_str();
  falsify->add_option("--output-dir", output_dir, "Directory for counterexample state files")->capture_default_str();
  add_output(falsify, common, {"json"});

  auto* limits = app.add_subcommand("limits", "Renyi expressions near alpha = 1 against their von Neumann limits");
  limits->add_option("-i,--input", input, "Protocol instance file")->required();
  limits->add_option("--epsilon", epsilons, "Distances 1 - alpha")->capture_default_str();
  add_output(limits, common, {"json", "csv"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (common.format.empty()) {
    const bool csv = curve->parsed();
    const bool text = entropy->parsed() || divergence->parsed() || cond->parsed() || mutual->parsed() || cmi->parsed();
    common.format = csv ? "csv" : text ? "text" : "json";
  }

  try {
    thread_count();
    OptimizerConfig config;
    config.starts = starts;
    config.seed = seed;

    if (entropy->parsed()) {
      const Operator rho = read_state(input);
      const double v = systems.empty() ? renyi_entropy(rho, alpha) : renyi_entropy(rho, split_labels(systems), alpha);
      emit_scalar(common, "entropy", alpha, v);
      return 0;
    }
    if (divergence->parsed()) {
      const Operator rho = read_state(input);
      const Operator sigma = state_from_json(load_json(sigma_path), sigma_path);
      if (!sigma.space().same_systems(rho.space())) {
        throw FileError(sigma_path, "systems", "must match the systems of " + input);
      }
      emit_scalar(common, "divergence", alpha, sandwiched_divergence(rho, align_to(sigma, rho.space()), alpha));
      return 0;
    }
    if (cond->parsed() || mutual->parsed()) {
      const Operator rho = read_state(input);
      const auto a = split_labels(a_labels);
      const auto b = split_labels(b_labels);
      const bool is_cond = cond->parsed();
      const OptimizedValue v = is_cond ? conditional_entropy(rho, a, b, alpha, config)
                                       : mutual_information(rho, a, b, alpha, config);
      emit_scalar(common, is_cond ? "conditional-entropy" : "mutual-info", alpha, v.value);
      return 0;
    }
    if (cmi->parsed()) {
      const Operator rho = read_state(input);
      const double v = conditional_mutual_information(rho, split_labels(a_labels), split_labels(b_labels),
                                                      split_labels(c_labels), alpha);
      emit_scalar(common, "cmi", alpha, v);
      return 0;
    }
    if (curve->parsed()) {
      const std::vector<double> grid = parse_grid(grid_spec);
      const ProtocolFile file = read_instance(input);
      const Rates rates = rate_items.empty() ? run_instance(file).costs : parse_rates(rate_items);
      const auto curves = exponent_curve(bound_state(file), rates, grid);
      if (common.format == "json") {
        emit(common, Json{{"kind", to_string(file.kind)}, {"curves", curves_to_json(curves)}}.dump(2) + "\n");
      } else {
        std::ostringstream out;
        write_curve_csv(out, curves);
        emit(common, out.str());
      }
      return 0;
    }
    if (simulate->parsed()) {
      const std::vector<double> grid = parse_grid(grid_spec);
      const ProtocolFile file = read_instance(input);
      const ProtocolOutcome outcome = run_instance(file);
      Json report = outcome_to_json(file, outcome);
      Json checks;
      const int violations = bound_checks(outcome, exponent_curve(bound_state(file), outcome.costs, grid), &checks);
      report["bounds"] = std::move(checks);
      if (!final_state.empty()) write_state(final_state, outcome.final_state);
      emit(common, report.dump(2) + "\n");
      return violations == 0 ? 0 : kExitFailure;
    }
    if (verify->parsed()) {
      const std::vector<int> dims = dims_spec.empty() ? std::vector<int>{} : parse_dims(dims_spec);
      std::vector<std::string> suites;
      std::vector<ProtocolKind> kinds;
      if (suite == "all" || (suite.empty() && protocol.empty())) {
        suites = suite_ids();
      } else if (!suite.empty()) {
        suites = {suite};
      }
      if (protocol == "all") {
        kinds = {ProtocolKind::redistribution,          ProtocolKind::redistribution_feedback,
                 ProtocolKind::coherent_merging,        ProtocolKind::state_splitting,
                 ProtocolKind::measurement_compression, ProtocolKind::randomness_extraction,
                 ProtocolKind::data_compression};
      } else if (!protocol.empty()) {
        kinds = {parse_protocol_kind(protocol)};
      }
      if (!dims.empty() && suites.size() + kinds.size() != 1) {
        throw UsageError("--dims needs exactly one suite or protocol");
      }
      Json reports = Json::array();
      bool passed = true;
      const auto record = [&](const SuiteReport& r) {
        passed = passed && r.passed();
        std::cerr << r.suite << ": " << r.trials << " trials, " << r.failures.size() << " failures, "
                  << r.runtime_seconds << " s\n";
        reports.push_back(suite_report_to_json(r));
      };
      for (const auto& id : suites) record(run_inequality_suite(id, trials, dims, seed, tol));
      for (auto kind : kinds) record(check_protocol_bounds(kind, trials, dims, seed));
      emit(common, Json{{"passed", passed}, {"reports", std::move(reports)}, {"timestamp", timestamp()}}.dump(2) + "\n");
      return passed ? 0 : kExitFailure;
    }
    if (falsify->parsed()) {
      const FalsifyReport r = falsify_bound_comparison(falsify_trials, seed);
      std::filesystem::create_directories(output_dir);
      std::vector<std::string> files;
      for (const auto& c : r.counterexamples) {
        const std::string name = "counterexample-" + c.direction + ".json";
        write_state((std::filesystem::path(output_dir) / name).string(), c.state);
        files.push_back(name);
      }
      Json report = falsify_report_to_json(r, files);
      report["timestamp"] = timestamp();
      emit(common, report.dump(2) + "\n");
      std::cerr << "falsify: " << r.left_violations << " left, " << r.right_violations << " right, "
                << r.counterexamples.size() << " counterexamples written, " << r.runtime_seconds << " s\n";
      // The diagonal fast path is only trusted while its cross-checks agree with the optimizer.
      if (r.crosscheck_max_difference > kOptimizerTolerance) {
        std::cerr << "falsify: classical fast path disagrees with the optimizer by " << r.crosscheck_max_difference
                  << "\n";
        return kExitFailure;
      }
      return 0;
    }
    if (limits->parsed()) {
      const ProtocolFile file = read_instance(input);
      std::vector<LimitEntry> all;
      for (double eps : epsilons) {
        if (!(eps > 0.0 && eps < 0.5)) throw UsageError("--epsilon must lie in (0, 1/2)");
        const auto entries = vn_limit_check(bound_state(file), eps);
        all.insert(all.end(), entries.begin(), entries.end());
      }
      if (common.format == "csv") {
        std::ostringstream out;
        out << "bound_id,alpha,renyi,von_neumann,gap\n";
        for (const auto& e : all) {
          out << e.bound_id << ',' << format_double(e.alpha) << ',' << format_double(e.renyi) << ','
              << format_double(e.von_neumann) << ',' << format_double(e.gap) << '\n';
        }
        emit(common, out.str());
      } else {
        emit(common, Json{{"kind", to_string(file.kind)}, {"limits", limits_to_json(all)}}.dump(2) + "\n");
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
