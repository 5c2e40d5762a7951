#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robust_bandits.hpp"
#include "robust_bandits/output.hpp"

namespace rb = robust_bandits;
namespace fs = std::filesystem;

#ifndef ROBUST_BANDITS_PRESET_DIR
#define ROBUST_BANDITS_PRESET_DIR "presets"
#endif

namespace {

enum Exit { ok = 0, validation = 1, invariant = 2, solver = 3 };

struct RunArgs {
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;
  int trials = 0;
  long long seed = -1;
  std::string out;
  bool diagnostics = false;
  bool header = false;
  int workers = 0;
  std::string axis;
  std::string values;
};

fs::path preset_path(const std::string& name) {
  std::vector<fs::path> roots;
  if (const char* env = std::getenv("ROBUST_BANDITS_PRESETS")) roots.emplace_back(env);
  roots.emplace_back(ROBUST_BANDITS_PRESET_DIR);
  roots.emplace_back("presets");
  for (const auto& root : roots) {
    const fs::path p = root / (name + ".cfg");
    if (fs::exists(p)) return p;
  }
  throw rb::ValidationError("unknown preset '" + name + "'");
}

rb::Config load_config(const RunArgs& args) {
  rb::require(!args.config_path.empty() || !args.preset.empty(), "one of --config or --preset is required");
  rb::require(args.config_path.empty() || args.preset.empty(), "--config and --preset are exclusive");
  const fs::path source = args.preset.empty() ? fs::path(args.config_path) : preset_path(args.preset);
  rb::Config cfg = rb::Config::load(source.string());
  // data files named relative to the config file
  for (const char* key : {"instance.features", "instance.theta"}) {
    const fs::path p = cfg.get(key);
    if (p.empty() || p.is_absolute()) continue;
    const fs::path beside = source.parent_path() / p;
    if (!fs::exists(p) && fs::exists(beside)) cfg.set(key, fs::weakly_canonical(beside).string());
  }
  for (const auto& o : args.overrides) cfg.apply_override(o);
  if (args.trials > 0) cfg.set("run.trials", std::to_string(args.trials));
  if (args.seed >= 0) cfg.set("run.seed", std::to_string(args.seed));
  if (args.diagnostics) cfg.set("run.diagnostics", "true");
  if (args.header) cfg.set("instance.header", "true");
  if (args.workers > 0) cfg.set("run.workers", std::to_string(args.workers));
  return cfg;
}

fs::path output_dir(const RunArgs& args, const rb::Config& cfg) {
  if (!args.out.empty()) return args.out;
  if (!cfg.get("run.out").empty()) return cfg.get("run.out");
  if (const char* env = std::getenv("ROBUST_BANDITS_OUT")) return env;
  return "results";
}

int execute(rb::Config cfg, const fs::path& out, bool always_index) {
  rb::validate_experiment(cfg);
  const rb::Config resolved = cfg.resolved();
  const auto combos = rb::combinations(resolved);
  const auto options = rb::output_options(resolved);
  const auto trials = static_cast<std::size_t>(resolved.get_integer("run.trials"));
  const auto seed = static_cast<std::uint64_t>(resolved.get_integer("run.seed"));
  const auto horizon = static_cast<std::size_t>(resolved.get_integer("run.horizon"));

  rb::TrialOptions trial_options;
  trial_options.workers = rb::resolve_workers(resolved);
  trial_options.keep_traces = true;
  if (options.diagnostics) trial_options.episode.diagnostic_rounds = rb::output_rounds(horizon, options);

  const bool nested = always_index || combos.size() > 1;
  std::vector<std::pair<rb::Combination, rb::TrialSummary>> results;
  for (const auto& combo : combos) {
    const rb::Config pinned = combo.pin(resolved);
    auto summary = rb::run_trials(rb::make_trial_factory(pinned, combo), trials, seed, horizon, trial_options);
    rb::write_combination(nested ? out / combo.label() : out, summary, pinned, combo, options);
    std::cout << combo.label() << " mean_final_regret=" << rb::format_real(summary.mean_final())
              << " std=" << rb::format_real(summary.std_final()) << '\n';
    summary.traces.clear();
    results.emplace_back(combo, std::move(summary));
  }
  if (nested) rb::write_text(out / "index.csv", rb::index_csv(results, resolved, options));
  return ok;
}

int cmd_design(const std::string& path, double tol, std::size_t max_iters, bool header, const std::string& out) {
  const rb::ContextMatrix arms = rb::read_arm_csv(path, header);
  rb::DesignOptions options;
  options.tol = tol;
  options.max_iters = max_iters;
  auto emit = [&](const rb::Design& design) {
    std::ostringstream csv;
    csv << "arm_index,weight\n";
    for (std::size_t i : design.support) {
      csv << i << ',' << rb::format_real(design.weights(static_cast<Eigen::Index>(i))) << '\n';
    }
    std::ostringstream line;
    line << "# value=" << rb::format_real(design.value) << " support=" << design.support.size()
         << " iterations=" << design.iterations << " r_eff=" << design.effective_rank << '\n';
    if (out.empty()) {
      std::cout << csv.str();
    } else {
      rb::write_text(out, csv.str());
    }
    std::cout << line.str();
  };
  try {
    emit(rb::frank_wolfe_design(arms, options));
  } catch (const rb::DesignError& e) {
    emit(e.best());
    throw;
  }
  return ok;
}

void add_run_flags(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--config", args.config_path, "Config file (or an output CSV with an embedded config)");
  cmd->add_option("--preset", args.preset, "Named preset from the presets directory");
  cmd->add_option("--set", args.overrides, "Override, key=value (repeatable)")->take_all();
  cmd->add_option("--trials", args.trials, "Number of trials");
  cmd->add_option("--seed", args.seed, "Base seed");
  cmd->add_option("--out", args.out, "Output directory");
  cmd->add_option("--workers", args.workers, "Parallel trial workers");
  cmd->add_flag("--diagnostics", args.diagnostics, "Write learner snapshots into traces");
  cmd->add_flag("--header", args.header, "Instance CSVs have a header line");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic linear bandits under adversarial reward corruption"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run trials for every combination in a config");
  add_run_flags(run, run_args);

  RunArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of an axis");
  add_run_flags(sweep, sweep_args);
  sweep->add_option("--axis", sweep_args.axis, "C, eta or algorithm")->required();
  sweep->add_option("--values", sweep_args.values, "Comma-separated values")->required();

  std::string arms_path, design_out;
  double tol = 1e-2;
  std::size_t max_iters = 0;
  bool design_header = false;
  auto* design = app.add_subcommand("design", "Near G-optimal design for an arm CSV");
  design->add_option("arms", arms_path, "Arm CSV, one arm per row")->required();
  design->add_option("--tol", tol, "Relative tolerance");
  design->add_option("--max-iters", max_iters, "Iteration cap (0: 10^4 d)");
  design->add_option("--out", design_out, "Write the weight CSV here instead of stdout");
  design->add_flag("--header", design_header, "Skip one header line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : validation;
  }

  try {
    if (*run) {
      rb::Config cfg = load_config(run_args);
      return execute(cfg, output_dir(run_args, cfg), false);
    }
    if (*sweep) {
      rb::Config cfg = load_config(sweep_args);
      std::string key;
      if (sweep_args.axis == "C") key = "adversary.budget";
      else if (sweep_args.axis == "eta") key = "instance.eta";
      else if (sweep_args.axis == "algorithm") key = "learner.kind";
      else throw rb::ValidationError("unknown sweep axis '" + sweep_args.axis + "' (expected C, eta or algorithm)");
      cfg.set(key, sweep_args.values);
      rb::require(!rb::split_list(sweep_args.values).empty(), "--values is empty");
      return execute(cfg, output_dir(sweep_args, cfg), true);
    }
    return cmd_design(arms_path, tol, max_iters, design_header, design_out);
  } catch (const rb::DesignError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return solver;
  } catch (const rb::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return validation;
  } catch (const rb::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return invariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invariant;
  }
}
