#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "robust_bandits/adversaries.hpp"
#include "robust_bandits/attack_spec.hpp"
#include "robust_bandits/config.hpp"
#include "robust_bandits/greedy.hpp"
#include "robust_bandits/harness.hpp"
#include "robust_bandits/instances.hpp"
#include "robust_bandits/linucb.hpp"
#include "robust_bandits/phased_elimination.hpp"
#include "robust_bandits/reference_learners.hpp"
#include "robust_bandits/thompson.hpp"

namespace robust_bandits {

/// One point of the cartesian product over the list-valued keys.
struct Combination {
  std::string learner;
  std::string adversary;
  double eta = 0.0;
  double budget = 0.0;

  /// Directory name, e.g. `greedy__flip_theta__eta0.5__C150`.
  std::string label() const {
    std::string s = learner + "__" + adversary + "__eta" + format_real(eta) + "__C" + format_real(budget);
    for (char& ch : s) {
      if (ch == ':' || ch == '+' || ch == '/' || ch == ' ') ch = '-';
    }
    return s;
  }

  /// The config with every list key pinned to this combination.
  Config pin(const Config& cfg) const {
    Config out = cfg;
    out.set("learner.kind", learner);
    out.set("adversary.kind", adversary);
    out.set("instance.eta", format_real(eta));
    out.set("adversary.budget", format_real(budget));
    return out;
  }
};

inline std::vector<Combination> combinations(const Config& cfg) {
  const auto learners = cfg.get_list("learner.kind");
  const auto adversaries = cfg.get_list("adversary.kind");
  const auto etas = cfg.get_reals("instance.eta");
  const auto budgets = cfg.get_reals("adversary.budget");
  std::vector<Combination> out;
  for (const auto& l : learners) {
    for (const auto& a : adversaries) {
      for (double e : etas) {
        for (double c : budgets) out.push_back({l, a, e, c});
      }
    }
  }
  return out;
}

/// Checks that need more than the per-key type check; lists every problem.
inline void validate_experiment(const Config& cfg) {
  cfg.validate();
  std::vector<std::string> errors;
  const std::string kind = cfg.get("instance.kind");
  if (kind.empty()) {
    errors.push_back("missing key 'instance.kind'");
  } else if (kind != "synthetic_fixed" && kind != "synthetic_contextual" && kind != "csv" && kind != "lower_bound") {
    errors.push_back("instance.kind must be synthetic_fixed, synthetic_contextual, csv or lower_bound (got '" +
                     kind + "')");
  }
  if (kind == "csv" && cfg.get("instance.features").empty()) errors.push_back("missing key 'instance.features'");
  if (kind == "csv" && cfg.get("instance.theta").empty()) errors.push_back("missing key 'instance.theta'");
  if (kind == "lower_bound" && !parse_fixture_name(cfg.get("instance.fixture"))) {
    errors.push_back("instance.fixture must name a lower-bound fixture (got '" + cfg.get("instance.fixture") + "')");
  }
  if (cfg.get_list("learner.kind").empty()) errors.push_back("missing key 'learner.kind'");
  if (cfg.get_list("adversary.kind").empty()) errors.push_back("adversary.kind is empty");
  if (cfg.get_reals("instance.eta").empty()) errors.push_back("instance.eta is empty");
  if (cfg.get_reals("adversary.budget").empty()) errors.push_back("adversary.budget is empty");
  if (!parse_pe_mode(cfg.get("learner.mode"))) errors.push_back("learner.mode is not a phased-elimination mode");
  const std::string ds = cfg.get("adversary.delayed_start");
  if (ds != "auto" && !parse_bool(ds)) errors.push_back("adversary.delayed_start must be auto, true or false");
  for (const char* key : {"instance.seed", "adversary.theta_target_seed"}) {
    const std::string seed = cfg.get(key);
    if (seed != "trial" && !parse_integer(seed)) errors.push_back(std::string(key) + " must be an integer or 'trial'");
  }
  if (cfg.get_integer("run.horizon") < 1) errors.push_back("run.horizon must be >= 1");
  if (cfg.get_integer("run.trials") < 1) errors.push_back("run.trials must be >= 1");
  for (double c : cfg.get_reals("adversary.budget")) {
    if (c < 0) errors.push_back("adversary.budget values must be >= 0");
  }
  for (double e : cfg.get_reals("instance.eta")) {
    if (e < 0) errors.push_back("instance.eta values must be >= 0");
  }
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
    throw ValidationError(msg);
  }
}

/// The environment a trial runs in, and whether the adversary may act in it.
struct BuiltEnvironment {
  Environment env;
  bool attacked = true;
  std::optional<AttackSpec> fixture_attack;
};

inline BuiltEnvironment make_environment(const Config& cfg, double eta, double budget, std::uint64_t trial_seed) {
  const std::string kind = cfg.get("instance.kind");
  const std::string seed_key = cfg.get("instance.seed");
  const std::uint64_t seed =
      seed_key == "trial" ? trial_seed : static_cast<std::uint64_t>(*parse_integer(seed_key));
  const auto d = static_cast<std::size_t>(cfg.get_integer("instance.d"));
  const auto k = static_cast<std::size_t>(cfg.get_integer("instance.k"));
  const double sigma2 = cfg.get_real("instance.noise_variance");

  if (kind == "synthetic_fixed") return {Environment::fixed(make_synthetic_fixed(d, k, seed, sigma2))};
  if (kind == "synthetic_contextual") {
    auto [model, instance] = make_synthetic_contextual(d, k, eta, sigma2, seed);
    if (eta == 0.0) return {Environment::fixed(instance)};
    return {Environment::perturbed(std::move(model), instance.theta, instance.noise)};
  }
  if (kind == "csv") {
    CsvOptions options{cfg.get_bool("instance.header"), cfg.get_bool("instance.strict")};
    const auto noise = sigma2 > 0.0 ? NoiseModel::gaussian(sigma2) : NoiseModel::none();
    auto loaded = load_instance_csv(cfg.get("instance.features"), cfg.get("instance.theta"), options, noise);
    const auto sample = static_cast<std::size_t>(cfg.get_integer("instance.sample_k"));
    if (sample == 0) return {Environment::fixed(loaded.instance)};
    return {Environment::pooled(loaded.instance.arms, sample, loaded.instance.theta, loaded.instance.noise)};
  }
  // lower_bound
  const FixtureName name = *parse_fixture_name(cfg.get("instance.fixture"));
  FixtureParams params{{"d", static_cast<double>(d)}, {"k", static_cast<double>(k)},
                       {"eta", eta},                  {"sigma2", sigma2},
                       {"seed", static_cast<double>(seed)}};
  if (cfg.get("instance.rbar0").empty()) {
    params["C"] = budget;
  } else {
    params["rbar0"] = cfg.get_real("instance.rbar0");
  }
  LowerBoundFixture fixture = make_lower_bound(name, params);
  const auto variant = static_cast<std::size_t>(cfg.get_integer("instance.variant"));
  require(variant < fixture.environments.size(),
          "instance.variant out of range for fixture (" + std::to_string(fixture.environments.size()) + " variants)");
  const bool attacked =
      std::find(fixture.attacked.begin(), fixture.attacked.end(), variant) != fixture.attacked.end();
  return {fixture.environments[variant], attacked, fixture.attack};
}

inline bool is_phased_elimination(const std::string& kind) {
  return kind == "rpe" || kind == "nonrobust_pe" || kind.rfind("rpe_", 0) == 0;
}

inline std::unique_ptr<Learner> make_learner(const std::string& kind, const Config& cfg, const Environment& env,
                                             std::size_t horizon, double budget, std::uint64_t seed) {
  const std::size_t d = env.d();
  if (is_phased_elimination(kind)) {
    PhasedEliminationConfig pe;
    if (kind == "rpe" || kind == "nonrobust_pe") {
      pe.mode = *parse_pe_mode(cfg.get("learner.mode"));
    } else {
      const auto mode = parse_pe_mode(kind.substr(4));
      require(mode.has_value(), "unknown learner kind '" + kind + "'");
      pe.mode = *mode;
    }
    pe.robust = kind != "nonrobust_pe";
    if (!cfg.get("learner.delta").empty()) pe.delta = cfg.get_real("learner.delta");
    if (!cfg.get("learner.nu").empty()) pe.nu = cfg.get_real("learner.nu");
    pe.horizon = horizon;
    pe.budget = budget;
    const ArmSet* arms = env.fixed_arms();
    require(arms != nullptr, kind + " needs a fixed arm set (use eta = 0 or a non-pooled instance)");
    return std::make_unique<PhasedElimination>(*arms, pe);
  }
  if (kind == "greedy") return std::make_unique<Greedy>(d);
  if (kind == "linucb") {
    return std::make_unique<LinUcb>(d, LinUcbConfig{cfg.get_real("learner.lambda"), cfg.get_real("learner.ucb_delta")});
  }
  if (kind == "thompson") {
    return std::make_unique<ThompsonSampling>(
        d, seed, ThompsonConfig{cfg.get_real("learner.prior_variance"), cfg.get_real("learner.noise_variance")});
  }
  if (kind == "oracle") return std::make_unique<OracleLearner>(env.theta());
  if (kind == "fixed") {
    const auto arm = static_cast<std::size_t>(cfg.get_integer("learner.arm"));
    require(arm < env.k(), "learner.arm out of range");
    return std::make_unique<FixedArmLearner>(d, arm);
  }
  throw ValidationError("unknown learner kind '" + kind + "'");
}

/// `name[:N][+delayed]`, e.g. `top_n:5`, `flip_theta+delayed`.
inline AttackSpec parse_attack(const std::string& text, const Config& cfg, double budget) {
  AttackSpec spec;
  std::string name = text;
  const std::string ds = cfg.get("adversary.delayed_start");
  spec.delayed_start = ds == "auto" ? DelayedStart::automatic
                                    : (*parse_bool(ds) ? DelayedStart::on : DelayedStart::off);
  if (const auto plus = name.find('+'); plus != std::string::npos) {
    const std::string suffix = name.substr(plus + 1);
    require(suffix == "delayed" || suffix == "delayed_start", "unknown attack modifier '" + suffix + "'");
    // only learners with a threshold wait; the rest are attacked from the start
    spec.delayed_start = DelayedStart::automatic;
    name = name.substr(0, plus);
  }
  spec.top_n = static_cast<std::size_t>(cfg.get_integer("adversary.top_n"));
  if (const auto colon = name.find(':'); colon != std::string::npos) {
    const auto n = parse_integer(name.substr(colon + 1));
    require(n.has_value() && *n >= 1, "bad attack parameter in '" + text + "'");
    spec.top_n = static_cast<std::size_t>(*n);
    name = name.substr(0, colon);
  }
  const auto kind = parse_attack_kind(name);
  require(kind.has_value(), "unknown adversary kind '" + name + "'");
  spec.kind = *kind;
  spec.budget = budget;
  spec.target = static_cast<std::size_t>(cfg.get_integer("adversary.target"));
  spec.v_target = cfg.get_real("adversary.v_target");
  spec.eps0 = cfg.get_real("adversary.eps0");
  spec.shift = cfg.get_real("adversary.shift");
  const auto direction = cfg.get_reals("adversary.theta_target");
  if (!direction.empty()) spec.theta_target = Eigen::Map<const Vector>(direction.data(), static_cast<Eigen::Index>(direction.size()));
  return spec;
}

/// Trial factory for one combination of a validated config.
inline TrialFactory make_trial_factory(const Config& cfg, const Combination& combo) {
  const auto horizon = static_cast<std::size_t>(cfg.get_integer("run.horizon"));
  return [cfg, combo, horizon](std::uint64_t seed) {
    BuiltEnvironment built = make_environment(cfg, combo.eta, combo.budget, seed);
    auto learner = make_learner(combo.learner, cfg, built.env, horizon, combo.budget, seed);
    std::unique_ptr<Adversary> adversary;
    if (built.attacked) {
      AttackSpec spec;
      if (combo.adversary == "fixture") {
        require(built.fixture_attack.has_value(), "adversary 'fixture' needs instance.kind = lower_bound");
        spec = *built.fixture_attack;
      } else {
        spec = parse_attack(combo.adversary, cfg, combo.budget);
      }
      const std::string direction_seed = cfg.get("adversary.theta_target_seed");
      const std::uint64_t adversary_seed =
          direction_seed == "trial" ? seed : static_cast<std::uint64_t>(*parse_integer(direction_seed));
      adversary = std::make_unique<Adversary>(make_adversary(spec, built.env, learner.get(), adversary_seed));
    }
    return Trial{std::move(built.env), std::move(learner), std::move(adversary)};
  };
}

inline std::size_t resolve_workers(const Config& cfg) {
  const auto w = cfg.get_integer("run.workers");
  if (w > 0) return static_cast<std::size_t>(w);
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace robust_bandits
