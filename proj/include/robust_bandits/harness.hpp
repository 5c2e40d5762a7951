#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "robust_bandits/adversaries.hpp"
#include "robust_bandits/core.hpp"
#include "robust_bandits/design.hpp"
#include "robust_bandits/instances.hpp"
#include "robust_bandits/learner.hpp"
#include "robust_bandits/rng.hpp"

namespace robust_bandits {

/// Per-round record of one episode. Regret never includes corruption; the
/// `cum_regret_corrupted` column measures against corrupted means instead.
struct RegretTrace {
  std::uint64_t seed = 0;
  std::vector<std::size_t> arm;
  std::vector<double> inst_regret;
  std::vector<double> cum_regret;
  std::vector<double> cum_regret_corrupted;
  std::vector<double> corruption;
  std::vector<double> spent;
  std::vector<double> observed;
  double budget = 0.0;
  LearnerSnapshot final_state;
  std::vector<std::pair<std::size_t, LearnerSnapshot>> diagnostics;

  std::size_t horizon() const { return arm.size(); }
  double final_regret() const { return cum_regret.empty() ? 0.0 : cum_regret.back(); }
  double total_corruption() const {
    double s = 0.0;
    for (double c : corruption) s += std::abs(c);
    return s;
  }
};

struct EpisodeOptions {
  /// Rounds (1-based, ascending) at which to snapshot the learner.
  std::vector<std::size_t> diagnostic_rounds;
};

/// One episode of the interaction protocol: contexts, learner choice, noise,
/// adversary, then the corrupted reward goes back to the learner.
inline RegretTrace run_episode(const Environment& env, Learner& learner, Adversary& adversary,
                               std::size_t horizon, std::uint64_t seed, const EpisodeOptions& options = {}) {
  require(horizon >= 1, "run_episode: horizon must be >= 1");
  CounterRng context_rng(seed, Stream::contexts);
  CounterRng noise_rng(seed, Stream::noise);

  RegretTrace trace;
  trace.seed = seed;
  trace.budget = adversary.ledger().budget();
  trace.arm.reserve(horizon);
  trace.inst_regret.reserve(horizon);
  trace.cum_regret.reserve(horizon);
  trace.cum_regret_corrupted.reserve(horizon);
  trace.corruption.reserve(horizon);
  trace.spent.reserve(horizon);
  trace.observed.reserve(horizon);

  ContextMatrix buffer;
  const Vector& theta = env.theta();
  const bool bounded = env.unit_ball_contexts();
  double cum = 0.0, cum_corrupted = 0.0;
  auto next_diag = options.diagnostic_rounds.begin();

  for (std::size_t t = 1; t <= horizon; ++t) {
    const ContextMatrix& contexts = env.contexts(context_rng, buffer);
    const std::size_t i = learner.select_action(contexts);
    const Vector means = theta.transpose() * contexts;
    const double best = means.maxCoeff();
    const double mean = means(static_cast<Eigen::Index>(i));
    const double noise = env.noise().draw(noise_rng);

    const AttackContext ctx{t, i, contexts, theta, mean, noise, &learner};
    const double c = adversary.corrupt(ctx);
    const double y = mean + noise + c;
    learner.observe(y);

    const double r = best - mean;
    ensure(r >= -1e-12, "instantaneous regret is negative");
    if (bounded) ensure(r <= 2.0 + 1e-12, "instantaneous regret exceeds 2");
    cum += r;
    // Best corrupted mean is bounded by the uncorrupted best plus |c| on the played arm only.
    cum_corrupted += best - (mean + c);

    trace.arm.push_back(i);
    trace.inst_regret.push_back(r);
    trace.cum_regret.push_back(cum);
    trace.cum_regret_corrupted.push_back(cum_corrupted);
    trace.corruption.push_back(c);
    trace.spent.push_back(adversary.ledger().spent());
    trace.observed.push_back(y);

    while (next_diag != options.diagnostic_rounds.end() && *next_diag <= t) {
      if (*next_diag == t) trace.diagnostics.emplace_back(t, learner.snapshot());
      ++next_diag;
    }
  }

  const double spent = adversary.ledger().spent();
  ensure(spent <= trace.budget, "corruption budget exceeded");
  ensure(std::abs(trace.total_corruption() - spent) <= 1e-9 * std::max(1.0, trace.budget),
         "corruption ledger disagrees with the trace");
  trace.final_state = learner.snapshot();
  return trace;
}

/// Everything needed for one seeded trial.
struct Trial {
  Environment env;
  std::unique_ptr<Learner> learner;
  std::unique_ptr<Adversary> adversary;
};

using TrialFactory = std::function<Trial(std::uint64_t seed)>;

struct TrialOptions {
  std::size_t workers = 1;
  bool keep_traces = false;
  EpisodeOptions episode;
};

struct TrialSummary {
  std::size_t horizon = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> final_regret;
  std::vector<double> final_spent;
  std::vector<double> mean_curve;
  std::vector<double> std_curve;
  std::vector<double> mean_corrupted_curve;
  /// Trial indices by final regret, largest first; ties by seed.
  std::vector<std::size_t> ranking;
  std::vector<RegretTrace> traces;  // filled when keep_traces

  std::size_t trials() const { return seeds.size(); }
  double mean_final() const { return mean_curve.empty() ? 0.0 : mean_curve.back(); }
  double std_final() const { return std_curve.empty() ? 0.0 : std_curve.back(); }

  std::vector<std::size_t> worst(std::size_t n) const {
    return {ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(std::min(n, ranking.size()))};
  }
};

namespace detail {

/// Rethrow `e` with a prefixed message, keeping its error category.
[[noreturn]] inline void rethrow_with_context(std::exception_ptr e, const std::string& prefix) {
  try {
    std::rethrow_exception(e);
  } catch (const DesignError& err) {
    throw DesignError(prefix + err.what(), err.best());
  } catch (const ValidationError& err) {
    throw ValidationError(prefix + err.what());
  } catch (const InvariantViolation& err) {
    throw InvariantViolation(prefix + err.what());
  } catch (const std::exception& err) {
    throw std::runtime_error(prefix + err.what());
  }
}

}  // namespace detail

/// Runs trials with seeds base_seed + i. Aggregation is by trial index, so the
/// result does not depend on the worker count.
inline TrialSummary run_trials(const TrialFactory& factory, std::size_t trials, std::uint64_t base_seed,
                               std::size_t horizon, const TrialOptions& options = {}) {
  require(trials >= 1, "run_trials: need at least one trial");
  std::vector<RegretTrace> traces(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      const std::uint64_t seed = base_seed + i;
      try {
        Trial trial = factory(seed);
        Adversary none = Adversary::none();
        Adversary& adversary = trial.adversary ? *trial.adversary : none;
        traces[i] = run_episode(trial.env, *trial.learner, adversary, horizon, seed, options.episode);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, trials);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < trials; ++i) {
    if (errors[i]) {
      detail::rethrow_with_context(errors[i],
                                   "trial " + std::to_string(i) + " (seed " + std::to_string(base_seed + i) + "): ");
    }
  }

  TrialSummary s;
  s.horizon = horizon;
  s.mean_curve.assign(horizon, 0.0);
  s.std_curve.assign(horizon, 0.0);
  s.mean_corrupted_curve.assign(horizon, 0.0);
  const double n = static_cast<double>(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    s.seeds.push_back(base_seed + i);
    s.final_regret.push_back(traces[i].final_regret());
    s.final_spent.push_back(traces[i].spent.back());
    for (std::size_t t = 0; t < horizon; ++t) {
      s.mean_curve[t] += traces[i].cum_regret[t] / n;
      s.mean_corrupted_curve[t] += traces[i].cum_regret_corrupted[t] / n;
    }
  }
  for (std::size_t i = 0; i < trials; ++i) {
    for (std::size_t t = 0; t < horizon; ++t) {
      const double dev = traces[i].cum_regret[t] - s.mean_curve[t];
      s.std_curve[t] += dev * dev / n;
    }
  }
  for (double& v : s.std_curve) v = std::sqrt(v);

  s.ranking.resize(trials);
  for (std::size_t i = 0; i < trials; ++i) s.ranking[i] = i;
  std::stable_sort(s.ranking.begin(), s.ranking.end(), [&](std::size_t a, std::size_t b) {
    if (s.final_regret[a] != s.final_regret[b]) return s.final_regret[a] > s.final_regret[b];
    return s.seeds[a] < s.seeds[b];
  });
  if (options.keep_traces) s.traces = std::move(traces);
  return s;
}

/// One summary per swept value, in input order.
template <class Value>
std::vector<std::pair<Value, TrialSummary>> sweep(const std::vector<Value>& values,
                                                  const std::function<TrialFactory(const Value&)>& make_factory,
                                                  std::size_t trials, std::uint64_t base_seed, std::size_t horizon,
                                                  const TrialOptions& options = {}) {
  std::vector<std::pair<Value, TrialSummary>> out;
  for (const auto& v : values) out.emplace_back(v, run_trials(make_factory(v), trials, base_seed, horizon, options));
  return out;
}

/// Output grid: powers of two, user checkpoints, and T itself (1-based, sorted, unique).
inline std::vector<std::size_t> checkpoint_grid(std::size_t horizon, const std::vector<std::size_t>& extra = {}) {
  std::vector<std::size_t> grid;
  for (std::size_t p = 1; p <= horizon; p *= 2) grid.push_back(p);
  for (std::size_t c : extra) {
    if (c >= 1 && c <= horizon) grid.push_back(c);
  }
  grid.push_back(horizon);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

/// Least-squares slope of cumulative regret over the final tenth of the horizon.
inline double last_decile_slope(const std::vector<double>& cum) {
  const std::size_t n = cum.size();
  require(n >= 10, "last_decile_slope: need at least 10 rounds");
  const std::size_t start = n - n / 10;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n - start);
  for (std::size_t t = start; t < n; ++t) {
    const double x = static_cast<double>(t + 1);
    sx += x;
    sy += cum[t];
    sxx += x * x;
    sxy += x * cum[t];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace robust_bandits
