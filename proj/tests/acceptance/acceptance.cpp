// One line per acceptance criterion; exit status is the number of failures.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "robust_bandits.hpp"

using namespace robust_bandits;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  failures += !v.pass;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t hardware_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// independent linear algebra

Matrix pinv(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

std::size_t numeric_rank(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector s = svd.singularValues();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > 1e-9 * std::max(1.0, s(0));
  return r;
}

Vector project_onto_columns(const Matrix& columns, const Vector& x) {
  Eigen::ColPivHouseholderQR<Matrix> qr(columns);
  qr.setThreshold(1e-9);
  const Matrix q = Matrix(qr.householderQ()).leftCols(qr.rank());
  return q * (q.transpose() * x);
}

double support_limit(std::size_t d) {
  const double dd = static_cast<double>(d);
  const double loglog = d <= 2 ? std::log(1.0 + std::log(dd)) : std::log(std::log(dd));
  return 4.0 * dd * (loglog + 18.0);
}

// Arms in the unit ball; rank < d when requested.
ContextMatrix random_arm_set(std::size_t d, std::size_t k, std::size_t rank, std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Matrix basis(d, rank);
  for (Eigen::Index i = 0; i < basis.size(); ++i) basis.data()[i] = n(gen);
  ContextMatrix arms(d, k);
  for (std::size_t j = 0; j < k; ++j) {
    Vector c(rank);
    for (auto& v : c) v = n(gen);
    arms.col(static_cast<Eigen::Index>(j)) = basis * c;
  }
  arms /= arms.colwise().norm().maxCoeff();
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (std::size_t j = 0; j < k; ++j) arms.col(static_cast<Eigen::Index>(j)) *= u(gen);
  return arms;
}

// ---------------------------------------------------------------------------
// 1

Verdict design_guarantee() {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<std::size_t> dim(2, 10);
  int ok = 0, deficient = 0;
  double worst_ratio = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = dim(gen);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 100)(gen);
    std::size_t rank = std::min(d, k);
    if (trial % 5 == 4 && rank > 1) rank = std::uniform_int_distribution<std::size_t>(1, rank - 1)(gen);
    const ContextMatrix arms = random_arm_set(d, k, rank, gen);
    const Design design = frank_wolfe_design(arms);

    // oracle: pseudo-inverse of the weighted Gram in ambient coordinates
    Matrix g = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < k; ++i) {
      const Vector a = arms.col(static_cast<Eigen::Index>(i));
      g += design.weights(static_cast<Eigen::Index>(i)) * a * a.transpose();
    }
    const Matrix gi = pinv(g);
    double value = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const Vector a = arms.col(static_cast<Eigen::Index>(i));
      value = std::max(value, a.dot(gi * a));
    }
    const std::size_t r = numeric_rank(arms);
    deficient += r < d;
    std::size_t support = 0;
    for (Eigen::Index i = 0; i < design.weights.size(); ++i) support += design.weights(i) > 0;
    const bool good = design.weights.minCoeff() >= 0 && std::abs(design.weights.sum() - 1) < 1e-9 &&
                      design.effective_rank == r && value <= 2.0 * double(r) * (1 + 1e-9) &&
                      double(support) <= support_limit(d) && std::abs(value - design.value) <= 1e-6 * value;
    ok += good;
    worst_ratio = std::max(worst_ratio, value / double(r));
  }
  const double secs = elapsed_since(t0);
  return {ok == 200 && secs < 60,
          fmt("%d/200 sets meet value <= 2 r_eff and the support bound (%d rank-deficient), max value/r_eff %.3f, %.1f s",
              ok, deficient, worst_ratio, secs)};
}

// ---------------------------------------------------------------------------
// 2

Verdict estimator_exactness() {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n;
  double worst_pe = 0, worst_greedy = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + trial % 5;
    const std::size_t rank = trial % 4 == 3 ? d - 1 : d;
    Vector theta(d);
    for (auto& v : theta) v = n(gen);
    theta /= theta.norm();

    // one noiseless, uncorrupted epoch of phased elimination
    const ContextMatrix arms = random_arm_set(d, 4 + trial % 9 + d, rank, gen);
    PhasedElimination pe{ArmSet(arms), {.mode = trial % 2 ? PeMode::known : PeMode::practical_unknown, .horizon = 1 << 16}};
    while (pe.epochs().empty() || !pe.epochs().front().completed) {
      const std::size_t i = pe.select_action(arms);
      pe.observe(theta.dot(arms.col(static_cast<Eigen::Index>(i))));
    }
    worst_pe = std::max(worst_pe, (pe.estimate() - project_onto_columns(arms, theta)).norm());

    // greedy on noiseless contexts
    Greedy greedy(d);
    Matrix played(d, 0);
    for (int t = 0; t < 40; ++t) {
      const ContextMatrix ctx = random_arm_set(d, 5, rank, gen);
      const std::size_t i = greedy.select_action(ctx);
      const Vector a = ctx.col(static_cast<Eigen::Index>(i));
      played.conservativeResize(Eigen::NoChange, played.cols() + 1);
      played.col(played.cols() - 1) = a;
      greedy.observe(theta.dot(a));
    }
    worst_greedy = std::max(worst_greedy, (greedy.estimate() - project_onto_columns(played, theta)).norm());
  }
  return {worst_pe <= 1e-10 && worst_greedy <= 1e-10,
          fmt("max ||theta_hat - P theta|| = %.2e (elimination), %.2e (greedy) over 50 instances", worst_pe,
              worst_greedy)};
}

// ---------------------------------------------------------------------------
// 3

Verdict epoch_oracles() {
  std::size_t epochs = 0, checks = 0, norm_bad = 0, len_bad = 0, len_checked = 0;
  for (PeMode mode : {PeMode::known, PeMode::unknown, PeMode::practical_known, PeMode::practical_unknown}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const std::size_t d = 2 + seed % 3, k = 8 + 4 * seed;
      const auto inst = make_synthetic_fixed(d, k, 300 + seed);
      const std::size_t T = 30000;
      const double budget = 40;
      PhasedElimination pe(inst.arms, {.mode = mode, .horizon = T, .budget = budget});
      std::mt19937_64 gen(seed);
      std::normal_distribution<double> noise(0, std::sqrt(0.05));
      std::bernoulli_distribution attack(0.3);
      BudgetLedger ledger(budget);

      // epochs roll over inside observe; the first starts at construction
      std::vector<std::size_t> active = pe.active();
      Matrix gamma = Matrix::Zero(d, d);
      std::size_t pulls = 0;
      auto close_epoch = [&](std::size_t h) {
        const auto& rec = pe.epochs()[h];
        ++epochs;
        const Matrix gi = pinv(gamma);
        for (std::size_t i : active) {
          const Vector b = inst.arms.arm(i);
          ++checks;
          norm_bad += b.dot(gi * b) > 2.0 * double(d) / rec.m * (1 + 1e-9);
        }
        if (!is_practical(mode)) {
          ++len_checked;
          len_bad += double(pulls) > 2.0 * rec.m * (1 + pe.nu() * pe.initial_scale_m0());
        }
      };
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t i = pe.select_action(inst.arms.matrix());
        const Vector a = inst.arms.arm(i);
        gamma += a * a.transpose();
        ++pulls;
        const double mu = inst.theta.dot(a);
        const double c = attack(gen) ? ledger.apply(-2.0 * mu) : 0.0;
        const std::size_t before = pe.epochs().size();
        pe.observe(mu + noise(gen) + c);
        if (pe.epochs().size() != before) {
          close_epoch(before - 1);
          active = pe.active();
          gamma.setZero();
          pulls = 0;
        }
      }
    }
  }
  return {norm_bad == 0 && len_bad == 0 && epochs > 0,
          fmt("%zu completed epochs, %zu arm checks: %zu weighted-norm violations, %zu/%zu epoch-length violations",
              epochs, checks, norm_bad, len_bad, len_checked)};
}

// ---------------------------------------------------------------------------
// 4

Verdict confidence_bound() {
  const double delta = 0.05;
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0, 1);
  int held = 0;
  double worst_kfrac = 1;
  std::size_t max_k = 0;
  const int runs = 1000;
  for (int run = 0; run < runs; ++run) {
    const std::size_t d = 2 + run % 2;
    const std::size_t k = d + run % (7 - d);
    max_k = std::max(max_k, k);
    const auto inst = make_synthetic_fixed(d, k, 5000 + run);
    const double budget = std::vector<double>{0, 1, 10, 50}[run % 4];
    const PhasedEliminationConfig config{.mode = PeMode::known, .delta = delta, .horizon = 1 << 20, .budget = budget};

    // epoch-0 pull sequence does not depend on rewards
    std::vector<std::size_t> seq;
    {
      PhasedElimination probe(inst.arms, config);
      while (probe.epochs().empty() || !probe.epochs().front().completed) {
        seq.push_back(probe.select_action(inst.arms.matrix()));
        probe.observe(0.0);
      }
    }
    // corruption allocations: spread, concentrated on the rarest arm, aligned with a direction
    std::vector<double> c(seq.size(), 0.0);
    const int style = run % 3;
    if (budget > 0) {
      if (style == 0) {
        std::vector<double> w(seq.size());
        for (auto& x : w) x = u(gen) < 0.3 ? u(gen) : 0.0;
        w[0] += 1e-3;
        double s = 0;
        for (double x : w) s += x;
        for (std::size_t t = 0; t < seq.size(); ++t) c[t] = (u(gen) < 0.5 ? -1 : 1) * budget * w[t] / s;
      } else if (style == 1) {
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i : seq) ++count[i];
        std::size_t rare = seq[0];
        for (std::size_t i = 0; i < k; ++i) {
          if (count[i] > 0 && count[i] < count[rare]) rare = i;
        }
        for (std::size_t t = 0; t < seq.size(); ++t) {
          if (seq[t] == rare) c[t] = budget / double(count[rare]);
        }
      } else {
        Vector v(d);
        for (auto& x : v) x = n(gen);
        for (std::size_t t = 0; t < seq.size(); ++t) {
          c[t] = (inst.arms.arm(seq[t]).dot(v) >= 0 ? 1.0 : -1.0) * budget / double(seq.size());
        }
      }
    }
    PhasedElimination pe(inst.arms, config);
    for (std::size_t t = 0; t < seq.size(); ++t) {
      const std::size_t i = pe.select_action(inst.arms.matrix());
      pe.observe(inst.theta.dot(inst.arms.arm(i)) + n(gen) + c[t]);
    }
    const double m = pe.epochs().front().m, nu = pe.nu(), m0 = pe.initial_scale_m0();
    const double bound = std::sqrt(4.0 * double(d) / m * std::log(1.0 / delta)) +
                         budget / (m * nu) * std::sqrt(4.0 * double(d) * (1 + nu * m0));
    const Vector err = pe.estimate() - inst.theta;
    bool all = true;
    for (std::size_t i = 0; i < k; ++i) all &= std::abs(inst.arms.arm(i).dot(err)) <= bound;
    held += all;
    worst_kfrac = std::min(worst_kfrac, 1.0 - 2.0 * double(k) * delta);
  }
  const double frac = double(held) / runs;
  return {frac >= worst_kfrac, fmt("bound held for every arm in %d/%d epochs (%.3f; required >= 1 - 2k delta = %.2f at k = %zu)",
                                   held, runs, frac, worst_kfrac, max_k)};
}

// ---------------------------------------------------------------------------
// 5

Verdict uncorrupted_sublinear() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = true;
  for (PeMode mode : {PeMode::unknown, PeMode::known}) {
    auto mean_regret = [&](std::size_t T) {
      const TrialFactory factory = [&](std::uint64_t seed) {
        const auto inst = make_synthetic_fixed(3, 10, seed);
        auto pe = std::make_unique<PhasedElimination>(inst.arms, PhasedEliminationConfig{.mode = mode, .horizon = T});
        return Trial{Environment::fixed(inst), std::move(pe), std::make_unique<Adversary>(Adversary::none())};
      };
      return run_trials(factory, 20, 1, T, {.workers = hardware_workers()}).mean_final();
    };
    for (std::size_t tp : {2500, 10000}) {
      const double ratio = mean_regret(4 * tp) / mean_regret(tp);
      pass &= ratio <= 2.8;
      detail += fmt("%s%s T'=%zu ratio %.3f", detail.empty() ? "" : ", ", mode == PeMode::known ? "known" : "unknown",
                    tp, ratio);
    }
  }
  const double secs = elapsed_since(t0);
  return {pass && secs < 300, detail};
}

// ---------------------------------------------------------------------------
// preset helpers

Config preset(const std::string& name) { return Config::load(std::string(PRESET_DIR) + "/" + name + ".cfg").resolved(); }

TrialSummary run_combo(Config cfg, const std::string& learner, const std::string& adversary, double eta, double budget,
                       bool keep = false) {
  const Combination combo{learner, adversary, eta, budget};
  const Config pinned = combo.pin(cfg);
  validate_experiment(pinned);
  return run_trials(make_trial_factory(pinned, combo), static_cast<std::size_t>(pinned.get_integer("run.trials")),
                    static_cast<std::uint64_t>(pinned.get_integer("run.seed")),
                    static_cast<std::size_t>(pinned.get_integer("run.horizon")), {.workers = hardware_workers(), .keep_traces = keep});
}

double tail_slope(const std::vector<double>& cum, double fraction) {
  const std::size_t n = cum.size();
  const std::size_t start = n - std::max<std::size_t>(2, static_cast<std::size_t>(double(n) * fraction));
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t t = start; t < n; ++t) {
    const double x = double(t + 1);
    sx += x, sy += cum[t], sxx += x * x, sxy += x * cum[t], m += 1;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// 6

Verdict budget_linear() {
  Config cfg = preset("fig2-budget-sweep");
  std::vector<double> xs, ys;
  for (double c : cfg.get_reals("adversary.budget")) {
    xs.push_back(c);
    ys.push_back(run_combo(cfg, "greedy", "flip_theta", 0.5, c).mean_final());
  }
  const double n = double(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / n, my += ys[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
  std::string values;
  for (std::size_t i = 0; i < xs.size(); ++i) values += fmt("%sC=%g:%.1f", i ? " " : "", xs[i], ys[i]);
  return {r2 >= 0.9 && slope > 0, fmt("R^2 %.4f, slope %.3f per unit C (%s)", r2, slope, values.c_str())};
}

// ---------------------------------------------------------------------------
// 7

Verdict diversity_contrast() {
  Config cfg = preset("fig2-contextual");
  const double flat = tail_slope(run_combo(cfg, "greedy", "flip_theta", 0.0, 150).mean_curve, 0.2);
  const double diverse = tail_slope(run_combo(cfg, "greedy", "flip_theta", 0.5, 150).mean_curve, 0.2);
  const double ratio = diverse > 0 ? flat / diverse : std::numeric_limits<double>::infinity();
  return {flat >= 3.0 * diverse && flat > 0,
          fmt("last-20%% slope %.4f at eta=0 vs %.4f at eta=0.5 (ratio %.1f)", flat, diverse, ratio)};
}

// ---------------------------------------------------------------------------
// 8

Verdict noncontextual_behaviour() {
  Config cfg = preset("fig3-noncontextual");
  const auto t0 = std::chrono::steady_clock::now();
  const auto rpe = run_combo(cfg, "rpe_practical_unknown", "flip_theta+delayed_start", 0.0, 150, true);
  const auto ucb = run_combo(cfg, "linucb", "flip_theta+delayed_start", 0.0, 150, true);
  const double secs = elapsed_since(t0);
  const auto rw = rpe.worst(2), uw = ucb.worst(2);
  const double rpe_slope = last_decile_slope(rpe.traces[rw[0]].cum_regret);
  const double ucb_slope = last_decile_slope(ucb.traces[uw[0]].cum_regret);
  const bool worst_ok = rpe.final_regret[rw[0]] <= ucb.final_regret[uw[0]] &&
                        rpe.final_regret[rw[1]] <= ucb.final_regret[uw[1]];
  const bool slope_ok = rpe_slope <= 0.2 * ucb_slope;
  return {worst_ok && slope_ok && secs < 900,
          fmt("worst-2 final regret %.1f, %.1f (robust PE) vs %.1f, %.1f (LinUCB); worst-run last-decile slope %.4f vs "
              "%.4f (%.0f%%)",
              rpe.final_regret[rw[0]], rpe.final_regret[rw[1]], ucb.final_regret[uw[0]], ucb.final_regret[uw[1]],
              rpe_slope, ucb_slope, ucb_slope > 0 ? 100 * rpe_slope / ucb_slope : 0.0)};
}

// ---------------------------------------------------------------------------
// 9

Verdict zeroing_lower_bound() {
  const std::vector<std::string> learners = {"rpe_known",    "rpe_unknown", "rpe_practical_known", "rpe_practical_unknown",
                                             "nonrobust_pe", "greedy",      "linucb",              "thompson",
                                             "fixed"};
  int ok = 0, total = 0;
  std::string bad;
  double least_margin = std::numeric_limits<double>::infinity();
  for (double budget : {10.0, 100.0}) {
    const auto zero_rounds = static_cast<std::size_t>(std::floor(budget));
    const std::size_t T = 1000;
    for (const auto& kind : learners) {
      Config cfg = Config::parse_string("[instance]\nkind = lower_bound\nfixture = zeroing_1d\nd = 1\n").resolved();
      RegretTrace traces[2];
      for (std::size_t v = 0; v < 2; ++v) {
        cfg.set("instance.variant", std::to_string(v));
        BuiltEnvironment built = make_environment(cfg, 0.0, budget, 42);
        auto learner = make_learner(kind, cfg, built.env, T, budget, 42);
        Adversary adv = make_adversary(*built.fixture_attack, built.env, learner.get(), 42);
        traces[v] = run_episode(built.env, *learner, adv, T, 42);
      }
      bool same = true;
      for (std::size_t t = 0; t < zero_rounds; ++t) {
        same &= traces[0].observed[t] == traces[1].observed[t] && traces[0].arm[t] == traces[1].arm[t];
      }
      const double worst = std::max(traces[0].final_regret(), traces[1].final_regret());
      const bool good = same && worst >= double(zero_rounds) / 2.0;
      least_margin = std::min(least_margin, worst / double(zero_rounds));
      ++total;
      ok += good;
      if (!good) bad += " " + kind + fmt("@C=%g", budget);
    }
  }
  return {ok == total, fmt("%d/%d learner-budget pairs identical for floor(C) rounds with max regret >= floor(C)/2 "
                           "(least max-regret/floor(C) %.2f)%s",
                           ok, total, least_margin, bad.c_str())};
}

// ---------------------------------------------------------------------------
// 10

Verdict unknown_budget_indistinguishable() {
  const std::size_t T = std::size_t{1} << 18;
  Config cfg = Config::parse_string("[instance]\nkind = lower_bound\nfixture = unknownC_2d\nd = 2\nk = 2\n").resolved();

  // reference instance, no corruption: its regret sets the budget C = 2 R0
  cfg.set("instance.variant", "0");
  BuiltEnvironment ref_env = make_environment(cfg, 0.0, 0.0, 3);
  auto ref_learner = make_learner("rpe_practical_unknown", cfg, ref_env.env, T, 0.0, 3);
  Adversary none = Adversary::none();
  const RegretTrace ref = run_episode(ref_env.env, *ref_learner, none, T, 3);
  const double budget = 2.0 * ref.final_regret();

  cfg.set("instance.variant", "1");
  BuiltEnvironment att_env = make_environment(cfg, 0.0, budget, 3);
  auto att_learner = make_learner("rpe_practical_unknown", cfg, att_env.env, T, budget, 3);
  Adversary adv = make_adversary(*att_env.fixture_attack, att_env.env, att_learner.get(), 3);
  const RegretTrace att = run_episode(att_env.env, *att_learner, adv, T, 3);

  std::size_t active = 0, identical = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const double before = t == 0 ? 0.0 : att.spent[t - 1];
    if (before >= budget) break;
    ++active;
    identical += att.observed[t] == ref.observed[t] && att.arm[t] == ref.arm[t];
  }
  std::size_t second_arm = 0;
  for (std::size_t a : ref.arm) second_arm += a == 1;
  return {active > 0 && identical == active,
          fmt("C = 2 R0 = %.2f; observations and arms identical in %zu/%zu adversary-active rounds; "
              "regret %.1f (reference) vs %.1f (attacked, %.0f%% of T/8); a2 pulled %zu times",
              budget, identical, active, ref.final_regret(), att.final_regret(),
              100.0 * att.final_regret() / (double(T) / 8.0), second_arm)};
}

// ---------------------------------------------------------------------------
// 11

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict preset_determinism() {
  const fs::path root = fs::temp_directory_path() / "rb_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(PRESET_DIR)) {
    if (entry.path().extension() == ".cfg") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  std::size_t files = 0, differing = 0;
  std::string bad;
  for (const auto& name : names) {
    for (const char* run : {"a", "b"}) {
      const int code = shell(std::string(CLI_BINARY) + " run --preset " + name + " --out " +
                             (root / name / run).string() + " > /dev/null");
      if (code != 0) return {false, "preset " + name + " exited with " + std::to_string(code)};
    }
    std::size_t here = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / name / "a")) {
      if (!entry.is_regular_file()) continue;
      ++files;
      ++here;
      const fs::path twin = root / name / "b" / fs::relative(entry.path(), root / name / "a");
      if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) {
        ++differing;
        bad += " " + fs::relative(entry.path(), root).string();
      }
    }
    std::size_t there = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / name / "b")) there += entry.is_regular_file();
    if (there != here) {
      ++differing;
      bad += " " + name + "(file count)";
    }
  }
  fs::remove_all(root);
  return {differing == 0 && files > 0, fmt("%zu presets, %zu output files compared, %zu differ%s", names.size(), files,
                                           differing, bad.c_str())};
}

}  // namespace

int main() {
  report(1, "design guarantee", design_guarantee);
  report(2, "estimator exactness", estimator_exactness);
  report(3, "weighted-norm and epoch-length oracles", epoch_oracles);
  report(4, "confidence bound under corruption", confidence_bound);
  report(5, "uncorrupted sublinearity", uncorrupted_sublinear);
  report(6, "greedy regret linear in C", budget_linear);
  report(7, "context diversity flattens regret", diversity_contrast);
  report(8, "robust PE vs LinUCB worst runs", noncontextual_behaviour);
  report(9, "zeroing lower bound", zeroing_lower_bound);
  report(10, "unknown-C indistinguishability", unknown_budget_indistinguishable);
  report(11, "preset determinism", preset_determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
