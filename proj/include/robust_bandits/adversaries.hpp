#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "robust_bandits/attack_spec.hpp"
#include "robust_bandits/core.hpp"
#include "robust_bandits/instances.hpp"
#include "robust_bandits/learner.hpp"
#include "robust_bandits/rng.hpp"

namespace robust_bandits {

/// Total corruption budget and what has been spent of it. A request larger
/// than the remainder is clipped to the remainder, keeping its sign.
class BudgetLedger {
 public:
  explicit BudgetLedger(double budget) : budget_(budget) {
    require(budget >= 0.0 && std::isfinite(budget), "BudgetLedger: budget must be finite and >= 0");
  }

  double apply(double requested) {
    if (requested == 0.0 || !std::isfinite(requested)) return 0.0;
    const double remaining = budget_ - spent_;
    if (std::abs(requested) >= remaining) {
      spent_ = budget_;
      return std::copysign(remaining, requested);
    }
    spent_ += std::abs(requested);
    return requested;
  }

  double budget() const { return budget_; }
  double spent() const { return spent_; }
  double remaining() const { return budget_ - spent_; }
  bool exhausted() const { return spent_ >= budget_; }

 private:
  double budget_;
  double spent_ = 0.0;
};

/// Everything the adversary sees before corrupting round t: the arm just
/// chosen, its true mean, the noise realization, and the full instance.
struct AttackContext {
  std::size_t round = 0;  // 1-based
  std::size_t arm = 0;
  const ContextMatrix& contexts;
  const Vector& theta;
  double mean = 0.0;
  double noise = 0.0;
  const Learner* learner = nullptr;

  double mean_of(std::size_t i) const { return theta.dot(contexts.col(static_cast<Eigen::Index>(i))); }
};

// ---------------------------------------------------------------------------
// Corruption rules (unclipped)

/// Leave the target alone; shift any other arm's mean to v_target (noise untouched).
inline double garcelon_corruption(const AttackContext& ctx, std::size_t target, double v_target) {
  return ctx.arm == target ? 0.0 : v_target - ctx.mean;
}

/// Shift a non-target arm down just enough to sit eps0 below the target's mean.
inline double oracle_mab_corruption(const AttackContext& ctx, std::size_t target, double eps0) {
  if (ctx.arm == target) return 0.0;
  return -std::max(0.0, ctx.mean - ctx.mean_of(target) + eps0);
}

inline std::size_t theta_target_arm(const Vector& theta_target, const ContextMatrix& contexts) {
  return argmax_inner(theta_target, contexts);
}

/// Garcelon rule with the target re-chosen each round as argmax <theta_target, a>.
inline double simple_theta_corruption(const AttackContext& ctx, const Vector& theta_target,
                                      double v_target) {
  return garcelon_corruption(ctx, theta_target_arm(theta_target, ctx.contexts), v_target);
}

/// Observed mean becomes <-theta, a>.
inline double flip_theta_corruption(const AttackContext& ctx) { return -2.0 * ctx.mean; }

/// Arms still in play ranked by true mean (ties: lower index first); the
/// learner's remaining set when it has one, every arm otherwise.
inline std::vector<std::size_t> top_remaining(const AttackContext& ctx, std::size_t n) {
  std::vector<std::size_t> pool;
  if (ctx.learner != nullptr) {
    if (auto remaining = ctx.learner->remaining_arms()) pool.assign(remaining->begin(), remaining->end());
  }
  if (pool.empty()) {
    pool.resize(static_cast<std::size_t>(ctx.contexts.cols()));
    std::iota(pool.begin(), pool.end(), std::size_t{0});
  }
  std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
    const double ma = ctx.mean_of(a), mb = ctx.mean_of(b);
    return ma > mb || (ma == mb && a < b);
  });
  if (pool.size() > n) pool.resize(n);
  return pool;
}

/// Pulls of a top-N remaining arm observe exactly -1.
inline double top_n_corruption(const AttackContext& ctx, std::size_t n) {
  const auto top = top_remaining(ctx, n);
  if (std::find(top.begin(), top.end(), ctx.arm) == top.end()) return 0.0;
  return -1.0 - (ctx.mean + ctx.noise);
}

inline double fixed_shift_corruption(const AttackContext& ctx, std::size_t target, double shift) {
  return ctx.arm == target ? shift : 0.0;
}

// ---------------------------------------------------------------------------
// Attack strategies

class Attack {
 public:
  virtual ~Attack() = default;
  /// Requested corruption for this round, before budget clipping.
  virtual double propose(const AttackContext& ctx) = 0;
  virtual std::string name() const = 0;
};

class NoAttack final : public Attack {
 public:
  double propose(const AttackContext&) override { return 0.0; }
  std::string name() const override { return "none"; }
};

class GarcelonAttack final : public Attack {
 public:
  GarcelonAttack(std::size_t target, double v_target) : target_(target), v_target_(v_target) {}
  double propose(const AttackContext& ctx) override { return garcelon_corruption(ctx, target_, v_target_); }
  std::string name() const override { return "garcelon"; }

 private:
  std::size_t target_;
  double v_target_;
};

class OracleMabAttack final : public Attack {
 public:
  OracleMabAttack(std::size_t target, double eps0) : target_(target), eps0_(eps0) {
    require(eps0 > 0.0, "oracle_mab: eps0 must be > 0");
  }
  double propose(const AttackContext& ctx) override { return oracle_mab_corruption(ctx, target_, eps0_); }
  std::string name() const override { return "oracle_mab"; }

 private:
  std::size_t target_;
  double eps0_;
};

class SimpleThetaAttack final : public Attack {
 public:
  SimpleThetaAttack(Vector theta_target, double v_target)
      : theta_target_(std::move(theta_target)), v_target_(v_target) {}
  double propose(const AttackContext& ctx) override {
    return simple_theta_corruption(ctx, theta_target_, v_target_);
  }
  std::string name() const override { return "simple_theta"; }
  const Vector& theta_target() const { return theta_target_; }

 private:
  Vector theta_target_;
  double v_target_;
};

class FlipThetaAttack final : public Attack {
 public:
  double propose(const AttackContext& ctx) override { return flip_theta_corruption(ctx); }
  std::string name() const override { return "flip_theta"; }
};

class TopNAttack final : public Attack {
 public:
  explicit TopNAttack(std::size_t n) : n_(n) { require(n >= 1, "top_n: N must be >= 1"); }
  double propose(const AttackContext& ctx) override { return top_n_corruption(ctx, n_); }
  std::string name() const override { return "top_n"; }

 private:
  std::size_t n_;
};

/// Shifts the mean to zero on the first floor(C) rounds that carry a nonzero
/// mean, then stops. With unit-magnitude means this is "the first floor(C) rounds".
class ZeroingAttack final : public Attack {
 public:
  explicit ZeroingAttack(double budget) : rounds_left_(static_cast<std::size_t>(std::floor(budget))) {}
  double propose(const AttackContext& ctx) override {
    if (rounds_left_ == 0 || ctx.mean == 0.0) return 0.0;
    --rounds_left_;
    return -ctx.mean;
  }
  std::string name() const override { return "zeroing"; }

 private:
  std::size_t rounds_left_;
};

class FixedShiftAttack final : public Attack {
 public:
  FixedShiftAttack(std::size_t target, double shift) : target_(target), shift_(shift) {}
  double propose(const AttackContext& ctx) override { return fixed_shift_corruption(ctx, target_, shift_); }
  std::string name() const override { return "fixed_shift"; }

 private:
  std::size_t target_;
  double shift_;
};

/// Holds fire until the learner's corruption threshold first drops below the
/// true budget, then delegates to `inner` for the rest of the run.
class DelayedStartAttack final : public Attack {
 public:
  DelayedStartAttack(std::unique_ptr<Attack> inner, const Learner& learner, double budget)
      : inner_(std::move(inner)), learner_(&learner), budget_(budget) {
    require(learner.corruption_threshold().has_value(),
            "delayed start needs a learner with a corruption threshold (" + learner.name() + ")");
  }

  double propose(const AttackContext& ctx) override {
    if (!started_) {
      if (*learner_->corruption_threshold() < budget_) {
        started_ = true;
        start_round_ = ctx.round;
      } else {
        return 0.0;
      }
    }
    return inner_->propose(ctx);
  }

  std::string name() const override { return inner_->name() + "+delayed"; }
  bool started() const { return started_; }
  std::size_t start_round() const { return start_round_; }

 private:
  std::unique_ptr<Attack> inner_;
  const Learner* learner_;
  double budget_;
  bool started_ = false;
  std::size_t start_round_ = 0;
};

/// An attack strategy bound to its budget ledger.
class Adversary {
 public:
  Adversary(std::unique_ptr<Attack> attack, double budget)
      : attack_(std::move(attack)), ledger_(budget) {}

  static Adversary none() { return Adversary(std::make_unique<NoAttack>(), 0.0); }

  /// Corruption actually applied this round (after clipping).
  double corrupt(const AttackContext& ctx) {
    const double applied = ledger_.apply(attack_->propose(ctx));
    ensure(ledger_.spent() <= ledger_.budget(), "adversary overdraft");
    return applied;
  }

  const BudgetLedger& ledger() const { return ledger_; }
  const Attack& attack() const { return *attack_; }
  std::string name() const { return attack_->name(); }

 private:
  std::unique_ptr<Attack> attack_;
  BudgetLedger ledger_;
};

/// Uniform direction on the unit sphere in R^d.
inline Vector random_unit_vector(std::size_t d, CounterRng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(d));
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

/// Build the adversary for one trial. `learner` is required for top-N
/// introspection and delayed start; it may be null otherwise.
inline Adversary make_adversary(const AttackSpec& spec, const Environment& env, const Learner* learner,
                                std::uint64_t seed) {
  const std::size_t k = env.k();
  auto check_target = [&] {
    require(spec.target < k, "attack target " + std::to_string(spec.target) + " out of range");
  };
  std::unique_ptr<Attack> attack;
  switch (spec.kind) {
    case AttackKind::none:
      return Adversary::none();
    case AttackKind::garcelon:
      check_target();
      attack = std::make_unique<GarcelonAttack>(spec.target, spec.v_target);
      break;
    case AttackKind::oracle_mab:
      check_target();
      attack = std::make_unique<OracleMabAttack>(spec.target, spec.eps0);
      break;
    case AttackKind::simple_theta: {
      Vector target;
      if (spec.theta_target) {
        target = *spec.theta_target;
        require(static_cast<std::size_t>(target.size()) == env.d(), "theta_target dimension mismatch");
      } else {
        CounterRng rng(seed, Stream::adversary);
        target = random_unit_vector(env.d(), rng);
      }
      attack = std::make_unique<SimpleThetaAttack>(std::move(target), spec.v_target);
      break;
    }
    case AttackKind::flip_theta:
      attack = std::make_unique<FlipThetaAttack>();
      break;
    case AttackKind::top_n:
      attack = std::make_unique<TopNAttack>(spec.top_n);
      break;
    case AttackKind::zeroing:
      attack = std::make_unique<ZeroingAttack>(spec.budget);
      break;
    case AttackKind::fixed_shift:
      check_target();
      attack = std::make_unique<FixedShiftAttack>(spec.target, spec.shift);
      break;
  }
  const bool pe_learner = learner != nullptr && learner->corruption_threshold().has_value();
  const bool wrap = spec.delayed_start == DelayedStart::on ||
                    (spec.delayed_start == DelayedStart::automatic && pe_learner);
  if (wrap) {
    require(learner != nullptr, "delayed start needs a learner");
    attack = std::make_unique<DelayedStartAttack>(std::move(attack), *learner, spec.budget);
  }
  return Adversary(std::move(attack), spec.budget);
}

}  // namespace robust_bandits
