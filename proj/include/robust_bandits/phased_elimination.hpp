#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robust_bandits/core.hpp"
#include "robust_bandits/design.hpp"
#include "robust_bandits/instances.hpp"
#include "robust_bandits/learner.hpp"

namespace robust_bandits {

/// known / unknown: the analysed algorithm (m0 = 4d(log log d + 18)).
/// practical_*: the tuned variant (m0 = d, no 1/nu in the corruption term).
enum class PeMode { known, unknown, practical_known, practical_unknown };

inline bool is_practical(PeMode mode) {
  return mode == PeMode::practical_known || mode == PeMode::practical_unknown;
}

inline bool is_known_budget(PeMode mode) {
  return mode == PeMode::known || mode == PeMode::practical_known;
}

inline std::string_view to_string(PeMode mode) {
  switch (mode) {
    case PeMode::known: return "known";
    case PeMode::unknown: return "unknown";
    case PeMode::practical_known: return "practical_known";
    case PeMode::practical_unknown: return "practical_unknown";
  }
  return "unknown";
}

inline std::optional<PeMode> parse_pe_mode(std::string_view name) {
  for (auto mode : {PeMode::known, PeMode::unknown, PeMode::practical_known, PeMode::practical_unknown}) {
    if (to_string(mode) == name) return mode;
  }
  return std::nullopt;
}

struct PhasedEliminationConfig {
  PeMode mode = PeMode::practical_unknown;
  /// Defaults: 0.1 in practical modes, 0.05 otherwise.
  std::optional<double> delta;
  /// Defaults: 0.05 in practical modes, 1/m0 otherwise.
  std::optional<double> nu;
  std::size_t horizon = 1;
  /// Corruption budget; read only in the known-budget modes.
  double budget = 0.0;
  /// false drops the corruption term from the elimination rule.
  bool robust = true;
};

// ---------------------------------------------------------------------------
// Schedule and rule pieces, exposed for testing.

inline double initial_scale(std::size_t d, PeMode mode) {
  return is_practical(mode) ? static_cast<double>(d) : support_bound(d);
}

inline double horizon_log2(std::size_t horizon) {
  return std::max(1.0, std::log2(static_cast<double>(horizon)));
}

/// C_hat_h. In the unknown-budget modes 2^(log2 T - h) is evaluated as T / 2^h.
inline double corruption_schedule(PeMode mode, double budget, std::size_t horizon, std::size_t d,
                                  std::size_t h) {
  const double t = static_cast<double>(horizon);
  const double decay = t / std::ldexp(1.0, static_cast<int>(h));
  switch (mode) {
    case PeMode::known:
    case PeMode::practical_known:
      return budget;
    case PeMode::unknown: {
      const double m0 = initial_scale(d, mode);
      return std::min(std::sqrt(t) / (m0 * horizon_log2(horizon)),
                      m0 * std::sqrt(static_cast<double>(d)) * decay);
    }
    case PeMode::practical_unknown:
      return std::min(std::sqrt(t), decay);
  }
  return budget;
}

/// delta / (2 k log2 T): the per-arm, per-epoch level behind the overall guarantee.
inline double effective_delta(double delta, std::size_t k, std::size_t horizon) {
  return delta / (2.0 * static_cast<double>(k) * horizon_log2(horizon));
}

struct EliminationRule {
  PeMode mode = PeMode::practical_unknown;
  bool robust = true;
  std::size_t d = 1;
  double m0 = 1.0;
  double nu = 0.05;
  double delta_eff = 0.1;

  double noise_width(double m) const {
    return 2.0 * std::sqrt(4.0 * static_cast<double>(d) / m * std::log(1.0 / delta_eff));
  }

  double corruption_width(double m, double c_hat) const {
    if (!robust) return 0.0;
    const double dd = static_cast<double>(d);
    switch (mode) {
      case PeMode::known:
      case PeMode::unknown:
        return 2.0 * c_hat / (m * nu) * std::sqrt(4.0 * dd * (1.0 + nu * m0));
      case PeMode::practical_unknown:
        return 2.0 * c_hat / m * std::sqrt(4.0 * dd);
      case PeMode::practical_known:
        return c_hat / m * std::sqrt(dd);
    }
    return 0.0;
  }

  double threshold(double m, double c_hat) const { return noise_width(m) + corruption_width(m, c_hat); }
};

/// u(a) = ceil(m * max(zeta(a), nu)) on the support, 0 elsewhere.
inline std::vector<std::size_t> allocate_pulls(const Vector& weights, double m, double nu) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(weights.size()), 0);
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights(i) > 0.0) {
      counts[static_cast<std::size_t>(i)] =
          static_cast<std::size_t>(std::ceil(m * std::max(weights(i), nu)));
    }
  }
  return counts;
}

/// Per-epoch least-squares pieces, computed on the span of the active arms.
class EpochSystem {
 public:
  EpochSystem(const ContextMatrix& active, const std::vector<std::size_t>& counts)
      : span_(project_to_span(active)) {
    require(counts.size() == static_cast<std::size_t>(active.cols()),
            "EpochSystem: one count per active arm required");
    const auto r = static_cast<Eigen::Index>(span_.rank());
    Matrix g = Matrix::Zero(r, r);
    for (Eigen::Index i = 0; i < active.cols(); ++i) {
      const auto u = static_cast<double>(counts[static_cast<std::size_t>(i)]);
      if (u > 0.0) g.noalias() += u * span_.coordinates.col(i) * span_.coordinates.col(i).transpose();
    }
    llt_.compute(g);
    ensure(llt_.info() == Eigen::Success,
           "EpochSystem: allocation does not span the active arms (design bug)");
  }

  /// Gamma^{-1} sum_a a * (sum of rewards observed for a), lifted to R^d.
  Vector estimate(const std::vector<double>& reward_sums) const {
    require(reward_sums.size() == static_cast<std::size_t>(span_.coordinates.cols()),
            "EpochSystem: one reward sum per active arm required");
    Vector rhs = Vector::Zero(static_cast<Eigen::Index>(span_.rank()));
    for (Eigen::Index i = 0; i < span_.coordinates.cols(); ++i) {
      rhs += span_.coordinates.col(i) * reward_sums[static_cast<std::size_t>(i)];
    }
    return span_.lift(llt_.solve(rhs));
  }

  /// max over active b of ||b||^2 in Gamma^{-1}.
  double max_weighted_norm_sq() const {
    const Matrix z = llt_.matrixL().solve(span_.coordinates);
    return z.colwise().squaredNorm().maxCoeff();
  }

 private:
  SpanProjection span_;
  Eigen::LLT<Matrix> llt_;
};

/// Positions (into the columns of `active`) whose empirical gap to the
/// empirical leader is within `threshold`. The leader itself always survives.
inline std::vector<std::size_t> retained_arms(const Vector& theta_hat, const ContextMatrix& active,
                                              double threshold) {
  const Vector scores = active.transpose() * theta_hat;
  const double leader = scores.maxCoeff();
  std::vector<std::size_t> kept;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (leader - scores(i) <= threshold) kept.push_back(static_cast<std::size_t>(i));
  }
  return kept;
}

/// Per-epoch diagnostics.
struct EpochRecord {
  std::size_t h = 0;
  double m = 0.0;
  double c_hat = 0.0;
  std::size_t active = 0;
  std::size_t support = 0;
  std::size_t pulls = 0;
  double design_value = 0.0;
  double max_weighted_norm_sq = 0.0;
  double threshold = 0.0;
  std::size_t retained = 0;
  bool completed = false;
};

/// Phased elimination over a fixed arm set, robust to a corruption budget
/// unless `robust` is off.
///
/// Each epoch computes a near-optimal design over the surviving arms, plays
/// every supported arm ceil(m * max(zeta, nu)) times, estimates theta from the
/// per-arm reward sums of that epoch alone, and drops arms whose estimated gap
/// exceeds the enlarged confidence width. m doubles every epoch. A partial
/// final epoch (cut by the horizon) is never used for elimination.
class PhasedElimination final : public Learner {
 public:
  PhasedElimination(ArmSet arms, PhasedEliminationConfig config)
      : arms_(std::move(arms)), config_(config) {
    const double delta = config_.delta.value_or(is_practical(config_.mode) ? 0.1 : 0.05);
    require(delta > 0.0 && delta < 1.0, "phased elimination: delta must lie in (0, 1)");
    require(config_.horizon >= 1, "phased elimination: horizon must be >= 1");
    require(config_.budget >= 0.0 && std::isfinite(config_.budget),
            "phased elimination: budget must be finite and >= 0");
    const std::size_t d = arms_.d();
    rule_.mode = config_.mode;
    rule_.robust = config_.robust;
    rule_.d = d;
    rule_.m0 = initial_scale(d, config_.mode);
    rule_.nu = config_.nu.value_or(is_practical(config_.mode) ? 0.05 : 1.0 / rule_.m0);
    require(rule_.nu > 0.0 && rule_.nu < 1.0, "phased elimination: nu must lie in (0, 1)");
    rule_.delta_eff = effective_delta(delta, arms_.k(), config_.horizon);
    delta_ = delta;

    m_ = rule_.m0;
    active_.resize(arms_.k());
    for (std::size_t i = 0; i < active_.size(); ++i) active_[i] = i;
    theta_hat_ = Vector::Zero(static_cast<Eigen::Index>(d));
    start_epoch();
  }

  std::string name() const override { return config_.robust ? "rpe" : "nonrobust_pe"; }

  Vector estimate() const override { return theta_hat_; }

  LearnerSnapshot snapshot() const override {
    LearnerSnapshot s = Learner::snapshot();
    s.epoch = h_;
    s.active_arms = active_.size();
    s.corruption_threshold = c_hat_;
    return s;
  }

  std::optional<std::span<const std::size_t>> remaining_arms() const override {
    return std::span<const std::size_t>(active_);
  }

  // known modes report the unknown-budget schedule, so a delayed attack starts in the same epoch
  std::optional<double> corruption_threshold() const override {
    if (!config_.robust) return std::nullopt;
    switch (config_.mode) {
      case PeMode::known:
        return corruption_schedule(PeMode::unknown, 0.0, config_.horizon, arms_.d(), h_);
      case PeMode::practical_known:
        return corruption_schedule(PeMode::practical_unknown, 0.0, config_.horizon, arms_.d(), h_);
      default:
        return c_hat_;
    }
  }

  const std::vector<EpochRecord>& epochs() const { return epochs_; }
  const EliminationRule& rule() const { return rule_; }
  double delta() const { return delta_; }
  double initial_scale_m0() const { return rule_.m0; }
  double nu() const { return rule_.nu; }
  const Design& current_design() const { return design_; }
  const std::vector<std::size_t>& active() const { return active_; }

 protected:
  std::size_t choose(const ContextMatrix& contexts) override {
    require(static_cast<std::size_t>(contexts.cols()) == arms_.k(),
            "phased elimination needs the fixed arm set every round");
    return active_[queue_[queue_pos_]];
  }

  void update(std::size_t, const Vector&, double reward) override {
    sums_[queue_[queue_pos_]] += reward;
    if (++queue_pos_ == queue_.size()) {
      finish_epoch();
      start_epoch();
    }
  }

 private:
  ContextMatrix active_matrix() const {
    ContextMatrix out(static_cast<Eigen::Index>(arms_.d()), static_cast<Eigen::Index>(active_.size()));
    for (std::size_t j = 0; j < active_.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = arms_.arm(active_[j]);
    return out;
  }

  void start_epoch() {
    c_hat_ = corruption_schedule(config_.mode, config_.budget, config_.horizon, arms_.d(), h_);
    const ContextMatrix active = active_matrix();
    design_ = frank_wolfe_design(active, {.ambient_dim = arms_.d()});
    counts_ = allocate_pulls(design_.weights, m_, rule_.nu);
    sums_.assign(active_.size(), 0.0);
    system_.emplace(active, counts_);

    // Round-robin over the support until every quota is met.
    queue_.clear();
    std::vector<std::size_t> left = counts_;
    for (bool any = true; any;) {
      any = false;
      for (std::size_t j = 0; j < left.size(); ++j) {
        if (left[j] > 0) {
          queue_.push_back(j);
          --left[j];
          any = true;
        }
      }
    }
    queue_pos_ = 0;

    EpochRecord record;
    record.h = h_;
    record.m = m_;
    record.c_hat = c_hat_;
    record.active = active_.size();
    record.support = design_.support.size();
    record.pulls = queue_.size();
    record.design_value = design_.value;
    record.max_weighted_norm_sq = system_->max_weighted_norm_sq();
    record.threshold = rule_.threshold(m_, c_hat_);
    assert(record.max_weighted_norm_sq <= 2.0 * static_cast<double>(arms_.d()) / m_ * (1.0 + 1e-9));
    epochs_.push_back(record);
  }

  void finish_epoch() {
    theta_hat_ = system_->estimate(sums_);
    const ContextMatrix active = active_matrix();
    const auto kept = retained_arms(theta_hat_, active, epochs_.back().threshold);
    std::vector<std::size_t> next;
    next.reserve(kept.size());
    for (std::size_t pos : kept) next.push_back(active_[pos]);
    active_ = std::move(next);
    epochs_.back().retained = active_.size();
    epochs_.back().completed = true;
    ++h_;
    m_ *= 2.0;
  }

  ArmSet arms_;
  PhasedEliminationConfig config_;
  EliminationRule rule_;
  double delta_ = 0.1;

  std::size_t h_ = 0;
  double m_ = 1.0;
  double c_hat_ = 0.0;
  std::vector<std::size_t> active_;
  Design design_;
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
  std::optional<EpochSystem> system_;
  std::vector<std::size_t> queue_;
  std::size_t queue_pos_ = 0;
  Vector theta_hat_;
  std::vector<EpochRecord> epochs_;
};

}  // namespace robust_bandits
