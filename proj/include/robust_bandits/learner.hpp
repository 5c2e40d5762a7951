#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robust_bandits/core.hpp"

namespace robust_bandits {

/// Diagnostic view of a learner, serialized into traces on request.
struct LearnerSnapshot {
  std::size_t rounds = 0;
  std::optional<std::size_t> epoch;
  std::optional<std::size_t> active_arms;
  std::optional<double> corruption_threshold;
  Vector theta_hat;
};

/// Select/observe protocol shared by every learner.
///
/// `select_action` and `observe` must strictly alternate; a violation throws
/// ProtocolError. Derived classes implement `choose` and `update`.
class Learner {
 public:
  virtual ~Learner() = default;

  Learner(const Learner&) = delete;
  Learner& operator=(const Learner&) = delete;

  std::size_t select_action(const ContextMatrix& contexts) {
    if (pending_) throw ProtocolError(name() + ": select_action called twice without observe");
    const std::size_t i = choose(contexts);
    if (i >= static_cast<std::size_t>(contexts.cols())) {
      throw ProtocolError(name() + ": selected arm index out of range");
    }
    played_ = contexts.col(static_cast<Eigen::Index>(i));
    played_index_ = i;
    pending_ = true;
    return i;
  }

  void observe(double reward) {
    if (!pending_) throw ProtocolError(name() + ": observe called without a pending action");
    pending_ = false;
    ++rounds_;
    update(played_index_, played_, reward);
  }

  std::size_t rounds() const { return rounds_; }

  virtual std::string name() const = 0;

  virtual LearnerSnapshot snapshot() const {
    LearnerSnapshot s;
    s.rounds = rounds_;
    s.theta_hat = estimate();
    return s;
  }

  /// Current estimate of theta (zero vector before any data).
  virtual Vector estimate() const = 0;

  /// Arms still in play, for elimination learners. Empty optional otherwise.
  virtual std::optional<std::span<const std::size_t>> remaining_arms() const { return std::nullopt; }

  /// Corruption level a delayed-start attack waits to undercut (robust elimination learners).
  virtual std::optional<double> corruption_threshold() const { return std::nullopt; }

 protected:
  Learner() = default;

  virtual std::size_t choose(const ContextMatrix& contexts) = 0;
  virtual void update(std::size_t index, const Vector& played, double reward) = 0;

 private:
  bool pending_ = false;
  std::size_t rounds_ = 0;
  std::size_t played_index_ = 0;
  Vector played_;
};

/// argmax_i <theta, contexts_i>, lowest index on ties.
inline std::size_t argmax_inner(const Vector& theta, const ContextMatrix& contexts) {
  std::size_t best = 0;
  double best_value = theta.dot(contexts.col(0));
  for (Eigen::Index i = 1; i < contexts.cols(); ++i) {
    const double v = theta.dot(contexts.col(i));
    if (v > best_value) {
      best_value = v;
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

}  // namespace robust_bandits
