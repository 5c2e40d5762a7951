#pragma once

#include <cstddef>
#include <string>

#include "robust_bandits/core.hpp"
#include "robust_bandits/learner.hpp"

namespace robust_bandits {

/// Always plays the same arm index.
class FixedArmLearner final : public Learner {
 public:
  FixedArmLearner(std::size_t d, std::size_t arm) : d_(d), arm_(arm) {}
  std::string name() const override { return "fixed"; }
  Vector estimate() const override { return Vector::Zero(static_cast<Eigen::Index>(d_)); }

 protected:
  std::size_t choose(const ContextMatrix&) override { return arm_; }
  void update(std::size_t, const Vector&, double) override {}

 private:
  std::size_t d_;
  std::size_t arm_;
};

/// Knows theta and always plays the best arm; zero regret by construction.
class OracleLearner final : public Learner {
 public:
  explicit OracleLearner(Vector theta) : theta_(std::move(theta)) {}
  std::string name() const override { return "oracle"; }
  Vector estimate() const override { return theta_; }

 protected:
  std::size_t choose(const ContextMatrix& contexts) override { return argmax_inner(theta_, contexts); }
  void update(std::size_t, const Vector&, double) override {}

 private:
  Vector theta_;
};

}  // namespace robust_bandits
