#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include "robust_bandits/core.hpp"
#include "robust_bandits/learner.hpp"
#include "robust_bandits/rng.hpp"

namespace robust_bandits {

struct ThompsonConfig {
  double prior_variance = 0.5;
  double noise_variance = 1.0;
};

/// Linear Thompson sampling with a N(0, prior_variance I) prior and Gaussian
/// likelihood; samples theta from the exact posterior each round.
class ThompsonSampling final : public Learner {
 public:
  ThompsonSampling(std::size_t d, std::uint64_t seed, ThompsonConfig config = {})
      : config_(config),
        rng_(seed, Stream::learner),
        precision_(Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) /
                   config.prior_variance),
        moment_(Vector::Zero(static_cast<Eigen::Index>(d))) {
    require(d >= 1, "thompson: dimension must be >= 1");
    require(config.prior_variance > 0.0 && config.noise_variance > 0.0,
            "thompson: variances must be > 0");
  }

  std::string name() const override { return "thompson"; }

  /// Posterior mean.
  Vector estimate() const override { return precision_.llt().solve(moment_); }

  const Matrix& precision() const { return precision_; }

  Vector sample_posterior() {
    Eigen::LLT<Matrix> llt(precision_);
    const Vector mean = llt.solve(moment_);
    Vector z(mean.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng_);
    // precision = L L^T, so L^{-T} z has covariance precision^{-1}.
    return mean + llt.matrixU().solve(z);
  }

 protected:
  std::size_t choose(const ContextMatrix& contexts) override {
    require(contexts.rows() == moment_.size(), "thompson: context dimension mismatch");
    return argmax_inner(sample_posterior(), contexts);
  }

  void update(std::size_t, const Vector& played, double reward) override {
    precision_.noalias() += played * played.transpose() / config_.noise_variance;
    moment_ += reward * played / config_.noise_variance;
  }

 private:
  ThompsonConfig config_;
  CounterRng rng_;
  Matrix precision_;
  Vector moment_;
};

}  // namespace robust_bandits
