#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "robust_bandits/core.hpp"
#include "robust_bandits/learner.hpp"

namespace robust_bandits {

struct LinUcbConfig {
  double lambda = 1.0;
  double delta = 0.1;
};

/// Optimistic ridge-regression learner.
class LinUcb final : public Learner {
 public:
  LinUcb(std::size_t d, LinUcbConfig config = {})
      : config_(config),
        design_(config.lambda *
                Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))),
        moment_(Vector::Zero(static_cast<Eigen::Index>(d))) {
    require(d >= 1, "linucb: dimension must be >= 1");
    require(config.lambda > 0.0, "linucb: lambda must be > 0");
    require(config.delta > 0.0 && config.delta < 1.0, "linucb: delta must lie in (0, 1)");
  }

  std::string name() const override { return "linucb"; }

  /// sqrt(lambda) + sqrt(2 log(1/delta) + d log(1 + t/(d lambda))) after t observations.
  static double radius(std::size_t t, std::size_t d, LinUcbConfig config) {
    const double dd = static_cast<double>(d);
    return std::sqrt(config.lambda) +
           std::sqrt(2.0 * std::log(1.0 / config.delta) +
                     dd * std::log1p(static_cast<double>(t) / (dd * config.lambda)));
  }

  double radius() const { return radius(rounds(), static_cast<std::size_t>(moment_.size()), config_); }

  Vector estimate() const override { return design_.llt().solve(moment_); }

  /// V = lambda I + sum a a^T.
  const Matrix& design_matrix() const { return design_; }

  Vector indices(const ContextMatrix& contexts) const {
    Eigen::LLT<Matrix> llt(design_);
    const Vector theta = llt.solve(moment_);
    const Matrix z = llt.matrixL().solve(contexts);
    const double beta = radius();
    Vector out(contexts.cols());
    for (Eigen::Index i = 0; i < contexts.cols(); ++i) {
      out(i) = theta.dot(contexts.col(i)) + beta * z.col(i).norm();
    }
    return out;
  }

 protected:
  std::size_t choose(const ContextMatrix& contexts) override {
    require(contexts.rows() == moment_.size(), "linucb: context dimension mismatch");
    const Vector idx = indices(contexts);
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < idx.size(); ++i) {
      if (idx(i) > idx(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
    }
    return best;
  }

  void update(std::size_t, const Vector& played, double reward) override {
    design_.noalias() += played * played.transpose();
    moment_ += reward * played;
  }

 private:
  LinUcbConfig config_;
  Matrix design_;
  Vector moment_;
};

}  // namespace robust_bandits
