#pragma once

#include <cstddef>
#include <string>

#include "robust_bandits/core.hpp"
#include "robust_bandits/instances.hpp"
#include "robust_bandits/learner.hpp"

namespace robust_bandits {

/// Minimum-norm solution of gamma * x = rhs for symmetric PSD gamma, using the
/// pseudo-inverse on the numerical range of gamma.
inline Vector min_norm_solve(const Matrix& gamma, const Vector& rhs) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gamma);
  const Vector& lambda = eig.eigenvalues();
  const double top = lambda.cwiseAbs().maxCoeff();
  Vector coords = eig.eigenvectors().transpose() * rhs;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    coords(i) = (top > 0.0 && lambda(i) > kRankTolerance * top) ? coords(i) / lambda(i) : 0.0;
  }
  return eig.eigenvectors() * coords;
}

/// Exploration-free contextual learner: plays argmax <theta_hat, a_i> where
/// theta_hat is the least-squares fit to every (played context, reward) pair.
/// The estimate starts at zero, so the first round is a pure tie-break.
class Greedy final : public Learner {
 public:
  explicit Greedy(std::size_t d)
      : gram_(Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))),
        moment_(Vector::Zero(static_cast<Eigen::Index>(d))),
        theta_hat_(Vector::Zero(static_cast<Eigen::Index>(d))) {
    require(d >= 1, "greedy: dimension must be >= 1");
  }

  std::string name() const override { return "greedy"; }

  Vector estimate() const override {
    if (stale_) {
      theta_hat_ = min_norm_solve(gram_, moment_);
      stale_ = false;
    }
    return theta_hat_;
  }

  /// sum of a a^T over played contexts.
  const Matrix& gram() const { return gram_; }

 protected:
  std::size_t choose(const ContextMatrix& contexts) override {
    require(contexts.rows() == gram_.rows(), "greedy: context dimension mismatch");
    return argmax_inner(estimate(), contexts);
  }

  void update(std::size_t, const Vector& played, double reward) override {
    gram_.noalias() += played * played.transpose();
    moment_ += reward * played;
    stale_ = true;
  }

 private:
  Matrix gram_;
  Vector moment_;
  mutable Vector theta_hat_;
  mutable bool stale_ = false;
};

}  // namespace robust_bandits
