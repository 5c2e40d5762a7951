#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "robust_bandits/core.hpp"
#include "robust_bandits/instances.hpp"

namespace robust_bandits {

/// Gamma(w) = sum_i w_i a_i a_i^T over the columns of `arms`.
inline Matrix gram(const ContextMatrix& arms, const Vector& weights) {
  require(weights.size() == arms.cols(), "gram: one weight per arm required");
  require((weights.array() >= 0.0).all(), "gram: weights must be nonnegative");
  Matrix g = arms * weights.asDiagonal() * arms.transpose();
  return 0.5 * (g + g.transpose());
}

inline Matrix gram(const ArmSet& arms, const Vector& weights) { return gram(arms.matrix(), weights); }

/// b^T Gamma^+ b, with the pseudo-inverse taken on the range of Gamma.
/// Throws when b has a component outside that range.
inline double weighted_norm_sq(const Vector& b, const Matrix& gamma) {
  require(gamma.rows() == gamma.cols() && gamma.rows() == b.size(),
          "weighted_norm_sq: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gamma);
  const Vector& lambda = eig.eigenvalues();
  const double top = lambda.cwiseAbs().maxCoeff();
  require(top > 0.0, "weighted_norm_sq: zero matrix");
  const Vector coords = eig.eigenvectors().transpose() * b;
  double value = 0.0;
  double outside = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > kRankTolerance * top) {
      value += coords(i) * coords(i) / lambda(i);
    } else {
      outside += coords(i) * coords(i);
    }
  }
  require(std::sqrt(outside) <= 1e-9 * std::max(1.0, b.norm()),
          "weighted_norm_sq: vector lies outside the span of the design");
  return value;
}

/// Orthonormal basis of span(arms) and the arms expressed in it.
struct SpanProjection {
  Matrix basis;        // d x r, orthonormal columns
  Matrix coordinates;  // r x k

  std::size_t rank() const { return static_cast<std::size_t>(basis.cols()); }
  Vector project(const Vector& x) const { return basis.transpose() * x; }
  Vector lift(const Vector& y) const { return basis * y; }
};

inline SpanProjection project_to_span(const ContextMatrix& arms) {
  require(arms.cols() >= 1, "project_to_span: no arms");
  Eigen::JacobiSVD<Matrix> svd(arms, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  require(s.size() > 0 && s(0) > 0.0, "project_to_span: all arms are zero");
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > kRankTolerance * s(0)) ++r;
  SpanProjection out;
  out.basis = svd.matrixU().leftCols(r);
  out.coordinates = out.basis.transpose() * arms;
  return out;
}

inline SpanProjection project_to_span(const ArmSet& arms) { return project_to_span(arms.matrix()); }

struct Design {
  /// One weight per input arm; zero off the support.
  Vector weights;
  std::vector<std::size_t> support;
  /// max_a ||a||^2 in the inverse design matrix, on span(arms).
  double value = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::size_t effective_rank = 0;
  /// -log det Gamma per iteration, on the projected space.
  std::vector<double> objective;
};

class DesignError : public std::runtime_error {
 public:
  DesignError(const std::string& what, Design best) : std::runtime_error(what), best_(std::move(best)) {}
  const Design& best() const { return best_; }

 private:
  Design best_;
};

struct DesignOptions {
  double tol = 1e-2;
  /// 0 selects 10^4 * d.
  std::size_t max_iters = 0;
  /// Ambient dimension for the support bound; 0 selects the arms' dimension.
  std::size_t ambient_dim = 0;
};

namespace detail {

struct DesignEval {
  double value;
  std::size_t argmax;
  double objective;
};

/// Max weighted norm over the projected arms and -log det; nullopt if singular.
inline std::optional<DesignEval> evaluate_design(const Matrix& x, const Vector& weights) {
  const Matrix g = x * weights.asDiagonal() * x.transpose();
  Eigen::LLT<Matrix> llt(0.5 * (g + g.transpose()));
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Matrix z = llt.matrixL().solve(x);
  DesignEval out{-1.0, 0, 0.0};
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double v = z.col(i).squaredNorm();
    if (v > out.value) {
      out.value = v;
      out.argmax = static_cast<std::size_t>(i);
    }
  }
  const Vector diag = Matrix(llt.matrixL()).diagonal();
  out.objective = -2.0 * diag.array().log().sum();
  return out;
}

/// Greedy max-volume choice of r linearly independent columns.
inline std::vector<std::size_t> spanning_subset(const Matrix& x) {
  Matrix residual = x;
  std::vector<std::size_t> chosen;
  std::vector<bool> used(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index step = 0; step < x.rows(); ++step) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double n = residual.col(i).norm();
      if (n > best_norm) {
        best_norm = n;
        best = static_cast<std::size_t>(i);
      }
    }
    used[best] = true;
    chosen.push_back(best);
    const Vector q = residual.col(static_cast<Eigen::Index>(best)) / best_norm;
    residual -= q * (q.transpose() * residual);
  }
  return chosen;
}

inline void fill_support(Design& design) {
  design.support.clear();
  for (Eigen::Index i = 0; i < design.weights.size(); ++i) {
    if (design.weights(i) > 0.0) design.support.push_back(static_cast<std::size_t>(i));
  }
}

}  // namespace detail

/// Near G-optimal design by Frank-Wolfe on the log-det objective.
///
/// Works on the span of the arms (dimension r). Starts from uniform weights on
/// a greedy max-volume spanning subset and moves toward the arm with the
/// largest weighted norm g using the closed-form step (g/r - 1)/(g - 1).
/// Stops once g <= 2r or (g - r)/r <= tol, prunes weights below 1e-6/k if the
/// bound still holds, and checks |support| <= 4d(log log d + 18).
inline Design frank_wolfe_design(const ContextMatrix& arms, DesignOptions options = {}) {
  require(arms.cols() >= 1, "frank_wolfe_design: no arms");
  const auto k = static_cast<std::size_t>(arms.cols());
  const std::size_t ambient = options.ambient_dim ? options.ambient_dim
                                                  : static_cast<std::size_t>(arms.rows());
  const std::size_t max_iters =
      options.max_iters ? options.max_iters : 10000 * static_cast<std::size_t>(arms.rows());

  const SpanProjection span = project_to_span(arms);
  const Matrix& x = span.coordinates;
  const std::size_t r = span.rank();
  const double rd = static_cast<double>(r);

  Design design;
  design.effective_rank = r;
  design.weights = Vector::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t i : detail::spanning_subset(x)) {
    design.weights(static_cast<Eigen::Index>(i)) = 1.0 / rd;
  }

  Vector best_weights = design.weights;
  double best_value = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (std::size_t it = 0;; ++it) {
    const auto eval = detail::evaluate_design(x, design.weights);
    ensure(eval.has_value(), "frank_wolfe_design: design matrix became singular");
    design.value = eval->value;
    design.iterations = it;
    design.objective.push_back(eval->objective);
    if (design.value < best_value) {
      best_value = design.value;
      best_weights = design.weights;
    }

    if (design.value <= 2.0 * rd || (design.value - rd) / rd <= options.tol) {
      converged = true;
      break;
    }
    if (it >= max_iters) break;

    const double g = design.value;
    const double step = (g / rd - 1.0) / (g - 1.0);
    design.weights *= (1.0 - step);
    design.weights(static_cast<Eigen::Index>(eval->argmax)) += step;
  }

  if (!converged) {
    Design best = design;
    best.value = best_value;
    best.weights = best_weights / best_weights.sum();
    detail::fill_support(best);
    throw DesignError("frank_wolfe_design: no design with value <= 2r within " +
                          std::to_string(max_iters) + " iterations",
                      std::move(best));
  }

  design.weights /= design.weights.sum();
  const double floor = 1e-6 / static_cast<double>(k);
  Vector pruned = (design.weights.array() < floor).select(0.0, design.weights);
  if (pruned.sum() > 0.0 && (pruned.array() > 0.0).count() < (design.weights.array() > 0.0).count()) {
    pruned /= pruned.sum();
    if (const auto eval = detail::evaluate_design(x, pruned); eval && eval->value <= 2.0 * rd) {
      design.weights = pruned;
      design.value = eval->value;
    }
  }
  detail::fill_support(design);

  if (static_cast<double>(design.support.size()) > support_bound(ambient)) {
    throw DesignError("frank_wolfe_design: support " + std::to_string(design.support.size()) +
                          " exceeds 4d(log log d + 18)",
                      design);
  }
  return design;
}

inline Design frank_wolfe_design(const ArmSet& arms, DesignOptions options = {}) {
  return frank_wolfe_design(arms.matrix(), options);
}

}  // namespace robust_bandits
