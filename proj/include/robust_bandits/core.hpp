#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace robust_bandits {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Arms or per-round contexts, one column per arm (d rows, k columns).
using ContextMatrix = Eigen::MatrixXd;

// Error hierarchy. The CLI maps these onto exit codes.

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Learner or adversary used out of order (double select, observe without select).
class ProtocolError : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

inline void ensure(bool condition, const std::string& message) {
  if (!condition) throw InvariantViolation(message);
}

/// log log d, with log(1 + log d) substituted for d <= 2 where log log d is
/// undefined (d = 1) or negative (d = 2).
inline double log_log_dim(std::size_t d) {
  const double ld = std::log(static_cast<double>(d));
  return d <= 2 ? std::log1p(ld) : std::log(ld);
}

/// 4d(log log d + 18): the support bound of a near-optimal design and the
/// initial epoch scale of phased elimination in its analysed form.
inline double support_bound(std::size_t d) {
  return 4.0 * static_cast<double>(d) * (log_log_dim(d) + 18.0);
}

}  // namespace robust_bandits
