#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "robust_bandits/attack_spec.hpp"
#include "robust_bandits/core.hpp"
#include "robust_bandits/rng.hpp"

namespace robust_bandits {

inline constexpr double kUnitBallSlack = 1e-12;

/// Relative singular-value cutoff used for every rank decision.
inline constexpr double kRankTolerance = 1e-9;

inline std::size_t numerical_rank(const Matrix& columns) {
  if (columns.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(columns);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > kRankTolerance * s(0)) ++r;
  }
  return r;
}

/// Ordered, duplicate-free collection of k arms in R^d inside the unit ball.
/// Arms need not span R^d; `effective_rank()` records the dimension of their span.
class ArmSet {
 public:
  explicit ArmSet(ContextMatrix arms) : arms_(std::move(arms)) {
    require(arms_.rows() >= 1, "ArmSet: dimension must be positive");
    require(arms_.cols() >= 1, "ArmSet: at least one arm is required");
    require(arms_.allFinite(), "ArmSet: non-finite feature value");
    for (Eigen::Index i = 0; i < arms_.cols(); ++i) {
      require(arms_.col(i).norm() <= 1.0 + kUnitBallSlack,
              "ArmSet: arm " + std::to_string(i) + " has norm > 1");
    }
    for (Eigen::Index i = 0; i < arms_.cols(); ++i) {
      for (Eigen::Index j = i + 1; j < arms_.cols(); ++j) {
        require(arms_.col(i) != arms_.col(j), "ArmSet: arms " + std::to_string(i) + " and " +
                                                  std::to_string(j) + " are identical");
      }
    }
    effective_rank_ = numerical_rank(arms_);
  }

  std::size_t d() const { return static_cast<std::size_t>(arms_.rows()); }
  std::size_t k() const { return static_cast<std::size_t>(arms_.cols()); }
  std::size_t effective_rank() const { return effective_rank_; }

  const ContextMatrix& matrix() const { return arms_; }
  auto arm(std::size_t i) const { return arms_.col(static_cast<Eigen::Index>(i)); }

  ArmSet subset(const std::vector<std::size_t>& indices) const {
    ContextMatrix sub(arms_.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
      sub.col(static_cast<Eigen::Index>(j)) = arm(indices[j]);
    }
    return ArmSet(std::move(sub));
  }

  friend bool operator==(const ArmSet& a, const ArmSet& b) { return a.arms_ == b.arms_; }

 private:
  ContextMatrix arms_;
  std::size_t effective_rank_ = 0;
};

struct NoiseModel {
  enum class Kind { none, gaussian };
  Kind kind = Kind::none;
  double variance = 0.0;

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double variance) {
    require(variance >= 0.0 && std::isfinite(variance), "NoiseModel: variance must be >= 0");
    return {Kind::gaussian, variance};
  }

  /// Variance above 1 breaks the 1-sub-Gaussian assumption of the analysis;
  /// allowed, but callers checking guarantees should look here first.
  bool sub_gaussian_1() const { return kind == Kind::none || variance <= 1.0; }

  double draw(CounterRng& rng) const {
    if (kind == Kind::none || variance == 0.0) return 0.0;
    std::normal_distribution<double> normal(0.0, std::sqrt(variance));
    return normal(rng);
  }
};

/// Fixed arm set, hidden parameter, and observation noise.
struct Instance {
  ArmSet arms;
  Vector theta;
  NoiseModel noise;

  Instance(ArmSet arms_in, Vector theta_in, NoiseModel noise_in)
      : arms(std::move(arms_in)), theta(std::move(theta_in)), noise(noise_in) {
    require(static_cast<std::size_t>(theta.size()) == arms.d(),
            "Instance: theta dimension does not match arms");
    require(theta.allFinite(), "Instance: non-finite theta");
    require(theta.norm() <= 1.0 + kUnitBallSlack, "Instance: ||theta|| > 1");
  }

  Vector means() const { return arms.matrix().transpose() * theta; }

  std::size_t best_arm() const {
    const Vector mu = means();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < mu.size(); ++i) {
      if (mu(i) > mu(best)) best = i;
    }
    return static_cast<std::size_t>(best);
  }
};

/// Fixed centers perturbed each round by i.i.d. N(0, eta^2/d I) vectors.
struct ContextModel {
  ArmSet centers;
  double eta = 0.0;

  double perturbation_sd() const {
    return eta / std::sqrt(static_cast<double>(centers.d()));
  }

  void draw(CounterRng& rng, ContextMatrix& out) const {
    out = centers.matrix();
    if (eta == 0.0) return;
    std::normal_distribution<double> normal(0.0, perturbation_sd());
    for (Eigen::Index i = 0; i < out.cols(); ++i) {
      for (Eigen::Index j = 0; j < out.rows(); ++j) out(j, i) += normal(rng);
    }
  }
};

/// What the learner sees each round: a fixed arm set, perturbed centers, or
/// a without-replacement sample from a pool of feature vectors.
class Environment {
 public:
  struct Fixed {
    ArmSet arms;
  };
  struct Perturbed {
    ContextModel model;
  };
  struct Pooled {
    ArmSet pool;
    std::size_t per_round;
  };

  static Environment fixed(const Instance& instance) {
    return Environment(Fixed{instance.arms}, instance.theta, instance.noise);
  }

  static Environment perturbed(ContextModel model, Vector theta, NoiseModel noise) {
    require(model.eta >= 0.0, "Environment: eta must be >= 0");
    return Environment(Perturbed{std::move(model)}, std::move(theta), noise);
  }

  static Environment pooled(ArmSet pool, std::size_t per_round, Vector theta, NoiseModel noise) {
    require(per_round >= 1 && per_round <= pool.k(),
            "Environment: per-round sample size must be in [1, pool size]");
    return Environment(Pooled{std::move(pool), per_round}, std::move(theta), noise);
  }

  std::size_t d() const { return static_cast<std::size_t>(theta_.size()); }

  /// Number of arms offered per round.
  std::size_t k() const {
    return std::visit(
        [](const auto& s) -> std::size_t {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Fixed>) return s.arms.k();
          else if constexpr (std::is_same_v<S, Perturbed>) return s.model.centers.k();
          else return s.per_round;
        },
        source_);
  }

  const Vector& theta() const { return theta_; }
  const NoiseModel& noise() const { return noise_; }

  bool is_fixed() const { return std::holds_alternative<Fixed>(source_); }

  /// The arm set when contexts never change, else null.
  const ArmSet* fixed_arms() const {
    if (const auto* f = std::get_if<Fixed>(&source_)) return &f->arms;
    return nullptr;
  }

  /// Contexts in force at unit-ball norms every round (fixed arms, pools).
  bool unit_ball_contexts() const {
    if (const auto* p = std::get_if<Perturbed>(&source_)) return p->model.eta == 0.0;
    return true;
  }

  /// Contexts for one round. Fixed arm sets are returned by reference without
  /// touching `buffer` or the stream.
  const ContextMatrix& contexts(CounterRng& rng, ContextMatrix& buffer) const {
    if (const auto* f = std::get_if<Fixed>(&source_)) return f->arms.matrix();
    if (const auto* p = std::get_if<Perturbed>(&source_)) {
      p->model.draw(rng, buffer);
      return buffer;
    }
    const auto& pooled = std::get<Pooled>(source_);
    std::vector<std::size_t> order(pooled.pool.k());
    std::iota(order.begin(), order.end(), std::size_t{0});
    buffer.resize(static_cast<Eigen::Index>(d()), static_cast<Eigen::Index>(pooled.per_round));
    for (std::size_t j = 0; j < pooled.per_round; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, order.size() - 1);
      std::swap(order[j], order[pick(rng)]);
      buffer.col(static_cast<Eigen::Index>(j)) = pooled.pool.arm(order[j]);
    }
    return buffer;
  }

 private:
  using Source = std::variant<Fixed, Perturbed, Pooled>;

  Environment(Source source, Vector theta, NoiseModel noise)
      : source_(std::move(source)), theta_(std::move(theta)), noise_(noise) {
    const std::size_t dim = std::visit(
        [](const auto& s) -> std::size_t {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Fixed>) return s.arms.d();
          else if constexpr (std::is_same_v<S, Perturbed>) return s.model.centers.d();
          else return s.pool.d();
        },
        source_);
    require(static_cast<std::size_t>(theta_.size()) == dim,
            "Environment: theta dimension does not match contexts");
    require(theta_.norm() <= 1.0 + kUnitBallSlack, "Environment: ||theta|| > 1");
  }

  Source source_;
  Vector theta_;
  NoiseModel noise_;
};

// ---------------------------------------------------------------------------
// Synthetic generators

inline Vector uniform_theta(std::size_t d) {
  return Vector::Constant(static_cast<Eigen::Index>(d), 1.0 / std::sqrt(static_cast<double>(d)));
}

/// Centers with i.i.d. entries on [-1/sqrt(d), 1/sqrt(d)], theta = (1/sqrt(d), ...),
/// Gaussian reward noise with variance sigma2.
inline std::pair<ContextModel, Instance> make_synthetic_contextual(std::size_t d, std::size_t k,
                                                                   double eta, double sigma2,
                                                                   std::uint64_t seed) {
  require(d >= 1, "make_synthetic_contextual: d must be >= 1");
  require(k >= 2, "make_synthetic_contextual: k must be >= 2");
  require(eta >= 0.0 && std::isfinite(eta), "make_synthetic_contextual: eta must be >= 0");
  CounterRng rng(seed, Stream::instance);
  const double half_width = 1.0 / std::sqrt(static_cast<double>(d));
  std::uniform_real_distribution<double> uniform(-half_width, half_width);
  ContextMatrix centers(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < centers.cols(); ++i) {
    for (Eigen::Index j = 0; j < centers.rows(); ++j) centers(j, i) = uniform(rng);
  }
  ArmSet arms(std::move(centers));
  Instance instance(arms, uniform_theta(d), NoiseModel::gaussian(sigma2));
  return {ContextModel{std::move(arms), eta}, std::move(instance)};
}

/// The contextual generator with the perturbation removed: arms are the centers.
inline Instance make_synthetic_fixed(std::size_t d, std::size_t k, std::uint64_t seed,
                                     double sigma2 = 0.05) {
  return make_synthetic_contextual(d, k, 0.0, sigma2, seed).second;
}

// ---------------------------------------------------------------------------
// CSV

struct CsvOptions {
  bool header = false;
  /// Reject out-of-ball rows and theta instead of rescaling them.
  bool strict = false;
};

inline std::vector<std::vector<double>> read_csv(const std::string& path, bool header) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  if (header) {
    std::getline(in, line);
    ++line_no;
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const char* begin = field.c_str();
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      while (end != nullptr && (*end == ' ' || *end == '\t')) ++end;
      require(end != begin && end != nullptr && *end == '\0',
              path + ":" + std::to_string(line_no) + ": malformed number '" + field + "'");
      require(std::isfinite(value),
              path + ":" + std::to_string(line_no) + ": non-finite value");
      row.push_back(value);
    }
    require(!rows.empty() ? row.size() == rows.front().size() : !row.empty(),
            path + ":" + std::to_string(line_no) + ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Rows of a CSV as columns of a matrix (one arm per row in the file).
inline ContextMatrix read_arm_csv(const std::string& path, bool header) {
  const auto rows = read_csv(path, header);
  require(!rows.empty(), path + ": no rows");
  ContextMatrix arms(static_cast<Eigen::Index>(rows.front().size()),
                     static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      arms(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[i][j];
    }
  }
  return arms;
}

struct LoadedInstance {
  Instance instance;
  /// Global factor applied to every feature row (1 when already in the ball).
  double feature_scale = 1.0;
  double theta_scale = 1.0;
};

/// Feature rows are rescaled by one global factor so the largest norm is 1;
/// theta is projected onto the unit ball. Strict mode rejects instead.
inline LoadedInstance load_instance_csv(const std::string& features_path,
                                        const std::string& theta_path, CsvOptions options = {},
                                        NoiseModel noise = NoiseModel::gaussian(0.05)) {
  ContextMatrix arms = read_arm_csv(features_path, options.header);
  const auto theta_rows = read_csv(theta_path, options.header);
  std::vector<double> theta_values;
  for (const auto& row : theta_rows) theta_values.insert(theta_values.end(), row.begin(), row.end());
  require(theta_values.size() == static_cast<std::size_t>(arms.rows()),
          "theta has " + std::to_string(theta_values.size()) + " values, features have " +
              std::to_string(arms.rows()) + " columns");
  Vector theta = Eigen::Map<Vector>(theta_values.data(), static_cast<Eigen::Index>(theta_values.size()));

  double feature_scale = 1.0;
  double theta_scale = 1.0;
  const double max_norm = arms.colwise().norm().maxCoeff();
  require(max_norm > 0.0, features_path + ": all feature rows are zero");
  if (max_norm > 1.0) {
    require(!options.strict, features_path + ": row norm " + std::to_string(max_norm) +
                                 " exceeds 1 (strict mode)");
    feature_scale = 1.0 / max_norm;
    arms *= feature_scale;
    // The rescaled maximum can land a rounding error above 1.
    for (Eigen::Index i = 0; i < arms.cols(); ++i) {
      const double n = arms.col(i).norm();
      if (n > 1.0) arms.col(i) /= n;
    }
  }
  const double theta_norm = theta.norm();
  if (theta_norm > 1.0) {
    require(!options.strict, theta_path + ": ||theta|| exceeds 1 (strict mode)");
    theta_scale = 1.0 / theta_norm;
    theta *= theta_scale;
    if (theta.norm() > 1.0) theta /= theta.norm();
  }
  return {Instance(ArmSet(std::move(arms)), std::move(theta), noise), feature_scale, theta_scale};
}

// ---------------------------------------------------------------------------
// Lower-bound constructions

enum class FixtureName { zeroing_1d, basis_dk, unknownC_2d, diverse_zeroing };

inline std::optional<FixtureName> parse_fixture_name(std::string_view name) {
  if (name == "zeroing_1d") return FixtureName::zeroing_1d;
  if (name == "basis_dk") return FixtureName::basis_dk;
  if (name == "unknownC_2d") return FixtureName::unknownC_2d;
  if (name == "diverse_zeroing") return FixtureName::diverse_zeroing;
  return std::nullopt;
}

/// Instances that a learner cannot tell apart while the adversary is active,
/// plus the adversary that makes them so.
struct LowerBoundFixture {
  FixtureName name;
  std::vector<Environment> environments;
  AttackSpec attack;
  /// Environments the adversary runs against; the rest are uncorrupted references.
  std::vector<std::size_t> attacked;
  double budget = 0.0;
};

using FixtureParams = std::map<std::string, double>;

inline LowerBoundFixture make_lower_bound(FixtureName name, const FixtureParams& params) {
  auto get = [&](const std::string& key) -> double {
    const auto it = params.find(key);
    require(it != params.end(), "make_lower_bound: missing parameter '" + key + "'");
    return it->second;
  };
  auto get_or = [&](const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };

  LowerBoundFixture fixture{name, {}, {}, {}, 0.0};
  switch (name) {
    case FixtureName::zeroing_1d: {
      const double budget = get("C");
      require(budget >= 0.0, "zeroing_1d: C must be >= 0");
      ContextMatrix arms(1, 2);
      arms << 1.0, -1.0;
      const ArmSet arm_set(arms);
      for (double sign : {1.0, -1.0}) {
        fixture.environments.push_back(
            Environment::fixed(Instance(arm_set, Vector::Constant(1, sign), NoiseModel::none())));
      }
      fixture.attacked = {0, 1};
      fixture.budget = budget;
      fixture.attack.kind = AttackKind::zeroing;
      fixture.attack.budget = budget;
      break;
    }
    case FixtureName::basis_dk: {
      const auto d = static_cast<std::size_t>(get("d"));
      const double budget = get("C");
      require(d >= 2, "basis_dk: d must be >= 2");
      const ArmSet arm_set(ContextMatrix::Identity(static_cast<Eigen::Index>(d),
                                                   static_cast<Eigen::Index>(d)));
      for (std::size_t i = 0; i < d; ++i) {
        fixture.environments.push_back(Environment::fixed(
            Instance(arm_set, Vector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i)),
                     NoiseModel::none())));
        fixture.attacked.push_back(i);
      }
      fixture.budget = budget;
      fixture.attack.kind = AttackKind::zeroing;
      fixture.attack.budget = budget;
      break;
    }
    case FixtureName::unknownC_2d: {
      // Reference instance: a2 = [0, 1/4] is the 1/8-suboptimal arm.
      // Attacked instance: a2 = [0, 3/4] is optimal, but its reward 3/8 is
      // pushed to 1/8 at cost 1/4 per pull, reproducing the reference exactly.
      const double budget = params.count("C") ? get("C") : 2.0 * get("rbar0");
      require(budget >= 0.0, "unknownC_2d: C must be >= 0");
      Vector theta(2);
      theta << 0.5, 0.5;
      ContextMatrix reference(2, 2);
      reference << 0.5, 0.0, 0.0, 0.25;
      ContextMatrix attacked(2, 2);
      attacked << 0.5, 0.0, 0.0, 0.75;
      fixture.environments.push_back(
          Environment::fixed(Instance(ArmSet(reference), theta, NoiseModel::none())));
      fixture.environments.push_back(
          Environment::fixed(Instance(ArmSet(attacked), theta, NoiseModel::none())));
      fixture.attacked = {1};
      fixture.budget = budget;
      fixture.attack.kind = AttackKind::fixed_shift;
      fixture.attack.budget = budget;
      fixture.attack.target = 1;
      fixture.attack.shift = -0.25;
      break;
    }
    case FixtureName::diverse_zeroing: {
      const auto d = static_cast<std::size_t>(get_or("d", 5));
      const auto k = static_cast<std::size_t>(get_or("k", 25));
      const double eta = get_or("eta", 0.5);
      const double budget = get("C");
      const auto seed = static_cast<std::uint64_t>(get_or("seed", 0));
      auto [model, instance] = make_synthetic_contextual(d, k, eta, get_or("sigma2", 0.05), seed);
      fixture.environments.push_back(
          Environment::perturbed(std::move(model), instance.theta, instance.noise));
      fixture.attacked = {0};
      fixture.budget = budget;
      fixture.attack.kind = AttackKind::zeroing;
      fixture.attack.budget = budget;
      break;
    }
  }
  return fixture;
}

}  // namespace robust_bandits
