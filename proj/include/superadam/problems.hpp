#ifndef SUPERADAM_PROBLEMS_HPP
#define SUPERADAM_PROBLEMS_HPP

#include "superadam/core.hpp"

#include <json.hpp>

#include <memory>
#include <vector>

namespace superadam {

// Finite sum of diagonal quadratics: f(x; i) = 0.5 x'diag(q_i)x + c_i'x.
// L = max_i max_j q_i[j]; f* is analytic (mean curvature is positive); the
// reported sigma is the exact supremum of the per-sample gradient variance
// over the box ||x||_inf <= box_radius.
class FiniteSumQuadratic : public StochasticOracle {
 public:
  FiniteSumQuadratic(std::vector<Vector> q, std::vector<Vector> c, double box_radius);

  // Random instance with component curvatures in [q_min, q_max] and offsets
  // scaled by c_scale. deterministic = true makes all components identical
  // (sigma = 0).
  static FiniteSumQuadratic random(Index d, long n, std::uint64_t seed, double q_min,
                                   double q_max, double c_scale, double box_radius,
                                   bool deterministic = false);

  Index dim() const override { return d_; }
  std::optional<std::int64_t> n_components() const override {
    return static_cast<std::int64_t>(q_.size());
  }
  Vector stoch_grad(const Vector& x, std::uint64_t xi) const override;
  double component_value(const Vector& x, std::uint64_t xi) const override;
  Vector full_grad(const Vector& x) const override;
  double value(const Vector& x) const override;
  std::optional<double> smoothness() const override { return L_; }
  std::optional<double> noise_sigma() const override { return sigma_; }
  std::optional<double> value_lower_bound() const override { return f_star_; }

  // Exact per-sample gradient variance at x (enumeration over components).
  double gradient_variance(const Vector& x) const;
  double box_radius() const { return box_radius_; }
  const Vector& minimizer() const { return x_star_; }

 private:
  Index d_ = 0;
  std::vector<Vector> q_, c_;
  Vector q_bar_, c_bar_, x_star_;
  double L_ = 0.0, sigma_ = 0.0, f_star_ = 0.0, box_radius_ = 0.0;
};

// Binary classification with margins m_i = y_i a_i'x. The convex mode is
// the logistic loss log(1+exp(-m_i)); the sigmoid_squared flag switches to
// the nonconvex loss sigmoid(-m_i)^2. L = max_i ||a_i||^2/4 covers both,
// sigma^2 = mean_i ||a_i||^2 (per-sample gradients are a_i times a factor
// in [-1, 1]). Data is synthesized from the seed; no files are read.
class NoisyLogistic : public StochasticOracle {
 public:
  NoisyLogistic(Eigen::MatrixXd features, Vector labels, bool sigmoid_squared);

  static NoisyLogistic synthetic(Index d, long n, std::uint64_t seed,
                                 bool sigmoid_squared = false);

  Index dim() const override { return A_.cols(); }
  std::optional<std::int64_t> n_components() const override {
    return static_cast<std::int64_t>(A_.rows());
  }
  Vector stoch_grad(const Vector& x, std::uint64_t xi) const override;
  double component_value(const Vector& x, std::uint64_t xi) const override;
  Vector full_grad(const Vector& x) const override;
  double value(const Vector& x) const override;
  std::optional<double> smoothness() const override { return L_; }
  std::optional<double> noise_sigma() const override { return sigma_; }
  // Both losses are nonnegative.
  std::optional<double> value_lower_bound() const override { return 0.0; }

 private:
  Eigen::MatrixXd A_;
  Vector y_;
  bool sigmoid_squared_ = false;
  double L_ = 0.0, sigma_ = 0.0;
};

// Rosenbrock with additive Gaussian gradient noise. The sample index is a
// raw 64-bit key that deterministically seeds the noise vector, so
// stoch_grad is a function of (x, xi). Component values add the matching
// linear term noise'x, keeping value/gradient pairs consistent. Smoothness
// is only reported when a box half-width is given (Gershgorin bound on the
// Hessian over the box).
class StochasticRosenbrock : public StochasticOracle {
 public:
  StochasticRosenbrock(Index d, double noise_std, std::uint64_t noise_salt = 0,
                       std::optional<double> box_halfwidth = std::nullopt);

  Index dim() const override { return d_; }
  std::optional<std::int64_t> n_components() const override { return std::nullopt; }
  Vector stoch_grad(const Vector& x, std::uint64_t xi) const override;
  double component_value(const Vector& x, std::uint64_t xi) const override;
  Vector full_grad(const Vector& x) const override;
  double value(const Vector& x) const override;
  std::optional<double> smoothness() const override;
  std::optional<double> noise_sigma() const override;
  std::optional<double> value_lower_bound() const override { return 0.0; }

  Vector noise_vector(std::uint64_t xi) const;

 private:
  Index d_ = 0;
  double noise_std_ = 0.0;
  std::uint64_t noise_salt_ = 0;
  std::optional<double> box_halfwidth_;
};

// Builds an oracle from a JSON problem spec:
//   {"type": "finite_sum_quadratic", "d": 10, "n": 50, "seed": 1,
//    "q_min": 0.5, "q_max": 3.0, "c_scale": 1.0, "box_radius": 10.0,
//    "deterministic": false}
//   {"type": "noisy_logistic", "d": 8, "n": 100, "seed": 1,
//    "sigmoid_squared": false}
//   {"type": "stochastic_rosenbrock", "d": 4, "noise_std": 0.1,
//    "noise_salt": 0, "box_halfwidth": 2.0}
// Inconsistent specs are rejected with a ContractViolation.
std::unique_ptr<StochasticOracle> make_problem(const nlohmann::json& spec);

}  // namespace superadam

#endif  // SUPERADAM_PROBLEMS_HPP
