#include "superadam/problems.hpp"

#include <cmath>

namespace superadam {

// ---- FiniteSumQuadratic ----------------------------------------------------

FiniteSumQuadratic::FiniteSumQuadratic(std::vector<Vector> q, std::vector<Vector> c,
                                       double box_radius)
    : q_(std::move(q)), c_(std::move(c)), box_radius_(box_radius) {
  require(!q_.empty() && q_.size() == c_.size(),
          "FiniteSumQuadratic: need matching non-empty component lists");
  require(box_radius_ > 0.0, "FiniteSumQuadratic: box_radius must be positive");
  d_ = q_.front().size();
  const auto n = static_cast<double>(q_.size());
  q_bar_ = Vector::Zero(d_);
  c_bar_ = Vector::Zero(d_);
  L_ = 0.0;
  bool identical = true;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    require(q_[i].size() == d_ && c_[i].size() == d_,
            "FiniteSumQuadratic: inconsistent component dimensions");
    require((q_[i].array() >= 0.0).all(), "FiniteSumQuadratic: curvatures must be >= 0");
    q_bar_ += q_[i];
    c_bar_ += c_[i];
    L_ = std::max(L_, q_[i].maxCoeff());
    identical = identical && q_[i] == q_.front() && c_[i] == c_.front();
  }
  q_bar_ /= n;
  c_bar_ /= n;
  if (identical) {
    // Keep the oracle bit-deterministic: the averaged mean would differ
    // from the common component by rounding.
    q_bar_ = q_.front();
    c_bar_ = c_.front();
  }
  require((q_bar_.array() > 0.0).all(),
          "FiniteSumQuadratic: mean curvature must be positive for a finite minimum");
  x_star_ = -c_bar_.cwiseQuotient(q_bar_);
  f_star_ = 0.5 * (q_bar_.array() * x_star_.array().square()).sum() + c_bar_.dot(x_star_);

  // Per-coordinate variance is a convex parabola in x_j; its supremum over
  // |x_j| <= R sits at an endpoint, so the box supremum is exact.
  double s = 0.0;
  for (Index j = 0; j < d_; ++j) {
    double at_pos = 0.0, at_neg = 0.0;
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const double a = q_[i][j] - q_bar_[j];
      const double b = c_[i][j] - c_bar_[j];
      at_pos += (a * box_radius_ + b) * (a * box_radius_ + b);
      at_neg += (-a * box_radius_ + b) * (-a * box_radius_ + b);
    }
    s += std::max(at_pos, at_neg) / n;
  }
  sigma_ = std::sqrt(s);
}

FiniteSumQuadratic FiniteSumQuadratic::random(Index d, long n, std::uint64_t seed,
                                              double q_min, double q_max, double c_scale,
                                              double box_radius, bool deterministic) {
  require(d >= 1 && n >= 1, "FiniteSumQuadratic::random: need d >= 1 and n >= 1");
  require(q_min > 0.0 && q_max >= q_min, "FiniteSumQuadratic::random: bad curvature range");
  SeededRng rng(mix64(seed ^ 0x517cc1b727220a95ULL));
  std::vector<Vector> q, c;
  q.reserve(static_cast<std::size_t>(n));
  c.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    if (deterministic && i > 0) {
      q.push_back(q.front());
      c.push_back(c.front());
      continue;
    }
    Vector qi(d), ci(d);
    for (Index j = 0; j < d; ++j) {
      qi[j] = q_min + (q_max - q_min) * rng.uniform01();
      ci[j] = c_scale * (2.0 * rng.uniform01() - 1.0);
    }
    q.push_back(std::move(qi));
    c.push_back(std::move(ci));
  }
  return FiniteSumQuadratic(std::move(q), std::move(c), box_radius);
}

Vector FiniteSumQuadratic::stoch_grad(const Vector& x, std::uint64_t xi) const {
  require(x.size() == d_, "FiniteSumQuadratic: dimension mismatch");
  require(xi < q_.size(), "FiniteSumQuadratic: component index out of range");
  return q_[xi].cwiseProduct(x) + c_[xi];
}

double FiniteSumQuadratic::component_value(const Vector& x, std::uint64_t xi) const {
  require(x.size() == d_, "FiniteSumQuadratic: dimension mismatch");
  require(xi < q_.size(), "FiniteSumQuadratic: component index out of range");
  return 0.5 * (q_[xi].array() * x.array().square()).sum() + c_[xi].dot(x);
}

Vector FiniteSumQuadratic::full_grad(const Vector& x) const {
  require(x.size() == d_, "FiniteSumQuadratic: dimension mismatch");
  return q_bar_.cwiseProduct(x) + c_bar_;
}

double FiniteSumQuadratic::value(const Vector& x) const {
  require(x.size() == d_, "FiniteSumQuadratic: dimension mismatch");
  return 0.5 * (q_bar_.array() * x.array().square()).sum() + c_bar_.dot(x);
}

double FiniteSumQuadratic::gradient_variance(const Vector& x) const {
  const Vector mean = full_grad(x);
  double s = 0.0;
  for (std::size_t i = 0; i < q_.size(); ++i)
    s += (q_[i].cwiseProduct(x) + c_[i] - mean).squaredNorm();
  return s / static_cast<double>(q_.size());
}

// ---- NoisyLogistic -----------------------------------------------------------

namespace {

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double softplus(double u) {
  // log(1 + exp(u)) without overflow.
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

}  // namespace

NoisyLogistic::NoisyLogistic(Eigen::MatrixXd features, Vector labels, bool sigmoid_squared)
    : A_(std::move(features)), y_(std::move(labels)), sigmoid_squared_(sigmoid_squared) {
  require(A_.rows() >= 1 && A_.cols() >= 1, "NoisyLogistic: empty data");
  require(y_.size() == A_.rows(), "NoisyLogistic: label count mismatch");
  require((y_.array().abs() == 1.0).all(), "NoisyLogistic: labels must be +-1");
  double max_row_sq = 0.0, mean_row_sq = 0.0;
  for (Index i = 0; i < A_.rows(); ++i) {
    const double r = A_.row(i).squaredNorm();
    max_row_sq = std::max(max_row_sq, r);
    mean_row_sq += r;
  }
  mean_row_sq /= static_cast<double>(A_.rows());
  L_ = max_row_sq / 4.0;
  sigma_ = std::sqrt(mean_row_sq);
}

NoisyLogistic NoisyLogistic::synthetic(Index d, long n, std::uint64_t seed,
                                       bool sigmoid_squared) {
  require(d >= 1 && n >= 1, "NoisyLogistic::synthetic: need d >= 1 and n >= 1");
  SeededRng rng(mix64(seed ^ 0x2545f4914f6cdd1dULL));
  Eigen::MatrixXd A(n, d);
  Vector w_true(d);
  for (Index j = 0; j < d; ++j) w_true[j] = rng.normal();
  w_true /= std::max(1.0, w_true.norm());
  Vector y(n);
  for (long i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) A(i, j) = rng.normal() / std::sqrt(static_cast<double>(d));
    const double margin = A.row(i).dot(w_true) + 0.3 * rng.normal();
    y[i] = margin >= 0.0 ? 1.0 : -1.0;
  }
  return NoisyLogistic(std::move(A), std::move(y), sigmoid_squared);
}

Vector NoisyLogistic::stoch_grad(const Vector& x, std::uint64_t xi) const {
  require(x.size() == A_.cols(), "NoisyLogistic: dimension mismatch");
  require(static_cast<Index>(xi) < A_.rows(), "NoisyLogistic: component index out of range");
  const double margin = y_[xi] * A_.row(xi).dot(x);
  const double s = sigmoid(-margin);
  const double factor = sigmoid_squared_ ? -2.0 * s * s * (1.0 - s) : -s;
  return factor * y_[xi] * A_.row(xi).transpose();
}

double NoisyLogistic::component_value(const Vector& x, std::uint64_t xi) const {
  require(x.size() == A_.cols(), "NoisyLogistic: dimension mismatch");
  require(static_cast<Index>(xi) < A_.rows(), "NoisyLogistic: component index out of range");
  const double margin = y_[xi] * A_.row(xi).dot(x);
  if (sigmoid_squared_) {
    const double s = sigmoid(-margin);
    return s * s;
  }
  return softplus(-margin);
}

Vector NoisyLogistic::full_grad(const Vector& x) const {
  Vector g = Vector::Zero(x.size());
  for (Index i = 0; i < A_.rows(); ++i) g += stoch_grad(x, static_cast<std::uint64_t>(i));
  return g / static_cast<double>(A_.rows());
}

double NoisyLogistic::value(const Vector& x) const {
  double s = 0.0;
  for (Index i = 0; i < A_.rows(); ++i) s += component_value(x, static_cast<std::uint64_t>(i));
  return s / static_cast<double>(A_.rows());
}

// ---- StochasticRosenbrock -----------------------------------------------------

StochasticRosenbrock::StochasticRosenbrock(Index d, double noise_std, std::uint64_t noise_salt,
                                           std::optional<double> box_halfwidth)
    : d_(d), noise_std_(noise_std), noise_salt_(noise_salt), box_halfwidth_(box_halfwidth) {
  require(d_ >= 2, "StochasticRosenbrock: need d >= 2");
  require(noise_std_ >= 0.0, "StochasticRosenbrock: noise_std must be >= 0");
  if (box_halfwidth_.has_value())
    require(*box_halfwidth_ > 0.0, "StochasticRosenbrock: box_halfwidth must be positive");
}

Vector StochasticRosenbrock::noise_vector(std::uint64_t xi) const {
  SeededRng rng(mix64(xi ^ noise_salt_));
  Vector z(d_);
  for (Index j = 0; j < d_; ++j) z[j] = rng.normal();
  return z;
}

Vector StochasticRosenbrock::stoch_grad(const Vector& x, std::uint64_t xi) const {
  return full_grad(x) + noise_std_ * noise_vector(xi);
}

double StochasticRosenbrock::component_value(const Vector& x, std::uint64_t xi) const {
  // Linear noise term keeps the component value consistent with its gradient.
  return value(x) + noise_std_ * noise_vector(xi).dot(x);
}

Vector StochasticRosenbrock::full_grad(const Vector& x) const {
  require(x.size() == d_, "StochasticRosenbrock: dimension mismatch");
  Vector g = Vector::Zero(d_);
  for (Index j = 0; j + 1 < d_; ++j) {
    const double gap = x[j + 1] - x[j] * x[j];
    g[j] += -400.0 * x[j] * gap - 2.0 * (1.0 - x[j]);
    g[j + 1] += 200.0 * gap;
  }
  return g;
}

double StochasticRosenbrock::value(const Vector& x) const {
  require(x.size() == d_, "StochasticRosenbrock: dimension mismatch");
  double s = 0.0;
  for (Index j = 0; j + 1 < d_; ++j) {
    const double gap = x[j + 1] - x[j] * x[j];
    s += 100.0 * gap * gap + (1.0 - x[j]) * (1.0 - x[j]);
  }
  return s;
}

std::optional<double> StochasticRosenbrock::smoothness() const {
  if (!box_halfwidth_.has_value()) return std::nullopt;
  // Gershgorin row bound on the Hessian over ||x||_inf <= b.
  const double b = *box_halfwidth_;
  return 1200.0 * b * b + 1200.0 * b + 202.0;
}

std::optional<double> StochasticRosenbrock::noise_sigma() const {
  return noise_std_ * std::sqrt(static_cast<double>(d_));
}

// ---- make_problem ------------------------------------------------------------

std::unique_ptr<StochasticOracle> make_problem(const nlohmann::json& spec) {
  require(spec.is_object() && spec.contains("type"),
          "make_problem: spec must be an object with a 'type' field");
  const std::string type = spec.at("type").get<std::string>();
  try {
    if (type == "finite_sum_quadratic") {
      const Index d = spec.value("d", 10);
      const long n = spec.value("n", 50);
      const auto seed = spec.value("seed", std::uint64_t{1});
      return std::make_unique<FiniteSumQuadratic>(FiniteSumQuadratic::random(
          d, n, seed, spec.value("q_min", 0.5), spec.value("q_max", 3.0),
          spec.value("c_scale", 1.0), spec.value("box_radius", 10.0),
          spec.value("deterministic", false)));
    }
    if (type == "noisy_logistic") {
      return std::make_unique<NoisyLogistic>(
          NoisyLogistic::synthetic(spec.value("d", 8), spec.value("n", 100),
                                   spec.value("seed", std::uint64_t{1}),
                                   spec.value("sigmoid_squared", false)));
    }
    if (type == "stochastic_rosenbrock") {
      std::optional<double> box;
      if (spec.contains("box_halfwidth") && !spec.at("box_halfwidth").is_null())
        box = spec.at("box_halfwidth").get<double>();
      return std::make_unique<StochasticRosenbrock>(
          spec.value("d", 4), spec.value("noise_std", 0.1),
          spec.value("noise_salt", std::uint64_t{0}), box);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation("make_problem: malformed spec: " + std::string(e.what()));
  }
  throw ContractViolation("make_problem: unknown problem type '" + type + "'");
}

}  // namespace superadam
