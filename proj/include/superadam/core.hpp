#ifndef SUPERADAM_CORE_HPP
#define SUPERADAM_CORE_HPP

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace superadam {

// All decision variables, gradients and estimator states are dense
// double-precision vectors of a fixed dimension d.
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thrown when a caller breaks a documented precondition (dimension
// mismatch, parameter out of range, ...).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

bool all_finite(const Vector& v);

// SplitMix64 step; used to derive sub-stream seeds.
std::uint64_t mix64(std::uint64_t z);

// Deterministic random source. The generator is std::mt19937_64, which is
// fully specified by the C++ standard, and every derived quantity
// (uniforms, normals, indices) is produced by fixed in-house recipes rather
// than the implementation-defined standard distributions, so identical
// seeds give bit-identical streams on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (cosine branch; one value per draw pair).
  double normal();

  // Uniform index in [0, n) by the multiply-shift method.
  std::int64_t index(std::int64_t n);

  // Independent sub-stream; same (seed, stream) always yields the same rng.
  SeededRng split(std::uint64_t stream) const {
    return SeededRng(mix64(seed_ ^ mix64(stream + 0x9e3779b97f4a7c15ULL)));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

enum class SetKind { Unconstrained, Box, Ball };

// Feasible region X: all of R^d, an axis-aligned box, or a Euclidean ball.
class FeasibleSet {
 public:
  static FeasibleSet unconstrained();
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet ball(Vector center, double radius);

  SetKind kind() const { return kind_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }

  // Unconstrained matches any dimension.
  bool matches_dim(Index d) const;
  bool contains(const Vector& v, double tol = 0.0) const;

 private:
  FeasibleSet() = default;
  SetKind kind_ = SetKind::Unconstrained;
  Vector lower_, upper_, center_;
  double radius_ = 0.0;
};

// Closest point of X to v in the l2 norm; v itself if already feasible.
Vector euclidean_project(const Vector& v, const FeasibleSet& X);

// A stochastic first-order oracle for f(x) = E_xi[f(x; xi)].
//
// sample_index draws a component index (finite sums) or a raw 64-bit noise
// key (infinite families); stoch_grad must be deterministic given (x, xi).
// Metadata (L, sigma, lower bound on f) is optional: theory checks that
// need a missing value refuse to run instead of guessing.
class StochasticOracle {
 public:
  virtual ~StochasticOracle() = default;

  virtual Index dim() const = 0;
  // Number of components for finite sums; nullopt means an infinite family.
  virtual std::optional<std::int64_t> n_components() const = 0;

  virtual std::uint64_t sample_index(SeededRng& rng) const;
  virtual Vector stoch_grad(const Vector& x, std::uint64_t xi) const = 0;
  virtual double component_value(const Vector& x, std::uint64_t xi) const = 0;
  virtual Vector full_grad(const Vector& x) const = 0;
  virtual double value(const Vector& x) const = 0;

  virtual std::optional<double> smoothness() const { return std::nullopt; }
  virtual std::optional<double> noise_sigma() const { return std::nullopt; }
  virtual std::optional<double> value_lower_bound() const { return std::nullopt; }
};

// Pass-through wrapper that counts oracle calls.
class CountingOracle : public StochasticOracle {
 public:
  explicit CountingOracle(const StochasticOracle& inner) : inner_(inner) {}

  Index dim() const override { return inner_.dim(); }
  std::optional<std::int64_t> n_components() const override { return inner_.n_components(); }
  std::uint64_t sample_index(SeededRng& rng) const override { return inner_.sample_index(rng); }
  Vector stoch_grad(const Vector& x, std::uint64_t xi) const override {
    ++stoch_grad_calls;
    return inner_.stoch_grad(x, xi);
  }
  double component_value(const Vector& x, std::uint64_t xi) const override {
    ++component_value_calls;
    return inner_.component_value(x, xi);
  }
  Vector full_grad(const Vector& x) const override {
    ++full_grad_calls;
    return inner_.full_grad(x);
  }
  double value(const Vector& x) const override {
    ++value_calls;
    return inner_.value(x);
  }
  std::optional<double> smoothness() const override { return inner_.smoothness(); }
  std::optional<double> noise_sigma() const override { return inner_.noise_sigma(); }
  std::optional<double> value_lower_bound() const override { return inner_.value_lower_bound(); }

  mutable long stoch_grad_calls = 0;
  mutable long full_grad_calls = 0;
  mutable long value_calls = 0;
  mutable long component_value_calls = 0;

 private:
  const StochasticOracle& inner_;
};

}  // namespace superadam

#endif  // SUPERADAM_CORE_HPP
