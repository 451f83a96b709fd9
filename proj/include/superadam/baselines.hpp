#ifndef SUPERADAM_BASELINES_HPP
#define SUPERADAM_BASELINES_HPP

#include "superadam/adaptive_matrix.hpp"
#include "superadam/core.hpp"

#include <memory>
#include <string>

namespace superadam {

// Every baseline step can be read as x_{t+1} = x_t - gamma * H^{-1} g for a
// method-specific triple (g, H, gamma); the view exposes that triple so the
// harness fills the same metrics rows as for the main optimizer. Zero
// diagonal entries (possible for the epsilon-free updates on coordinates
// with identically-zero gradients) are floored at a tiny positive value;
// the paired g entry is zero there, so the view still reproduces the actual
// zero movement of that coordinate.
struct BaselineStepView {
  Vector g_used;
  AdaptiveMatrix H = AdaptiveMatrix::scalar(1.0);
  double gamma = 1.0;
};

// Driver interface used by the harness. Concrete types additionally expose
// a pure step(grad) for direct unit testing. Constrained sets are handled
// by Euclidean projection after the update.
class BaselineOptimizer {
 public:
  virtual ~BaselineOptimizer() = default;
  virtual void init(Vector x1, const StochasticOracle& oracle, SeededRng& rng) = 0;
  virtual void step(const StochasticOracle& oracle, SeededRng& rng) = 0;
  virtual const Vector& x() const = 0;
  virtual const BaselineStepView& view() const = 0;
  virtual const Vector& estimate() const = 0;  // the method's g_t
  virtual const char* name() const = 0;
};

namespace detail {

class BaselineBase : public BaselineOptimizer {
 public:
  explicit BaselineBase(FeasibleSet X) : X_(std::move(X)) {}
  const Vector& x() const override { return x_; }
  const BaselineStepView& view() const override { return view_; }
  const Vector& estimate() const override { return view_.g_used; }

 protected:
  // One draw, one stochastic gradient at the current point.
  Vector fresh_grad(const StochasticOracle& oracle, SeededRng& rng) const;
  void project() { x_ = euclidean_project(x_, X_); }

  FeasibleSet X_;
  Vector x_;
  BaselineStepView view_;
};

}  // namespace detail

// x_{t+1} = x_t - eta_t g_t/sqrt(v_t) with v_t = (1/t) sum_j g_j^2 as
// printed (running-sum form behind the flag) and eta_t = eta/sqrt(t).
struct AdaGradParams {
  double eta = 0.1;
  bool decreasing_eta = true;
  bool arithmetic_average = true;
};

class AdaGrad : public detail::BaselineBase {
 public:
  explicit AdaGrad(AdaGradParams p, FeasibleSet X = FeasibleSet::unconstrained())
      : BaselineBase(std::move(X)), p_(p) {}
  void init(Vector x1);
  void init(Vector x1, const StochasticOracle&, SeededRng&) override { init(std::move(x1)); }
  void step(const Vector& grad);
  void step(const StochasticOracle& oracle, SeededRng& rng) override {
    step(fresh_grad(oracle, rng));
  }
  const char* name() const override { return "adagrad"; }

  AdaGradParams p_;
  Vector sum_sq_;
  long t_ = 0;
};

// Bias-corrected moments, x - eta_t m_hat/(sqrt(v_hat)+eps), eta_t = eta/sqrt(t).
struct AdamParams {
  double eta = 1e-3;
  double alpha1 = 0.9;
  double alpha2 = 0.999;
  double eps = 1e-8;
  bool decreasing_eta = true;
};

class Adam : public detail::BaselineBase {
 public:
  explicit Adam(AdamParams p, FeasibleSet X = FeasibleSet::unconstrained())
      : BaselineBase(std::move(X)), p_(p) {}
  void init(Vector x1);
  void init(Vector x1, const StochasticOracle&, SeededRng&) override { init(std::move(x1)); }
  void step(const Vector& grad);
  void step(const StochasticOracle& oracle, SeededRng& rng) override {
    step(fresh_grad(oracle, rng));
  }
  const char* name() const override { return "adam"; }

  AdamParams p_;
  Vector m_, v_;
  long t_ = 0;
};

// Adam moments with the long-term memory v_hat_t = max(v_hat_{t-1}, v_t)
// and the epsilon-free update x - eta_t m_t/sqrt(v_hat_t).
struct AmsGradParams {
  double eta = 1e-3;
  double alpha1 = 0.9;
  double alpha2 = 0.999;
  bool decreasing_eta = true;
};

class AmsGrad : public detail::BaselineBase {
 public:
  explicit AmsGrad(AmsGradParams p, FeasibleSet X = FeasibleSet::unconstrained())
      : BaselineBase(std::move(X)), p_(p) {}
  void init(Vector x1);
  void init(Vector x1, const StochasticOracle&, SeededRng&) override { init(std::move(x1)); }
  void step(const Vector& grad);
  void step(const StochasticOracle& oracle, SeededRng& rng) override {
    step(fresh_grad(oracle, rng));
  }
  const char* name() const override { return "amsgrad"; }

  AmsGradParams p_;
  Vector m_, v_, v_hat_;
  long t_ = 0;
};

// Decoupled weight decay: x - eta_t (alpha*m_hat/(sqrt(v_hat)+eps) + wd*x).
struct AdamWParams {
  double eta = 1e-3;
  double alpha1 = 0.9;
  double alpha2 = 0.999;
  double eps = 1e-8;
  double alpha_scale = 1.0;
  double weight_decay = 5e-4;
  bool decreasing_eta = false;
};

class AdamW : public detail::BaselineBase {
 public:
  explicit AdamW(AdamWParams p, FeasibleSet X = FeasibleSet::unconstrained())
      : BaselineBase(std::move(X)), p_(p) {}
  void init(Vector x1);
  void init(Vector x1, const StochasticOracle&, SeededRng&) override { init(std::move(x1)); }
  void step(const Vector& grad);
  void step(const StochasticOracle& oracle, SeededRng& rng) override {
    step(fresh_grad(oracle, rng));
  }
  const char* name() const override { return "adamw"; }

  AdamWParams p_;
  Vector m_, v_;
  long t_ = 0;
};

// Belief-style centered second moment:
// v_t = a2 v_{t-1} + (1-a2)(g - m_t)^2 + eps.
struct AdaBeliefParams {
  double eta = 1e-3;
  double alpha1 = 0.9;
  double alpha2 = 0.999;
  double eps = 1e-8;
  bool decreasing_eta = true;
};

class AdaBelief : public detail::BaselineBase {
 public:
  explicit AdaBelief(AdaBeliefParams p, FeasibleSet X = FeasibleSet::unconstrained())
      : BaselineBase(std::move(X)), p_(p) {}
  void init(Vector x1);
  void init(Vector x1, const StochasticOracle&, SeededRng&) override { init(std::move(x1)); }
  void step(const Vector& grad);
  void step(const StochasticOracle& oracle, SeededRng& rng) override {
    step(fresh_grad(oracle, rng));
  }
  const char* name() const override { return "adabelief"; }

  AdaBeliefParams p_;
  Vector m_, v_;
  long t_ = 0;
};

// b_t^2 = b_{t-1}^2 + ||g||^2, x - eta g / b_t, b_0 > 0.
struct AdaGradNormParams {
  double eta = 0.1;
  double b0 = 1.0;
};

class AdaGradNorm : public detail::BaselineBase {
 public:
  explicit AdaGradNorm(AdaGradNormParams p, FeasibleSet X = FeasibleSet::unconstrained())
      : BaselineBase(std::move(X)), p_(p) {}
  void init(Vector x1);
  void init(Vector x1, const StochasticOracle&, SeededRng&) override { init(std::move(x1)); }
  void step(const Vector& grad);
  void step(const StochasticOracle& oracle, SeededRng& rng) override {
    step(fresh_grad(oracle, rng));
  }
  const char* name() const override { return "adagrad_norm"; }

  AdaGradNormParams p_;
  double b_sq_ = 0.0;
};

// eta_t = k/(omega + sum_{i<t} ||g_i||^2)^{1/2+eps}, x - eta_t g_t.
struct AdaptiveSgdParams {
  double k = 0.1;
  double omega = 1.0;
  double power_eps = 0.0;
};

class AdaptiveSgd : public detail::BaselineBase {
 public:
  explicit AdaptiveSgd(AdaptiveSgdParams p, FeasibleSet X = FeasibleSet::unconstrained())
      : BaselineBase(std::move(X)), p_(p) {}
  void init(Vector x1);
  void init(Vector x1, const StochasticOracle&, SeededRng&) override { init(std::move(x1)); }
  void step(const Vector& grad);
  void step(const StochasticOracle& oracle, SeededRng& rng) override {
    step(fresh_grad(oracle, rng));
  }
  const char* name() const override { return "adaptive_sgd"; }

  AdaptiveSgdParams p_;
  double grad_sq_sum_ = 0.0;  // over i < t
};

// eta_t = k/(w + sum_{i<=t} ||grad f(x_i;xi_i)||^2)^{1/3}; x - eta_t g_t;
// g_{t+1} = grad_new + (1 - c eta_t^2)(g_t - grad_old), both gradients with
// the same fresh sample.
struct StormParams {
  double k = 1.0;
  double w = 1.0;
  double c = 1.0;
};

class Storm : public detail::BaselineBase {
 public:
  explicit Storm(StormParams p, FeasibleSet X = FeasibleSet::unconstrained())
      : BaselineBase(std::move(X)), p_(p) {}
  // g1 is the fresh stochastic gradient at x1; its squared norm seeds the
  // learning-rate accumulator.
  void init_with_gradient(Vector x1, const Vector& g1);
  void init(Vector x1, const StochasticOracle& oracle, SeededRng& rng) override;
  // Two-phase step for external sample control: move() applies the descent
  // update and returns the new point; absorb() takes the two same-sample
  // gradients (at the new and the previous point) and refreshes g.
  const Vector& move();
  void absorb(const Vector& grad_new_at_xnew, const Vector& grad_new_at_xold);
  void step(const StochasticOracle& oracle, SeededRng& rng) override;
  const char* name() const override { return "storm"; }
  const Vector& estimate() const override { return g_; }
  double last_eta() const { return last_eta_; }

  StormParams p_;
  Vector g_;
  Vector x_prev_;
  double grad_sq_sum_ = 0.0;  // sum over i <= t
  double last_eta_ = 0.0;
  bool moved_ = false;
};

std::unique_ptr<BaselineOptimizer> make_baseline(const std::string& name,
                                                 FeasibleSet X = FeasibleSet::unconstrained());

}  // namespace superadam

#endif  // SUPERADAM_BASELINES_HPP
