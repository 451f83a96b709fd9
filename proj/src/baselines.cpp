#include "superadam/baselines.hpp"

#include <cmath>

namespace superadam {

namespace {

constexpr double kViewFloor = 1e-12;

// Element-wise g/denom with 0/0 -> 0. A zero denominator can only occur on
// coordinates whose gradients were identically zero, where g is zero too.
Vector safe_ratio(const Vector& g, const Vector& denom) {
  return (denom.array() > 0.0).select(g.array() / denom.array(), 0.0).matrix();
}

Vector view_diag(const Vector& denom) { return denom.cwiseMax(kViewFloor); }

}  // namespace

Vector detail::BaselineBase::fresh_grad(const StochasticOracle& oracle, SeededRng& rng) const {
  const std::uint64_t xi = oracle.sample_index(rng);
  return oracle.stoch_grad(x_, xi);
}

// ---- AdaGrad -------------------------------------------------------------

void AdaGrad::init(Vector x1) {
  x_ = std::move(x1);
  sum_sq_ = Vector::Zero(x_.size());
  t_ = 0;
}

void AdaGrad::step(const Vector& grad) {
  ++t_;
  sum_sq_ += grad.array().square().matrix();
  const Vector v = p_.arithmetic_average ? Vector(sum_sq_ / static_cast<double>(t_)) : sum_sq_;
  const double eta_t = p_.decreasing_eta ? p_.eta / std::sqrt(static_cast<double>(t_)) : p_.eta;
  const Vector denom = v.array().sqrt().matrix();
  x_ -= eta_t * safe_ratio(grad, denom);
  project();
  view_ = BaselineStepView{grad, AdaptiveMatrix::diagonal(view_diag(denom)), eta_t};
}

// ---- Adam ----------------------------------------------------------------

void Adam::init(Vector x1) {
  x_ = std::move(x1);
  m_ = Vector::Zero(x_.size());
  v_ = Vector::Zero(x_.size());
  t_ = 0;
}

void Adam::step(const Vector& grad) {
  ++t_;
  m_ = p_.alpha1 * m_ + (1.0 - p_.alpha1) * grad;
  v_ = p_.alpha2 * v_ + (1.0 - p_.alpha2) * grad.array().square().matrix();
  const double td = static_cast<double>(t_);
  const Vector m_hat = m_ / (1.0 - std::pow(p_.alpha1, td));
  const Vector v_hat = v_ / (1.0 - std::pow(p_.alpha2, td));
  const double eta_t = p_.decreasing_eta ? p_.eta / std::sqrt(td) : p_.eta;
  const Vector denom = (v_hat.array().sqrt() + p_.eps).matrix();
  x_ -= eta_t * m_hat.cwiseQuotient(denom);
  project();
  view_ = BaselineStepView{m_hat, AdaptiveMatrix::diagonal(denom), eta_t};
}

// ---- AmsGrad ---------------------------------------------------------------

void AmsGrad::init(Vector x1) {
  x_ = std::move(x1);
  m_ = Vector::Zero(x_.size());
  v_ = Vector::Zero(x_.size());
  v_hat_ = Vector::Zero(x_.size());
  t_ = 0;
}

void AmsGrad::step(const Vector& grad) {
  ++t_;
  m_ = p_.alpha1 * m_ + (1.0 - p_.alpha1) * grad;
  v_ = p_.alpha2 * v_ + (1.0 - p_.alpha2) * grad.array().square().matrix();
  v_hat_ = v_hat_.cwiseMax(v_);
  const double eta_t =
      p_.decreasing_eta ? p_.eta / std::sqrt(static_cast<double>(t_)) : p_.eta;
  const Vector denom = v_hat_.array().sqrt().matrix();
  x_ -= eta_t * safe_ratio(m_, denom);
  project();
  view_ = BaselineStepView{m_, AdaptiveMatrix::diagonal(view_diag(denom)), eta_t};
}

// ---- AdamW ---------------------------------------------------------------

void AdamW::init(Vector x1) {
  x_ = std::move(x1);
  m_ = Vector::Zero(x_.size());
  v_ = Vector::Zero(x_.size());
  t_ = 0;
}

void AdamW::step(const Vector& grad) {
  ++t_;
  m_ = p_.alpha1 * m_ + (1.0 - p_.alpha1) * grad;
  v_ = p_.alpha2 * v_ + (1.0 - p_.alpha2) * grad.array().square().matrix();
  const double td = static_cast<double>(t_);
  const Vector m_hat = m_ / (1.0 - std::pow(p_.alpha1, td));
  const Vector v_hat = v_ / (1.0 - std::pow(p_.alpha2, td));
  const double eta_t = p_.decreasing_eta ? p_.eta / std::sqrt(td) : p_.eta;
  const Vector denom = (v_hat.array().sqrt() + p_.eps).matrix();
  // Equivalent mirror view: gamma = eta_t*alpha, H = diag(denom),
  // g = m_hat + denom .* (wd/alpha) x, so gamma H^{-1} g reproduces the
  // decayed step exactly.
  const Vector g_used =
      m_hat + denom.cwiseProduct(x_) * (p_.weight_decay / p_.alpha_scale);
  x_ -= eta_t * (p_.alpha_scale * m_hat.cwiseQuotient(denom) + p_.weight_decay * x_);
  project();
  view_ = BaselineStepView{g_used, AdaptiveMatrix::diagonal(denom), eta_t * p_.alpha_scale};
}

// ---- AdaBelief -----------------------------------------------------------

void AdaBelief::init(Vector x1) {
  x_ = std::move(x1);
  m_ = Vector::Zero(x_.size());
  v_ = Vector::Zero(x_.size());
  t_ = 0;
}

void AdaBelief::step(const Vector& grad) {
  ++t_;
  m_ = p_.alpha1 * m_ + (1.0 - p_.alpha1) * grad;
  v_ = p_.alpha2 * v_ + (1.0 - p_.alpha2) * (grad - m_).array().square().matrix() +
       Vector::Constant(v_.size(), p_.eps);
  const double td = static_cast<double>(t_);
  const Vector m_hat = m_ / (1.0 - std::pow(p_.alpha1, td));
  const Vector v_hat = v_ / (1.0 - std::pow(p_.alpha2, td));
  const double eta_t = p_.decreasing_eta ? p_.eta / std::sqrt(td) : p_.eta;
  const Vector denom = (v_hat.array().sqrt() + p_.eps).matrix();
  x_ -= eta_t * m_hat.cwiseQuotient(denom);
  project();
  view_ = BaselineStepView{m_hat, AdaptiveMatrix::diagonal(denom), eta_t};
}

// ---- AdaGrad-Norm ----------------------------------------------------------

void AdaGradNorm::init(Vector x1) {
  require(p_.b0 > 0.0, "AdaGradNorm: b0 must be positive");
  x_ = std::move(x1);
  b_sq_ = p_.b0 * p_.b0;
}

void AdaGradNorm::step(const Vector& grad) {
  b_sq_ += grad.squaredNorm();
  const double b = std::sqrt(b_sq_);
  x_ -= p_.eta * grad / b;
  project();
  view_ = BaselineStepView{grad, AdaptiveMatrix::scalar(b), p_.eta};
}

// ---- Adaptive SGD ----------------------------------------------------------

void AdaptiveSgd::init(Vector x1) {
  require(p_.k > 0.0 && p_.omega > 0.0 && p_.power_eps >= 0.0,
          "AdaptiveSgd: need k > 0, omega > 0, power_eps >= 0");
  x_ = std::move(x1);
  grad_sq_sum_ = 0.0;
}

void AdaptiveSgd::step(const Vector& grad) {
  const double eta_t = p_.k / std::pow(p_.omega + grad_sq_sum_, 0.5 + p_.power_eps);
  x_ -= eta_t * grad;
  grad_sq_sum_ += grad.squaredNorm();
  project();
  view_ = BaselineStepView{grad, AdaptiveMatrix::scalar(1.0), eta_t};
}

// ---- STORM -----------------------------------------------------------------

void Storm::init_with_gradient(Vector x1, const Vector& g1) {
  require(p_.k > 0.0 && p_.w > 0.0 && p_.c > 0.0, "Storm: need k, w, c > 0");
  x_ = std::move(x1);
  g_ = g1;
  grad_sq_sum_ = g1.squaredNorm();
  moved_ = false;
}

void Storm::init(Vector x1, const StochasticOracle& oracle, SeededRng& rng) {
  const std::uint64_t xi = oracle.sample_index(rng);
  Vector g1 = oracle.stoch_grad(x1, xi);
  init_with_gradient(std::move(x1), g1);
}

const Vector& Storm::move() {
  require(!moved_, "Storm::move: absorb the previous step first");
  last_eta_ = p_.k / std::cbrt(p_.w + grad_sq_sum_);
  x_prev_ = x_;
  view_ = BaselineStepView{g_, AdaptiveMatrix::scalar(1.0), last_eta_};
  x_ -= last_eta_ * g_;
  project();
  moved_ = true;
  return x_;
}

void Storm::absorb(const Vector& grad_new_at_xnew, const Vector& grad_new_at_xold) {
  require(moved_, "Storm::absorb: call move first");
  const double a = p_.c * last_eta_ * last_eta_;
  g_ = grad_new_at_xnew + (1.0 - a) * (g_ - grad_new_at_xold);
  grad_sq_sum_ += grad_new_at_xnew.squaredNorm();
  moved_ = false;
}

void Storm::step(const StochasticOracle& oracle, SeededRng& rng) {
  move();
  const std::uint64_t xi = oracle.sample_index(rng);
  const Vector grad_new = oracle.stoch_grad(x_, xi);
  const Vector grad_old = oracle.stoch_grad(x_prev_, xi);
  absorb(grad_new, grad_old);
}

std::unique_ptr<BaselineOptimizer> make_baseline(const std::string& name, FeasibleSet X) {
  if (name == "adagrad") return std::make_unique<AdaGrad>(AdaGradParams{}, std::move(X));
  if (name == "adam") return std::make_unique<Adam>(AdamParams{}, std::move(X));
  if (name == "amsgrad") return std::make_unique<AmsGrad>(AmsGradParams{}, std::move(X));
  if (name == "adamw") return std::make_unique<AdamW>(AdamWParams{}, std::move(X));
  if (name == "adabelief") return std::make_unique<AdaBelief>(AdaBeliefParams{}, std::move(X));
  if (name == "adagrad_norm")
    return std::make_unique<AdaGradNorm>(AdaGradNormParams{}, std::move(X));
  if (name == "adaptive_sgd")
    return std::make_unique<AdaptiveSgd>(AdaptiveSgdParams{}, std::move(X));
  if (name == "storm") return std::make_unique<Storm>(StormParams{}, std::move(X));
  throw ContractViolation("make_baseline: unknown optimizer '" + name + "'");
}

}  // namespace superadam
