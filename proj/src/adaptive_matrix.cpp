#include "superadam/adaptive_matrix.hpp"

#include <cmath>

namespace superadam {

AdaptiveMatrix AdaptiveMatrix::diagonal(Vector diag) {
  require(diag.size() > 0, "AdaptiveMatrix::diagonal: empty diagonal");
  require((diag.array() > 0.0).all(), "AdaptiveMatrix::diagonal: entries must be positive");
  AdaptiveMatrix H;
  H.kind_ = Kind::Diagonal;
  H.diag_ = std::move(diag);
  return H;
}

AdaptiveMatrix AdaptiveMatrix::scalar(double s) {
  require(s > 0.0 && std::isfinite(s), "AdaptiveMatrix::scalar: s must be positive and finite");
  AdaptiveMatrix H;
  H.kind_ = Kind::Scalar;
  H.s_ = s;
  return H;
}

double AdaptiveMatrix::smallest_eigenvalue() const {
  return kind_ == Kind::Diagonal ? diag_.minCoeff() : s_;
}

double AdaptiveMatrix::spectral_norm() const {
  return kind_ == Kind::Diagonal ? diag_.maxCoeff() : s_;
}

Vector AdaptiveMatrix::solve(const Vector& g) const {
  if (kind_ == Kind::Diagonal) {
    require(g.size() == diag_.size(), "AdaptiveMatrix::solve: dimension mismatch");
    return g.cwiseQuotient(diag_);
  }
  return g / s_;
}

Vector AdaptiveMatrix::apply(const Vector& u) const {
  if (kind_ == Kind::Diagonal) {
    require(u.size() == diag_.size(), "AdaptiveMatrix::apply: dimension mismatch");
    return u.cwiseProduct(diag_);
  }
  return u * s_;
}

double AdaptiveMatrix::quad_form(const Vector& u) const {
  if (kind_ == Kind::Diagonal) {
    require(u.size() == diag_.size(), "AdaptiveMatrix::quad_form: dimension mismatch");
    return (u.array().square() * diag_.array()).sum();
  }
  return s_ * u.squaredNorm();
}

const char* to_string(MatrixCase c) {
  switch (c) {
    case MatrixCase::Case1: return "case1";
    case MatrixCase::Case2: return "case2";
    case MatrixCase::Case3: return "case3";
    case MatrixCase::Case4Diag: return "case4_diag";
    case MatrixCase::Case4Scalar: return "case4_scalar";
  }
  return "?";
}

MatrixGeneratorState::MatrixGeneratorState(MatrixCase c, Index d, double lambda_in)
    : case_id(c), lambda(lambda_in) {
  reset(d);
  validate();
}

void MatrixGeneratorState::reset(Index d) {
  v = Vector::Zero(d);
  m = Vector::Zero(d);
  b = 0.0;
}

void MatrixGeneratorState::validate() const {
  require(lambda > 0.0, "MatrixGeneratorState: lambda must be positive");
  require(beta > 0.0 && beta < 1.0, "MatrixGeneratorState: beta must be in (0,1)");
  require(beta1 > 0.0 && beta1 < 1.0, "MatrixGeneratorState: beta1 must be in (0,1)");
  require(beta2 > 0.0 && beta2 < 1.0, "MatrixGeneratorState: beta2 must be in (0,1)");
}

AdaptiveMatrix generate_case1(MatrixGeneratorState& st, const Vector& g) {
  require(st.case_id == MatrixCase::Case1, "generate_case1: wrong case_id");
  require(g.size() == st.v.size(), "generate_case1: dimension mismatch");
  st.v = st.beta * st.v + (1.0 - st.beta) * g.array().square().matrix();
  return AdaptiveMatrix::diagonal((st.v.array().sqrt() + st.lambda).matrix());
}

AdaptiveMatrix generate_case2(MatrixGeneratorState& st, const Vector& g) {
  require(st.case_id == MatrixCase::Case2, "generate_case2: wrong case_id");
  st.b = st.beta * st.b + (1.0 - st.beta) * g.norm();
  return AdaptiveMatrix::scalar(st.b + st.lambda);
}

AdaptiveMatrix generate_case3(const MatrixGeneratorState& st, const Vector& x_t,
                              const Vector& x_prev, const Vector& grad_t,
                              const Vector& grad_prev) {
  require(x_t.size() == x_prev.size() && grad_t.size() == grad_prev.size() &&
              x_t.size() == grad_t.size(),
          "generate_case3: dimension mismatch");
  const Vector dx = x_t - x_prev;
  const double dx_sq = dx.squaredNorm();
  if (dx.norm() < MatrixGeneratorState::kBbDegeneracyThreshold)
    return AdaptiveMatrix::scalar(st.lambda);
  const double b = std::abs((grad_t - grad_prev).dot(dx)) / dx_sq;
  return AdaptiveMatrix::scalar(b + st.lambda);
}

AdaptiveMatrix generate_case4(MatrixGeneratorState& st, const Vector& g) {
  require(st.case_id == MatrixCase::Case4Diag || st.case_id == MatrixCase::Case4Scalar,
          "generate_case4: wrong case_id");
  require(g.size() == st.m.size(), "generate_case4: dimension mismatch");
  // m is updated first; the centered residual uses the new m.
  st.m = st.beta1 * st.m + (1.0 - st.beta1) * g;
  const Vector r = g - st.m;
  if (st.case_id == MatrixCase::Case4Diag) {
    st.v = st.beta2 * st.v + (1.0 - st.beta2) * r.array().square().matrix();
    return AdaptiveMatrix::diagonal((st.v.array().sqrt() + st.lambda).matrix());
  }
  st.b = st.beta2 * st.b + (1.0 - st.beta2) * r.norm();
  return AdaptiveMatrix::scalar(st.b + st.lambda);
}

AdaptiveMatrix generate(MatrixGeneratorState& st, const Vector& g) {
  switch (st.case_id) {
    case MatrixCase::Case1: return generate_case1(st, g);
    case MatrixCase::Case2: return generate_case2(st, g);
    case MatrixCase::Case4Diag:
    case MatrixCase::Case4Scalar: return generate_case4(st, g);
    case MatrixCase::Case3:
      throw ContractViolation("generate: case 3 needs the two-gradient overload");
  }
  throw ContractViolation("generate: unknown case");
}

}  // namespace superadam
