#include "superadam/mirror_step.hpp"

#include <cmath>

namespace superadam {

namespace {

// Ball constraint with diagonal H. Stationarity of the Lagrangian gives
//   x(nu) = (H/gamma + nu*I)^{-1} (H x_t/gamma - g + nu*center),
// and ||x(nu) - center|| is strictly decreasing in nu >= 0, so the active
// multiplier is the root of ||x(nu) - center|| = radius.
Vector ball_diag_solve(const Vector& x_t, const Vector& g, const AdaptiveMatrix& H,
                       double gamma, const FeasibleSet& X) {
  const Vector h = H.diag() / gamma;                  // H/gamma diagonal
  const Vector rhs0 = h.cwiseProduct(x_t) - g;        // H x_t/gamma - g
  const Vector& c = X.center();
  const double r = X.radius();

  auto x_of = [&](double nu) -> Vector {
    return (rhs0 + nu * c).cwiseQuotient(h + Vector::Constant(h.size(), nu));
  };
  auto dist = [&](double nu) { return (x_of(nu) - c).norm(); };

  if (dist(0.0) <= r) return x_of(0.0);

  double lo = 0.0, hi = 1.0;
  while (dist(hi) > r) {
    lo = hi;
    hi *= 2.0;
    require(hi < 1e300, "mirror_step: ball multiplier search diverged");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    (dist(mid) > r ? lo : hi) = mid;
  }
  // hi side is feasible (dist <= r).
  return x_of(hi);
}

}  // namespace

double mirror_objective(const Vector& x, const Vector& x_t, const Vector& g,
                        const AdaptiveMatrix& H, double gamma) {
  const Vector d = x - x_t;
  return g.dot(x) + 0.5 / gamma * H.quad_form(d);
}

MirrorStepResult mirror_step(const Vector& x_t, const Vector& g, const AdaptiveMatrix& H,
                             double gamma, const FeasibleSet& X) {
  require(gamma > 0.0, "mirror_step: gamma must be positive");
  require(g.size() == x_t.size(), "mirror_step: dimension mismatch");
  require(X.matches_dim(x_t.size()), "mirror_step: feasible set dimension mismatch");

  Vector x_tilde;
  const Vector unconstrained = x_t - gamma * H.solve(g);
  switch (X.kind()) {
    case SetKind::Unconstrained:
      x_tilde = unconstrained;
      break;
    case SetKind::Box:
      // Separable objective for diagonal/scalar H: clamp coordinate-wise.
      x_tilde = unconstrained.cwiseMax(X.lower()).cwiseMin(X.upper());
      break;
    case SetKind::Ball:
      if (H.kind() == AdaptiveMatrix::Kind::Scalar) {
        // Spherical Bregman term: Euclidean projection is exact.
        x_tilde = euclidean_project(unconstrained, X);
      } else {
        x_tilde = ball_diag_solve(x_t, g, H, gamma, X);
      }
      break;
  }
  MirrorStepResult res;
  res.step_norm = (x_tilde - x_t).norm();
  res.x_tilde = std::move(x_tilde);
  return res;
}

double gradient_mapping(const Vector& x_t, const Vector& g, const AdaptiveMatrix& H,
                        double gamma, const FeasibleSet& X) {
  const MirrorStepResult res = mirror_step(x_t, g, H, gamma, X);
  return res.step_norm / gamma;
}

}  // namespace superadam
