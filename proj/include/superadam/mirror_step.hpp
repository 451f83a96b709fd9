#ifndef SUPERADAM_MIRROR_STEP_HPP
#define SUPERADAM_MIRROR_STEP_HPP

#include "superadam/adaptive_matrix.hpp"
#include "superadam/core.hpp"

namespace superadam {

struct MirrorStepResult {
  Vector x_tilde;
  double step_norm = 0.0;  // ||x_tilde - x_t||
};

// Objective of the projection subproblem:
//   <g, x> + (1/2*gamma) * (x - x_t)' H (x - x_t).
double mirror_objective(const Vector& x, const Vector& x_t, const Vector& g,
                        const AdaptiveMatrix& H, double gamma);

// Exact minimizer of the subproblem over X.
//
// Unconstrained: x_t - gamma * H^{-1} g.  Box: coordinate-wise clamp of the
// unconstrained solution (separable objective, diagonal or scalar H).
// Ball with scalar H: Euclidean projection of the unconstrained solution.
// Ball with diagonal H: bisection on the KKT multiplier nu of
//   x(nu) = (H/gamma + nu*I)^{-1} (H x_t / gamma - g + nu*center).
MirrorStepResult mirror_step(const Vector& x_t, const Vector& g, const AdaptiveMatrix& H,
                             double gamma, const FeasibleSet& X);

// ||(x_t - x^+)/gamma|| where x^+ solves the subproblem with gradient g.
// Called with the full gradient this is the gradient-mapping norm.
double gradient_mapping(const Vector& x_t, const Vector& g, const AdaptiveMatrix& H,
                        double gamma, const FeasibleSet& X);

}  // namespace superadam

#endif  // SUPERADAM_MIRROR_STEP_HPP
