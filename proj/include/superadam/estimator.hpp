#ifndef SUPERADAM_ESTIMATOR_HPP
#define SUPERADAM_ESTIMATOR_HPP

#include "superadam/core.hpp"

namespace superadam {

// Step-size and mixing schedules.
//
//   tau = 1:  mu_t = k/(m+t)^{1/3},  alpha_{t+1} = min(c*mu_t^2, alpha_cap)
//   tau = 0:  mu_t = k/(m+t)^{1/2},  alpha_{t+1} = min(c*mu_t,   alpha_cap)
//
// The cap is applied at every step; with sane constants c*mu_t^p drops
// below the cap after the first iterations and the min becomes inactive.
struct Schedule {
  int tau = 1;
  double k = 1.0;
  double m = 100.0;
  double c = 40.0;
  double gamma = 1e-3;
  double alpha_cap = 0.9;

  Schedule() = default;
  Schedule(int tau_in, double k_in, double m_in, double c_in, double gamma_in,
           double alpha_cap_in = 0.9);

  void validate() const;

  // mu_t for t >= 0.
  double mu(long t) const;
  // alpha_{t+1} for t >= 0 (the weight used in the update from x_t to x_{t+1}).
  double alpha(long t) const;
};

// g_{t+1} = alpha*g_new + (1-alpha)*[g + tau*(g_new - g_old)].
// For tau = 1 this is evaluated in the equivalent variance-reduced form
// g_new + (1-alpha)*(g - g_old); for tau = 0, g_old is ignored.
Vector variance_reduced_update(const Vector& g, const Vector& grad_new_at_xnew,
                               const Vector& grad_new_at_xold, double alpha, int tau);

// Running gradient estimate g_t; g_1 is the raw stochastic gradient at x_1.
struct EstimatorState {
  Vector g;
  long t = 1;

  static EstimatorState init(Vector g1) { return EstimatorState{std::move(g1), 1}; }
};

// Advances the state from t to t+1 with alpha_{t+1} taken from the schedule.
// Both gradients must be evaluated with the same fresh sample; for tau = 0
// the old-point gradient is never needed and may be omitted.
Vector update_estimate(EstimatorState& st, const Schedule& sch,
                       const Vector& grad_new_at_xnew, const Vector& grad_new_at_xold);
Vector update_estimate(EstimatorState& st, const Schedule& sch,
                       const Vector& grad_new_at_xnew);

}  // namespace superadam

#endif  // SUPERADAM_ESTIMATOR_HPP
