#include "superadam/estimator.hpp"

#include <cmath>

namespace superadam {

Schedule::Schedule(int tau_in, double k_in, double m_in, double c_in, double gamma_in,
                   double alpha_cap_in)
    : tau(tau_in), k(k_in), m(m_in), c(c_in), gamma(gamma_in), alpha_cap(alpha_cap_in) {
  validate();
}

void Schedule::validate() const {
  require(tau == 0 || tau == 1, "Schedule: tau must be 0 or 1");
  require(k > 0.0, "Schedule: k must be positive");
  require(c > 0.0, "Schedule: c must be positive");
  require(gamma > 0.0, "Schedule: gamma must be positive");
  require(alpha_cap > 0.0 && alpha_cap <= 1.0, "Schedule: alpha_cap must be in (0,1]");
  // mu_0 <= 1 needs m >= k^3 (tau=1) resp. m >= k^2 (tau=0).
  if (tau == 1)
    require(m >= k * k * k, "Schedule: tau=1 requires m >= k^3 so that mu_t <= 1");
  else
    require(m >= k * k, "Schedule: tau=0 requires m >= k^2 so that mu_t <= 1");
}

double Schedule::mu(long t) const {
  require(t >= 0, "Schedule::mu: t must be >= 0");
  const double base = m + static_cast<double>(t);
  return tau == 1 ? k / std::cbrt(base) : k / std::sqrt(base);
}

double Schedule::alpha(long t) const {
  const double mu_t = mu(t);
  const double raw = tau == 1 ? c * mu_t * mu_t : c * mu_t;
  return std::min(raw, alpha_cap);
}

Vector variance_reduced_update(const Vector& g, const Vector& grad_new_at_xnew,
                               const Vector& grad_new_at_xold, double alpha, int tau) {
  require(alpha > 0.0 && alpha <= 1.0, "variance_reduced_update: alpha must be in (0,1]");
  require(tau == 0 || tau == 1, "variance_reduced_update: tau must be 0 or 1");
  require(g.size() == grad_new_at_xnew.size(), "variance_reduced_update: dimension mismatch");
  if (tau == 0) return alpha * grad_new_at_xnew + (1.0 - alpha) * g;
  require(g.size() == grad_new_at_xold.size(), "variance_reduced_update: dimension mismatch");
  return grad_new_at_xnew + (1.0 - alpha) * (g - grad_new_at_xold);
}

Vector update_estimate(EstimatorState& st, const Schedule& sch,
                       const Vector& grad_new_at_xnew, const Vector& grad_new_at_xold) {
  const double alpha = sch.alpha(st.t);
  st.g = variance_reduced_update(st.g, grad_new_at_xnew, grad_new_at_xold, alpha, sch.tau);
  ++st.t;
  return st.g;
}

Vector update_estimate(EstimatorState& st, const Schedule& sch,
                       const Vector& grad_new_at_xnew) {
  require(sch.tau == 0, "update_estimate: tau=1 needs the old-point gradient");
  const double alpha = sch.alpha(st.t);
  st.g = variance_reduced_update(st.g, grad_new_at_xnew, grad_new_at_xnew, alpha, 0);
  ++st.t;
  return st.g;
}

}  // namespace superadam
