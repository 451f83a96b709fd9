#ifndef SUPERADAM_METRICS_HPP
#define SUPERADAM_METRICS_HPP

#include "superadam/adaptive_matrix.hpp"
#include "superadam/core.hpp"

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace superadam {

// One per-iteration metrics row. The first eleven fields form the CSV
// schema (see harness); h_norm is kept in memory for bound evaluation but
// is not serialized.
struct RunRecord {
  long t = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double est_err = 0.0;    // ||grad f(x_t) - g_t||
  double step_norm = 0.0;  // ||x_tilde_{t+1} - x_t||
  double Mt = 0.0;
  double gradmap_norm = 0.0;  // ||G_X(x_t, grad f(x_t), gamma)||
  double condH = 1.0;         // ||H_t|| / delta_min(H_t)
  double mu = 0.0;
  double alpha = 0.0;
  double b1_slack = std::numeric_limits<double>::quiet_NaN();
  double h_norm = 0.0;
};

// M_t = (1/rho)*||grad f(x_t) - g_t|| + (1/gamma)*||x_tilde - x_t||.
double measure_Mt(const Vector& grad_full, const Vector& g, const Vector& x_t,
                  const Vector& x_tilde, double rho, double gamma);
double measure_Mt(double est_err, double step_norm, double rho, double gamma);

// Constants entering the convergence bounds.
struct TheoremConstants {
  double f_x1 = 0.0;
  double f_star = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
  double k = 0.0;
  double m = 0.0;
  double c = 0.0;
  double sigma = 0.0;
  double L = 0.0;
};

// Parameter-condition checks; empty result means all conditions hold.
std::vector<std::string> theorem1_condition_violations(const TheoremConstants& cs);
std::vector<std::string> theorem2_condition_violations(const TheoremConstants& cs);

// Bound on (1/T) sum_t E[M_t]:
//   2*sqrt(2G)*m^{1/6}/T^{1/2} + 2*sqrt(2G)/T^{1/3},
//   G = (f(x1)-f*)/(k*rho*gamma) + m^{1/3} sigma^2/(8 k^2 L^2 gamma^2)
//     + k^2 c^2 sigma^2 ln(m+T)/(4 L^2 gamma^2).
// Throws ContractViolation naming every violated condition.
double theorem1_bound(const TheoremConstants& cs, double T);

// Bound on (1/T) sum_t E[M_t]:
//   2*sqrt(2M)*m^{1/4}/T^{1/2} + 2*sqrt(2M)/T^{1/4},
//   M = (f(x1)-f*)/(rho*gamma*k) + 2 sigma^2/(rho*gamma*k*L)
//     + 2 m sigma^2 ln(m+T)/(rho*gamma*k*L).
double theorem2_bound(const TheoremConstants& cs, double T);

// Bounds on (1/T) sum_t E||grad f(x_t)|| with gamma fixed by the corollary
// rule (gamma = rho*m^{1/3}/(nu*k*L), nu >= 4, resp. rho*m^{1/2}/(nu*L*k),
// nu >= 8); cs.gamma is ignored. h_norms are the per-step ||H_t|| values
// observed on the trajectory.
double corollary1_bound(const TheoremConstants& cs, double nu, double T,
                        std::span<const double> h_norms);
double corollary2_bound(const TheoremConstants& cs, double nu, double T,
                        std::span<const double> h_norms);

// Least-squares slope of log(avg_M) against log(T). Needs at least four
// points spanning at least 1.5 decades of T.
double slope_estimate(std::span<const std::pair<double, double>> series);

// Monte-Carlo verification of the one-step estimator-error recursions at a
// frozen state (x_t, x_tilde_{t+1}, g_t).  With x_{t+1} = (1-mu)x_t +
// mu*x_tilde, the mean over resamples of ||grad f(x_{t+1}) - g_{t+1}||^2
// must not exceed
//   tau=1: (1-a)^2 e_t^2 + 2 (1-a)^2 L^2 mu^2 s^2 + 2 a^2 sigma^2
//   tau=0: (1-a)   e_t^2 + (1/a)    L^2 mu^2 s^2 +   a^2 sigma^2
// (e_t = ||grad f(x_t) - g_t||, s = ||x_tilde - x_t||, a = alpha_next)
// plus three standard errors. Needs oracle L and sigma metadata.
struct McLemmaCheck {
  double empirical_mean = 0.0;
  double bound = 0.0;
  double std_error = 0.0;
  long n_resamples = 0;
  bool pass = false;
};
McLemmaCheck check_estimator_lemma_mc(const StochasticOracle& oracle, int tau,
                                      const Vector& x_t, const Vector& x_tilde,
                                      const Vector& g_t, double mu_t, double alpha_next,
                                      long n_resamples, SeededRng& rng);

}  // namespace superadam

#endif  // SUPERADAM_METRICS_HPP
