#include "superadam/metrics.hpp"

#include "superadam/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace superadam {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void throw_if_violated(const std::vector<std::string>& violations, const char* who) {
  if (violations.empty()) return;
  std::string msg = std::string(who) + ": parameter conditions violated:";
  for (const auto& v : violations) msg += "\n  - " + v;
  throw ContractViolation(msg);
}

void check_common(const TheoremConstants& cs, std::vector<std::string>& out) {
  if (!(cs.k > 0.0)) out.push_back("k > 0 fails (k = " + fmt(cs.k) + ")");
  if (!(cs.rho > 0.0)) out.push_back("rho > 0 fails (rho = " + fmt(cs.rho) + ")");
  if (!(cs.L > 0.0)) out.push_back("L > 0 fails (L = " + fmt(cs.L) + ")");
  if (!(cs.sigma >= 0.0)) out.push_back("sigma >= 0 fails (sigma = " + fmt(cs.sigma) + ")");
  if (!(cs.f_x1 >= cs.f_star))
    out.push_back("f(x1) >= f* fails (f(x1) = " + fmt(cs.f_x1) + ", f* = " + fmt(cs.f_star) + ")");
}

double mean_sq(std::span<const double> xs) {
  require(!xs.empty(), "corollary bound: empty H-norm trajectory");
  double s = 0.0;
  for (double x : xs) s += x * x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

double measure_Mt(const Vector& grad_full, const Vector& g, const Vector& x_t,
                  const Vector& x_tilde, double rho, double gamma) {
  require(rho > 0.0 && gamma > 0.0, "measure_Mt: rho and gamma must be positive");
  require(grad_full.size() == g.size() && x_t.size() == x_tilde.size(),
          "measure_Mt: dimension mismatch");
  return (grad_full - g).norm() / rho + (x_tilde - x_t).norm() / gamma;
}

double measure_Mt(double est_err, double step_norm, double rho, double gamma) {
  require(rho > 0.0 && gamma > 0.0, "measure_Mt: rho and gamma must be positive");
  return est_err / rho + step_norm / gamma;
}

std::vector<std::string> theorem1_condition_violations(const TheoremConstants& cs) {
  std::vector<std::string> out;
  check_common(cs, out);
  if (!out.empty()) return out;
  const double m_min =
      std::max({1.5, cs.k * cs.k * cs.k, std::pow(8.0, 1.5) / std::pow(3.0 * cs.k, 1.5)});
  if (!(cs.m >= m_min))
    out.push_back("m >= max(3/2, k^3, 8^{3/2}/(3k)^{3/2}) fails (m = " + fmt(cs.m) +
                  ", required >= " + fmt(m_min) + ")");
  const double gamma_max = cs.rho * std::cbrt(cs.m) / (4.0 * cs.k * cs.L);
  if (!(cs.gamma > 0.0 && cs.gamma <= gamma_max))
    out.push_back("0 < gamma <= rho*m^{1/3}/(4kL) fails (gamma = " + fmt(cs.gamma) +
                  ", max = " + fmt(gamma_max) + ")");
  const double c_min =
      1.0 / (cs.k * cs.k * cs.k) + 10.0 * cs.L * cs.L * cs.gamma * cs.gamma / (cs.rho * cs.rho);
  const double c_max = std::pow(cs.m, 2.0 / 3.0) / (cs.k * cs.k);
  if (!(cs.c >= c_min && cs.c <= c_max))
    out.push_back("1/k^3 + 10L^2 gamma^2/rho^2 <= c <= m^{2/3}/k^2 fails (c = " + fmt(cs.c) +
                  ", range = [" + fmt(c_min) + ", " + fmt(c_max) + "])");
  return out;
}

std::vector<std::string> theorem2_condition_violations(const TheoremConstants& cs) {
  std::vector<std::string> out;
  check_common(cs, out);
  if (!out.empty()) return out;
  if (!(cs.m >= cs.k * cs.k))
    out.push_back("m >= k^2 fails (m = " + fmt(cs.m) + ", k^2 = " + fmt(cs.k * cs.k) + ")");
  const double gamma_max = cs.rho * std::sqrt(cs.m) / (8.0 * cs.L * cs.k);
  if (!(cs.gamma > 0.0 && cs.gamma <= gamma_max))
    out.push_back("0 < gamma <= rho*m^{1/2}/(8Lk) fails (gamma = " + fmt(cs.gamma) +
                  ", max = " + fmt(gamma_max) + ")");
  const double c_min = 8.0 * cs.L * cs.gamma / cs.rho;
  const double c_max = std::sqrt(cs.m) / cs.k;
  if (!(cs.c >= c_min && cs.c <= c_max))
    out.push_back("8L gamma/rho <= c <= m^{1/2}/k fails (c = " + fmt(cs.c) + ", range = [" +
                  fmt(c_min) + ", " + fmt(c_max) + "])");
  return out;
}

double theorem1_bound(const TheoremConstants& cs, double T) {
  require(T >= 1.0, "theorem1_bound: T must be >= 1");
  throw_if_violated(theorem1_condition_violations(cs), "theorem1_bound");
  const double g2 = cs.gamma * cs.gamma;
  const double L2 = cs.L * cs.L;
  const double G = (cs.f_x1 - cs.f_star) / (cs.k * cs.rho * cs.gamma) +
                   std::cbrt(cs.m) * cs.sigma * cs.sigma / (8.0 * cs.k * cs.k * L2 * g2) +
                   cs.k * cs.k * cs.c * cs.c * cs.sigma * cs.sigma * std::log(cs.m + T) /
                       (4.0 * L2 * g2);
  const double root = 2.0 * std::sqrt(2.0 * G);
  return root * std::pow(cs.m, 1.0 / 6.0) / std::sqrt(T) + root / std::cbrt(T);
}

double theorem2_bound(const TheoremConstants& cs, double T) {
  require(T >= 1.0, "theorem2_bound: T must be >= 1");
  throw_if_violated(theorem2_condition_violations(cs), "theorem2_bound");
  const double denom = cs.rho * cs.gamma * cs.k;
  const double M = (cs.f_x1 - cs.f_star) / denom +
                   2.0 * cs.sigma * cs.sigma / (denom * cs.L) +
                   2.0 * cs.m * cs.sigma * cs.sigma * std::log(cs.m + T) / (denom * cs.L);
  const double root = 2.0 * std::sqrt(2.0 * M);
  return root * std::pow(cs.m, 0.25) / std::sqrt(T) + root / std::pow(T, 0.25);
}

double corollary1_bound(const TheoremConstants& cs, double nu, double T,
                        std::span<const double> h_norms) {
  require(nu >= 4.0, "corollary1_bound: nu must be >= 4");
  require(T >= 1.0, "corollary1_bound: T must be >= 1");
  TheoremConstants fixed = cs;
  fixed.gamma = cs.rho * std::cbrt(cs.m) / (nu * cs.k * cs.L);
  throw_if_violated(theorem1_condition_violations(fixed), "corollary1_bound");
  const double Gp = nu * cs.L * (cs.f_x1 - cs.f_star) +
                    nu * nu * cs.sigma * cs.sigma / 8.0 +
                    nu * nu * std::pow(cs.k, 4.0) * cs.c * cs.c * cs.sigma * cs.sigma *
                        std::log(cs.m + T) / (4.0 * std::cbrt(cs.m));
  const double factor = std::sqrt(mean_sq(h_norms)) / cs.rho;
  const double root = 2.0 * std::sqrt(2.0 * Gp);
  return factor * (root / std::sqrt(T) + root / (std::pow(cs.m, 1.0 / 6.0) * std::cbrt(T)));
}

double corollary2_bound(const TheoremConstants& cs, double nu, double T,
                        std::span<const double> h_norms) {
  require(nu >= 8.0, "corollary2_bound: nu must be >= 8");
  require(T >= 1.0, "corollary2_bound: T must be >= 1");
  TheoremConstants fixed = cs;
  fixed.gamma = cs.rho * std::sqrt(cs.m) / (nu * cs.L * cs.k);
  throw_if_violated(theorem2_condition_violations(fixed), "corollary2_bound");
  const double Mp = nu * cs.L * (cs.f_x1 - cs.f_star) + 2.0 * nu * cs.sigma * cs.sigma +
                    2.0 * nu * cs.m * cs.sigma * cs.sigma * std::log(cs.m + T);
  const double factor = std::sqrt(mean_sq(h_norms)) / cs.rho;
  const double root = 2.0 * std::sqrt(2.0 * Mp);
  return factor * (root / std::sqrt(T) + root / (std::pow(cs.m, 0.25) * std::pow(T, 0.25)));
}

double slope_estimate(std::span<const std::pair<double, double>> series) {
  require(series.size() >= 4, "slope_estimate: need at least 4 points");
  double t_min = series.front().first, t_max = series.front().first;
  for (const auto& [T, y] : series) {
    require(T > 0.0 && y > 0.0, "slope_estimate: points must be positive");
    t_min = std::min(t_min, T);
    t_max = std::max(t_max, T);
  }
  require(t_max / t_min >= std::pow(10.0, 1.5),
          "slope_estimate: insufficient span (need >= 1.5 decades of T)");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(series.size());
  for (const auto& [T, y] : series) {
    const double lx = std::log(T), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

McLemmaCheck check_estimator_lemma_mc(const StochasticOracle& oracle, int tau,
                                      const Vector& x_t, const Vector& x_tilde,
                                      const Vector& g_t, double mu_t, double alpha_next,
                                      long n_resamples, SeededRng& rng) {
  require(tau == 0 || tau == 1, "check_estimator_lemma_mc: tau must be 0 or 1");
  require(alpha_next > 0.0 && alpha_next <= 1.0,
          "check_estimator_lemma_mc: alpha must be in (0,1]");
  require(n_resamples >= 2, "check_estimator_lemma_mc: need at least 2 resamples");
  require(oracle.smoothness().has_value() && oracle.noise_sigma().has_value(),
          "check_estimator_lemma_mc: oracle must report L and sigma");

  const double L = *oracle.smoothness();
  const double sigma = *oracle.noise_sigma();
  const Vector x_next = (1.0 - mu_t) * x_t + mu_t * x_tilde;
  const Vector grad_next = oracle.full_grad(x_next);
  const double e_sq = (oracle.full_grad(x_t) - g_t).squaredNorm();
  const double s_sq = (x_tilde - x_t).squaredNorm();

  const double a = alpha_next;
  const double one_a = 1.0 - a;
  double bound;
  if (tau == 1) {
    bound = one_a * one_a * e_sq + 2.0 * one_a * one_a * L * L * mu_t * mu_t * s_sq +
            2.0 * a * a * sigma * sigma;
  } else {
    bound = one_a * e_sq + L * L * mu_t * mu_t * s_sq / a + a * a * sigma * sigma;
  }

  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n_resamples; ++i) {
    const std::uint64_t xi = oracle.sample_index(rng);
    const Vector gnew = oracle.stoch_grad(x_next, xi);
    Vector g1;
    if (tau == 1) {
      const Vector gold = oracle.stoch_grad(x_t, xi);
      g1 = variance_reduced_update(g_t, gnew, gold, a, 1);
    } else {
      g1 = variance_reduced_update(g_t, gnew, gnew, a, 0);
    }
    const double err = (grad_next - g1).squaredNorm();
    sum += err;
    sum_sq += err * err;
  }
  const double n = static_cast<double>(n_resamples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean) * n / (n - 1.0);
  const double se = std::sqrt(var / n);

  McLemmaCheck out;
  out.empirical_mean = mean;
  out.bound = bound;
  out.std_error = se;
  out.n_resamples = n_resamples;
  out.pass = mean <= bound + 3.0 * se;
  return out;
}

}  // namespace superadam
