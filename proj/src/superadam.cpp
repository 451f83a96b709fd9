#include "superadam/superadam.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace superadam {

namespace {

constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kOutputStream = 2;

std::vector<std::string> theorem_gamma_warnings(const SuperAdamConfig& cfg,
                                                const StochasticOracle& oracle) {
  std::vector<std::string> out;
  const auto L = oracle.smoothness();
  if (!L.has_value()) return out;
  const Schedule& sch = cfg.schedule;
  const double rho = cfg.lambda;
  if (sch.tau == 1) {
    const double gamma_max = rho * std::cbrt(sch.m) / (4.0 * sch.k * *L);
    if (sch.gamma > gamma_max) {
      std::ostringstream os;
      os << "gamma = " << sch.gamma << " exceeds rho*m^{1/3}/(4kL) = " << gamma_max
         << "; the tau=1 rate guarantee does not apply";
      out.push_back(os.str());
    }
  } else {
    const double gamma_max = rho * std::sqrt(sch.m) / (8.0 * *L * sch.k);
    if (sch.gamma > gamma_max) {
      std::ostringstream os;
      os << "gamma = " << sch.gamma << " exceeds rho*m^{1/2}/(8Lk) = " << gamma_max
         << "; the tau=0 rate guarantee does not apply";
      out.push_back(os.str());
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> SuperAdamConfig::validate(Index oracle_dim) const {
  std::vector<std::string> errs;
  try {
    schedule.validate();
  } catch (const ContractViolation& e) {
    errs.emplace_back(e.what());
  }
  if (T < 1) errs.push_back("T must be >= 1");
  if (!(lambda > 0.0)) errs.push_back("lambda must be positive");
  if (!(matrix_beta > 0.0 && matrix_beta < 1.0)) errs.push_back("matrix_beta must be in (0,1)");
  if (!(matrix_beta1 > 0.0 && matrix_beta1 < 1.0)) errs.push_back("matrix_beta1 must be in (0,1)");
  if (!(matrix_beta2 > 0.0 && matrix_beta2 < 1.0)) errs.push_back("matrix_beta2 must be in (0,1)");
  if (!feasible_set.matches_dim(oracle_dim))
    errs.push_back("feasible_set dimension does not match the oracle");
  if (x1.size() != 0) {
    if (x1.size() != oracle_dim) errs.push_back("x1 dimension does not match the oracle");
    else if (!feasible_set.contains(x1, 1e-12)) errs.push_back("x1 is not feasible");
  }
  return errs;
}

Trajectory run(const StochasticOracle& oracle, const SuperAdamConfig& cfg,
               const RunOptions& opts) {
  {
    const auto errs = cfg.validate(oracle.dim());
    if (!errs.empty()) {
      std::string msg = "run: invalid config:";
      for (const auto& e : errs) msg += "\n  - " + e;
      throw ContractViolation(msg);
    }
  }
  require(opts.record_every >= 1 && opts.record_every <= cfg.T,
          "run: record_every must be in [1, T]");

  const Index d = oracle.dim();
  const Schedule& sch = cfg.schedule;
  const FeasibleSet& X = cfg.feasible_set;
  const double gamma = sch.gamma;
  const double rho = cfg.lambda;
  const auto L = oracle.smoothness();

  Trajectory traj;
  traj.warnings = theorem_gamma_warnings(cfg, oracle);

  const SeededRng master(cfg.seed);
  SeededRng samples = master.split(kSampleStream);
  SeededRng outsel = master.split(kOutputStream);
  const long zeta = cfg.output_mode == OutputMode::UniformRandomIterate
                        ? 1 + outsel.index(cfg.T)
                        : cfg.T;
  traj.output_index = zeta;

  const bool store_iterates = opts.store_iterates.value_or(
      static_cast<double>(d) * static_cast<double>(cfg.T) <= 1e7);
  traj.iterates_stored = store_iterates;
  if (store_iterates) traj.iterates.reserve(static_cast<std::size_t>(cfg.T));

  Vector x = cfg.x1.size() == 0 ? euclidean_project(Vector::Zero(d), X) : cfg.x1;

  const std::uint64_t xi1 = oracle.sample_index(samples);
  EstimatorState est = EstimatorState::init(oracle.stoch_grad(x, xi1));
  traj.estimator_grad_calls = 1;

  MatrixGeneratorState mst(cfg.matrix_case, d, cfg.lambda);
  mst.beta = cfg.matrix_beta;
  mst.beta1 = cfg.matrix_beta1;
  mst.beta2 = cfg.matrix_beta2;
  mst.validate();

  // Fresh-sample gradients kept around for reuse_estimator_sample.
  Vector reuse_grad_here = est.g;  // grad at current x with its fresh sample
  Vector reuse_grad_prev;          // grad at previous x with the same sample (tau=1)
  std::uint64_t reuse_xi = xi1;
  bool reuse_has_prev_grad = false;

  Vector x_prev;
  bool have_prev = false;
  const bool compute_b1 = opts.with_b1_slack && L.has_value();

  auto abort_run = [&](long t) {
    traj.status = RunStatus::AbortedNonFinite;
    traj.abort_step = t;
    // Keep the last valid iterate for diagnostics.
    traj.x_last = x;
    traj.output = x;
  };

  for (long t = 1; t <= cfg.T; ++t) {
    // Step 4: adaptive matrix.
    AdaptiveMatrix H = AdaptiveMatrix::scalar(cfg.lambda);
    bool matrix_grad_ok = true;
    if (cfg.matrix_case == MatrixCase::Case3) {
      if (have_prev) {
        Vector grad_here, grad_prev;
        if (cfg.reuse_estimator_sample) {
          grad_here = reuse_grad_here;
          if (reuse_has_prev_grad) {
            grad_prev = reuse_grad_prev;
          } else {
            grad_prev = oracle.stoch_grad(x_prev, reuse_xi);
            ++traj.matrix_grad_calls;
          }
        } else {
          const std::uint64_t xi = oracle.sample_index(samples);
          grad_here = oracle.stoch_grad(x, xi);
          grad_prev = oracle.stoch_grad(x_prev, xi);
          traj.matrix_grad_calls += 2;
        }
        matrix_grad_ok = all_finite(grad_here) && all_finite(grad_prev);
        if (matrix_grad_ok) H = generate_case3(mst, x, x_prev, grad_here, grad_prev);
      }
      // t = 1 has no previous iterate: lambda floor, no oracle call.
    } else {
      Vector gm;
      if (cfg.reuse_estimator_sample) {
        gm = reuse_grad_here;
      } else {
        const std::uint64_t xi = oracle.sample_index(samples);
        gm = oracle.stoch_grad(x, xi);
        ++traj.matrix_grad_calls;
      }
      matrix_grad_ok = all_finite(gm);
      if (matrix_grad_ok) H = generate(mst, gm);
    }
    if (!matrix_grad_ok || !std::isfinite(H.spectral_norm())) {
      abort_run(t);
      break;
    }

    // Step 9: generalized projection; step 10: momentum combination.
    const MirrorStepResult mirror = mirror_step(x, est.g, H, gamma, X);
    const double mu = sch.mu(t);
    const double alpha_next = sch.alpha(t);
    const Vector x_next = (1.0 - mu) * x + mu * mirror.x_tilde;
    if (!all_finite(mirror.x_tilde) || !all_finite(x_next)) {
      abort_run(t);
      break;
    }

    const bool record_now = ((t - 1) % opts.record_every == 0) || t == cfg.T;
    if (record_now) {
      RunRecord row;
      row.t = t;
      row.f = oracle.value(x);
      const Vector grad_full = oracle.full_grad(x);
      row.grad_norm = grad_full.norm();
      row.est_err = (grad_full - est.g).norm();
      row.step_norm = mirror.step_norm;
      row.Mt = measure_Mt(row.est_err, row.step_norm, rho, gamma);
      row.gradmap_norm = gradient_mapping(x, grad_full, H, gamma, X);
      row.condH = H.spectral_norm() / H.smallest_eigenvalue();
      row.h_norm = H.spectral_norm();
      row.mu = mu;
      row.alpha = alpha_next;
      if (compute_b1) {
        const double f_next = oracle.value(x_next);
        row.b1_slack = row.f + mu * gamma / rho * row.est_err * row.est_err -
                       rho * mu / (2.0 * gamma) * row.step_norm * row.step_norm - f_next;
      }
      if (opts.record_sink) opts.record_sink(row);
      if (opts.store_records) traj.records.push_back(row);
      if (opts.state_sink)
        opts.state_sink(StepState{t, x, mirror.x_tilde, est.g, H, mu, alpha_next});
    }

    if (store_iterates) traj.iterates.push_back(x);
    if (t == zeta) traj.output = x;
    if (t == cfg.T) traj.x_last = x;

    // Step 11: estimator update with a fresh sample.
    const std::uint64_t xi = oracle.sample_index(samples);
    const Vector grad_new = oracle.stoch_grad(x_next, xi);
    ++traj.estimator_grad_calls;
    if (sch.tau == 1) {
      const Vector grad_old = oracle.stoch_grad(x, xi);
      ++traj.estimator_grad_calls;
      update_estimate(est, sch, grad_new, grad_old);
      reuse_grad_prev = grad_old;
      reuse_has_prev_grad = true;
    } else {
      update_estimate(est, sch, grad_new);
      reuse_has_prev_grad = false;
    }
    reuse_grad_here = grad_new;
    reuse_xi = xi;
    if (!all_finite(est.g)) {
      abort_run(t);
      break;
    }

    x_prev = x;
    have_prev = true;
    x = x_next;
  }

  if (traj.status == RunStatus::Completed && traj.output.size() == 0) traj.output = traj.x_last;
  return traj;
}

Vector select_output(const Trajectory& traj, OutputMode mode, SeededRng& rng) {
  require(traj.iterates_stored && !traj.iterates.empty(),
          "select_output: trajectory has no stored iterates");
  if (mode == OutputMode::LastIterate) return traj.iterates.back();
  const long zeta = 1 + rng.index(static_cast<std::int64_t>(traj.iterates.size()));
  return traj.iterates[static_cast<std::size_t>(zeta - 1)];
}

}  // namespace superadam
