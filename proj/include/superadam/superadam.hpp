#ifndef SUPERADAM_SUPERADAM_HPP
#define SUPERADAM_SUPERADAM_HPP

#include "superadam/adaptive_matrix.hpp"
#include "superadam/core.hpp"
#include "superadam/estimator.hpp"
#include "superadam/metrics.hpp"
#include "superadam/mirror_step.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace superadam {

enum class OutputMode { UniformRandomIterate, LastIterate };

struct SuperAdamConfig {
  Schedule schedule;
  MatrixCase matrix_case = MatrixCase::Case1;
  double matrix_beta = 0.999;
  double matrix_beta1 = 0.9;
  double matrix_beta2 = 0.999;
  double lambda = 5e-4;
  FeasibleSet feasible_set = FeasibleSet::unconstrained();
  // Empty x1 means: start from the projection of the origin onto X.
  Vector x1;
  long T = 1000;
  OutputMode output_mode = OutputMode::LastIterate;
  std::uint64_t seed = 0;
  // When true, the matrix generator at step t reuses the estimator's sample
  // xi_t (and its already-computed gradients) instead of drawing a fresh
  // sample per iteration. Default: one fresh sample per iteration for the
  // matrix, shared across the matrix's needs.
  bool reuse_estimator_sample = false;

  std::vector<std::string> validate(Index oracle_dim) const;
};

enum class RunStatus { Completed, AbortedNonFinite };

struct Trajectory {
  std::vector<RunRecord> records;
  std::vector<Vector> iterates;  // x_1..x_T when stored
  bool iterates_stored = false;
  Vector output;          // per output_mode
  long output_index = 0;  // zeta
  Vector x_last;          // x_T
  RunStatus status = RunStatus::Completed;
  long abort_step = -1;
  long estimator_grad_calls = 0;
  long matrix_grad_calls = 0;
  std::vector<std::string> warnings;
};

// Snapshot of the quantities alive at a recorded step, for callers that
// need more than the scalar row (e.g. Monte-Carlo lemma verification).
struct StepState {
  long t = 0;
  const Vector& x;
  const Vector& x_tilde;
  const Vector& g;
  const AdaptiveMatrix& H;
  double mu = 0.0;
  double alpha_next = 0.0;
};

struct RunOptions {
  long record_every = 1;
  // Compute the per-step descent-inequality slack (needs oracle L).
  bool with_b1_slack = false;
  bool store_records = true;
  // Iterate storage defaults to "store when d*T <= 1e7 entries".
  std::optional<bool> store_iterates;
  // Optional streaming sinks; called for every recorded row.
  std::function<void(const RunRecord&)> record_sink;
  std::function<void(const StepState&)> state_sink;
};

// Full optimizer loop: generate H_t, mirror step, momentum combination
// x_{t+1} = (1-mu_t) x_t + mu_t x_tilde_{t+1}, estimator update, output
// selection. Identical (config, seed) pairs give bit-identical trajectories.
// A non-finite iterate or estimate aborts the run with the last valid step
// recorded and status AbortedNonFinite.
Trajectory run(const StochasticOracle& oracle, const SuperAdamConfig& cfg,
               const RunOptions& opts = {});

// Output selection over stored iterates; uniform mode draws zeta from rng.
Vector select_output(const Trajectory& traj, OutputMode mode, SeededRng& rng);

}  // namespace superadam

#endif  // SUPERADAM_SUPERADAM_HPP
