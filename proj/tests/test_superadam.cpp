#include "superadam/superadam.hpp"

#include "superadam/problems.hpp"

#include <doctest.h>

#include <cmath>

using namespace superadam;

namespace {

SuperAdamConfig base_config(int tau, long T, std::uint64_t seed) {
  SuperAdamConfig cfg;
  cfg.schedule = tau == 1 ? Schedule(1, 1.0, 27.0, 7.0, 1e-3, 0.9)
                          : Schedule(0, 1.0, 27.0, 3.0, 1e-3, 0.9);
  cfg.T = T;
  cfg.seed = seed;
  return cfg;
}

// Returns NaN gradients once the call budget is exhausted.
struct PoisonOracle : StochasticOracle {
  mutable long calls_left = 10;
  Index dim() const override { return 2; }
  std::optional<std::int64_t> n_components() const override { return 4; }
  Vector stoch_grad(const Vector& x, std::uint64_t) const override {
    if (--calls_left < 0) return Vector::Constant(2, std::nan(""));
    return x + Vector::Ones(2);
  }
  double component_value(const Vector& x, std::uint64_t) const override { return x.squaredNorm(); }
  Vector full_grad(const Vector& x) const override { return x + Vector::Ones(2); }
  double value(const Vector& x) const override { return x.squaredNorm(); }
};

}  // namespace

TEST_CASE("T = 1 outputs the initial point in both modes") {
  const auto problem = FiniteSumQuadratic::random(4, 6, 1, 0.5, 2.0, 1.0, 10.0);
  for (const auto mode : {OutputMode::LastIterate, OutputMode::UniformRandomIterate}) {
    SuperAdamConfig cfg = base_config(1, 1, 5);
    cfg.output_mode = mode;
    cfg.x1 = Vector::Constant(4, 0.5);
    const Trajectory traj = run(problem, cfg);
    CHECK(traj.output == cfg.x1);
    CHECK(traj.output_index == 1);
    CHECK(traj.x_last == cfg.x1);
  }
}

TEST_CASE("deterministic quadratic descends monotonically under the step condition") {
  // Single-component oracle (sigma = 0) with gamma = rho/(4 L mu_0).
  const auto problem = FiniteSumQuadratic::random(6, 3, 13, 0.5, 3.0, 1.0, 10.0, true);
  const double L = *problem.smoothness();
  for (const MatrixCase mcase :
       {MatrixCase::Case1, MatrixCase::Case2, MatrixCase::Case3, MatrixCase::Case4Diag}) {
    SuperAdamConfig cfg = base_config(1, 400, 2);
    const double mu0 = cfg.schedule.mu(0);
    cfg.lambda = 0.01;
    cfg.schedule.gamma = cfg.lambda / (4.0 * L * mu0);
    cfg.matrix_case = mcase;
    cfg.x1 = Vector::Constant(6, 2.0);
    const Trajectory traj = run(problem, cfg);
    REQUIRE(traj.status == RunStatus::Completed);
    for (std::size_t i = 1; i < traj.records.size(); ++i)
      CHECK(traj.records[i].f <= traj.records[i - 1].f + 1e-12);
    CHECK(traj.records.back().f < traj.records.front().f);
  }
}

TEST_CASE("identical config and seed give bit-identical trajectories") {
  const auto problem = FiniteSumQuadratic::random(5, 12, 21, 0.5, 3.0, 1.0, 10.0);
  for (const int tau : {0, 1}) {
    const SuperAdamConfig cfg = base_config(tau, 250, 99);
    const Trajectory a = run(problem, cfg);
    const Trajectory b = run(problem, cfg);
    REQUIRE(a.iterates.size() == b.iterates.size());
    for (std::size_t i = 0; i < a.iterates.size(); ++i) CHECK(a.iterates[i] == b.iterates[i]);
    CHECK(a.output == b.output);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      CHECK(a.records[i].Mt == b.records[i].Mt);
      CHECK(a.records[i].f == b.records[i].f);
    }
  }
}

TEST_CASE("all iterates stay feasible on boxes and balls") {
  const auto problem = FiniteSumQuadratic::random(3, 8, 31, 0.5, 3.0, 2.0, 10.0);
  const auto box = FeasibleSet::box(Vector::Constant(3, -0.4), Vector::Constant(3, 0.6));
  const auto ball = FeasibleSet::ball(Vector::Constant(3, 0.1), 0.5);
  for (const auto* X : {&box, &ball}) {
    for (const MatrixCase mcase : {MatrixCase::Case1, MatrixCase::Case2}) {
      SuperAdamConfig cfg = base_config(1, 300, 7);
      cfg.schedule.gamma = 0.05;
      cfg.matrix_case = mcase;
      cfg.feasible_set = *X;
      const Trajectory traj = run(problem, cfg);
      REQUIRE(traj.status == RunStatus::Completed);
      REQUIRE(traj.iterates_stored);
      for (const auto& x : traj.iterates) CHECK(X->contains(x, 1e-12));
      CHECK(X->contains(traj.output, 1e-12));
    }
  }
}

TEST_CASE("oracle-call accounting per tau and matrix case") {
  const auto problem = FiniteSumQuadratic::random(4, 10, 41, 0.5, 3.0, 1.0, 10.0);
  const long T = 123;

  struct Expect {
    MatrixCase mcase;
    int tau;
    bool reuse;
    long matrix_calls;
  };
  const Expect table[] = {
      {MatrixCase::Case1, 1, false, T},
      {MatrixCase::Case1, 0, false, T},
      {MatrixCase::Case3, 1, false, 2 * (T - 1)},
      {MatrixCase::Case3, 0, false, 2 * (T - 1)},
      {MatrixCase::Case1, 1, true, 0},
      {MatrixCase::Case3, 1, true, 0},
      {MatrixCase::Case3, 0, true, T - 1},
  };
  for (const auto& e : table) {
    CAPTURE(static_cast<int>(e.mcase));
    CAPTURE(e.tau);
    CAPTURE(e.reuse);
    CountingOracle counting(problem);
    SuperAdamConfig cfg = base_config(e.tau, T, 3);
    cfg.matrix_case = e.mcase;
    cfg.reuse_estimator_sample = e.reuse;
    const Trajectory traj = run(counting, cfg);
    CHECK(traj.estimator_grad_calls == (e.tau == 1 ? 2 * T + 1 : T + 1));
    CHECK(traj.matrix_grad_calls == e.matrix_calls);
    CHECK(counting.stoch_grad_calls == traj.estimator_grad_calls + traj.matrix_grad_calls);
  }
}

TEST_CASE("theorem step-size warnings fire exactly when gamma is too large") {
  const auto problem = FiniteSumQuadratic::random(4, 6, 51, 0.5, 3.0, 1.0, 10.0);
  const double L = *problem.smoothness();

  SuperAdamConfig loud = base_config(1, 5, 1);
  loud.schedule.gamma = 10.0;  // far above rho*m^{1/3}/(4kL)
  CHECK_FALSE(run(problem, loud).warnings.empty());

  SuperAdamConfig quiet = base_config(1, 5, 1);
  quiet.schedule.gamma = 0.9 * quiet.lambda * std::cbrt(quiet.schedule.m) / (4.0 * L);
  CHECK(run(problem, quiet).warnings.empty());
}

TEST_CASE("non-finite values abort with diagnostics instead of clamping") {
  PoisonOracle oracle;
  SuperAdamConfig cfg = base_config(1, 50, 1);
  cfg.schedule.gamma = 0.01;
  const Trajectory traj = run(oracle, cfg);
  CHECK(traj.status == RunStatus::AbortedNonFinite);
  CHECK(traj.abort_step > 0);
  CHECK(traj.abort_step <= 50);
  for (const auto& r : traj.records) CHECK(std::isfinite(r.f));
}

TEST_CASE("uniform output selection is reproducible and in range") {
  const auto problem = FiniteSumQuadratic::random(3, 6, 61, 0.5, 2.0, 1.0, 10.0);
  SuperAdamConfig cfg = base_config(0, 40, 77);
  cfg.output_mode = OutputMode::UniformRandomIterate;
  const Trajectory a = run(problem, cfg);
  const Trajectory b = run(problem, cfg);
  CHECK(a.output_index == b.output_index);
  CHECK(a.output_index >= 1);
  CHECK(a.output_index <= 40);
  REQUIRE(a.iterates_stored);
  CHECK(a.output == a.iterates[static_cast<std::size_t>(a.output_index - 1)]);

  // select_output over stored iterates agrees for the last mode and is
  // reproducible for the uniform one.
  SeededRng rng(0);
  CHECK(select_output(a, OutputMode::LastIterate, rng) == a.iterates.back());
  SeededRng r1(123), r2(123);
  CHECK(select_output(a, OutputMode::UniformRandomIterate, r1) ==
        select_output(a, OutputMode::UniformRandomIterate, r2));
}

TEST_CASE("descent-lemma slack stays above the floor when enabled") {
  const auto problem = FiniteSumQuadratic::random(5, 20, 71, 0.5, 3.0, 1.0, 10.0);
  const double L = *problem.smoothness();
  for (const int tau : {0, 1}) {
    SuperAdamConfig cfg = base_config(tau, 500, 9);
    const double mu0 = cfg.schedule.mu(0);
    cfg.schedule.gamma = cfg.lambda / (4.0 * L * mu0);
    RunOptions opts;
    opts.with_b1_slack = true;
    const Trajectory traj = run(problem, cfg, opts);
    REQUIRE(traj.status == RunStatus::Completed);
    long checked = 0;
    for (const auto& r : traj.records) {
      REQUIRE(std::isfinite(r.b1_slack));
      CHECK(r.b1_slack >= -1e-9);
      ++checked;
    }
    CHECK(checked == 500);
  }
}

TEST_CASE("config validation rejects infeasible starts and bad dimensions") {
  const auto problem = FiniteSumQuadratic::random(3, 4, 81, 0.5, 2.0, 1.0, 10.0);
  SuperAdamConfig cfg = base_config(1, 10, 1);
  cfg.feasible_set = FeasibleSet::box(Vector::Constant(3, -1.0), Vector::Constant(3, 1.0));
  cfg.x1 = Vector::Constant(3, 2.0);  // outside the box
  CHECK_THROWS_AS(run(problem, cfg), ContractViolation);
  cfg.x1 = Vector::Constant(4, 0.0);  // wrong dimension
  CHECK_THROWS_AS(run(problem, cfg), ContractViolation);
  CHECK_FALSE(cfg.validate(problem.dim()).empty());
}

TEST_CASE("iterate storage thins automatically on long runs") {
  const auto problem = FiniteSumQuadratic::random(6, 4, 3, 0.5, 2.0, 1.0, 10.0);
  SuperAdamConfig cfg = base_config(0, 2'000'000, 5);  // d*T = 1.2e7 > 1e7
  cfg.output_mode = OutputMode::UniformRandomIterate;
  RunOptions opts;
  opts.record_every = cfg.T;  // keep the run cheap
  const Trajectory traj = run(problem, cfg, opts);
  CHECK_FALSE(traj.iterates_stored);
  CHECK(traj.iterates.empty());
  // The uniform output is still captured on the fly.
  CHECK(traj.output.size() == 6);
  CHECK(traj.output_index >= 1);
  CHECK(traj.output_index <= cfg.T);
  CHECK(traj.x_last.size() == 6);

  // Explicit override keeps iterates on a small run.
  SuperAdamConfig small = base_config(0, 50, 5);
  RunOptions keep;
  keep.store_iterates = true;
  CHECK(run(problem, small, keep).iterates.size() == 50);
}

TEST_CASE("record_every outside [1, T] is rejected") {
  const auto problem = FiniteSumQuadratic::random(3, 4, 3, 0.5, 2.0, 1.0, 10.0);
  const SuperAdamConfig cfg = base_config(0, 10, 1);
  RunOptions opts;
  opts.record_every = 11;
  CHECK_THROWS_AS(run(problem, cfg, opts), ContractViolation);
  opts.record_every = 0;
  CHECK_THROWS_AS(run(problem, cfg, opts), ContractViolation);
}

TEST_CASE("measure chain holds along stochastic runs for every case") {
  const auto problem = FiniteSumQuadratic::random(5, 15, 91, 0.5, 3.0, 1.0, 10.0);
  for (const int tau : {0, 1}) {
    for (const MatrixCase mcase : {MatrixCase::Case1, MatrixCase::Case2, MatrixCase::Case3,
                                   MatrixCase::Case4Diag, MatrixCase::Case4Scalar}) {
      SuperAdamConfig cfg = base_config(tau, 200, 15);
      cfg.matrix_case = mcase;
      const Trajectory traj = run(problem, cfg);
      REQUIRE(traj.status == RunStatus::Completed);
      for (const auto& r : traj.records) {
        CHECK(r.gradmap_norm <= r.Mt * (1.0 + 1e-9));
        CHECK(r.condH >= 1.0);
      }
    }
  }
}
