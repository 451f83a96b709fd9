#include "superadam/problems.hpp"

#include <doctest.h>

#include <cmath>

using namespace superadam;

namespace {

// Central finite difference of a scalar function of x.
template <typename F>
Vector fd_gradient(F&& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    Vector hi = x, lo = x;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

Vector random_point(SeededRng& rng, Index d, double scale) {
  Vector x(d);
  for (Index j = 0; j < d; ++j) x[j] = scale * (2.0 * rng.uniform01() - 1.0);
  return x;
}

void check_gradients(const StochasticOracle& oracle, double scale, int points,
                     std::uint64_t seed) {
  SeededRng rng(seed);
  for (int i = 0; i < points; ++i) {
    const Vector x = random_point(rng, oracle.dim(), scale);
    const Vector gf = oracle.full_grad(x);
    const Vector fd = fd_gradient([&](const Vector& z) { return oracle.value(z); }, x);
    CHECK((gf - fd).norm() <= 1e-6 * std::max(1.0, gf.norm()));

    const std::uint64_t xi = oracle.sample_index(rng);
    const Vector gs = oracle.stoch_grad(x, xi);
    const Vector fds =
        fd_gradient([&](const Vector& z) { return oracle.component_value(z, xi); }, x);
    CHECK((gs - fds).norm() <= 1e-6 * std::max(1.0, gs.norm()));
  }
}

void check_unbiased(const StochasticOracle& oracle, double scale, std::uint64_t seed) {
  SeededRng rng(seed);
  const auto n = oracle.n_components();
  REQUIRE(n.has_value());
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_point(rng, oracle.dim(), scale);
    Vector mean = Vector::Zero(oracle.dim());
    for (std::int64_t xi = 0; xi < *n; ++xi)
      mean += oracle.stoch_grad(x, static_cast<std::uint64_t>(xi));
    mean /= static_cast<double>(*n);
    CHECK((mean - oracle.full_grad(x)).norm() <= 1e-10 * std::max(1.0, mean.norm()));
  }
}

}  // namespace

TEST_CASE("two-component scalar quadratic: closed-form metadata") {
  std::vector<Vector> q{Vector::Constant(1, 1.0), Vector::Constant(1, 3.0)};
  std::vector<Vector> c{Vector::Zero(1), Vector::Zero(1)};
  const FiniteSumQuadratic problem(std::move(q), std::move(c), 5.0);

  CHECK(problem.smoothness() == 3.0);
  CHECK(problem.value_lower_bound() == 0.0);
  Vector x(1);
  x << 2.0;
  CHECK(problem.value(x) == doctest::Approx(4.0).epsilon(1e-15));        // f(x) = x^2
  CHECK(problem.full_grad(x)[0] == doctest::Approx(4.0).epsilon(1e-15));  // 2x
  CHECK(problem.gradient_variance(x) == doctest::Approx(4.0).epsilon(1e-15));  // x^2
  // sigma is the box supremum of sqrt(variance): radius 5 -> sigma = 5.
  CHECK(*problem.noise_sigma() == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("identical components mean a deterministic oracle") {
  const auto problem = FiniteSumQuadratic::random(6, 8, 3, 0.5, 2.0, 1.0, 10.0, true);
  CHECK(*problem.noise_sigma() == 0.0);
  SeededRng rng(1);
  const Vector x = random_point(rng, 6, 2.0);
  for (int xi = 0; xi < 8; ++xi)
    CHECK((problem.stoch_grad(x, xi) - problem.full_grad(x)).norm() == 0.0);
  // f* is attained at the analytic minimizer.
  CHECK(problem.value(problem.minimizer()) == doctest::Approx(*problem.value_lower_bound()));
}

TEST_CASE("quadratic oracle: gradients, unbiasedness and honest metadata") {
  const auto problem = FiniteSumQuadratic::random(7, 40, 11, 0.3, 4.0, 1.5, 8.0);
  check_gradients(problem, 4.0, 100, 101);
  check_unbiased(problem, 4.0, 102);

  // Metadata honesty: empirical Lipschitz constant and variance within bounds.
  SeededRng rng(103);
  const double L = *problem.smoothness();
  for (int i = 0; i < 200; ++i) {
    const Vector x = random_point(rng, 7, 8.0);
    const Vector y = random_point(rng, 7, 8.0);
    if ((x - y).norm() < 1e-9) continue;
    const auto xi = static_cast<std::uint64_t>(rng.index(40));
    const double ratio =
        (problem.stoch_grad(x, xi) - problem.stoch_grad(y, xi)).norm() / (x - y).norm();
    CHECK(ratio <= L * (1.0 + 1e-6));
    CHECK(problem.gradient_variance(x) <=
          (*problem.noise_sigma()) * (*problem.noise_sigma()) * (1.0 + 1e-12));
  }
}

TEST_CASE("quadratic oracle rejects inconsistent construction") {
  std::vector<Vector> q{Vector::Constant(2, 1.0)};
  std::vector<Vector> c{Vector::Zero(3)};
  CHECK_THROWS_AS(FiniteSumQuadratic(std::move(q), std::move(c), 1.0), ContractViolation);
  CHECK_THROWS_AS(FiniteSumQuadratic({}, {}, 1.0), ContractViolation);
  // Zero mean curvature has no finite minimizer.
  std::vector<Vector> q0{Vector::Zero(2)};
  std::vector<Vector> c0{Vector::Zero(2)};
  CHECK_THROWS_AS(FiniteSumQuadratic(std::move(q0), std::move(c0), 1.0), ContractViolation);
}

TEST_CASE("all-zero features make a constant logistic objective") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 3);
  Vector y(4);
  y << 1.0, -1.0, 1.0, -1.0;
  const NoisyLogistic problem(std::move(A), std::move(y), false);
  SeededRng rng(2);
  const Vector x = random_point(rng, 3, 2.0);
  CHECK(problem.value(x) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(problem.full_grad(x).norm() == 0.0);
}

TEST_CASE("logistic oracle: gradients and metadata on both loss modes") {
  for (const bool squared : {false, true}) {
    const auto problem = NoisyLogistic::synthetic(6, 30, 5, squared);
    check_gradients(problem, 2.0, 100, 200 + squared);
    check_unbiased(problem, 2.0, 201);
    CHECK(*problem.value_lower_bound() == 0.0);

    SeededRng rng(202);
    const double L = *problem.smoothness();
    const double sigma_sq = (*problem.noise_sigma()) * (*problem.noise_sigma());
    for (int i = 0; i < 100; ++i) {
      const Vector x = random_point(rng, 6, 3.0);
      const Vector y2 = random_point(rng, 6, 3.0);
      if ((x - y2).norm() < 1e-9) continue;
      const auto xi = static_cast<std::uint64_t>(rng.index(30));
      CHECK((problem.stoch_grad(x, xi) - problem.stoch_grad(y2, xi)).norm() <=
            L * (1.0 + 1e-6) * (x - y2).norm());
      // Enumerated variance never exceeds the reported bound.
      const Vector mean = problem.full_grad(x);
      double var = 0.0;
      for (int k = 0; k < 30; ++k) var += (problem.stoch_grad(x, k) - mean).squaredNorm();
      var /= 30.0;
      CHECK(var <= sigma_sq * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("rosenbrock oracle: analytic gradient, unbiased noise, exact sigma") {
  const StochasticRosenbrock problem(4, 0.2, 7, 2.0);
  check_gradients(problem, 1.5, 100, 300);

  // Unbiasedness via Monte Carlo over the infinite sample family.
  SeededRng rng(301);
  const Vector x = random_point(rng, 4, 1.5);
  Vector mean = Vector::Zero(4);
  const int N = 20000;
  for (int i = 0; i < N; ++i) mean += problem.stoch_grad(x, problem.sample_index(rng));
  mean /= static_cast<double>(N);
  const double se = 0.2 * 2.0 / std::sqrt(static_cast<double>(N));
  CHECK((mean - problem.full_grad(x)).norm() <= 6.0 * se * std::sqrt(4.0));

  CHECK(*problem.noise_sigma() == doctest::Approx(0.2 * 2.0).epsilon(1e-15));
  CHECK(problem.smoothness().has_value());
  CHECK(*problem.value_lower_bound() == 0.0);
  CHECK_FALSE(StochasticRosenbrock(4, 0.2).smoothness().has_value());

  // stoch_grad is a pure function of (x, xi).
  const std::uint64_t xi = 123456789ULL;
  CHECK(problem.stoch_grad(x, xi) == problem.stoch_grad(x, xi));

  // The reported box smoothness bounds the Hessian action inside the box.
  SeededRng rng2(302);
  const double L = *problem.smoothness();
  for (int i = 0; i < 200; ++i) {
    const Vector a = random_point(rng2, 4, 2.0);
    const Vector b = random_point(rng2, 4, 2.0);
    if ((a - b).norm() < 1e-9) continue;
    CHECK((problem.full_grad(a) - problem.full_grad(b)).norm() <=
          L * (1.0 + 1e-6) * (a - b).norm());
  }
}

TEST_CASE("rosenbrock minimum sits at the all-ones point") {
  const StochasticRosenbrock problem(5, 0.0);
  CHECK(problem.value(Vector::Ones(5)) == 0.0);
  CHECK(problem.full_grad(Vector::Ones(5)).norm() == 0.0);
}

TEST_CASE("make_problem builds each type and rejects junk") {
  using nlohmann::json;
  const auto quad = make_problem(json{{"type", "finite_sum_quadratic"}, {"d", 3}, {"n", 5}});
  CHECK(quad->dim() == 3);
  CHECK(quad->n_components() == 5);

  const auto logi = make_problem(json{{"type", "noisy_logistic"}, {"d", 4}, {"n", 10}});
  CHECK(logi->dim() == 4);

  const auto rosen = make_problem(
      json{{"type", "stochastic_rosenbrock"}, {"d", 4}, {"noise_std", 0.1}, {"box_halfwidth", 2.0}});
  CHECK(rosen->dim() == 4);
  CHECK_FALSE(rosen->n_components().has_value());
  CHECK(rosen->smoothness().has_value());

  CHECK_THROWS_AS(make_problem(json{{"type", "nope"}}), ContractViolation);
  CHECK_THROWS_AS(make_problem(json::array()), ContractViolation);
  CHECK_THROWS_AS(make_problem(json{{"type", "finite_sum_quadratic"}, {"d", 0}}),
                  ContractViolation);
  CHECK_THROWS_AS(make_problem(json{{"type", "stochastic_rosenbrock"}, {"d", 1}}),
                  ContractViolation);

  // Same spec, same behavior.
  const json spec{{"type", "finite_sum_quadratic"}, {"d", 3}, {"n", 5}, {"seed", 9}};
  const auto a = make_problem(spec);
  const auto b = make_problem(spec);
  SeededRng rng(1);
  const Vector x = random_point(rng, 3, 2.0);
  CHECK(a->full_grad(x) == b->full_grad(x));
  CHECK(a->stoch_grad(x, 2) == b->stoch_grad(x, 2));
}
