#include "superadam/core.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace superadam;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("euclidean_project clamps onto boxes") {
  const auto X = FeasibleSet::box(vec2(-1.0, -1.0), vec2(1.0, 1.0));
  const Vector p = euclidean_project(vec2(2.0, -3.0), X);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == -1.0);
  // Interior points are untouched.
  const Vector q = euclidean_project(vec2(0.25, -0.5), X);
  CHECK(q == vec2(0.25, -0.5));
}

TEST_CASE("euclidean_project on balls: interior fixed, exterior rescaled") {
  const auto X = FeasibleSet::ball(vec2(0.0, 0.0), 1.0);
  CHECK(euclidean_project(vec2(0.0, 0.0), X) == vec2(0.0, 0.0));

  const Vector p = euclidean_project(vec2(3.0, 4.0), X);
  CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.8).epsilon(1e-14));

  // Independent oracle: dense grid search of ||x - v|| over the ball.
  const Vector v = vec2(3.0, 4.0);
  double best = std::numeric_limits<double>::infinity();
  Vector best_x = vec2(0, 0);
  const int n = 800;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      const Vector x = vec2(i / static_cast<double>(n), j / static_cast<double>(n));
      if (x.norm() > 1.0) continue;
      const double d = (x - v).norm();
      if (d < best) {
        best = d;
        best_x = x;
      }
    }
  CHECK((p - best_x).norm() <= 3.0 / n);
  CHECK((p - v).norm() <= best + 1e-12);
}

TEST_CASE("projection is idempotent to machine precision") {
  SeededRng rng(99);
  const auto box = FeasibleSet::box(vec2(-0.3, -2.0), vec2(0.7, 1.0));
  const auto ball = FeasibleSet::ball(vec2(0.5, -0.25), 0.8);
  for (int i = 0; i < 500; ++i) {
    const Vector v = vec2(5.0 * rng.normal(), 5.0 * rng.normal());
    for (const auto* X : {&box, &ball}) {
      const Vector p = euclidean_project(v, *X);
      CHECK((euclidean_project(p, *X) - p).norm() <= 1e-14);
      CHECK(X->contains(p, 1e-12));
    }
  }
}

TEST_CASE("feasible set construction rejects bad shapes") {
  CHECK_THROWS_AS(FeasibleSet::box(vec2(1.0, 0.0), vec2(0.0, 1.0)), ContractViolation);
  CHECK_THROWS_AS(FeasibleSet::ball(vec2(0.0, 0.0), 0.0), ContractViolation);
  CHECK_THROWS_AS(FeasibleSet::ball(vec2(0.0, 0.0), -1.0), ContractViolation);

  const auto X = FeasibleSet::box(vec2(-1.0, -1.0), vec2(1.0, 1.0));
  Vector v3(3);
  v3 << 0, 0, 0;
  CHECK_THROWS_AS(euclidean_project(v3, X), ContractViolation);
}

TEST_CASE("seeded rng streams are reproducible and split streams differ") {
  SeededRng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  SeededRng base(77);
  SeededRng s1 = base.split(1);
  SeededRng s2 = base.split(2);
  SeededRng s1_again = base.split(1);
  bool all_equal = true;
  for (int i = 0; i < 50; ++i) {
    const auto x = s1.next_u64();
    all_equal = all_equal && (x == s2.next_u64());
    CHECK(x == s1_again.next_u64());
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("rng derived draws stay in range") {
  SeededRng rng(5);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto idx = rng.index(7);
    CHECK(idx >= 0);
    CHECK(idx < 7);
    seen.insert(idx);
    CHECK(std::isfinite(rng.normal()));
  }
  CHECK(seen.size() == 7);
  CHECK_THROWS_AS(rng.index(0), ContractViolation);
}

TEST_CASE("counting oracle forwards and counts") {
  struct Line : StochasticOracle {
    Index dim() const override { return 2; }
    std::optional<std::int64_t> n_components() const override { return 3; }
    Vector stoch_grad(const Vector& x, std::uint64_t) const override { return x; }
    double component_value(const Vector& x, std::uint64_t) const override { return x.sum(); }
    Vector full_grad(const Vector& x) const override { return x; }
    double value(const Vector& x) const override { return x.sum(); }
  } inner;

  CountingOracle counting(inner);
  SeededRng rng(1);
  const Vector x = vec2(1.0, 2.0);
  for (int i = 0; i < 4; ++i) counting.stoch_grad(x, counting.sample_index(rng));
  counting.full_grad(x);
  counting.value(x);
  CHECK(counting.stoch_grad_calls == 4);
  CHECK(counting.full_grad_calls == 1);
  CHECK(counting.value_calls == 1);
  CHECK(counting.dim() == 2);
  CHECK(counting.n_components() == 3);
}
