#include "superadam/core.hpp"

#include <cmath>

namespace superadam {

bool all_finite(const Vector& v) { return v.allFinite(); }

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SeededRng::normal() {
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::int64_t SeededRng::index(std::int64_t n) {
  require(n > 0, "SeededRng::index: n must be positive");
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
  return static_cast<std::int64_t>(wide >> 64);
}

FeasibleSet FeasibleSet::unconstrained() {
  FeasibleSet s;
  s.kind_ = SetKind::Unconstrained;
  return s;
}

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  require(lower.size() == upper.size(), "FeasibleSet::box: bound dimensions differ");
  require((lower.array() <= upper.array()).all(), "FeasibleSet::box: lower > upper");
  FeasibleSet s;
  s.kind_ = SetKind::Box;
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  require(radius > 0.0, "FeasibleSet::ball: radius must be positive");
  FeasibleSet s;
  s.kind_ = SetKind::Ball;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

bool FeasibleSet::matches_dim(Index d) const {
  switch (kind_) {
    case SetKind::Unconstrained: return true;
    case SetKind::Box: return lower_.size() == d;
    case SetKind::Ball: return center_.size() == d;
  }
  return false;
}

bool FeasibleSet::contains(const Vector& v, double tol) const {
  switch (kind_) {
    case SetKind::Unconstrained:
      return true;
    case SetKind::Box:
      return (v.array() >= lower_.array() - tol).all() &&
             (v.array() <= upper_.array() + tol).all();
    case SetKind::Ball:
      return (v - center_).norm() <= radius_ + tol;
  }
  return false;
}

Vector euclidean_project(const Vector& v, const FeasibleSet& X) {
  require(X.matches_dim(v.size()), "euclidean_project: dimension mismatch");
  switch (X.kind()) {
    case SetKind::Unconstrained:
      return v;
    case SetKind::Box:
      return v.cwiseMax(X.lower()).cwiseMin(X.upper());
    case SetKind::Ball: {
      const Vector offset = v - X.center();
      const double dist = offset.norm();
      if (dist <= X.radius()) return v;
      return X.center() + offset * (X.radius() / dist);
    }
  }
  return v;
}

std::uint64_t StochasticOracle::sample_index(SeededRng& rng) const {
  const auto n = n_components();
  if (n.has_value()) return static_cast<std::uint64_t>(rng.index(*n));
  return rng.next_u64();
}

}  // namespace superadam
