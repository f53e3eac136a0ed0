#pragma once

// Convex feasibility by Dykstra's alternating projections.

#include "gammacomp/core.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace gammacomp {

namespace sets {

template <typename Scalar>
struct Ball {
  Vector<Scalar> center;
  Scalar radius;
};

template <typename Scalar>
struct Halfspace {
  Vector<Scalar> a;
  Scalar b;
};

template <typename Scalar>
struct Box {
  Vector<Scalar> lower;
  Vector<Scalar> upper;
};

/// {y : ||clip(y, x_ref)||_2 <= radius}
template <typename Scalar>
struct ClippedBall {
  Vector<Scalar> x_ref;
  std::vector<Monotonicity> mono;
  Sense sense;
  Scalar radius;
};

template <typename Scalar>
using ConvexSet = std::variant<Ball<Scalar>, Halfspace<Scalar>, Box<Scalar>, ClippedBall<Scalar>>;

template <typename Scalar>
Vector<Scalar> project(const ConvexSet<Scalar>& set, const Vector<Scalar>& x) {
  return std::visit(
      [&](const auto& s) -> Vector<Scalar> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball<Scalar>>) {
          return project_ball(x, s.center, s.radius);
        } else if constexpr (std::is_same_v<T, Halfspace<Scalar>>) {
          return project_halfspace(x, s.a, s.b);
        } else if constexpr (std::is_same_v<T, Box<Scalar>>) {
          return x.cwiseMax(s.lower).cwiseMin(s.upper);
        } else {
          return project_clipped_ball(x, ClipGeometry<Scalar>{s.x_ref, s.mono, s.sense}, s.radius);
        }
      },
      set);
}

template <typename Scalar>
Eigen::Index dimension(const ConvexSet<Scalar>& set) {
  return std::visit(
      [](const auto& s) -> Eigen::Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball<Scalar>>) return s.center.size();
        else if constexpr (std::is_same_v<T, Halfspace<Scalar>>) return s.a.size();
        else if constexpr (std::is_same_v<T, Box<Scalar>>) return s.lower.size();
        else return s.x_ref.size();
      },
      set);
}

template <typename Scalar>
Scalar distance(const ConvexSet<Scalar>& set, const Vector<Scalar>& x) {
  return (x - project(set, x)).norm();
}

}  // namespace sets

template <typename Scalar>
using ConvexSet = sets::ConvexSet<Scalar>;

template <typename Scalar>
struct FeasibilityResult {
  enum class Status { Feasible, InfeasibleAtTolerance };

  Status status;
  Vector<Scalar> x;   // last iterate; a feasible point when status == Feasible
  Scalar residual;    // max distance from x to any set
  int iterations;

  bool feasible() const { return status == Status::Feasible; }
};

struct FeasibilityOptions {
  double tolerance = 1e-7;
  int max_iters = 5000;
};

template <typename Scalar>
Scalar max_distance(std::span<const ConvexSet<Scalar>> sets, const Vector<Scalar>& x) {
  Scalar worst(0);
  for (const auto& s : sets) worst = std::max(worst, sets::distance(s, x));
  return worst;
}

/// Dykstra's method started at `start`. Sets are visited in order each sweep,
/// so the returned iterate lies exactly in the last set.
template <typename Scalar>
FeasibilityResult<Scalar> feasibility_check(std::span<const ConvexSet<Scalar>> sets,
                                            const Vector<Scalar>& start,
                                            const FeasibilityOptions& opts = {}) {
  using Result = FeasibilityResult<Scalar>;
  const Scalar tol = static_cast<Scalar>(opts.tolerance);
  Vector<Scalar> x = start;
  for (const auto& s : sets)
    if (sets::dimension(s) != x.size()) throw DimensionError("feasibility_check: set dimension mismatch");
  if (sets.empty()) return Result{Result::Status::Feasible, x, Scalar(0), 0};

  Scalar residual = max_distance(sets, x);
  if (residual <= tol) return Result{Result::Status::Feasible, x, residual, 0};

  std::vector<Vector<Scalar>> increments(sets.size(), Vector<Scalar>::Zero(x.size()));
  Vector<Scalar> y(x.size());
  for (int it = 1; it <= opts.max_iters; ++it) {
    for (std::size_t k = 0; k < sets.size(); ++k) {
      y = x + increments[k];
      x = sets::project(sets[k], y);
      increments[k] = y - x;
    }
    residual = max_distance(sets, x);
    if (residual <= tol) return Result{Result::Status::Feasible, x, residual, it};
  }
  return Result{Result::Status::InfeasibleAtTolerance, x, residual, opts.max_iters};
}

template <typename Scalar>
FeasibilityResult<Scalar> feasibility_check(const std::vector<ConvexSet<Scalar>>& sets,
                                            const Vector<Scalar>& start,
                                            const FeasibilityOptions& opts = {}) {
  return feasibility_check(std::span<const ConvexSet<Scalar>>(sets), start, opts);
}

}  // namespace gammacomp
