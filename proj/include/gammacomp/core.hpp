#pragma once

// Domain types, norms, the clip operator and closed-form projections.
//
// Everything here is a pure function over Eigen dense vectors templated on the
// scalar type. Vectors are column vectors of dynamic size; the decision vector
// dimension is whatever the metric references carry.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gammacomp {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptySetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NormKind { L1, L2, LInf };

enum class Monotonicity { Increasing, Decreasing, NonMonotone };

enum class Sense { Minimize, Maximize };

inline const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::LInf: return "linf";
  }
  return "?";
}

inline NormKind parse_norm(const std::string& s) {
  if (s == "l1" || s == "L1") return NormKind::L1;
  if (s == "l2" || s == "L2") return NormKind::L2;
  if (s == "linf" || s == "Linf" || s == "LInf" || s == "inf") return NormKind::LInf;
  throw std::invalid_argument("unknown norm '" + s + "' (expected l1, l2 or linf)");
}

inline NormKind dual(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return NormKind::LInf;
    case NormKind::L2: return NormKind::L2;
    case NormKind::LInf: return NormKind::L1;
  }
  return kind;
}

template <typename Derived>
typename Derived::Scalar norm_value(const Eigen::MatrixBase<Derived>& v, NormKind kind) {
  using Scalar = typename Derived::Scalar;
  if (v.size() == 0) return Scalar(0);
  switch (kind) {
    case NormKind::L1: return v.template lpNorm<1>();
    case NormKind::L2: return v.norm();
    case NormKind::LInf: return v.template lpNorm<Eigen::Infinity>();
  }
  return Scalar(0);
}

template <typename Derived>
typename Derived::Scalar dual_norm_value(const Eigen::MatrixBase<Derived>& v, NormKind kind) {
  return norm_value(v, dual(kind));
}

// Maximized metrics are safe where they cannot have decreased, so the
// increasing/decreasing roles flip.
inline Monotonicity effective_monotonicity(Monotonicity m, Sense sense) {
  if (sense == Sense::Minimize) return m;
  switch (m) {
    case Monotonicity::Increasing: return Monotonicity::Decreasing;
    case Monotonicity::Decreasing: return Monotonicity::Increasing;
    case Monotonicity::NonMonotone: return Monotonicity::NonMonotone;
  }
  return m;
}

template <typename Scalar>
struct LipschitzNorm {
  Scalar M;
  NormKind norm = NormKind::L2;
  std::vector<Monotonicity> mono;
};

template <typename Scalar>
struct ConcaveLinear {
  Vector<Scalar> grad;
};

template <typename Scalar>
struct ConvexQuadratic {
  Vector<Scalar> grad;
  Scalar L;
};

template <typename Scalar>
using ConstraintModel =
    std::variant<LipschitzNorm<Scalar>, ConcaveLinear<Scalar>, ConvexQuadratic<Scalar>>;

// One historical metric observation: f(x_ref) = v.
template <typename Scalar>
struct MetricRef {
  std::string id;
  Vector<Scalar> x_ref;
  Scalar v;
  Sense sense = Sense::Minimize;
  std::vector<ConstraintModel<Scalar>> models;

  Eigen::Index dimension() const { return x_ref.size(); }

  void validate() const {
    if (!(v > Scalar(0)) || !std::isfinite(static_cast<double>(v)))
      throw std::invalid_argument("metric '" + id + "': value must be positive");
    if (models.empty())
      throw std::invalid_argument("metric '" + id + "': no constraint model");
    const auto n = static_cast<std::size_t>(x_ref.size());
    for (const auto& model : models) {
      std::visit(
          [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LipschitzNorm<Scalar>>) {
              if (!(m.M > Scalar(0)))
                throw std::invalid_argument("metric '" + id + "': Lipschitz constant must be positive");
              if (m.mono.size() != n)
                throw DimensionError("metric '" + id + "': monotonicity length mismatch");
            } else {
              if (static_cast<std::size_t>(m.grad.size()) != n)
                throw DimensionError("metric '" + id + "': gradient dimension mismatch");
              if constexpr (std::is_same_v<T, ConvexQuadratic<Scalar>>) {
                if (!(m.L > Scalar(0)))
                  throw std::invalid_argument("metric '" + id + "': gradient Lipschitz constant must be positive");
              }
            }
          },
          model);
    }
  }
};

/// Geometry of one clipped constraint: reference point, per-coordinate
/// monotonicity and optimization sense. Non-owning.
template <typename Scalar>
struct ClipGeometry {
  const Vector<Scalar>& x_ref;
  std::span<const Monotonicity> mono;
  Sense sense = Sense::Minimize;
};

template <typename Scalar>
void check_dimensions(const Vector<Scalar>& x, const ClipGeometry<Scalar>& g) {
  if (x.size() != g.x_ref.size() || static_cast<std::size_t>(x.size()) != g.mono.size())
    throw DimensionError("clip: dimension mismatch");
}

/// Coordinate-wise residual against the reference point that ignores moves in
/// which the metric cannot get worse.
template <typename Scalar>
Vector<Scalar> clip(const Vector<Scalar>& x, const ClipGeometry<Scalar>& g) {
  check_dimensions(x, g);
  Vector<Scalar> out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const Scalar d = x(j) - g.x_ref(j);
    switch (effective_monotonicity(g.mono[j], g.sense)) {
      case Monotonicity::Increasing: out(j) = std::max(d, Scalar(0)); break;
      case Monotonicity::Decreasing: out(j) = std::max(-d, Scalar(0)); break;
      case Monotonicity::NonMonotone: out(j) = d; break;
    }
  }
  return out;
}

/// Nearest point of the safe region {y : clip(y) = 0}.
template <typename Scalar>
Vector<Scalar> project_safe_region(const Vector<Scalar>& x, const ClipGeometry<Scalar>& g) {
  check_dimensions(x, g);
  Vector<Scalar> out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    switch (effective_monotonicity(g.mono[j], g.sense)) {
      case Monotonicity::Increasing: out(j) = std::min(x(j), g.x_ref(j)); break;
      case Monotonicity::Decreasing: out(j) = std::max(x(j), g.x_ref(j)); break;
      case Monotonicity::NonMonotone: out(j) = g.x_ref(j); break;
    }
  }
  return out;
}

/// Euclidean projection onto {y : ||clip(y)||_2 <= r}, i.e. the safe region
/// fattened by a ball of radius r.
template <typename Scalar>
Vector<Scalar> project_clipped_ball(const Vector<Scalar>& x, const ClipGeometry<Scalar>& g,
                                    Scalar r) {
  if (r < Scalar(0)) throw std::invalid_argument("project_clipped_ball: negative radius");
  Vector<Scalar> p = project_safe_region(x, g);
  const Scalar dist = (x - p).norm();
  if (dist <= r) return x;
  return p + (r / dist) * (x - p);
}

template <typename Scalar>
Vector<Scalar> project_halfspace(const Vector<Scalar>& x, const Vector<Scalar>& a, Scalar b) {
  if (a.size() != x.size()) throw DimensionError("project_halfspace: dimension mismatch");
  const Scalar nn = a.squaredNorm();
  if (!(nn > Scalar(0))) throw std::invalid_argument("project_halfspace: zero normal vector");
  const Scalar excess = a.dot(x) - b;
  if (excess <= Scalar(0)) return x;
  return x - (excess / nn) * a;
}

template <typename Scalar>
Vector<Scalar> project_ball(const Vector<Scalar>& x, const Vector<Scalar>& center, Scalar radius) {
  if (center.size() != x.size()) throw DimensionError("project_ball: dimension mismatch");
  const Scalar dist = (x - center).norm();
  if (dist <= radius) return x;
  return center + (radius / dist) * (x - center);
}

template <typename Scalar>
struct QuadraticCapBall {
  Vector<Scalar> center;
  Scalar radius;
};

/// {y : L||y - x_ref||^2 + <grad, y - x_ref> <= rhs} written as a ball.
/// Throws EmptySetError when the set is empty.
template <typename Scalar>
QuadraticCapBall<Scalar> quadratic_cap_ball(const Vector<Scalar>& x_ref, const Vector<Scalar>& grad,
                                            Scalar L, Scalar rhs) {
  if (!(L > Scalar(0))) throw std::invalid_argument("quadratic cap: L must be positive");
  if (grad.size() != x_ref.size()) throw DimensionError("quadratic cap: dimension mismatch");
  const Scalar radicand = rhs / L + grad.squaredNorm() / (Scalar(4) * L * L);
  if (radicand < Scalar(0)) throw EmptySetError("quadratic cap: empty set");
  return {x_ref - grad / (Scalar(2) * L), std::sqrt(radicand)};
}

template <typename Scalar>
Vector<Scalar> project_quadratic_cap(const Vector<Scalar>& x, const Vector<Scalar>& x_ref,
                                     const Vector<Scalar>& grad, Scalar L, Scalar rhs) {
  const auto ball = quadratic_cap_ball(x_ref, grad, L, rhs);
  return project_ball(x, ball.center, ball.radius);
}

/// Box bounds plus budget-style halfspaces a^T x <= b.
template <typename Scalar>
class FeasibleSet {
 public:
  struct Halfspace {
    Vector<Scalar> a;
    Scalar b;
  };

  FeasibleSet() = default;

  /// Nonnegative orthant in dimension n.
  explicit FeasibleSet(Eigen::Index n)
      : FeasibleSet(Vector<Scalar>::Zero(n), infinite_upper(n), {}) {}

  FeasibleSet(Vector<Scalar> lower, Vector<Scalar> upper, std::vector<Halfspace> halfspaces,
              Scalar tolerance = Scalar(1e-9))
      : lower_(std::move(lower)), upper_(std::move(upper)), halfspaces_(std::move(halfspaces)) {
    if (lower_.size() != upper_.size()) throw DimensionError("FeasibleSet: bound size mismatch");
    for (Eigen::Index j = 0; j < lower_.size(); ++j)
      if (lower_(j) > upper_(j)) throw EmptySetError("FeasibleSet: lower bound exceeds upper bound");
    for (const auto& h : halfspaces_) {
      if (h.a.size() != lower_.size()) throw DimensionError("FeasibleSet: halfspace dimension mismatch");
      if (!(h.a.squaredNorm() > Scalar(0))) throw std::invalid_argument("FeasibleSet: zero halfspace normal");
    }
    const Vector<Scalar> start = clamp(Vector<Scalar>::Zero(lower_.size()));
    if (violation(project(start)) > std::max(tolerance, Scalar(1e-9)))
      throw EmptySetError("FeasibleSet: set is empty");
  }

  /// The whole space R^n.
  static FeasibleSet unbounded(Eigen::Index n) {
    return FeasibleSet(Vector<Scalar>::Constant(n, -inf()), infinite_upper(n), {});
  }

  static FeasibleSet box(Vector<Scalar> lower, Vector<Scalar> upper) {
    return FeasibleSet(std::move(lower), std::move(upper), {});
  }

  Eigen::Index dimension() const { return lower_.size(); }
  const Vector<Scalar>& lower() const { return lower_; }
  const Vector<Scalar>& upper() const { return upper_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

  bool bounded() const { return lower_.allFinite() && upper_.allFinite(); }

  Vector<Scalar> clamp(const Vector<Scalar>& x) const {
    return x.cwiseMax(lower_).cwiseMin(upper_);
  }

  /// Largest violation: max over box bounds of the excess and over halfspaces
  /// of the Euclidean distance.
  Scalar violation(const Vector<Scalar>& x) const {
    Scalar worst = (x - clamp(x)).template lpNorm<Eigen::Infinity>();
    for (const auto& h : halfspaces_)
      worst = std::max(worst, (h.a.dot(x) - h.b) / h.a.norm());
    return std::max(worst, Scalar(0));
  }

  bool contains(const Vector<Scalar>& x, Scalar tol = Scalar(1e-9)) const {
    return violation(x) <= tol;
  }

  /// Euclidean projection. Closed form for a box or a single halfspace without
  /// bounds, a multiplier search for a box with one halfspace, Dykstra
  /// otherwise.
  Vector<Scalar> project(const Vector<Scalar>& x, int max_iters = 20000,
                         Scalar tol = Scalar(1e-13)) const {
    if (x.size() != dimension()) throw DimensionError("FeasibleSet::project: dimension mismatch");
    if (halfspaces_.empty()) return clamp(x);
    const bool no_box = !(lower_.array() > -inf()).any() && !(upper_.array() < inf()).any();
    if (no_box && halfspaces_.size() == 1)
      return project_halfspace(x, halfspaces_[0].a, halfspaces_[0].b);
    if (halfspaces_.size() == 1) return project_box_halfspace(x, halfspaces_[0]);

    const std::size_t sets = halfspaces_.size() + 1;
    std::vector<Vector<Scalar>> increments(sets, Vector<Scalar>::Zero(x.size()));
    Vector<Scalar> cur = x;
    for (int it = 0; it < max_iters; ++it) {
      const Vector<Scalar> before = cur;
      for (std::size_t k = 0; k < halfspaces_.size(); ++k) {
        const Vector<Scalar> y = cur + increments[k];
        cur = project_halfspace(y, halfspaces_[k].a, halfspaces_[k].b);
        increments[k] = y - cur;
      }
      const Vector<Scalar> y = cur + increments.back();
      cur = clamp(y);
      increments.back() = y - cur;
      if ((cur - before).squaredNorm() <= tol * tol && violation(cur) <= tol) break;
    }
    return cur;
  }

 private:
  static Scalar inf() { return std::numeric_limits<Scalar>::infinity(); }
  static Vector<Scalar> infinite_upper(Eigen::Index n) { return Vector<Scalar>::Constant(n, inf()); }

  // The projection is clamp(x - lambda a) for the smallest lambda >= 0 that
  // satisfies the halfspace; a . clamp(x - lambda a) is non-increasing in lambda.
  Vector<Scalar> project_box_halfspace(const Vector<Scalar>& x, const Halfspace& h) const {
    auto at = [&](Scalar lambda) { return clamp(x - lambda * h.a); };
    Vector<Scalar> p = at(Scalar(0));
    if (h.a.dot(p) <= h.b) return p;
    Scalar lo(0);
    Scalar hi(1);
    while (h.a.dot(at(hi)) > h.b) {
      lo = hi;
      hi *= Scalar(2);
      if (!std::isfinite(static_cast<double>(hi))) throw EmptySetError("FeasibleSet::project: set is empty");
    }
    for (int it = 0; it < 200 && hi - lo > std::numeric_limits<Scalar>::epsilon() * hi; ++it) {
      const Scalar mid = (lo + hi) / Scalar(2);
      if (h.a.dot(at(mid)) > h.b)
        lo = mid;
      else
        hi = mid;
    }
    return at(hi);
  }

  Vector<Scalar> lower_;
  Vector<Scalar> upper_;
  std::vector<Halfspace> halfspaces_;
};

struct SolveDiagnostics {
  int iterations = 0;
  double residual = 0.0;
  std::string method;
};

template <typename Scalar>
struct CompetitiveSolution {
  Vector<Scalar> x;
  Scalar gamma = Scalar(0);
  // f_i(x)/v_i - 1 (Minimize) or 1 - f_i(x)/v_i (Maximize); filled only when
  // evaluators are available.
  std::vector<Scalar> slacks;
  SolveDiagnostics diagnostics;
};

}  // namespace gammacomp
