#pragma once

// Competitive scalarization solvers.
//
// solve_caolf minimizes gamma subject to ||clip_i(x)|| <= gamma v_i / M_i for
// every metric and x in K. L2 instances go through bisection on gamma with a
// Dykstra feasibility check at each trial value, followed by a trust-region
// LP polish of the best point; L1 and Linf instances are exact linear
// programs. solve_approx adds the linearized constraints for
// concave metrics and the quadratic caps for convex metrics with Lipschitz
// gradient (L2 only).
//
// Every returned pair is certified: x is projected onto K and gamma is the
// smallest value for which that x satisfies the whole constraint system, so
// the result never depends on the inner loop's stopping tolerance for
// validity.

#include "gammacomp/core.hpp"
#include "gammacomp/feasibility.hpp"
#include "gammacomp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gammacomp {

struct SolveConfig {
  NormKind norm = NormKind::L2;
  double gamma_tolerance = 1e-6;
  double feasibility_tolerance = 1e-7;
  int max_projection_iters = 5000;
  std::optional<double> gamma_upper_init;

  void validate() const {
    if (!(gamma_tolerance > 0) || !(feasibility_tolerance > 0))
      throw std::invalid_argument("SolveConfig: tolerances must be positive");
    if (max_projection_iters < 1) throw std::invalid_argument("SolveConfig: max_projection_iters must be >= 1");
  }
};

namespace detail {

template <typename Scalar>
struct NormConstraint {
  const MetricRef<Scalar>* ref;
  Scalar M;
  NormKind norm;
  const std::vector<Monotonicity>* mono;
};

template <typename Scalar>
struct LinearConstraint {
  const MetricRef<Scalar>* ref;
  const Vector<Scalar>* grad;
};

template <typename Scalar>
struct QuadraticConstraint {
  const MetricRef<Scalar>* ref;
  const Vector<Scalar>* grad;
  Scalar L;
};

// The flattened constraint list of one problem; refers into the caller's refs.
template <typename Scalar>
struct ConstraintSystem {
  std::vector<NormConstraint<Scalar>> norms;
  std::vector<LinearConstraint<Scalar>> linears;
  std::vector<QuadraticConstraint<Scalar>> quadratics;

  /// Smallest gamma >= 0 for which x satisfies every constraint.
  Scalar required_gamma(const Vector<Scalar>& x) const {
    Scalar g(0);
    for (const auto& c : norms) {
      const Vector<Scalar> d = clip(x, ClipGeometry<Scalar>{c.ref->x_ref, *c.mono, c.ref->sense});
      g = std::max(g, c.M * norm_value(d, c.norm) / c.ref->v);
    }
    for (const auto& c : linears) g = std::max(g, c.grad->dot(x - c.ref->x_ref) / c.ref->v);
    for (const auto& c : quadratics) {
      const Vector<Scalar> d = x - c.ref->x_ref;
      g = std::max(g, (c.L * d.squaredNorm() + c.grad->dot(d)) / c.ref->v);
    }
    return g;
  }

  /// Value and gradient of each constraint's requirement on gamma at x. Norm
  /// constraints must be L2; they are differentiable wherever the clipped
  /// residual is non-zero, and contribute a zero gradient otherwise.
  void linearize(const Vector<Scalar>& x, std::vector<Scalar>& values, std::vector<Vector<Scalar>>& grads) const {
    values.clear();
    grads.clear();
    for (const auto& c : norms) {
      if (c.norm != NormKind::L2) throw std::logic_error("linearize: L2 norm constraints only");
      const Vector<Scalar> d = clip(x, ClipGeometry<Scalar>{c.ref->x_ref, *c.mono, c.ref->sense});
      const Scalar len = d.norm();
      const Scalar scale = c.M / c.ref->v;
      values.push_back(scale * len);
      Vector<Scalar> g = Vector<Scalar>::Zero(x.size());
      if (len > Scalar(0)) {
        for (Eigen::Index j = 0; j < x.size(); ++j) {
          const auto m = effective_monotonicity((*c.mono)[static_cast<std::size_t>(j)], c.ref->sense);
          g(j) = (m == Monotonicity::Decreasing ? -scale : scale) * d(j) / len;
        }
      }
      grads.push_back(std::move(g));
    }
    for (const auto& c : linears) {
      values.push_back(c.grad->dot(x - c.ref->x_ref) / c.ref->v);
      grads.push_back(*c.grad / c.ref->v);
    }
    for (const auto& c : quadratics) {
      const Vector<Scalar> d = x - c.ref->x_ref;
      values.push_back((c.L * d.squaredNorm() + c.grad->dot(d)) / c.ref->v);
      grads.push_back((Scalar(2) * c.L * d + *c.grad) / c.ref->v);
    }
  }

  /// Projectable sets of the gamma-subproblem, K last. Empty optional when a
  /// quadratic cap is empty at this gamma.
  std::optional<std::vector<ConvexSet<Scalar>>> sets_at(Scalar gamma, const FeasibleSet<Scalar>& K) const {
    std::vector<ConvexSet<Scalar>> out;
    for (const auto& c : norms)
      out.push_back(sets::ClippedBall<Scalar>{c.ref->x_ref, *c.mono, c.ref->sense, gamma * c.ref->v / c.M});
    for (const auto& c : linears) {
      if (!(c.grad->squaredNorm() > Scalar(0))) continue;  // 0 <= gamma v always holds
      out.push_back(sets::Halfspace<Scalar>{*c.grad, gamma * c.ref->v + c.grad->dot(c.ref->x_ref)});
    }
    for (const auto& c : quadratics) {
      try {
        auto ball = quadratic_cap_ball(c.ref->x_ref, *c.grad, c.L, gamma * c.ref->v);
        out.push_back(sets::Ball<Scalar>{std::move(ball.center), ball.radius});
      } catch (const EmptySetError&) {
        return std::nullopt;
      }
    }
    for (const auto& h : K.halfspaces()) out.push_back(sets::Halfspace<Scalar>{h.a, h.b});
    if ((K.lower().array() > -std::numeric_limits<Scalar>::infinity()).any() ||
        (K.upper().array() < std::numeric_limits<Scalar>::infinity()).any())
      out.push_back(sets::Box<Scalar>{K.lower(), K.upper()});
    return out;
  }
};

template <typename Scalar>
void check_problem(const std::vector<MetricRef<Scalar>>& refs, const FeasibleSet<Scalar>& K) {
  if (refs.empty()) throw std::invalid_argument("no metric references");
  for (const auto& r : refs) {
    r.validate();
    if (r.dimension() != K.dimension())
      throw DimensionError("metric '" + r.id + "': dimension differs from the feasible set");
  }
}

template <typename Scalar>
ConstraintSystem<Scalar> caolf_system(const std::vector<MetricRef<Scalar>>& refs, NormKind norm) {
  ConstraintSystem<Scalar> sys;
  for (const auto& r : refs) {
    bool found = false;
    for (const auto& model : r.models) {
      if (const auto* m = std::get_if<LipschitzNorm<Scalar>>(&model); m && m->norm == norm) {
        sys.norms.push_back({&r, m->M, m->norm, &m->mono});
        found = true;
      }
    }
    if (!found)
      throw std::invalid_argument("metric '" + r.id + "' has no Lipschitz model for norm " + to_string(norm));
  }
  return sys;
}

template <typename Scalar>
ConstraintSystem<Scalar> approx_system(const std::vector<MetricRef<Scalar>>& refs) {
  ConstraintSystem<Scalar> sys;
  for (const auto& r : refs) {
    for (const auto& model : r.models) {
      std::visit(
          [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LipschitzNorm<Scalar>>) {
              if (m.norm != NormKind::L2)
                throw std::invalid_argument("metric '" + r.id + "': APPROX supports L2 Lipschitz models only");
              sys.norms.push_back({&r, m.M, m.norm, &m.mono});
            } else if constexpr (std::is_same_v<T, ConcaveLinear<Scalar>>) {
              sys.linears.push_back({&r, &m.grad});
            } else {
              sys.quadratics.push_back({&r, &m.grad, m.L});
            }
          },
          model);
    }
  }
  return sys;
}

/// Centroid of the reference points, projected onto K.
template <typename Scalar>
Vector<Scalar> start_point(const std::vector<MetricRef<Scalar>>& refs, const FeasibleSet<Scalar>& K) {
  Vector<Scalar> c = Vector<Scalar>::Zero(K.dimension());
  for (const auto& r : refs) c += r.x_ref;
  c /= static_cast<Scalar>(refs.size());
  return K.project(c);
}

// Trust-region sequential linear programming on required_gamma over K,
// started from the bisection result. Dykstra slows down sharply once the
// gamma-subproblem's feasible set gets thin, so bisection alone stalls a few
// digits short of the optimum; this finishes the job. Only certified
// decreases are accepted.
template <typename Scalar>
int polish(const ConstraintSystem<Scalar>& sys, const FeasibleSet<Scalar>& K, Vector<Scalar>& x, Scalar& gamma) {
  const Eigen::Index n = x.size();
  const Scalar scale = Scalar(1) + x.template lpNorm<Eigen::Infinity>();
  Scalar radius = Scalar(0.1) * scale;
  const Scalar min_radius = Scalar(1e-13) * scale;
  const Scalar max_radius = Scalar(1e3) * scale;
  std::vector<Scalar> values;
  std::vector<Vector<Scalar>> grads;
  int iterations = 0;
  for (int step = 0; step < 300 && gamma > Scalar(0) && radius > min_radius; ++step) {
    sys.linearize(x, values, grads);
    const auto rows = static_cast<Eigen::Index>(values.size() + K.halfspaces().size());
    LpProblem<Scalar> lp(n + 1);
    lp.c(n) = Scalar(1);
    lp.lower.head(n) = (K.lower() - x).cwiseMax(-radius);
    lp.upper.head(n) = (K.upper() - x).cwiseMin(radius);
    lp.A_ub = Matrix<Scalar>::Zero(rows, n + 1);
    lp.b_ub = Vector<Scalar>::Zero(rows);
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < values.size(); ++i, ++row) {
      lp.A_ub.block(row, 0, 1, n) = grads[i].transpose();
      lp.A_ub(row, n) = Scalar(-1);
      lp.b_ub(row) = -values[i];
    }
    for (const auto& h : K.halfspaces()) {
      lp.A_ub.block(row, 0, 1, n) = h.a.transpose();
      lp.b_ub(row) = std::max(Scalar(0), h.b - h.a.dot(x));
      ++row;
    }
    const auto res = solve_lp(lp);
    iterations += res.iterations;
    if (!res.optimal()) break;
    const Scalar predicted = gamma - res.z(n);
    if (predicted <= Scalar(1e-14) * (Scalar(1) + gamma)) break;
    const Vector<Scalar> cand = K.project(Vector<Scalar>(x + res.z.head(n)));
    const Scalar g = sys.required_gamma(cand);
    const Scalar ratio = (gamma - g) / predicted;
    if (g < gamma) {
      x = cand;
      gamma = g;
    }
    if (ratio > Scalar(0.75))
      radius = std::min(max_radius, radius * Scalar(2));
    else if (ratio < Scalar(0.25))
      radius *= Scalar(0.25);
  }
  return iterations;
}

template <typename Scalar>
CompetitiveSolution<Scalar> bisect(const ConstraintSystem<Scalar>& sys, const std::vector<MetricRef<Scalar>>& refs,
                                   const FeasibleSet<Scalar>& K, const SolveConfig& cfg) {
  CompetitiveSolution<Scalar> sol;
  sol.diagnostics.method = "bisection-dykstra";
  const Vector<Scalar> x0 = start_point(refs, K);
  Scalar best = sys.required_gamma(x0);
  Vector<Scalar> best_x = x0;
  if (!std::isfinite(static_cast<double>(best)))
    throw SolverError("bisection upper bound not found");

  const FeasibilityOptions opts{cfg.feasibility_tolerance, cfg.max_projection_iters};
  const Scalar tol(cfg.gamma_tolerance);
  Scalar lo(0);
  Scalar hi = best;
  Vector<Scalar> warm = x0;
  int iterations = 0;

  // Returns true when the gamma-subproblem was found feasible.
  auto probe = [&](Scalar gamma) {
    const auto sets = sys.sets_at(gamma, K);
    if (!sets) return false;
    const auto res = feasibility_check(*sets, warm, opts);
    iterations += res.iterations;
    const Vector<Scalar> cand = K.project(res.x);
    const Scalar g = sys.required_gamma(cand);
    if (g < best) {
      best = g;
      best_x = cand;
    }
    if (res.feasible()) warm = res.x;
    return res.feasible();
  };

  if (cfg.gamma_upper_init && Scalar(*cfg.gamma_upper_init) < hi && Scalar(*cfg.gamma_upper_init) >= lo) {
    const Scalar g0(*cfg.gamma_upper_init);
    if (probe(g0))
      hi = g0;
    else
      lo = g0;
    hi = std::min(hi, best);
  }

  if (best > Scalar(0) && probe(Scalar(0))) hi = Scalar(0);
  hi = std::min(hi, best);

  while (best > Scalar(0) && hi - lo > tol) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (probe(mid))
      hi = mid;
    else
      lo = mid;
    hi = std::min(hi, best);
  }

  if (best > Scalar(0)) {
    iterations += polish(sys, K, best_x, best);
    sol.diagnostics.method = "bisection-dykstra+slp";
  }

  sol.x = best_x;
  sol.gamma = best;
  sol.diagnostics.iterations = iterations;
  sol.diagnostics.residual = static_cast<double>(K.violation(best_x));
  return sol;
}

// Epigraph LP for L1 and Linf, generated lazily over (metric, coordinate)
// pairs. Linf: a pair contributes
//   +-(x_j - ref_j) <= gamma v / M
// for the signs its monotonicity allows. L1: a pair gets an auxiliary
// z >= +-(x_j - ref_j), z >= 0, and each metric has sum_j z_j <= gamma v / M
// over its active pairs. Pairs are added where the LP optimum violates a
// metric: the argmax coordinate for Linf, every non-zero clip coordinate not
// yet modelled for L1. When nothing is added the optimum is exact.
template <typename Scalar>
CompetitiveSolution<Scalar> epigraph_lp(const ConstraintSystem<Scalar>& sys, const std::vector<MetricRef<Scalar>>& refs,
                                        const FeasibleSet<Scalar>& K, NormKind norm) {
  const Eigen::Index n = K.dimension();
  const auto nc = sys.norms.size();
  std::vector<std::vector<Monotonicity>> eff(nc);
  for (std::size_t c = 0; c < nc; ++c)
    for (Eigen::Index j = 0; j < n; ++j)
      eff[c].push_back(effective_monotonicity((*sys.norms[c].mono)[static_cast<std::size_t>(j)], sys.norms[c].ref->sense));
  auto signs = [&](std::size_t c, Eigen::Index j) {
    std::vector<Scalar> out;
    const auto m = eff[c][static_cast<std::size_t>(j)];
    if (m != Monotonicity::Decreasing) out.push_back(Scalar(1));
    if (m != Monotonicity::Increasing) out.push_back(Scalar(-1));
    return out;
  };
  auto radius = [&](std::size_t c) { return sys.norms[c].ref->v / sys.norms[c].M; };

  std::set<std::pair<std::size_t, Eigen::Index>> active;
  Vector<Scalar> x = start_point(refs, K);
  Scalar lp_gamma(0);
  int iterations = 0;
  for (int round = 0; round < 100000; ++round) {
    std::size_t added = 0;
    for (std::size_t c = 0; c < nc; ++c) {
      const auto& con = sys.norms[c];
      const Vector<Scalar> d = clip(x, ClipGeometry<Scalar>{con.ref->x_ref, *con.mono, con.ref->sense});
      const Scalar r = radius(c);
      if (norm_value(d, norm) <= r * lp_gamma * (Scalar(1) + Scalar(1e-12)) + Scalar(1e-12)) continue;
      if (norm == NormKind::L1) {
        for (Eigen::Index j = 0; j < n; ++j)
          if (d(j) != Scalar(0)) added += active.emplace(c, j).second ? 1 : 0;
      } else {
        Eigen::Index j = 0;
        d.cwiseAbs().maxCoeff(&j);
        added += active.emplace(c, j).second ? 1 : 0;
      }
    }
    if (added == 0) break;

    // Column layout: x, gamma, then one z per active pair for L1.
    const Eigen::Index nz = norm == NormKind::L1 ? static_cast<Eigen::Index>(active.size()) : 0;
    std::vector<char> has_sum(nc, 0);
    Eigen::Index rows = static_cast<Eigen::Index>(K.halfspaces().size());
    for (const auto& [c, j] : active) {
      rows += static_cast<Eigen::Index>(signs(c, j).size());
      has_sum[c] = 1;
    }
    if (norm == NormKind::L1)
      for (char h : has_sum) rows += h;

    LpProblem<Scalar> lp(n + 1 + nz);
    lp.c(n) = Scalar(1);
    lp.lower.head(n) = K.lower();
    lp.upper.head(n) = K.upper();
    lp.lower.tail(nz).setZero();
    lp.A_ub = Matrix<Scalar>::Zero(rows, n + 1 + nz);
    lp.b_ub = Vector<Scalar>::Zero(rows);
    Eigen::Index row = 0;
    std::vector<Eigen::Index> sum_row(nc, -1);
    if (norm == NormKind::L1) {
      for (std::size_t c = 0; c < nc; ++c) {
        if (!has_sum[c]) continue;
        sum_row[c] = row;
        lp.A_ub(row, n) = -radius(c);
        ++row;
      }
    }
    Eigen::Index z = n + 1;
    for (const auto& [c, j] : active) {
      const Scalar ref = sys.norms[c].ref->x_ref(j);
      for (Scalar sg : signs(c, j)) {
        lp.A_ub(row, j) = sg;
        lp.b_ub(row) = sg * ref;
        if (norm == NormKind::L1)
          lp.A_ub(row, z) = Scalar(-1);
        else
          lp.A_ub(row, n) = -radius(c);
        ++row;
      }
      if (norm == NormKind::L1) {
        lp.A_ub(sum_row[c], z) = Scalar(1);
        ++z;
      }
    }
    for (const auto& h : K.halfspaces()) {
      lp.A_ub.block(row, 0, 1, n) = h.a.transpose();
      lp.b_ub(row) = h.b;
      ++row;
    }
    const auto res = solve_lp(lp);
    iterations += res.iterations;
    if (res.status == LpStatus::Infeasible) throw SolverError("epigraph LP infeasible (inconsistent instance)");
    if (!res.optimal())
      throw SolverError(std::string("epigraph LP failed: ") + to_string(res.status) + " " + res.message);
    x = res.z.head(n);
    lp_gamma = res.z(n);
  }

  CompetitiveSolution<Scalar> sol;
  sol.x = K.project(x);
  sol.gamma = sys.required_gamma(sol.x);
  sol.diagnostics.method = "epigraph-lp";
  sol.diagnostics.iterations = iterations;
  sol.diagnostics.residual = static_cast<double>(K.violation(sol.x));
  return sol;
}

}  // namespace detail

/// Minimal gamma with ||clip_i(x)|| <= gamma v_i / M_i for all metrics, x in K.
/// Only Lipschitz models whose norm equals cfg.norm take part.
template <typename Scalar>
CompetitiveSolution<Scalar> solve_caolf(const std::vector<MetricRef<Scalar>>& refs, const FeasibleSet<Scalar>& K,
                                        const SolveConfig& cfg = {}) {
  cfg.validate();
  detail::check_problem(refs, K);
  const auto sys = detail::caolf_system(refs, cfg.norm);
  if (cfg.norm == NormKind::L2) return detail::bisect(sys, refs, K, cfg);
  return detail::epigraph_lp(sys, refs, K, cfg.norm);
}

/// CAoLF with mixed models: L2 Lipschitz, concave (linearized) and convex
/// with L-Lipschitz gradient (quadratic cap). Every model of every metric is a
/// constraint.
template <typename Scalar>
CompetitiveSolution<Scalar> solve_approx(const std::vector<MetricRef<Scalar>>& refs, const FeasibleSet<Scalar>& K,
                                         const SolveConfig& cfg = {}) {
  cfg.validate();
  detail::check_problem(refs, K);
  const auto sys = detail::approx_system(refs);
  return detail::bisect(sys, refs, K, cfg);
}

/// Smallest gamma at which x satisfies the CAoLF constraints of `refs` (or all
/// APPROX constraints when norm is empty).
template <typename Scalar>
Scalar required_gamma(const std::vector<MetricRef<Scalar>>& refs, const Vector<Scalar>& x,
                      std::optional<NormKind> norm = std::nullopt) {
  const auto sys = norm ? detail::caolf_system(refs, *norm) : detail::approx_system(refs);
  return sys.required_gamma(x);
}

/// Re-solves CAoLF with every Lipschitz constant scaled by its kappa.
template <typename Scalar>
CompetitiveSolution<Scalar> stability_probe(std::vector<MetricRef<Scalar>> refs, const FeasibleSet<Scalar>& K,
                                            const SolveConfig& cfg, const std::vector<Scalar>& kappas) {
  if (kappas.size() != refs.size()) throw DimensionError("stability_probe: one kappa per metric required");
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (!(kappas[i] > Scalar(0))) throw std::invalid_argument("stability_probe: kappas must be positive");
    for (auto& model : refs[i].models)
      if (auto* m = std::get_if<LipschitzNorm<Scalar>>(&model)) m->M *= kappas[i];
  }
  return solve_caolf(refs, K, cfg);
}

/// A metric with a callable evaluator, for verification against true values.
template <typename Scalar>
struct MetricEvaluator {
  std::function<Scalar(const Vector<Scalar>&)> f;
  Scalar v;
  Sense sense = Sense::Minimize;
};

template <typename Scalar>
struct VerifyResult {
  bool competitive = true;
  // gamma - (f/v - 1) for Minimize, gamma - (1 - f/v) for Maximize;
  // non-negative exactly when the metric's bound holds.
  std::vector<Scalar> margins;
};

template <typename Scalar>
Scalar degradation(Scalar f, Scalar v, Sense sense) {
  return sense == Sense::Minimize ? f / v - Scalar(1) : Scalar(1) - f / v;
}

/// Checks f_i(x) <= (1+gamma) v_i (Minimize) or f_i(x) >= (1-gamma) v_i
/// (Maximize) for every metric, with 1e-9 v_i slack.
template <typename Scalar>
VerifyResult<Scalar> verify_competitiveness(const Vector<Scalar>& x, Scalar gamma,
                                            const std::vector<MetricEvaluator<Scalar>>& metrics) {
  VerifyResult<Scalar> out;
  out.margins.reserve(metrics.size());
  for (const auto& m : metrics) {
    const Scalar margin = gamma - degradation(m.f(x), m.v, m.sense);
    out.margins.push_back(margin);
    if (!(margin >= Scalar(-1e-9))) out.competitive = false;
  }
  return out;
}

template <typename Scalar>
void evaluate_slacks(CompetitiveSolution<Scalar>& sol, const std::vector<MetricEvaluator<Scalar>>& metrics) {
  sol.slacks.clear();
  for (const auto& m : metrics) sol.slacks.push_back(degradation(m.f(sol.x), m.v, m.sense));
}

template <typename Scalar>
struct GridOptimum {
  Scalar gamma;
  Vector<Scalar> x;
};

/// Brute-force competitive scalarization: minimizes max_i degradation_i over
/// a uniform grid of `resolution` points per axis of K's box (dimension <= 3),
/// skipping grid points outside K's halfspaces. Test oracle.
template <typename Scalar>
GridOptimum<Scalar> grid_oracle_swcm(const std::vector<MetricEvaluator<Scalar>>& metrics,
                                     const FeasibleSet<Scalar>& K, int resolution) {
  const Eigen::Index n = K.dimension();
  if (n < 1 || n > 3) throw DimensionError("grid oracle: dimension must be 1, 2 or 3");
  if (!K.bounded()) throw std::invalid_argument("grid oracle: feasible set needs finite box bounds");
  if (resolution < 2) throw std::invalid_argument("grid oracle: resolution must be >= 2");
  if (metrics.empty()) throw std::invalid_argument("grid oracle: no metrics");

  GridOptimum<Scalar> best{std::numeric_limits<Scalar>::infinity(), Vector<Scalar>()};
  Vector<Scalar> x(n);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const Vector<Scalar> step = (K.upper() - K.lower()) / static_cast<Scalar>(resolution - 1);
  while (true) {
    for (Eigen::Index j = 0; j < n; ++j) x(j) = K.lower()(j) + step(j) * idx[static_cast<std::size_t>(j)];
    bool inside = true;
    for (const auto& h : K.halfspaces())
      if (h.a.dot(x) - h.b > Scalar(1e-12)) inside = false;
    if (inside) {
      Scalar g(0);
      for (const auto& m : metrics) g = std::max(g, degradation(m.f(x), m.v, m.sense));
      if (g < best.gamma) best = {g, x};
    }
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == resolution) idx[d++] = 0;
    if (d == idx.size()) break;
  }
  if (best.x.size() == 0) throw EmptySetError("grid oracle: no grid point inside the feasible set");
  return best;
}

}  // namespace gammacomp
