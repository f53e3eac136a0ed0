#pragma once

// Dense two-phase simplex for desk-scale linear programs.
//
//   minimize    c^T z
//   subject to  A_ub z <= b_ub
//               A_eq z  = b_eq
//               lower <= z <= upper      (entries may be infinite)
//
// The problem is brought to standard form (shifted / split variables, slack
// columns, sign-normalized rows, artificials where no slack can start the
// basis) and solved on a dense tableau. The tableau is rebuilt from the
// original columns through an LU factorization of the basis every
// `refactor_interval` pivots so rounding does not accumulate.

#include "gammacomp/core.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gammacomp {

template <typename Scalar>
struct LpProblem {
  Vector<Scalar> c;
  Matrix<Scalar> A_ub;
  Vector<Scalar> b_ub;
  Matrix<Scalar> A_eq;
  Vector<Scalar> b_eq;
  Vector<Scalar> lower;  // -inf allowed
  Vector<Scalar> upper;  // +inf allowed

  explicit LpProblem(Eigen::Index num_vars = 0)
      : c(Vector<Scalar>::Zero(num_vars)),
        A_ub(0, num_vars),
        b_ub(0),
        A_eq(0, num_vars),
        b_eq(0),
        lower(Vector<Scalar>::Zero(num_vars)),
        upper(Vector<Scalar>::Constant(num_vars, std::numeric_limits<Scalar>::infinity())) {}

  Eigen::Index num_vars() const { return c.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalStall };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericalStall: return "numerical-stall";
  }
  return "?";
}

template <typename Scalar>
struct LpSolution {
  LpStatus status = LpStatus::NumericalStall;
  Vector<Scalar> z;
  Scalar objective = Scalar(0);
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct LpOptions {
  int max_iters = 200000;
  int refactor_interval = 50;
  // Consecutive degenerate pivots before pricing falls back to Bland's rule.
  int degenerate_switch = 10;
  double pivot_tol = 1e-9;
  double cost_tol = 1e-9;
  double feasibility_tol = 1e-7;
  Eigen::Index max_dimension = 20000;
};

namespace detail {

template <typename Scalar>
class DenseSimplex {
 public:
  DenseSimplex(const LpProblem<Scalar>& p, const LpOptions& opts) : p_(p), opts_(opts) {}

  LpSolution<Scalar> run() {
    validate();
    build_standard_form();

    LpSolution<Scalar> sol;
    // Phase 1: drive the artificials to zero.
    if (num_art_ > 0) {
      Vector<Scalar> phase1 = Vector<Scalar>::Zero(total_cols_);
      phase1.tail(num_art_).setOnes();
      set_costs(phase1);
      const auto st = iterate(sol.iterations);
      if (st != Outcome::Optimal) {
        sol.status = LpStatus::NumericalStall;
        sol.message = "phase 1 did not terminate";
        return sol;
      }
      const Scalar infeas = -T_(m_, total_cols_);
      if (infeas > Scalar(opts_.feasibility_tol) * (Scalar(1) + b_s_.norm())) {
        sol.status = LpStatus::Infeasible;
        sol.message = "phase 1 optimum " + std::to_string(static_cast<double>(infeas));
        return sol;
      }
      drive_out_artificials(sol.iterations);
    }

    // Phase 2.
    set_costs(cost_s_);
    const auto st = iterate(sol.iterations);
    if (st == Outcome::Unbounded) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    if (st != Outcome::Optimal) {
      sol.status = LpStatus::NumericalStall;
      sol.message = "iteration limit reached";
      return sol;
    }

    refactor();
    sol.z = recover();
    sol.objective = p_.c.dot(sol.z);
    const Scalar resid = primal_residual(sol.z);
    const Scalar scale = Scalar(1) + rhs_norm();
    if (resid > Scalar(opts_.feasibility_tol) * scale) {
      sol.status = LpStatus::NumericalStall;
      sol.message = "primal residual " + std::to_string(static_cast<double>(resid));
      return sol;
    }
    sol.status = LpStatus::Optimal;
    return sol;
  }

 private:
  enum class Outcome { Optimal, Unbounded, Limit };

  // z_j = offset + (col_plus) - (col_minus); flipped variables use sign -1.
  struct VarMap {
    Scalar offset;
    Scalar sign;
    Eigen::Index plus;
    Eigen::Index minus;  // -1 when absent
  };

  static Scalar inf() { return std::numeric_limits<Scalar>::infinity(); }

  void validate() const {
    const auto n = p_.num_vars();
    if (n > opts_.max_dimension || p_.A_ub.rows() + p_.A_eq.rows() > opts_.max_dimension)
      throw std::length_error("solve_lp: problem exceeds the dense kernel's dimension limit");
    if (p_.A_ub.cols() != n || p_.A_eq.cols() != n || p_.A_ub.rows() != p_.b_ub.size() ||
        p_.A_eq.rows() != p_.b_eq.size() || p_.lower.size() != n || p_.upper.size() != n)
      throw DimensionError("solve_lp: inconsistent problem dimensions");
    if (!p_.c.allFinite()) throw std::invalid_argument("solve_lp: non-finite objective");
    for (Eigen::Index j = 0; j < n; ++j)
      if (p_.lower(j) > p_.upper(j) || p_.lower(j) == inf() || p_.upper(j) == -inf())
        throw std::invalid_argument("solve_lp: invalid variable bounds");
  }

  void build_standard_form() {
    const auto n = p_.num_vars();
    Eigen::Index cols = 0;
    std::vector<Eigen::Index> bounded;  // variables needing an upper-bound row
    map_.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool lo = std::isfinite(static_cast<double>(p_.lower(j)));
      const bool hi = std::isfinite(static_cast<double>(p_.upper(j)));
      auto& v = map_[static_cast<std::size_t>(j)];
      if (lo) {
        v = {p_.lower(j), Scalar(1), cols++, -1};
        if (hi) bounded.push_back(j);
      } else if (hi) {
        v = {p_.upper(j), Scalar(-1), cols++, -1};
      } else {
        v = {Scalar(0), Scalar(1), cols, cols + 1};
        cols += 2;
      }
    }
    const Eigen::Index structural = cols;
    const Eigen::Index n_ub = p_.A_ub.rows();
    const Eigen::Index n_eq = p_.A_eq.rows();
    const auto n_bd = static_cast<Eigen::Index>(bounded.size());
    m_ = n_ub + n_bd + n_eq;
    const Eigen::Index slacks = n_ub + n_bd;
    const Eigen::Index n_std = structural + slacks;

    Matrix<Scalar> A = Matrix<Scalar>::Zero(m_, n_std);
    Vector<Scalar> b(m_);
    cost_s_ = Vector<Scalar>::Zero(n_std);

    auto place_row = [&](Eigen::Index row, const auto& coeffs, Scalar rhs) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const Scalar a = coeffs(j);
        if (a == Scalar(0)) continue;
        const auto& v = map_[static_cast<std::size_t>(j)];
        rhs -= a * v.offset;
        A(row, v.plus) += a * v.sign;
        if (v.minus >= 0) A(row, v.minus) -= a;
      }
      b(row) = rhs;
    };
    for (Eigen::Index i = 0; i < n_ub; ++i) {
      place_row(i, p_.A_ub.row(i), p_.b_ub(i));
      A(i, structural + i) = Scalar(1);
    }
    for (Eigen::Index k = 0; k < n_bd; ++k) {
      const Eigen::Index row = n_ub + k;
      const Eigen::Index j = bounded[static_cast<std::size_t>(k)];
      A(row, map_[static_cast<std::size_t>(j)].plus) = Scalar(1);
      A(row, structural + row) = Scalar(1);
      b(row) = p_.upper(j) - p_.lower(j);
    }
    for (Eigen::Index i = 0; i < n_eq; ++i) place_row(n_ub + n_bd + i, p_.A_eq.row(i), p_.b_eq(i));

    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& v = map_[static_cast<std::size_t>(j)];
      cost_s_(v.plus) += p_.c(j) * v.sign;
      if (v.minus >= 0) cost_s_(v.minus) -= p_.c(j);
    }

    // Non-negative right-hand sides; a row keeps its slack as the starting
    // basic variable only if the slack coefficient stays +1.
    std::vector<Eigen::Index> needs_art;
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (b(i) < Scalar(0)) {
        A.row(i) *= Scalar(-1);
        b(i) = -b(i);
      }
      const bool has_slack = i < slacks && A(i, structural + i) == Scalar(1);
      if (has_slack)
        basis_[static_cast<std::size_t>(i)] = structural + i;
      else
        needs_art.push_back(i);
    }
    num_art_ = static_cast<Eigen::Index>(needs_art.size());
    n_std_ = n_std;
    total_cols_ = n_std + num_art_;
    full_ = Matrix<Scalar>::Zero(m_, total_cols_);
    full_.leftCols(n_std) = A;
    for (Eigen::Index k = 0; k < num_art_; ++k) {
      const Eigen::Index row = needs_art[static_cast<std::size_t>(k)];
      full_(row, n_std + k) = Scalar(1);
      basis_[static_cast<std::size_t>(row)] = n_std + k;
    }
    b_s_ = b;
    cost_s_.conservativeResize(total_cols_);
    cost_s_.tail(num_art_).setZero();

    T_ = Matrix<Scalar>::Zero(m_ + 1, total_cols_ + 1);
    T_.topLeftCorner(m_, total_cols_) = full_;
    T_.col(total_cols_).head(m_) = b_s_;
  }

  bool is_artificial(Eigen::Index col) const { return col >= n_std_; }

  void set_costs(const Vector<Scalar>& costs) {
    costs_ = costs;
    recompute_cost_row();
  }

  void recompute_cost_row() {
    Vector<Scalar> cb(m_);
    for (Eigen::Index i = 0; i < m_; ++i) cb(i) = costs_(basis_[static_cast<std::size_t>(i)]);
    T_.row(m_).head(total_cols_) =
        costs_.transpose() - cb.transpose() * T_.topLeftCorner(m_, total_cols_);
    T_(m_, total_cols_) = -cb.dot(T_.col(total_cols_).head(m_));
  }

  // Basis columns hold a handful of non-zeros (slacks, artificials, sparse
  // constraint rows), so a sparse LU is far cheaper than a dense one at the
  // row counts the epigraph LPs reach. Dense LU stays as the fallback.
  void refactor() {
    if (m_ == 0) return;
    std::vector<Eigen::Triplet<Scalar>> nz;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index col = basis_[static_cast<std::size_t>(i)];
      for (Eigen::Index r = 0; r < m_; ++r)
        if (full_(r, col) != Scalar(0)) nz.emplace_back(r, i, full_(r, col));
    }
    Eigen::SparseMatrix<Scalar> B(m_, m_);
    B.setFromTriplets(nz.begin(), nz.end());
    B.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<Scalar>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(B);
    bool ok = lu.info() == Eigen::Success;
    if (ok) {
      // Solve into plain matrices: the supernodal solve assumes a contiguous
      // destination and writes garbage into a strided block.
      const Matrix<Scalar> X = lu.solve(full_);
      const Vector<Scalar> xb = lu.solve(b_s_);
      ok = lu.info() == Eigen::Success && X.allFinite() && xb.allFinite();
      if (ok) {
        T_.topLeftCorner(m_, total_cols_) = X;
        T_.col(total_cols_).head(m_) = xb;
      }
    }
    if (!ok) {
      Matrix<Scalar> Bd(m_, m_);
      for (Eigen::Index i = 0; i < m_; ++i) Bd.col(i) = full_.col(basis_[static_cast<std::size_t>(i)]);
      Eigen::PartialPivLU<Matrix<Scalar>> dense(Bd);
      T_.topLeftCorner(m_, total_cols_) = dense.solve(full_);
      T_.col(total_cols_).head(m_) = dense.solve(b_s_);
    }
    if (!costs_.size()) return;
    recompute_cost_row();
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    const Scalar piv = T_(r, q);
    T_.row(r) /= piv;
    Vector<Scalar> col = T_.col(q);
    col(r) = Scalar(0);
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> prow = T_.row(r);
    for (Eigen::Index j = 0; j < T_.cols(); ++j)
      if (prow(j) != Scalar(0)) T_.col(j).noalias() -= prow(j) * col;
    T_.col(q).setZero();
    T_(r, q) = Scalar(1);
    basis_[static_cast<std::size_t>(r)] = q;
    if (++since_refactor_ >= opts_.refactor_interval) {
      refactor();
      since_refactor_ = 0;
    }
  }

  Outcome iterate(int& iterations) {
    int degenerate_run = 0;
    const Scalar cost_tol(opts_.cost_tol);
    const Scalar piv_tol(opts_.pivot_tol);
    while (true) {
      if (iterations >= opts_.max_iters) return Outcome::Limit;
      const bool bland = degenerate_run >= opts_.degenerate_switch;

      Eigen::Index q = -1;
      Scalar best = -cost_tol;
      for (Eigen::Index j = 0; j < total_cols_; ++j) {
        if (is_artificial(j)) continue;
        const Scalar d = T_(m_, j);
        if (d < best) {
          q = j;
          if (bland) break;
          best = d;
        }
      }
      if (q < 0) return Outcome::Optimal;

      Eigen::Index r = -1;
      Scalar best_ratio = inf();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const Scalar a = T_(i, q);
        if (a <= piv_tol) continue;
        const Scalar ratio = std::max(T_(i, total_cols_), Scalar(0)) / a;
        const Scalar eps = Scalar(1e-12) * (Scalar(1) + std::abs(best_ratio));
        if (r < 0 || ratio < best_ratio - eps) {
          r = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + eps &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(r)]) {
          r = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
      if (r < 0) return Outcome::Unbounded;

      degenerate_run = best_ratio <= Scalar(1e-12) ? degenerate_run + 1 : 0;
      pivot(r, q);
      ++iterations;
    }
  }

  void drive_out_artificials(int& iterations) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      Eigen::Index q = -1;
      Scalar best(opts_.pivot_tol);
      for (Eigen::Index j = 0; j < n_std_; ++j) {
        if (std::abs(T_(i, j)) > best) {
          best = std::abs(T_(i, j));
          q = j;
        }
      }
      // No candidate: the row is redundant and the artificial stays at zero.
      if (q >= 0) {
        pivot(i, q);
        ++iterations;
      }
    }
  }

  Vector<Scalar> recover() const {
    Vector<Scalar> xs = Vector<Scalar>::Zero(total_cols_);
    for (Eigen::Index i = 0; i < m_; ++i)
      xs(basis_[static_cast<std::size_t>(i)]) = std::max(T_(i, total_cols_), Scalar(0));
    Vector<Scalar> z(p_.num_vars());
    for (Eigen::Index j = 0; j < p_.num_vars(); ++j) {
      const auto& v = map_[static_cast<std::size_t>(j)];
      Scalar val = v.offset + v.sign * xs(v.plus);
      if (v.minus >= 0) val -= xs(v.minus);
      z(j) = val;
    }
    return z;
  }

  Scalar rhs_norm() const {
    Scalar s = p_.b_ub.squaredNorm() + p_.b_eq.squaredNorm();
    return std::sqrt(s);
  }

  Scalar primal_residual(const Vector<Scalar>& z) const {
    Scalar worst(0);
    if (p_.A_ub.rows() > 0)
      worst = std::max(worst, (p_.A_ub * z - p_.b_ub).cwiseMax(Scalar(0)).maxCoeff());
    if (p_.A_eq.rows() > 0)
      worst = std::max(worst, (p_.A_eq * z - p_.b_eq).cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      worst = std::max(worst, p_.lower(j) - z(j));
      worst = std::max(worst, z(j) - p_.upper(j));
    }
    return worst;
  }

  const LpProblem<Scalar>& p_;
  LpOptions opts_;
  std::vector<VarMap> map_;
  Eigen::Index m_ = 0;
  Eigen::Index n_std_ = 0;
  Eigen::Index num_art_ = 0;
  Eigen::Index total_cols_ = 0;
  Matrix<Scalar> full_;
  Vector<Scalar> b_s_;
  Vector<Scalar> cost_s_;
  Vector<Scalar> costs_;
  Matrix<Scalar> T_;  // rows 0..m-1: B^-1 [A | b]; row m: reduced costs | -objective
  std::vector<Eigen::Index> basis_;
  int since_refactor_ = 0;
};

}  // namespace detail

template <typename Scalar>
LpSolution<Scalar> solve_lp(const LpProblem<Scalar>& problem, const LpOptions& opts = {}) {
  return detail::DenseSimplex<Scalar>(problem, opts).run();
}

}  // namespace gammacomp
