#include "softrec/simplex.hpp"

#include <cmath>
#include <limits>

namespace softrec {
namespace {

// Tableau layout: columns [0, n) original variables, [n, n+m) artificials,
// column n+m the rhs. Row m is the phase objective (reduced costs, negated value).
struct Tableau {
  RealMat t;              // (m+1) x (n+m+1)
  std::vector<int> basis;  // basic column per row
  int m, n;

  double& rhs(int i) { return t(i, n + m); }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i <= m; ++i) {
      if (i == row) continue;
      const double factor = t(i, col);
      if (factor != 0.0) t.row(i) -= factor * t.row(row);
    }
    basis[row] = col;
  }
};

// Bland's rule: entering = lowest-index column with negative reduced cost,
// leaving = lowest-index basic variable among the ratio-test ties. Finite.
LpStatus run_phase(Tableau& tab, bool allow_artificial_entering, double tol, int max_iter,
                   int* iterations) {
  const int total_cols = tab.n + tab.m;
  for (int iter = 0; iter < max_iter; ++iter) {
    int entering = -1;
    const int scan_limit = allow_artificial_entering ? total_cols : tab.n;
    for (int j = 0; j < scan_limit; ++j) {
      if (tab.t(tab.m, j) < -tol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) {
      *iterations += iter;
      return LpStatus::Optimal;
    }

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tab.m; ++i) {
      const double aij = tab.t(i, entering);
      if (aij > tol) {
        const double ratio = tab.rhs(i) / aij;
        if (ratio < best_ratio - 1e-15 ||
            (ratio < best_ratio + 1e-15 && (leaving < 0 || tab.basis[i] < tab.basis[leaving]))) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving < 0) {
      *iterations += iter;
      return LpStatus::Unbounded;
    }
    tab.pivot(leaving, entering);
  }
  *iterations += max_iter;
  return LpStatus::IterationLimit;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double pivot_tol, int max_iter) {
  const int m = static_cast<int>(lp.constraint.rows());
  const int n = static_cast<int>(lp.constraint.cols());
  if (lp.rhs.size() != m || lp.cost.size() != n)
    throw ValidationError("solve_lp: inconsistent dimensions");
  if (!lp.constraint.allFinite() || !lp.rhs.allFinite() || !lp.cost.allFinite())
    throw NumericError("solve_lp: non-finite input");
  if (max_iter <= 0) max_iter = 200 * (n + m + 10);

  Tableau tab;
  tab.m = m;
  tab.n = n;
  tab.t = RealMat::Zero(m + 1, n + m + 1);
  tab.basis.assign(m, 0);

  for (int i = 0; i < m; ++i) {
    const double sign = lp.rhs[i] >= 0.0 ? 1.0 : -1.0;
    tab.t.block(i, 0, 1, n) = sign * lp.constraint.row(i);
    tab.t(i, n + i) = 1.0;
    tab.rhs(i) = sign * lp.rhs[i];
    tab.basis[i] = n + i;
  }

  LpResult result;
  result.x = RealVec::Zero(n);
  result.dual = RealVec::Zero(m);

  // Phase 1: minimize the sum of artificials.
  for (int j = 0; j < n; ++j) tab.t(m, j) = -tab.t.block(0, j, m, 1).sum();
  tab.t(m, n + m) = -tab.t.col(n + m).head(m).sum();

  LpStatus status = run_phase(tab, false, pivot_tol, max_iter, &result.iterations);
  const double phase1_value = -tab.t(m, n + m);
  if (status == LpStatus::IterationLimit) {
    result.status = status;
    return result;
  }
  if (phase1_value > 1e-7 * (1.0 + lp.rhs.cwiseAbs().maxCoeff())) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  // Drive any artificial still basic (at zero) out of the basis; a row with no
  // eligible pivot is redundant and stays inert.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(tab.t(i, j)) > 1e-8) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 objective row: reduced costs of the true objective.
  tab.t.row(m).setZero();
  for (int j = 0; j < n; ++j) tab.t(m, j) = lp.cost[j];
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) tab.t.row(m) -= lp.cost[tab.basis[i]] * tab.t.row(i);
  }

  status = run_phase(tab, false, pivot_tol, max_iter, &result.iterations);
  result.status = status;
  if (status != LpStatus::Optimal) return result;

  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) result.x[tab.basis[i]] = tab.rhs(i);
  }
  result.value = lp.cost.dot(result.x);
  // Multipliers: the artificial column block holds B^{-1}, so the phase-2
  // reduced cost over artificial j equals -y_j (artificials cost zero). The
  // row sign flip applied for negative rhs carries over.
  for (int i = 0; i < m; ++i) {
    const double sign = lp.rhs[i] >= 0.0 ? 1.0 : -1.0;
    result.dual[i] = -sign * tab.t(m, n + i);
  }
  return result;
}

}  // namespace softrec
