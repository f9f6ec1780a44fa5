#pragma once

#include "softrec/common.hpp"

#include <iosfwd>
#include <variant>
#include <vector>

namespace softrec {

struct L1Reg {};
struct GroupL12Reg {
  std::vector<std::vector<int>> groups;  // partition of coefficient indices
};
struct NuclearReg {
  int rows = 0, cols = 0;  // coefficient vector reshaped column-major
};
using Regularizer = std::variant<L1Reg, GroupL12Reg, NuclearReg>;

/// min reg(c) subject to operator * c = rhs.
struct EqualityConstrainedProblem {
  Mat op;   // m x N
  Vec rhs;  // m
  Regularizer regularizer;

  void validate() const;
  int coefficient_dim() const { return static_cast<int>(op.cols()); }
};

struct SolveResult {
  Vec coefficients;
  double objective = 0.0;
  double residual_norm = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  bool infeasible = false;
};

struct SolveOptions {
  double prox_scale = 0.0;   // 0 = automatic, from the min-norm feasible point
  double relaxation = 1.8;   // Douglas-Rachford relaxation in (0, 2)
  int check_every = 16;      // duality-gap cadence
  std::ostream* trace = nullptr;  // CSV rows (iteration, objective, residual, gap)
};

/// Componentwise soft-thresholding, complex phase preserved.
Vec prox_l1(const Vec& c, double theta);

/// Per-column l2 shrinkage (columns are the groups).
Mat prox_group_l12(const Mat& x, double theta);

/// Singular-value soft-thresholding via full SVD.
Mat prox_nuclear(const Mat& x, double theta);

double regularizer_value(const Regularizer& reg, const Vec& c);
Vec prox_regularizer(const Regularizer& reg, const Vec& c, double theta);
/// Norm dual to the regularizer (l_inf / max group l2 / spectral).
double dual_regularizer_norm(const Regularizer& reg, const Vec& v);

/// Douglas-Rachford splitting between the regularizer prox and the exact
/// projection onto {c : op c = rhs} (one rank-revealing QR per problem).
/// Terminates when residual_norm <= tol (1 + ||rhs||) and the certified
/// duality gap is <= tol (1 + objective). Non-convergence and inconsistent
/// right-hand sides are flagged on the result, not thrown.
SolveResult solve_equality_constrained(const EqualityConstrainedProblem& problem, double tol,
                                       int max_iter, const SolveOptions& options = {});

struct SvdResult {
  Mat u;       // thin
  RealVec s;   // nonincreasing, nonnegative
  Mat v;       // thin
};

/// Thin SVD with x = u diag(s) v^*. Desk scale; throws NumericError on
/// non-finite input.
SvdResult dense_svd(const Mat& x);
SvdResult dense_svd(const RealMat& x);

}  // namespace softrec
