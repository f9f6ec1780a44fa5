#pragma once

#include "softrec/common.hpp"

namespace softrec {

/// min c'x subject to A x = b, x >= 0.
struct LinearProgram {
  RealMat constraint;  // m x n
  RealVec rhs;         // m
  RealVec cost;        // n
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  double value = 0.0;
  RealVec x;     // primal solution, length n
  RealVec dual;  // equality multipliers y with A'y <= c at optimum, length m
  int iterations = 0;
};

/// Dense two-phase tableau simplex with Bland's rule. Intended for the small,
/// exactly-solved programs behind the gauge oracle; no sparsity, no scaling.
LpResult solve_lp(const LinearProgram& lp, double pivot_tol = 1e-11, int max_iter = 0);

}  // namespace softrec
