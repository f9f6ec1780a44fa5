#include "softrec/dictionary.hpp"
#include "softrec/simplex.hpp"

#include <cmath>
#include <numbers>

namespace softrec {
namespace {

struct PhaseColumn {
  int atom;
  Complex phase;
};

// LP over nonnegative coefficients of the phase-extended atoms. Constraints are
// the realified synthesis equations (plain equations for real dictionaries).
GaugeResult solve_extended_lp(const Vec& v, const SampledDictionary& dict,
                              const std::vector<PhaseColumn>& columns, bool realified,
                              double span_tol) {
  const int d = dict.ambient_dim();
  const int rows = realified ? 2 * d : d;
  const int cols = static_cast<int>(columns.size());

  LinearProgram lp;
  lp.constraint = RealMat::Zero(rows, cols);
  lp.rhs = RealVec::Zero(rows);
  lp.cost = RealVec::Ones(cols);
  for (int j = 0; j < cols; ++j) {
    const Vec column = columns[static_cast<std::size_t>(j)].phase *
                       dict.atom(columns[static_cast<std::size_t>(j)].atom);
    if (realified) {
      lp.constraint.block(0, j, d, 1) = column.real();
      lp.constraint.block(d, j, d, 1) = column.imag();
    } else {
      lp.constraint.block(0, j, d, 1) = column.real();
    }
  }
  if (realified) {
    lp.rhs.head(d) = v.real();
    lp.rhs.tail(d) = v.imag();
  } else {
    lp.rhs = v.real();
  }

  const LpResult sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible)
    throw InfeasibleError("gauge_atomic_norm: vector outside the span of the atoms");
  if (sol.status != LpStatus::Optimal)
    throw NumericError("gauge_atomic_norm: LP did not reach optimality");

  // Recombine per-atom phase mass into one complex weight per atom.
  Vec per_atom = Vec::Zero(dict.size());
  for (int j = 0; j < cols; ++j) {
    const auto& col = columns[static_cast<std::size_t>(j)];
    per_atom[col.atom] += sol.x[j] * col.phase;
  }
  std::vector<int> support;
  std::vector<Complex> weights;
  double tv = 0.0;
  for (int k = 0; k < dict.size(); ++k) {
    const double mod = std::abs(per_atom[k]);
    if (mod > 1e-12 * (1.0 + sol.value)) {
      support.push_back(k);
      weights.push_back(per_atom[k]);
      tv += mod;
    }
  }
  Vec w(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t k = 0; k < weights.size(); ++k) w[static_cast<Eigen::Index>(k)] = weights[k];

  GaugeResult result;
  result.decomposition = DiscreteMeasure(std::move(support), std::move(w));
  result.value = tv;
  result.dual = sol.dual;

  const double residual = (synthesize(result.decomposition, dict) - v).norm();
  if (residual > span_tol * (1.0 + v.norm()))
    throw InfeasibleError("gauge_atomic_norm: synthesis residual " + std::to_string(residual));
  return result;
}

}  // namespace

GaugeResult gauge_atomic_norm(const Vec& v, const SampledDictionary& dict,
                              const GaugeOptions& options) {
  if (v.size() != dict.ambient_dim())
    throw ValidationError("gauge_atomic_norm: dimension mismatch");
  if (!v.allFinite()) throw NumericError("gauge_atomic_norm: non-finite input");
  if (dict.size() > options.max_atoms)
    throw ValidationError("gauge_atomic_norm: dictionary too large for the exact LP oracle");

  GaugeResult zero;
  zero.decomposition = DiscreteMeasure();
  zero.dual = RealVec::Zero(dict.is_real() && v.imag().cwiseAbs().maxCoeff() == 0.0
                                ? dict.ambient_dim()
                                : 2 * dict.ambient_dim());
  if (v.norm() == 0.0) return zero;

  const bool real_case = dict.is_real() && v.imag().cwiseAbs().maxCoeff() == 0.0;
  std::vector<PhaseColumn> columns;
  if (real_case) {
    for (int k = 0; k < dict.size(); ++k) {
      columns.push_back({k, Complex(1.0, 0.0)});
      columns.push_back({k, Complex(-1.0, 0.0)});
    }
    return solve_extended_lp(v, dict, columns, false, options.span_tol);
  }

  const int P = options.num_phases;
  for (int k = 0; k < dict.size(); ++k) {
    for (int l = 0; l < P; ++l) {
      const double angle = 2.0 * std::numbers::pi * l / P;
      columns.push_back({k, Complex(std::cos(angle), std::sin(angle))});
    }
  }
  GaugeResult coarse = solve_extended_lp(v, dict, columns, true, options.span_tol);

  // Refinement pass: re-sample one coarse slot around each active phase.
  std::vector<PhaseColumn> refined = columns;
  const double slot = 2.0 * std::numbers::pi / P;
  for (std::size_t k = 0; k < coarse.decomposition.support.size(); ++k) {
    const int atom = coarse.decomposition.support[k];
    const double center = std::arg(coarse.decomposition.weights[static_cast<Eigen::Index>(k)]);
    for (int j = 0; j < options.refine_points; ++j) {
      const double angle = center - slot + 2.0 * slot * j / (options.refine_points - 1);
      refined.push_back({atom, Complex(std::cos(angle), std::sin(angle))});
    }
  }
  return solve_extended_lp(v, dict, refined, true, options.span_tol);
}

}  // namespace softrec
