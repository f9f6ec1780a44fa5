#include "softrec/solvers.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <optional>
#include <cmath>
#include <ostream>

namespace softrec {

void EqualityConstrainedProblem::validate() const {
  if (op.rows() != rhs.size())
    throw ValidationError("problem: operator rows must match rhs length");
  if (!op.allFinite() || !rhs.allFinite()) throw NumericError("problem: non-finite data");
  if (const auto* group = std::get_if<GroupL12Reg>(&regularizer)) {
    std::vector<char> hit(static_cast<std::size_t>(op.cols()), 0);
    for (const auto& g : group->groups) {
      for (int idx : g) {
        if (idx < 0 || idx >= op.cols() || hit[static_cast<std::size_t>(idx)])
          throw ValidationError("problem: groups must partition the coefficients");
        hit[static_cast<std::size_t>(idx)] = 1;
      }
    }
    for (char h : hit)
      if (!h) throw ValidationError("problem: groups must cover every coefficient");
  } else if (const auto* nuc = std::get_if<NuclearReg>(&regularizer)) {
    if (static_cast<long>(nuc->rows) * nuc->cols != op.cols())
      throw ValidationError("problem: nuclear shape must match the coefficient count");
  }
}

Vec prox_l1(const Vec& c, double theta) {
  if (theta <= 0.0) throw ValidationError("prox_l1: theta must be positive");
  Vec out(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double mod = std::abs(c[k]);
    out[k] = mod <= theta ? Complex(0.0, 0.0) : c[k] * ((mod - theta) / mod);
  }
  return out;
}

Mat prox_group_l12(const Mat& x, double theta) {
  if (theta <= 0.0) throw ValidationError("prox_group_l12: theta must be positive");
  Mat out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    out.col(j) = norm <= theta ? Vec::Zero(x.rows()).eval()
                               : (x.col(j) * ((norm - theta) / norm)).eval();
  }
  return out;
}

Mat prox_nuclear(const Mat& x, double theta) {
  if (theta <= 0.0) throw ValidationError("prox_nuclear: theta must be positive");
  const SvdResult svd = dense_svd(x);
  RealVec s = svd.s;
  for (Eigen::Index k = 0; k < s.size(); ++k) s[k] = std::max(s[k] - theta, 0.0);
  return svd.u * s.asDiagonal() * svd.v.adjoint();
}

namespace {

Mat as_matrix(const Vec& c, const NuclearReg& reg) {
  return Eigen::Map<const Mat>(c.data(), reg.rows, reg.cols);
}

Vec as_vector(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

}  // namespace

double regularizer_value(const Regularizer& reg, const Vec& c) {
  if (std::holds_alternative<L1Reg>(reg)) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k) total += std::abs(c[k]);
    return total;
  }
  if (const auto* group = std::get_if<GroupL12Reg>(&reg)) {
    double total = 0.0;
    for (const auto& g : group->groups) {
      double sq = 0.0;
      for (int idx : g) sq += std::norm(c[idx]);
      total += std::sqrt(sq);
    }
    return total;
  }
  const auto& nuc = std::get<NuclearReg>(reg);
  return dense_svd(as_matrix(c, nuc)).s.sum();
}

Vec prox_regularizer(const Regularizer& reg, const Vec& c, double theta) {
  if (std::holds_alternative<L1Reg>(reg)) return prox_l1(c, theta);
  if (const auto* group = std::get_if<GroupL12Reg>(&reg)) {
    Vec out = Vec::Zero(c.size());
    for (const auto& g : group->groups) {
      double sq = 0.0;
      for (int idx : g) sq += std::norm(c[idx]);
      const double norm = std::sqrt(sq);
      if (norm > theta) {
        const double scale = (norm - theta) / norm;
        for (int idx : g) out[idx] = c[idx] * scale;
      }
    }
    return out;
  }
  const auto& nuc = std::get<NuclearReg>(reg);
  return as_vector(prox_nuclear(as_matrix(c, nuc), theta));
}

double dual_regularizer_norm(const Regularizer& reg, const Vec& v) {
  if (std::holds_alternative<L1Reg>(reg)) {
    double sup = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) sup = std::max(sup, std::abs(v[k]));
    return sup;
  }
  if (const auto* group = std::get_if<GroupL12Reg>(&reg)) {
    double sup = 0.0;
    for (const auto& g : group->groups) {
      double sq = 0.0;
      for (int idx : g) sq += std::norm(v[idx]);
      sup = std::max(sup, std::sqrt(sq));
    }
    return sup;
  }
  const auto& nuc = std::get<NuclearReg>(reg);
  const SvdResult svd = dense_svd(as_matrix(v, nuc));
  return svd.s.size() > 0 ? svd.s[0] : 0.0;
}

namespace {

// Exact projection machinery for the affine set {c : K c = b}, built from one
// rank-revealing QR of K^H. Also answers least-squares K^H y ~ u for the dual
// certificate.
class AffineProjector {
 public:
  AffineProjector(const Mat& op, const Vec& rhs) : m_(op.rows()), n_(op.cols()) {
    Eigen::ColPivHouseholderQR<Mat> qr(op.adjoint());
    rank_ = static_cast<int>(qr.rank());
    perm_ = qr.colsPermutation();
    r_top_ = qr.matrixR()
                 .topRows(std::min<Eigen::Index>(n_, m_))
                 .template triangularView<Eigen::Upper>();
    q_thin_ = qr.householderQ() * Mat::Identity(n_, rank_);

    // Constraint in QR coordinates: R^H (Q^H c) = P^T b. The leading rank_
    // equations fix the row-space component; the rest decide consistency.
    const Vec pb = perm_.transpose() * rhs;
    z_ = r_top_.topLeftCorner(rank_, rank_)
             .adjoint()
             .template triangularView<Eigen::Lower>()
             .solve(pb.head(rank_));
    double tail_sq = 0.0;
    if (m_ > rank_) {
      const Vec predicted = r_top_.topRows(rank_).rightCols(m_ - rank_).adjoint() * z_;
      tail_sq = (pb.tail(m_ - rank_) - predicted).squaredNorm();
    }
    consistency_residual_ = std::sqrt(tail_sq);
    min_norm_point_ = q_thin_ * z_;
  }

  int rank() const { return rank_; }
  double consistency_residual() const { return consistency_residual_; }
  const Vec& min_norm_point() const { return min_norm_point_; }

  Vec project(const Vec& c) const { return c - q_thin_ * (q_thin_.adjoint() * c - z_); }

  /// Least-squares solve of K^H y = u (minimum-norm in y).
  Vec dual_lstsq(const Vec& u) const {
    Vec w = Vec::Zero(m_);
    w.head(rank_) = r_top_.topLeftCorner(rank_, rank_)
                        .template triangularView<Eigen::Upper>()
                        .solve(q_thin_.adjoint() * u);
    return perm_ * w;
  }

 private:
  Eigen::Index m_, n_;
  int rank_ = 0;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> perm_;
  Mat r_top_;   // top block of R (min(n,m) x m)
  Mat q_thin_;  // n x rank, orthonormal columns spanning ran K^H
  Vec z_;       // fixed row-space coordinates of any feasible point
  Vec min_norm_point_;
  double consistency_residual_ = 0.0;
};

// Support polish for l1 instances: if the iterate's support S is small enough
// that the columns B_S are independent, the feasible point carried by S is
// unique; interpolating its phases with a least-squares dual candidate and
// checking feasibility everywhere certifies optimality without waiting for the
// splitting iteration's dual to tighten.
struct PolishOutcome {
  Vec coefficients;
  double objective = 0.0;
  double residual = 0.0;
  double gap = std::numeric_limits<double>::infinity();
};

std::optional<PolishOutcome> try_support_polish(const Mat& op, const Vec& rhs, const Vec& iterate,
                                                double rel_threshold) {
  const double peak = iterate.cwiseAbs().maxCoeff();
  if (peak <= 0.0) return std::nullopt;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(iterate.size()));
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<Eigen::Index>(j);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(iterate[a]) > std::abs(iterate[b]);
  });
  const Eigen::Index max_support = std::min<Eigen::Index>(op.rows(), 256);
  std::vector<Eigen::Index> support;
  for (const Eigen::Index j : order) {
    if (std::abs(iterate[j]) <= rel_threshold * peak) break;
    if (static_cast<Eigen::Index>(support.size()) == max_support) break;
    support.push_back(j);
  }
  if (support.empty()) return std::nullopt;

  // Two passes: after the first coefficient solve, grow the candidate set to a
  // full basis when the small-support residual is not already negligible, and
  // drop entries the solve put at zero (their phases carry no information).
  for (int pass = 0; pass < 2; ++pass) {
    Mat columns(op.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k)
      columns.col(static_cast<Eigen::Index>(k)) = op.col(support[k]);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(columns);
    if (cod.rank() < columns.cols()) return std::nullopt;
    const Vec on_support = cod.solve(rhs);
    const double residual = (columns * on_support - rhs).norm();
    if (residual > 1e-10 * (1.0 + rhs.norm())) {
      if (pass == 1) return std::nullopt;
      // Grow to a full candidate basis using the next-largest iterate entries.
      std::vector<char> used(static_cast<std::size_t>(op.cols()), 0);
      for (const Eigen::Index j : support) used[static_cast<std::size_t>(j)] = 1;
      for (const Eigen::Index j : order) {
        if (static_cast<Eigen::Index>(support.size()) == max_support) break;
        if (!used[static_cast<std::size_t>(j)]) {
          support.push_back(j);
          used[static_cast<std::size_t>(j)] = 1;
        }
      }
      continue;
    }

    std::vector<Eigen::Index> kept;
    Vec kept_values(on_support.size());
    Eigen::Index kept_count = 0;
    const double tiny = 1e-10 * (1.0 + on_support.cwiseAbs().sum());
    for (Eigen::Index k = 0; k < on_support.size(); ++k) {
      if (std::abs(on_support[k]) > tiny) {
        kept.push_back(support[static_cast<std::size_t>(k)]);
        kept_values[kept_count++] = on_support[k];
      }
    }
    if (kept.empty()) return std::nullopt;

    Mat kept_columns(op.rows(), kept_count);
    Vec phases(kept_count);
    for (Eigen::Index k = 0; k < kept_count; ++k) {
      kept_columns.col(k) = op.col(kept[static_cast<std::size_t>(k)]);
      phases[k] = kept_values[k] / std::abs(kept_values[k]);
    }
    // Phase interpolation B_S^H y = phases, minimum-norm y; reject when
    // inconsistent (wrong basis) and let the iteration continue.
    Eigen::CompleteOrthogonalDecomposition<Mat> cod_adj(kept_columns.adjoint());
    const Vec y = cod_adj.solve(phases);
    if ((kept_columns.adjoint() * y - phases).cwiseAbs().maxCoeff() > 1e-9) return std::nullopt;

    PolishOutcome outcome;
    outcome.coefficients = Vec::Zero(op.cols());
    for (Eigen::Index k = 0; k < kept_count; ++k)
      outcome.coefficients[kept[static_cast<std::size_t>(k)]] = kept_values[k];
    const double dirt = (op * outcome.coefficients - rhs).norm();
    outcome.objective = kept_values.head(kept_count).cwiseAbs().sum();
    outcome.residual = dirt;
    const double dual_norm = (op.adjoint() * y).cwiseAbs().maxCoeff();
    const double scale = dual_norm > 1.0 ? 1.0 / dual_norm : 1.0;
    outcome.gap = outcome.objective - scale * (y.dot(rhs)).real();
    return outcome;
  }
  return std::nullopt;
}

}  // namespace

SolveResult solve_equality_constrained(const EqualityConstrainedProblem& problem, double tol,
                                       int max_iter, const SolveOptions& options) {
  problem.validate();
  if (tol <= 0.0) throw ValidationError("solve: tol must be positive");
  const Mat& K = problem.op;
  const Vec& b = problem.rhs;
  const double b_norm = b.norm();

  SolveResult result;
  result.coefficients = Vec::Zero(K.cols());

  AffineProjector projector(K, b);
  const double feas_scale = 1.0 + b_norm;
  if (projector.consistency_residual() > std::max(tol, 1e-9) * feas_scale) {
    result.infeasible = true;
    result.residual_norm = projector.consistency_residual();
    return result;
  }

  // b = 0: zero coefficients are feasible and minimize any of the regularizers.
  if (b_norm == 0.0) {
    result.converged = true;
    return result;
  }

  const Vec c0 = projector.min_norm_point();
  double theta = options.prox_scale;
  if (theta <= 0.0) theta = std::max(0.1 * c0.cwiseAbs().maxCoeff(), 1e-12);
  const double relax = options.relaxation;

  Vec z = c0;
  double best_gap = std::numeric_limits<double>::infinity();
  if (options.trace) *options.trace << "iteration,objective,residual,gap\n";

  for (int iter = 1; iter <= max_iter; ++iter) {
    const Vec x = prox_regularizer(problem.regularizer, z, theta);
    const bool check = (iter % options.check_every == 0) || iter == max_iter;
    if (check) {
      const Vec feasible = projector.project(x);
      const double objective = regularizer_value(problem.regularizer, feasible);
      // Dual candidate: the prox subgradient pushed into ran K^H, then scaled
      // into the dual-feasible set. Weak duality makes the gap a true bound.
      const Vec subgrad = (z - x) / theta;
      const Vec y = projector.dual_lstsq(subgrad);
      const double dual_norm = dual_regularizer_norm(problem.regularizer, K.adjoint() * y);
      const double scale = dual_norm > 1.0 ? 1.0 / dual_norm : 1.0;
      const double dual_value = scale * (y.dot(b)).real();
      const double gap = objective - dual_value;
      const double residual = (K * feasible - b).norm();
      if (options.trace)
        *options.trace << iter << ',' << objective << ',' << residual << ',' << gap << '\n';
      if (gap < best_gap) {
        best_gap = gap;
        result.coefficients = feasible;
        result.objective = objective;
        result.residual_norm = residual;
        result.duality_gap = gap;
        result.iterations = iter;
      }
      if (residual <= tol * feas_scale && gap <= tol * (1.0 + objective)) {
        result.converged = true;
        return result;
      }
      // The basis polish pays off only for genuinely sparse iterates; gate on
      // the support size so large dense instances keep the cheap iteration.
      int above_floor = 0;
      if (std::holds_alternative<L1Reg>(problem.regularizer)) {
        const double peak = x.cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < x.size(); ++j)
          if (std::abs(x[j]) > 1e-6 * peak) ++above_floor;
      }
      if (std::holds_alternative<L1Reg>(problem.regularizer) && above_floor > 0 &&
          above_floor <= std::min<Eigen::Index>(K.rows(), 192)) {
        for (const double rel : {1e-6, 1e-3}) {
          const auto polish = try_support_polish(K, b, x, rel);
          if (polish && polish->gap < best_gap) {
            best_gap = polish->gap;
            result.coefficients = polish->coefficients;
            result.objective = polish->objective;
            result.residual_norm = polish->residual;
            result.duality_gap = polish->gap;
            result.iterations = iter;
          }
          if (polish && polish->gap <= tol * (1.0 + polish->objective) &&
              polish->residual <= tol * feas_scale) {
            result.converged = true;
            return result;
          }
        }
      }
    }
    const Vec reflected = projector.project(2.0 * x - z);
    z += relax * (reflected - x);
  }
  result.iterations = max_iter;
  return result;
}

SvdResult dense_svd(const Mat& x) {
  if (!x.allFinite()) throw NumericError("dense_svd: non-finite input");
  Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SvdResult dense_svd(const RealMat& x) {
  if (!x.allFinite()) throw NumericError("dense_svd: non-finite input");
  Eigen::JacobiSVD<RealMat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().cast<Complex>(), svd.singularValues(), svd.matrixV().cast<Complex>()};
}

}  // namespace softrec
