#include "softrec/statdim.hpp"

#include "softrec/rng.hpp"
#include "softrec/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace softrec {

int ambient_dimension(const ConeSpec& spec) {
  if (const auto* soft = std::get_if<SoftCone>(&spec)) return soft->k * soft->n;
  if (const auto* exact = std::get_if<ExactCone>(&spec)) return exact->k * exact->n;
  if (const auto* sub = std::get_if<SubspaceCone>(&spec)) return sub->ambient_dim;
  return std::get<OrthantCone>(spec).ambient_dim;
}

void validate(const ConeSpec& spec) {
  if (const auto* soft = std::get_if<SoftCone>(&spec)) {
    if (soft->sigma < 1.0) throw ValidationError("soft cone: sigma must be >= 1");
    if (!(soft->t > 0.0 && soft->t <= 1.0)) throw ValidationError("soft cone: t must lie in (0,1]");
    if (soft->singular_values.size() < 1 ||
        soft->singular_values.size() > std::min(soft->k, soft->n))
      throw ValidationError("soft cone: rank out of range");
    if (soft->singular_values.minCoeff() < 0.0)
      throw ValidationError("soft cone: singular values must be nonnegative");
    if (std::abs(soft->singular_values.sum() - 1.0) > 1e-9)
      throw ValidationError("soft cone: singular values must sum to one");
  } else if (const auto* exact = std::get_if<ExactCone>(&spec)) {
    if (exact->rank < 1 || exact->rank > std::min(exact->k, exact->n))
      throw ValidationError("exact cone: rank out of range");
  } else if (const auto* sub = std::get_if<SubspaceCone>(&spec)) {
    if (sub->subspace_dim < 0 || sub->subspace_dim > sub->ambient_dim)
      throw ValidationError("subspace cone: dimension out of range");
  } else if (std::get<OrthantCone>(spec).ambient_dim < 1) {
    throw ValidationError("orthant cone: ambient dimension must be positive");
  }
}

bool soft_cone_feasible(const SoftCone& cone) {
  const double head = cone.singular_values[0] * cone.sigma;
  const double tail = (cone.singular_values.sum() - cone.singular_values[0]) * (1.0 - cone.t);
  return head + tail >= 1.0;
}

namespace {

RealMat spectral_clip(const RealMat& x, double level) {
  const SvdResult svd = dense_svd(x);
  if (svd.s.size() == 0 || svd.s[0] <= level) return x;
  RealVec s = svd.s;
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = std::min(s[i], level);
  return (svd.u * s.asDiagonal() * svd.v.adjoint()).real();
}

// Metric projection of a corner-zero matrix onto {Z : Z_00 = 0, ||Z|| <= level}.
// Dualizing the corner constraint gives Z = clip(W - mu e0 e0^T) with mu the
// root of the (monotone nonincreasing) corner entry; safeguarded secant with
// one SVD per evaluation.
RealMat project_corner_deleted_ball(const RealMat& w, double level) {
  if (level <= 0.0) return RealMat::Zero(w.rows(), w.cols());
  RealMat value = spectral_clip(w, level);
  if (std::abs(value(0, 0)) < 1e-14) {
    value(0, 0) = 0.0;
    return value;
  }
  const auto corner_at = [&](double mu) {
    RealMat shifted = w;
    shifted(0, 0) -= mu;
    return spectral_clip(shifted, level)(0, 0);
  };
  double lo = 0.0, hi = 0.0, f_lo = value(0, 0), f_hi = value(0, 0);
  double span = std::abs(value(0, 0)) + level + 1.0;
  if (value(0, 0) > 0.0) {
    hi = span;
    for (int guard = 0; (f_hi = corner_at(hi)) > 0.0; ++guard) {
      lo = hi;
      f_lo = f_hi;
      hi *= 2.0;
      if (guard > 60) throw NumericError("corner projection: bracket expansion failed");
    }
  } else {
    lo = -span;
    for (int guard = 0; (f_lo = corner_at(lo)) < 0.0; ++guard) {
      hi = lo;
      f_hi = f_lo;
      lo *= 2.0;
      if (guard > 60) throw NumericError("corner projection: bracket expansion failed");
    }
  }
  RealMat best = value;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = std::abs(f_hi - f_lo) > 1e-300 ? lo - f_lo * (hi - lo) / (f_hi - f_lo)
                                                : 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    RealMat shifted = w;
    shifted(0, 0) -= mid;
    best = spectral_clip(shifted, level);
    const double f = best(0, 0);
    if (std::abs(f) < 1e-13 || hi - lo < 1e-15 * (1.0 + std::abs(lo))) break;
    if (f > 0.0) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  best(0, 0) = 0.0;
  return best;
}

struct SoftSliceSets {
  double corner_cap;      // X_00 <= corner_cap
  double halfspace_rhs;   // <G, X> >= halfspace_rhs
  RealMat halfspace_dir;  // G, Frobenius-normalized direction kept separately
  double spectral_level;  // ||corner-deleted X|| <= spectral_level
};

}  // namespace

RealMat project_exact_slice(const RealMat& u, double tau, int rank) {
  if (tau < 0.0) throw ValidationError("project_exact_slice: tau must be nonnegative");
  if (rank < 1 || rank > std::min(u.rows(), u.cols()))
    throw ValidationError("project_exact_slice: rank does not fit the shape");
  RealMat x = RealMat::Zero(u.rows(), u.cols());
  x.topLeftCorner(rank, rank) = tau * RealMat::Identity(rank, rank);
  const auto k2 = u.rows() - rank, n2 = u.cols() - rank;
  if (k2 > 0 && n2 > 0)
    x.bottomRightCorner(k2, n2) = spectral_clip(u.bottomRightCorner(k2, n2), tau);
  return x;
}

DykstraResult project_soft_slice(const RealMat& u, double tau, const SoftCone& cone,
                                 double tol, int max_iter) {
  validate(ConeSpec(cone));
  if (tau < 0.0) throw ValidationError("project_soft_slice: tau must be nonnegative");
  if (u.rows() != cone.k || u.cols() != cone.n)
    throw ValidationError("project_soft_slice: shape mismatch");
  if (tau > 0.0 && !soft_cone_feasible(cone))
    throw InfeasibleError("project_soft_slice: empty slice");

  const int r = static_cast<int>(cone.singular_values.size());
  RealMat g = RealMat::Zero(cone.k, cone.n);
  for (int i = 0; i < r; ++i) g(i, i) = cone.singular_values[i];
  const double g_sq = g.squaredNorm();
  const double cap = tau * cone.sigma;
  const double level = tau * (1.0 - cone.t);

  DykstraResult result;
  RealMat x = u;
  RealMat inc1 = RealMat::Zero(cone.k, cone.n);
  RealMat inc2 = inc1, inc3 = inc1;

  const auto slice_violation = [&](const RealMat& point) {
    const double v1 = std::max(0.0, point(0, 0) - cap);
    const double v2 = std::max(0.0, tau - (g.array() * point.array()).sum());
    RealMat corner_deleted = point;
    corner_deleted(0, 0) = 0.0;
    const SvdResult svd = dense_svd(corner_deleted);
    const double v3 = std::max(0.0, (svd.s.size() ? svd.s[0] : 0.0) - level);
    return std::max({v1, v2, v3});
  };

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    const RealMat prev = x;

    RealMat y = x + inc1;
    RealMat p = y;
    p(0, 0) = std::min(p(0, 0), cap);
    inc1 = y - p;
    x = p;

    y = x + inc2;
    p = y;
    const double pairing = (g.array() * y.array()).sum();
    if (pairing < tau) p += g * ((tau - pairing) / g_sq);
    inc2 = y - p;
    x = p;

    y = x + inc3;
    const double corner = y(0, 0);
    RealMat z = y;
    z(0, 0) = 0.0;
    z = project_corner_deleted_ball(z, level);
    p = z;
    p(0, 0) = corner;
    inc3 = y - p;
    x = p;

    result.sweeps = sweep;
    if ((x - prev).norm() <= tol && slice_violation(x) <= 5.0 * tol) {
      result.converged = true;
      break;
    }
  }
  result.point = x;
  return result;
}

GoldenResult golden_section_minimize(const std::function<double(double)>& objective, double lo,
                                     double hi, double tol, int max_iter) {
  if (hi < lo) throw ValidationError("golden_section_minimize: empty bracket");
  GoldenResult result;
  if (hi == lo) {
    result.tau_star = lo;
    result.value = objective(lo);
    result.evaluations = 1;
    return result;
  }
  const double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  result.evaluations = 2;
  for (int iter = 0; iter < max_iter && (b - a) > tol; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
    ++result.evaluations;
  }
  result.tau_star = 0.5 * (a + b);
  result.value = std::min(fc, fd);
  return result;
}

GoldenResult min_distance_over_tau(const RealMat& u,
                                   const std::function<RealMat(const RealMat&, double)>& projector,
                                   double tau_max, double tol) {
  const auto objective = [&](double tau) { return (u - projector(u, tau)).squaredNorm(); };
  return golden_section_minimize(objective, 0.0, tau_max, tol);
}

StatDimEstimate estimate_statdim(const ConeSpec& spec, int samples, std::uint64_t seed) {
  validate(spec);
  if (samples < 2) throw ValidationError("estimate_statdim: need at least two samples");
  const int d = ambient_dimension(spec);

  StatDimEstimate estimate;
  estimate.samples = samples;
  if (const auto* soft = std::get_if<SoftCone>(&spec)) {
    if (!soft_cone_feasible(*soft)) {
      // Empty positive slices mean the cone degenerates to the origin.
      estimate.complement = static_cast<double>(d);
      return estimate;
    }
  }

  RealVec dist_sq(samples);
  parallel_for(samples, [&](int s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    if (const auto* sub = std::get_if<SubspaceCone>(&spec)) {
      const RealVec gauss = rng.gaussian_vector(sub->ambient_dim);
      dist_sq[s] = gauss.tail(sub->ambient_dim - sub->subspace_dim).squaredNorm();
      return;
    }
    if (const auto* orth = std::get_if<OrthantCone>(&spec)) {
      const RealVec gauss = rng.gaussian_vector(orth->ambient_dim);
      double total = 0.0;
      for (Eigen::Index i = 0; i < gauss.size(); ++i) total += sqr(std::min(gauss[i], 0.0));
      dist_sq[s] = total;
      return;
    }
    if (const auto* exact = std::get_if<ExactCone>(&spec)) {
      const RealMat gauss = rng.gaussian_matrix(exact->k, exact->n);
      const double tau_max = gauss.norm() / std::sqrt(static_cast<double>(exact->rank));
      const auto projector = [&](const RealMat& m, double tau) {
        return project_exact_slice(m, tau, exact->rank);
      };
      dist_sq[s] = min_distance_over_tau(gauss, projector, tau_max, 1e-7 * (1.0 + tau_max)).value;
      return;
    }
    const auto& soft = std::get<SoftCone>(spec);
    const RealMat gauss = rng.gaussian_matrix(soft.k, soft.n);
    const double tau_max = soft.singular_values.norm() * gauss.norm();
    const auto projector = [&](const RealMat& m, double tau) {
      return project_soft_slice(m, tau, soft, 1e-9, 20000).point;
    };
    dist_sq[s] = min_distance_over_tau(gauss, projector, tau_max, 1e-6 * (1.0 + tau_max)).value;
  });

  // Fixed-order reduction keeps the estimate independent of the worker count.
  double mean = 0.0;
  for (int s = 0; s < samples; ++s) mean += dist_sq[s];
  mean /= samples;
  double var = 0.0;
  for (int s = 0; s < samples; ++s) var += sqr(dist_sq[s] - mean);
  var /= (samples - 1);

  // Cone dimensions live in [0, d]; sampling noise outside is projected back.
  estimate.delta_hat = std::clamp(d - mean, 0.0, static_cast<double>(d));
  estimate.std_error = std::sqrt(var / samples);
  estimate.complement = d - estimate.delta_hat;
  return estimate;
}

}  // namespace softrec
