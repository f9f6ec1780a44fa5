#pragma once

#include "softrec/common.hpp"

#include <cstdint>
#include <functional>
#include <variant>

namespace softrec {

/// Cone of soft certificates at parameters (sigma, t) and ground-truth singular
/// values (nonnegative, summing to one); ambient space R^{k x n}.
struct SoftCone {
  double sigma = 1.0;
  double t = 0.5;
  RealVec singular_values;
  int k = 0, n = 0;
};

/// Cone of exact certificates for a rank-r target in R^{k x n}.
struct ExactCone {
  int rank = 1;
  int k = 0, n = 0;
};

struct SubspaceCone {
  int subspace_dim = 0;
  int ambient_dim = 0;
};

struct OrthantCone {
  int ambient_dim = 0;
};

using ConeSpec = std::variant<SoftCone, ExactCone, SubspaceCone, OrthantCone>;

int ambient_dimension(const ConeSpec& spec);
void validate(const ConeSpec& spec);

/// The tau = 1 slice of the soft cone is nonempty iff
/// sigma_1 * sigma + (sum of the remaining singular values) * (1 - t) >= 1.
bool soft_cone_feasible(const SoftCone& cone);

/// Closed-form best approximation in the exact-certificate slice: top-left
/// block tau * I, off-diagonal blocks zero, bottom-right spectrally clipped at tau.
RealMat project_exact_slice(const RealMat& u, double tau, int rank);

struct DykstraResult {
  RealMat point;
  bool converged = false;
  int sweeps = 0;
};

/// Dykstra's alternating projections over the three constraint sets of the
/// soft-certificate slice (corner cap, weighted-diagonal halfspace, spectral
/// bound on the corner-deleted part). Terminates when successive sweeps differ
/// by at most tol in Frobenius norm.
DykstraResult project_soft_slice(const RealMat& u, double tau, const SoftCone& cone,
                                 double tol = 1e-10, int max_iter = 20000);

struct GoldenResult {
  double tau_star = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a scalar convex objective on [lo, hi], bracket
/// narrowed to width tol.
GoldenResult golden_section_minimize(const std::function<double(double)>& objective, double lo,
                                     double hi, double tol, int max_iter = 400);

/// inf over tau in [0, tau_max] of ||u - projector(u, tau)||_F^2.
GoldenResult min_distance_over_tau(const RealMat& u,
                                   const std::function<RealMat(const RealMat&, double)>& projector,
                                   double tau_max, double tol);

struct StatDimEstimate {
  double delta_hat = 0.0;
  double std_error = 0.0;
  int samples = 0;
  double complement = 0.0;  // ambient dim minus delta_hat
};

/// Monte-Carlo statistical dimension: ambient dim minus the mean squared
/// distance of a standard Gaussian to the cone, the scaling resolved by a
/// golden-section search over the slice parameter. Infeasible soft cones give
/// the zero estimate by convention.
StatDimEstimate estimate_statdim(const ConeSpec& spec, int samples, std::uint64_t seed);

}  // namespace softrec
