#pragma once

#include "softrec/common.hpp"
#include "softrec/dictionary.hpp"

namespace softrec {

/// Quantities of the soft-certificate test for a peak atom x0 in subfamily j0:
/// alignment with the ground-truth measure (>= 1), supremum over the other
/// subfamilies (< 1), modulus at the peak (sigma floor), and the dual norm of
/// the component orthogonal to the peak over its own subfamily (1 - t ceiling).
struct SoftCertificateReport {
  double alignment = 0.0;
  double other_family_sup = 0.0;
  double at_peak = 0.0;
  double orth_comp_sup = 0.0;
  double sigma_min = 0.0;
  double t_max = 0.0;
  double conclusion_radius = 0.0;  // t_max / sigma_min
  bool valid = false;

  /// Do the four conditions hold with the supplied (sigma, t)?
  bool satisfies(double sigma, double t) const;
};

SoftCertificateReport verify_soft_certificate(const Vec& nu, int x0_index, int j0,
                                              const DiscreteMeasure& mu0,
                                              const SampledDictionary& dict);

struct ConclusionCheck {
  bool holds = false;
  int witness = -1;  // maximizing support atom in subfamily j0
  double witness_overlap = 0.0;
};

/// Does some support atom of mu_star in subfamily j0 overlap the peak atom by
/// at least radius (within 1e-9)?
ConclusionCheck check_soft_conclusion(const DiscreteMeasure& mu_star, int x0_index, int j0,
                                      double radius, const SampledDictionary& dict);

struct DualProgramEval {
  double value = 0.0;            // realified pairing <(Re b, Im b), p>
  double feasibility_sup = 0.0;  // sup over sampled (atom, phase)
  bool feasible = false;
};

/// Evaluates the dual objective and constraint sup for a realified multiplier
/// p in R^{2m}; the phase circle is sampled uniformly (num_phases points).
DualProgramEval dual_program_value(const RealVec& p, const Mat& op, const Vec& rhs,
                                   const SampledDictionary& dict, int num_phases = 256,
                                   double tol = 1e-9);

struct ExactCertificateReport {
  double interpolation_error = 0.0;
  double off_support_sup = 0.0;
  bool valid = false;
};

/// Exact dual certificate test for the rank-r factors (u_i, v_i): nu must equal
/// sum_i v_i u_i^T plus a correction W that annihilates span(u_i), has range
/// orthogonal to span(v_i), and spectral norm at most 1.
ExactCertificateReport verify_exact_nuclear_certificate(const RealMat& nu, const RealMat& u_r,
                                                        const RealMat& v_r, double tol);

/// Exact interpolation test on a grid: g must match the given unit phases on
/// the support and stay below modulus 1 + tol everywhere.
ExactCertificateReport verify_exact_superres_certificate(const Vec& g_samples,
                                                         const RealVec& grid,
                                                         const RealVec& support_points,
                                                         const Vec& phases, double tol);

struct L12Membership {
  bool new_ok = false;
  bool old_ok = false;
};

/// Column-certificate membership: the (sigma, t) region versus the older
/// (norm bound, angle bound) region at opening angle alpha.
L12Membership l12_condition_membership(const RealVec& v_i0, const RealVec& eta_i0, double sigma,
                                       double t, double alpha);

struct ClassicalBounds {
  double s_donoho = 0.0;
  double s_elad = 0.0;
};

/// Coherence-based sparsity thresholds for two-ONB separation:
/// (kappa^-1 + 1)/2 and kappa^-1 (sqrt(2) - 1/2). Diverge as kappa -> 0.
ClassicalBounds classical_separation_bounds(double kappa);

}  // namespace softrec
