#include "softrec/certificates.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>

namespace softrec {

namespace {
constexpr double kStrict = 1e-9;  // floating-point reading of strict inequalities
}

bool SoftCertificateReport::satisfies(double sigma, double t) const {
  return alignment >= 1.0 && other_family_sup < 1.0 - kStrict && at_peak <= sigma &&
         orth_comp_sup <= 1.0 - t;
}

SoftCertificateReport verify_soft_certificate(const Vec& nu, int x0_index, int j0,
                                              const DiscreteMeasure& mu0,
                                              const SampledDictionary& dict) {
  if (x0_index < 0 || x0_index >= dict.size())
    throw ValidationError("verify_soft_certificate: peak index outside dictionary");
  if (dict.subfamily_of(x0_index) != j0)
    throw ValidationError("verify_soft_certificate: peak atom is not in subfamily j0");
  if (nu.size() != dict.ambient_dim())
    throw ValidationError("verify_soft_certificate: certificate dimension mismatch");
  if (std::abs(mu0.tv_norm() - 1.0) > 1e-9)
    throw ValidationError("verify_soft_certificate: ground-truth measure must have unit TV norm");

  SoftCertificateReport report;
  for (std::size_t k = 0; k < mu0.support.size(); ++k) {
    const int idx = mu0.support[k];
    if (idx < 0 || idx >= dict.size())
      throw ValidationError("verify_soft_certificate: measure support outside dictionary");
    report.alignment +=
        (mu0.weights[static_cast<Eigen::Index>(k)] * inner(dict.atom(idx), nu)).real();
  }

  const Vec peak = dict.atom(x0_index);
  report.at_peak = std::abs(inner(nu, peak));
  const Vec orth = nu - inner(nu, peak) * peak;
  report.other_family_sup = 0.0;
  report.orth_comp_sup = 0.0;
  for (int k = 0; k < dict.size(); ++k) {
    if (dict.subfamily_of(k) == j0) {
      report.orth_comp_sup = std::max(report.orth_comp_sup, std::abs(inner(orth, dict.atom(k))));
    } else {
      report.other_family_sup =
          std::max(report.other_family_sup, std::abs(inner(nu, dict.atom(k))));
    }
  }

  report.sigma_min = report.at_peak;
  report.t_max = 1.0 - report.orth_comp_sup;
  report.valid = report.alignment >= 1.0 && report.other_family_sup < 1.0 - kStrict &&
                 report.orth_comp_sup < 1.0 - kStrict;
  report.conclusion_radius =
      report.sigma_min > 0.0 ? report.t_max / report.sigma_min
                             : std::numeric_limits<double>::infinity();
  return report;
}

ConclusionCheck check_soft_conclusion(const DiscreteMeasure& mu_star, int x0_index, int j0,
                                      double radius, const SampledDictionary& dict) {
  if (radius <= 0.0 || radius > 1.0)
    throw ValidationError("check_soft_conclusion: radius must lie in (0, 1]");
  if (x0_index < 0 || x0_index >= dict.size())
    throw ValidationError("check_soft_conclusion: peak index outside dictionary");
  const Vec peak = dict.atom(x0_index);

  ConclusionCheck check;
  for (int idx : mu_star.support) {
    if (idx < 0 || idx >= dict.size())
      throw ValidationError("check_soft_conclusion: support index outside dictionary");
    if (dict.subfamily_of(idx) != j0) continue;
    const double overlap = std::abs(inner(dict.atom(idx), peak));
    if (overlap > check.witness_overlap || check.witness < 0) {
      check.witness_overlap = overlap;
      check.witness = idx;
    }
  }
  check.holds = check.witness >= 0 && check.witness_overlap >= radius - kStrict;
  return check;
}

DualProgramEval dual_program_value(const RealVec& p, const Mat& op, const Vec& rhs,
                                   const SampledDictionary& dict, int num_phases, double tol) {
  const auto m = op.rows();
  if (p.size() != 2 * m) throw ValidationError("dual_program_value: p must have length 2m");
  if (rhs.size() != m) throw ValidationError("dual_program_value: rhs length mismatch");
  if (op.cols() != dict.ambient_dim())
    throw ValidationError("dual_program_value: operator does not act on the dictionary space");

  Vec lambda(m);
  for (Eigen::Index i = 0; i < m; ++i) lambda[i] = Complex(p[i], p[m + i]);
  const Vec nu = op.adjoint() * lambda;

  DualProgramEval eval;
  eval.value = (rhs.real().dot(p.head(m)) + rhs.imag().dot(p.tail(m)));
  for (int k = 0; k < dict.size(); ++k) {
    const Complex pairing = inner(dict.atom(k), nu);
    for (int l = 0; l < num_phases; ++l) {
      const double angle = 2.0 * std::numbers::pi * l / num_phases;
      const Complex phase(std::cos(angle), std::sin(angle));
      eval.feasibility_sup = std::max(eval.feasibility_sup, (std::conj(phase) * pairing).real());
    }
  }
  eval.feasible = eval.feasibility_sup <= 1.0 + tol;
  return eval;
}

ExactCertificateReport verify_exact_nuclear_certificate(const RealMat& nu, const RealMat& u_r,
                                                        const RealMat& v_r, double tol) {
  if (nu.rows() != v_r.rows() || nu.cols() != u_r.rows() || u_r.cols() != v_r.cols())
    throw ValidationError("verify_exact_nuclear_certificate: shape mismatch");
  const double u_orth = (u_r.transpose() * u_r - RealMat::Identity(u_r.cols(), u_r.cols()))
                            .cwiseAbs()
                            .maxCoeff();
  const double v_orth = (v_r.transpose() * v_r - RealMat::Identity(v_r.cols(), v_r.cols()))
                            .cwiseAbs()
                            .maxCoeff();
  if (u_orth > 1e-9 || v_orth > 1e-9)
    throw ValidationError("verify_exact_nuclear_certificate: factors must be orthonormal");

  const RealMat w = nu - v_r * u_r.transpose();
  const RealMat pu = u_r * u_r.transpose();  // onto span(u_i)
  const RealMat pv = v_r * v_r.transpose();  // onto span(v_i)

  const auto spectral = [](const RealMat& x) {
    return x.size() == 0 ? 0.0 : Eigen::JacobiSVD<RealMat>(x).singularValues()[0];
  };
  const double annihilation = spectral(w * pu);
  const double range_leak = spectral(pv * w);

  ExactCertificateReport report;
  report.interpolation_error = std::max(annihilation, range_leak);
  report.off_support_sup =
      spectral((RealMat::Identity(nu.rows(), nu.rows()) - pv) * w *
               (RealMat::Identity(nu.cols(), nu.cols()) - pu));
  report.valid = report.interpolation_error <= tol && report.off_support_sup <= 1.0 + tol;
  return report;
}

ExactCertificateReport verify_exact_superres_certificate(const Vec& g_samples,
                                                         const RealVec& grid,
                                                         const RealVec& support_points,
                                                         const Vec& phases, double tol) {
  if (g_samples.size() != grid.size())
    throw ValidationError("verify_exact_superres_certificate: samples/grid length mismatch");
  if (support_points.size() != phases.size())
    throw ValidationError("verify_exact_superres_certificate: support/phase length mismatch");

  ExactCertificateReport report;
  for (Eigen::Index k = 0; k < support_points.size(); ++k) {
    Eigen::Index hit = -1;
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
      if (std::abs(grid[j] - support_points[k]) <= 1e-12 * (1.0 + std::abs(grid[j]))) {
        hit = j;
        break;
      }
    }
    if (hit < 0)
      throw ValidationError("verify_exact_superres_certificate: support point off the grid");
    report.interpolation_error =
        std::max(report.interpolation_error, std::abs(g_samples[hit] - phases[k]));
  }
  for (Eigen::Index j = 0; j < grid.size(); ++j)
    report.off_support_sup = std::max(report.off_support_sup, std::abs(g_samples[j]));
  report.valid = report.interpolation_error <= tol && report.off_support_sup <= 1.0 + tol;
  return report;
}

L12Membership l12_condition_membership(const RealVec& v_i0, const RealVec& eta_i0, double sigma,
                                       double t, double alpha) {
  if (alpha <= 0.0 || alpha >= std::numbers::pi / 2.0)
    throw ValidationError("l12_condition_membership: alpha must lie in (0, pi/2)");
  if (std::abs(eta_i0.norm() - 1.0) > 1e-9)
    throw ValidationError("l12_condition_membership: eta must be a unit vector");
  if (v_i0.size() != eta_i0.size())
    throw ValidationError("l12_condition_membership: dimension mismatch");

  const double along = v_i0.dot(eta_i0);
  const RealVec orth = v_i0 - along * eta_i0;

  L12Membership member;
  member.new_ok = std::abs(along) <= sigma && orth.norm() <= 1.0 - t;
  const double norm = v_i0.norm();
  const double angle = norm == 0.0 ? 0.0 : std::acos(std::clamp(along / norm, -1.0, 1.0));
  member.old_ok = norm <= 1.0 / std::cos(alpha) + 1e-12 && angle <= alpha + 1e-12;
  return member;
}

ClassicalBounds classical_separation_bounds(double kappa) {
  if (kappa <= 0.0 || kappa > 1.0)
    throw ValidationError("classical_separation_bounds: kappa must lie in (0, 1]");
  ClassicalBounds bounds;
  bounds.s_donoho = 0.5 * (1.0 / kappa + 1.0);
  bounds.s_elad = (std::numbers::sqrt2 - 0.5) / kappa;
  return bounds;
}

}  // namespace softrec
