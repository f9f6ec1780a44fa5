#pragma once

#include "softrec/certificates.hpp"
#include "softrec/dictionary.hpp"
#include "softrec/rng.hpp"
#include "softrec/solvers.hpp"

#include <optional>

namespace softrec::testing {

inline SampledDictionary random_real_dictionary(Rng& rng, int dim, int max_atoms) {
  const int count = 1 + static_cast<int>(rng.uniform_index(max_atoms));
  Mat atoms(dim, count);
  for (int a = 0; a < count; ++a) atoms.col(a) = rng.real_unit_vector(dim).cast<Complex>();
  return SampledDictionary::from_atoms(std::move(atoms));
}

inline SampledDictionary random_complex_dictionary(Rng& rng, int dim, int max_atoms,
                                                   int subfamilies = 1) {
  const int count = std::max(2, 1 + static_cast<int>(rng.uniform_index(max_atoms)));
  Mat atoms(dim, count);
  std::vector<IndexPoint> points;
  std::vector<int> labels;
  for (int a = 0; a < count; ++a) {
    atoms.col(a) = rng.unit_vector(dim);
    points.push_back(IndexPoint::label(a));
    labels.push_back(1 + static_cast<int>(rng.uniform_index(subfamilies)));
  }
  return SampledDictionary(std::move(atoms), std::move(points), std::move(labels));
}

/// A complete soft-recovery test instance: dictionary, unit-TV ground truth
/// with a designated peak, measurement operator, and a certificate in ran A^*
/// that verifies as valid by construction.
struct SoftInstance {
  SampledDictionary dict;
  DiscreteMeasure mu0;
  Mat measurement;  // acts on the ambient space
  Vec rhs;
  Vec certificate;
  int peak_index = 0;
  int peak_family = 1;
  SoftCertificateReport report;
};

/// Rejection-samples an instance whose least-squares certificate shadow leaves
/// a usable validity window; returns nullopt when this draw fails.
inline std::optional<SoftInstance> try_make_soft_instance(Rng& rng, int max_dim = 8,
                                                          int max_atoms = 10) {
  const int dim = 3 + static_cast<int>(rng.uniform_index(std::max(1, max_dim - 2)));
  const int families = 1 + static_cast<int>(rng.uniform_index(2));
  SampledDictionary dict = random_complex_dictionary(rng, dim, max_atoms, families);
  const int count = dict.size();
  const int peak = static_cast<int>(rng.uniform_index(count));
  const int family = dict.subfamily_of(peak);

  // Ground truth: dominant peak plus a short tail, normalized to unit TV.
  std::vector<int> support{peak};
  std::vector<Complex> weights{Complex(0.75 + 0.2 * rng.uniform(), 0.0) * rng.unit_phase()};
  const int tail = static_cast<int>(rng.uniform_index(std::min(count, 3)));
  for (int extra = 0; extra < tail; ++extra) {
    const int idx = static_cast<int>(rng.uniform_index(count));
    bool fresh = true;
    for (int s : support) fresh = fresh && s != idx;
    if (fresh) {
      support.push_back(idx);
      weights.push_back(Complex(0.05 + 0.1 * rng.uniform(), 0.0) * rng.unit_phase());
    }
  }
  Vec weight_vec(static_cast<Eigen::Index>(weights.size()));
  double tv = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) tv += std::abs(weights[i]);
  for (std::size_t i = 0; i < weights.size(); ++i)
    weight_vec[static_cast<Eigen::Index>(i)] = weights[i] / tv;
  DiscreteMeasure mu0(support, std::move(weight_vec));

  const int m = 2 + static_cast<int>(rng.uniform_index(dim));
  Mat measurement(m, dim);
  for (Eigen::Index i = 0; i < m; ++i) measurement.row(i) = rng.cgaussian_vector(dim).transpose();

  // Certificate candidate: least-squares shadow of the peak atom in ran A^*,
  // rotated to maximize the alignment, then scaled just past the threshold.
  const Vec peak_atom = dict.atom(peak);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(measurement.adjoint());
  Vec nu_unit = measurement.adjoint() * cod.solve(peak_atom);
  if (nu_unit.norm() < 1e-12) return std::nullopt;

  Complex alignment_sum(0.0, 0.0);
  for (std::size_t idx = 0; idx < mu0.support.size(); ++idx)
    alignment_sum += mu0.weights[static_cast<Eigen::Index>(idx)] *
                     inner(dict.atom(mu0.support[idx]), nu_unit);
  if (std::abs(alignment_sum) < 1e-12) return std::nullopt;
  nu_unit *= std::polar(1.0, std::arg(alignment_sum));

  double other_sup = 0.0, orth_sup = 0.0;
  const Vec orth = nu_unit - inner(nu_unit, peak_atom) * peak_atom;
  for (int a = 0; a < count; ++a) {
    if (dict.subfamily_of(a) == family)
      orth_sup = std::max(orth_sup, std::abs(inner(orth, dict.atom(a))));
    else
      other_sup = std::max(other_sup, std::abs(inner(nu_unit, dict.atom(a))));
  }
  const double align = std::abs(alignment_sum);
  const double blocker = std::max(other_sup, orth_sup);
  if (align < 1.15 * blocker) return std::nullopt;
  const double beta = 1.02 / align;
  if (beta * blocker > 0.92) return std::nullopt;

  SoftInstance instance{std::move(dict), std::move(mu0), std::move(measurement), Vec(),
                        beta * nu_unit, peak, family, SoftCertificateReport{}};
  instance.rhs = instance.measurement * synthesize(instance.mu0, instance.dict);
  instance.report = verify_soft_certificate(instance.certificate, instance.peak_index,
                                            instance.peak_family, instance.mu0, instance.dict);
  if (!instance.report.valid || instance.report.conclusion_radius < 1e-3) return std::nullopt;
  return instance;
}

/// Solves the instance's synthesis l1 program and returns the support measure
/// at the given relative threshold.
inline DiscreteMeasure solve_instance_support(const SoftInstance& instance, double tol,
                                              int max_iter, SolveResult* out = nullptr,
                                              double support_threshold = 1e-5) {
  EqualityConstrainedProblem problem;
  problem.op = instance.measurement * instance.dict.atoms();
  problem.rhs = instance.rhs;
  problem.regularizer = L1Reg{};
  const SolveResult solve = solve_equality_constrained(problem, tol, max_iter);
  if (out) *out = solve;
  const double tv = solve.coefficients.cwiseAbs().sum();
  std::vector<int> support;
  std::vector<Complex> weights;
  for (Eigen::Index j = 0; j < solve.coefficients.size(); ++j) {
    if (std::abs(solve.coefficients[j]) > support_threshold * tv) {
      support.push_back(static_cast<int>(j));
      weights.push_back(solve.coefficients[j]);
    }
  }
  Vec w(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) w[static_cast<Eigen::Index>(i)] = weights[i];
  return DiscreteMeasure(std::move(support), std::move(w));
}

}  // namespace softrec::testing
