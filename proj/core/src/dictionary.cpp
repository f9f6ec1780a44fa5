#include "softrec/dictionary.hpp"

#include <cmath>
#include <unordered_set>

namespace softrec {

SampledDictionary::SampledDictionary(Mat atoms, std::vector<IndexPoint> index_points,
                                     std::vector<int> subfamily)
    : atoms_(std::move(atoms)),
      index_points_(std::move(index_points)),
      subfamily_(std::move(subfamily)) {
  if (atoms_.rows() < 1 || atoms_.cols() < 1)
    throw ValidationError("dictionary: need ambient_dim >= 1 and at least one atom");
  if (!atoms_.allFinite()) throw NumericError("dictionary: non-finite atom");
  const auto n = static_cast<std::size_t>(atoms_.cols());
  if (index_points_.size() != n || subfamily_.size() != n)
    throw ValidationError("dictionary: atoms, index_points, subfamily must have equal length");
  for (int k = 0; k < atoms_.cols(); ++k) {
    if (std::abs(atoms_.col(k).norm() - 1.0) > 1e-10)
      throw ValidationError("dictionary: atom " + std::to_string(k) + " is not unit norm");
  }
}

SampledDictionary SampledDictionary::from_atoms(Mat atoms, int subfamily_label) {
  const int n = static_cast<int>(atoms.cols());
  std::vector<IndexPoint> points;
  points.reserve(n);
  for (int k = 0; k < n; ++k) points.push_back(IndexPoint::label(k));
  return SampledDictionary(std::move(atoms), std::move(points),
                           std::vector<int>(static_cast<std::size_t>(n), subfamily_label));
}

bool SampledDictionary::is_real() const {
  return atoms_.imag().cwiseAbs().maxCoeff() == 0.0;
}

DiscreteMeasure::DiscreteMeasure(std::vector<int> support_, Vec weights_)
    : support(std::move(support_)), weights(std::move(weights_)) {
  if (static_cast<Eigen::Index>(support.size()) != weights.size())
    throw ValidationError("measure: support/weights length mismatch");
  std::unordered_set<int> seen;
  for (int idx : support) {
    if (!seen.insert(idx).second)
      throw ValidationError("measure: duplicate support index " + std::to_string(idx));
  }
}

double DiscreteMeasure::tv_norm() const {
  double total = 0.0;
  for (Eigen::Index k = 0; k < weights.size(); ++k) total += std::abs(weights[k]);
  return total;
}

Complex DiscreteMeasure::weight_at(int index) const {
  for (std::size_t k = 0; k < support.size(); ++k)
    if (support[k] == index) return weights[static_cast<Eigen::Index>(k)];
  return Complex(0.0, 0.0);
}

DiscreteMeasure DiscreteMeasure::dirac(int index, Complex weight) {
  Vec w(1);
  w[0] = weight;
  return DiscreteMeasure({index}, std::move(w));
}

LiftedMeasure::LiftedMeasure(std::vector<int> support_, RealVec weights_, Vec phases_)
    : support(std::move(support_)), weights(std::move(weights_)), phases(std::move(phases_)) {
  const auto n = static_cast<Eigen::Index>(support.size());
  if (weights.size() != n || phases.size() != n)
    throw ValidationError("lifted measure: length mismatch");
  for (Eigen::Index k = 0; k < n; ++k) {
    if (weights[k] < 0.0) throw ValidationError("lifted measure: negative weight");
    if (std::abs(std::abs(phases[k]) - 1.0) > 1e-12)
      throw ValidationError("lifted measure: phase off the unit circle");
  }
}

Vec synthesize(const DiscreteMeasure& mu, const SampledDictionary& dict) {
  Vec out = Vec::Zero(dict.ambient_dim());
  for (std::size_t k = 0; k < mu.support.size(); ++k) {
    const int idx = mu.support[k];
    if (idx < 0 || idx >= dict.size())
      throw ValidationError("synthesize: support index " + std::to_string(idx) +
                            " outside dictionary");
    out += mu.weights[static_cast<Eigen::Index>(k)] * dict.atoms().col(idx);
  }
  return out;
}

LiftedMeasure lift_measure(const DiscreteMeasure& mu) {
  std::vector<int> support;
  std::vector<double> weights;
  std::vector<Complex> phases;
  for (std::size_t k = 0; k < mu.support.size(); ++k) {
    const Complex c = mu.weights[static_cast<Eigen::Index>(k)];
    const double mod = std::abs(c);
    if (mod == 0.0) continue;
    support.push_back(mu.support[k]);
    weights.push_back(mod);
    phases.push_back(c / mod);
  }
  RealVec w(static_cast<Eigen::Index>(weights.size()));
  Vec p(static_cast<Eigen::Index>(phases.size()));
  for (std::size_t k = 0; k < weights.size(); ++k) {
    w[static_cast<Eigen::Index>(k)] = weights[k];
    p[static_cast<Eigen::Index>(k)] = phases[k];
  }
  return LiftedMeasure(std::move(support), std::move(w), std::move(p));
}

DiscreteMeasure unlift_measure(const LiftedMeasure& lifted) {
  Vec w(lifted.weights.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = lifted.weights[k] * lifted.phases[k];
  return DiscreteMeasure(lifted.support, std::move(w));
}

double dual_atomic_norm(const Vec& v, const SampledDictionary& dict,
                        std::optional<int> subfamily) {
  if (v.size() != dict.ambient_dim()) throw ValidationError("dual_atomic_norm: dimension mismatch");
  double sup = -1.0;
  for (int k = 0; k < dict.size(); ++k) {
    if (subfamily && dict.subfamily_of(k) != *subfamily) continue;
    sup = std::max(sup, std::abs(inner(v, dict.atom(k))));
  }
  if (sup < 0.0) throw ValidationError("dual_atomic_norm: empty subfamily");
  return sup;
}

}  // namespace softrec
