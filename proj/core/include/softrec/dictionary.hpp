#pragma once

#include "softrec/common.hpp"

#include <optional>
#include <vector>

namespace softrec {

/// Point of the index set: a point of R^p, or an integer label embedded as 1-d.
struct IndexPoint {
  RealVec coords;

  IndexPoint() = default;
  explicit IndexPoint(RealVec c) : coords(std::move(c)) {}
  static IndexPoint label(int k) {
    RealVec c(1);
    c[0] = static_cast<double>(k);
    return IndexPoint(c);
  }
  double distance(const IndexPoint& other) const { return (coords - other.coords).norm(); }
};

/// Finite sampling of a normalized dictionary. Atoms are unit columns; each atom
/// carries an index point and a subfamily label. Immutable after construction.
class SampledDictionary {
 public:
  SampledDictionary(Mat atoms, std::vector<IndexPoint> index_points, std::vector<int> subfamily);

  /// All atoms in one subfamily, index points = labels 0..K-1.
  static SampledDictionary from_atoms(Mat atoms, int subfamily_label = 1);

  int ambient_dim() const { return static_cast<int>(atoms_.rows()); }
  int size() const { return static_cast<int>(atoms_.cols()); }
  const Mat& atoms() const { return atoms_; }
  Vec atom(int k) const { return atoms_.col(k); }
  const std::vector<IndexPoint>& index_points() const { return index_points_; }
  const std::vector<int>& subfamily() const { return subfamily_; }
  int subfamily_of(int k) const { return subfamily_.at(static_cast<std::size_t>(k)); }
  bool is_real() const;

 private:
  Mat atoms_;
  std::vector<IndexPoint> index_points_;
  std::vector<int> subfamily_;
};

/// Finitely supported measure on dictionary indices; TV norm is the weight l1 mass.
struct DiscreteMeasure {
  std::vector<int> support;  // distinct atom indices
  Vec weights;               // same length

  DiscreteMeasure() : weights(0) {}
  DiscreteMeasure(std::vector<int> support_, Vec weights_);

  int size() const { return static_cast<int>(support.size()); }
  double tv_norm() const;
  /// Weight at an index, zero off the support.
  Complex weight_at(int index) const;
  static DiscreteMeasure dirac(int index, Complex weight);
};

/// Polar-decomposed measure on index x phase pairs: nonnegative weights, unit phases.
struct LiftedMeasure {
  std::vector<int> support;
  RealVec weights;  // >= 0
  Vec phases;       // |phase| = 1 within 1e-12

  LiftedMeasure() : weights(0), phases(0) {}
  LiftedMeasure(std::vector<int> support_, RealVec weights_, Vec phases_);
  // Sequential sum, matching DiscreteMeasure::tv_norm term for term.
  double tv_norm() const {
    double total = 0.0;
    for (Eigen::Index k = 0; k < weights.size(); ++k) total += weights[k];
    return total;
  }
};

/// Sum of weight_k * atom(support_k).
Vec synthesize(const DiscreteMeasure& mu, const SampledDictionary& dict);

/// Polar decomposition weight -> (modulus, phase); zero weights are dropped.
/// TV norm is preserved exactly.
LiftedMeasure lift_measure(const DiscreteMeasure& mu);

/// Recombines (modulus, phase) into complex weights.
DiscreteMeasure unlift_measure(const LiftedMeasure& lifted);

/// sup over the selected atoms of |<v, atom>|; nullopt selects every atom.
double dual_atomic_norm(const Vec& v, const SampledDictionary& dict,
                        std::optional<int> subfamily = std::nullopt);

struct GaugeOptions {
  int num_phases = 64;        // coarse phase discretization of the unit circle
  int refine_points = 129;    // second pass inside +-1 coarse slot around active phases
  double span_tol = 1e-8;     // residual tolerance for the span membership check
  int max_atoms = 64;         // exact-solve size guard
};

struct GaugeResult {
  double value = 0.0;
  DiscreteMeasure decomposition;  // attains the value, synthesizes v
  RealVec dual;                   // equality multipliers from the LP (realified for complex)
};

/// Atomic norm as the minimal total weight mass synthesizing v, solved as an LP
/// over nonnegative coefficients on the phase-extended dictionary. Exact for real
/// dictionaries; for complex ones the circle is discretized (num_phases, then one
/// refinement pass), with relative overestimate at most 1 - cos(pi / (refined
/// spacing)) ~ 3e-7 at the defaults. Throws InfeasibleError when v is outside the
/// span of the atoms (atomic norm "infinity").
GaugeResult gauge_atomic_norm(const Vec& v, const SampledDictionary& dict,
                              const GaugeOptions& options = {});

}  // namespace softrec
