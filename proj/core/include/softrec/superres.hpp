#pragma once

#include "softrec/common.hpp"
#include "softrec/dictionary.hpp"
#include "softrec/solvers.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace softrec {

/// Gaussian filter of width lambda: auto-correlation exp(-x^2 / (2 lambda^2)).
struct GaussianFilter {
  double width = 1.0;
};

/// Filter given by spectrum samples |phi_hat|^2 >= 0 on an increasing frequency
/// grid; renormalized at construction so the auto-correlation is one at zero.
/// Fourier convention repo-wide: forward integral of f(x) exp(-ixt), inverse
/// with a 1/(2 pi) factor.
class TabulatedFilter {
 public:
  TabulatedFilter(RealVec frequencies, RealVec power);
  const RealVec& frequencies() const { return freqs_; }
  const RealVec& power() const { return power_; }

 private:
  RealVec freqs_, power_;
};

using FilterSpec = std::variant<GaussianFilter, TabulatedFilter>;

/// a(x): closed form for the Gaussian, trapezoid quadrature of the spectrum
/// otherwise (O(step^2) error).
Complex autocorrelation(const FilterSpec& filter, double x);

/// First-moment norm sqrt( (1/2pi) integral t^2 |phi_hat(t)|^2 dt ); equals
/// 1/width for the Gaussian. Throws when a tabulated spectrum carries
/// non-negligible mass at the grid ends (divergent moment).
double filter_first_moment_norm(const FilterSpec& filter);

/// Filter impulse response phi at the given points (zero-phase square root of
/// the spectrum; real and even).
RealVec filter_time_samples(const FilterSpec& filter, const RealVec& points);

/// Discretization of the filtered-Dirac space on a working interval: an
/// orthonormal cosine basis on an enlarged grid pushed through the isometry
/// delta_x -> phi(. - x). Coefficient maps <delta_x, f_i> are exact inner
/// products on the enlarged grid, so the Parseval identity holds there to
/// machine precision. Construction is done once and shared read-only.
class GridFrame {
 public:
  /// n must be a power of two >= 64. padding <= 0 selects the default
  /// (eight effective filter widths per side); a padding that leaves more
  /// than 1e-6 filter mass outside the enlarged grid is rejected.
  GridFrame(double lo, double hi, int n, FilterSpec filter, double padding = 0.0);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double step() const { return step_; }
  const RealVec& grid() const { return grid_; }
  int frame_size() const { return static_cast<int>(basis_.rows()); }
  const FilterSpec& filter() const { return filter_; }

  /// All frame coefficients <delta_x, f_i>_E, x anywhere in the working interval.
  RealVec coefficients_at(double x) const;
  /// Coefficients restricted to an index set.
  RealVec coefficients_at(double x, const std::vector<int>& index_set) const;
  double delta_norm_sq(double x) const;
  /// <delta_x, delta_y>_E on the discretization (approximates a(x - y)).
  double e_inner(double x, double y) const;
  /// Frame-truncation error eps(M, x): the l2 tail of the coefficients.
  double approximation_error(const std::vector<int>& index_set, double x) const;
  /// sum_k weights_k f_{index_k} as a vector on the enlarged grid.
  RealVec frame_combination(const std::vector<int>& index_set, const RealVec& weights) const;
  /// <combination, delta_y>_E for a vector on the enlarged grid.
  double shifted_inner(const RealVec& enlarged_vector, double y) const;

 private:
  RealVec sampled_shift(double x) const;

  double lo_, hi_, step_;
  RealVec grid_;           // working grid (cell centers)
  RealVec enlarged_grid_;  // padded grid carrying the filter mass
  RealMat basis_;          // orthonormal cosine rows on the enlarged grid
  FilterSpec filter_;
};

struct CoverResult {
  std::vector<int> indices;
  double achieved_sup = 0.0;  // max eps(M, x) over the verification grid
};

/// Index set M with sup_{x in [lo, hi]} eps(M, x) <= eps: covering centers at
/// spacing eps / ||phi||_{1,2}, greedy largest-coefficient sets of per-center
/// error eps/2, unioned, then verified on a grid of >= 10 points per covering
/// radius. Throws ConfigError (reporting the achievable floor) when eps is
/// below the discretization floor.
CoverResult cover_interval_frame_set(const GridFrame& frame, double lo, double hi, double eps);

struct SuperresParameters {
  double level = 0.0;      // lambda: certified auto-correlation level
  double tail_bound = 0.0;  // L: |a| beyond the separation
  double delta = 0.0;       // localization radius at the level
  double delta_sep = 0.0;
  double delta_sep_min = 0.0;  // smallest admissible separation for these (c, theta)
  double theta = 0.0;
  double gamma = 0.0;
  double c_abs = 0.0;  // peak weight modulus
  double width = 0.0;  // Gaussian width
};

struct SuperresParamResult {
  bool feasible = false;
  std::string failed_condition;  // empty when feasible
  SuperresParameters params;
};

/// Gaussian-filter parameter map: L = exp(-delta_sep^2 / (2 width^2)),
/// level = theta (1-gamma) c_abs, delta = width sqrt(2 log(1/level)), and the
/// feasibility test (c_abs (1+L) - L)(1-gamma) >= level.
SuperresParamResult superres_parameters(double c_abs, double gamma, double theta,
                                        const GaussianFilter& filter, double delta_sep);

/// Largest theta admissible at this separation (equivalently the theta whose
/// minimal required separation is exactly delta_sep): 1 - L (1 - c_abs) / c_abs.
double theta_for_separation(double c_abs, const GaussianFilter& filter, double delta_sep);

/// The eps budget at which the certified conclusion threshold equals the level:
/// gamma D0 / ((2 - gamma) D0 + 2 L + 2) with D0 = c_abs (1 + L) - L.
double certificate_eps_budget(double c_abs, double gamma, double tail_bound);

/// Finitely supported spike train on the line.
struct SpikeTrain {
  RealVec positions;
  Vec weights;
  double tv_norm() const { return weights.cwiseAbs().sum(); }
};

/// Evaluable certificate g built from a frame index set around a peak position.
class SuperresCertificate {
 public:
  SuperresCertificate(const GridFrame& frame, std::vector<int> index_set, double x0,
                      Complex peak_phase, double scale);
  Complex eval(double y) const;
  Vec samples(const RealVec& points) const;
  double scale() const { return scale_; }  // the constant C
  double x0() const { return x0_; }

 private:
  const GridFrame* frame_;
  std::vector<int> index_set_;
  double x0_;
  Complex peak_phase_;
  double scale_;
  RealVec weights_;   // coefficients of delta_x0 restricted to the set
  RealVec combined_;  // sum of weights_ times the frame vectors, for O(grid) evaluation
};

/// g = C sum_{i in M} <peak_phase delta_x0, f_i> (filtered f_i), with
/// C = (c_abs (1 - eps0 + (1 - eps0) L) - (1 + eps0) L)^{-1}. Requires
/// eps(M, x0) <= eps0 and a positive denominator.
SuperresCertificate build_superres_certificate(const GridFrame& frame,
                                               const std::vector<int>& index_set, double x0,
                                               Complex peak_phase, double eps0, double tail_bound,
                                               double c_abs);

struct CorGReport {
  double alignment = 0.0;  // sum of Re(c_x g(x)) over the spike train
  double sigma = 0.0;      // |g(x0)|
  double t = 0.0;          // 1 - sup |g(y) - a(y - x0) g(x0)|
  double radius = 0.0;     // t / sigma
  bool valid = false;
};

/// Verifies the certificate conditions against a spike train: alignment >= 1,
/// and the deviation sup taken over the supplied dense grid.
CorGReport verify_cor_g(const SuperresCertificate& cert, const SpikeTrain& mu0, double x0,
                        const FilterSpec& filter, const RealVec& dense_grid);

struct TvRecovery {
  DiscreteMeasure measure;  // support holds working-grid indices
  SolveResult solve;
};

/// Grid-restricted TV minimization: measurements <mu0, f_i> for i in the index
/// set, unknowns complex weights on the working grid, solved as l1 through the
/// equality-constrained solver.
TvRecovery tv_grid_recover(const GridFrame& frame, const std::vector<int>& index_set,
                           const SpikeTrain& mu0, double solver_tol, int max_iter);

struct SuperresRecoveryConfig {
  double width = 0.05;  // Gaussian width
  double lo = 0.0, hi = 1.0;
  int grid_n = 1024;
  double c_abs = 0.1;   // peak weight, the second spike carries 1 - c_abs
  double gamma = 0.5;
  double delta_sep_over_width = 3.95;
  int trials = 20;
  std::uint64_t seed = 0;
  double support_threshold = 1e-5;  // relative to the recovered TV norm
  double solver_tol = 1e-8;
  int solver_max_iter = 60000;
  double cover_safety = 0.95;  // cover built at this fraction of the eps budget
};

struct SuperresTrialRow {
  int trial = 0;
  double true_x0 = 0.0;
  double nearest_support = 0.0;
  double distance = 0.0;
  double cert_radius = 0.0;  // verified t / sigma
  bool cert_valid = false;
  bool recovered_within_delta = false;
  double solver_gap = 0.0;
};

struct SuperresRecoveryResult {
  SuperresParameters params;
  double eps_budget = 0.0;
  int measurements = 0;  // |M|
  std::vector<SuperresTrialRow> rows;
};

/// Two-spike recovery experiment: shared frame and cover, per-trial random peak
/// position, certificate construction + verification, grid TV recovery, and the
/// localization test at radius delta + one grid step. theta is set at the
/// separation boundary so the level is the certified floor.
SuperresRecoveryResult run_superres_recovery(const SuperresRecoveryConfig& config);

struct DeltasCurvePoint {
  double c_abs = 0.0;
  double delta_sep_over_lambda = 0.0;
  double delta_over_lambda = 0.0;
};

/// Separation-vs-localization trade-off curves: for each peak weight the
/// parametric sweep over theta of (largest admissible separation, localization
/// radius), both in units of the filter width.
std::vector<DeltasCurvePoint> deltas_curve(const std::vector<double>& c_abs_list, double gamma,
                                           int points_per_curve);

}  // namespace softrec
