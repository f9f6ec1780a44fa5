#pragma once

#include "softrec/common.hpp"
#include "softrec/solvers.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace softrec {

/// Two-component instance: orthonormal systems psi/theta, coefficient pair with
/// unit combined l1 mass, a designated peak index in the first component, and
/// the cached mutual coherence.
class SeparationInstance {
 public:
  SeparationInstance(Mat psi, Mat theta, Vec c1, Vec c2, int peak_index);

  const Mat& psi() const { return psi_; }
  const Mat& theta() const { return theta_; }
  const Vec& c1() const { return c1_; }
  const Vec& c2() const { return c2_; }
  int peak_index() const { return peak_index_; }
  double kappa() const { return kappa_; }
  int dim() const { return static_cast<int>(psi_.rows()); }
  Vec signal() const { return psi_ * c1_ + theta_ * c2_; }

 private:
  Mat psi_, theta_;
  Vec c1_, c2_;
  int peak_index_;
  double kappa_;
};

/// max_{i,j} |<psi_i, theta_j>| for orthonormal psi, theta.
double mutual_coherence(const Mat& psi, const Mat& theta);

enum class RowEnsemble { ScaledStandardBasis, ScaledRandomOrthonormal, ScaledFourier };

struct IsotropicSample {
  Mat rows;                 // m x n, each row sqrt(n) times a row of an ONB
  double spike_incoherence;  // max row-entry modulus (bound versus the standard basis)
};

/// m i.i.d. draws of sqrt(n) times a row of a fixed orthonormal system chosen by
/// the ensemble; isotropic by construction. Seed-fixed calls are bit-reproducible.
IsotropicSample sample_isotropic_rows(int n, int m, RowEnsemble ensemble, std::uint64_t seed);

/// max_{l,j} |<row_l, basis_j>|.
double incoherence_bound(const Mat& rows, const Mat& basis);

/// Unitary discrete Fourier matrix, entries exp(-2 pi i jk / n) / sqrt(n).
Mat fourier_basis(int n);

struct GolfingConfig {
  double incoherence = 1.0;   // a-priori M for the measurement ensemble
  int dictionary_dim = 0;     // n, enters the block-size log factor
  double failure_prob = 0.1;  // delta
  double block_rows_constant = 8.0;  // proportionality constant in front of p_min
};

struct GolfingParameters {
  double gamma = 0.0;
  double s = 0.0;        // scale of the peak-proximity tolerance
  double epsilon = 0.0;  // s / |c1_peak|
  double tau = 0.0;
  double sigma_hat = 0.0;
  double c_gamma = 0.0;
  int r_min = 0;
  long p_min = 0;
  Complex peak_phase;  // c1_peak / |c1_peak|
};

/// Solves the coupled pair tau = 1 - kappa sigma_hat - gamma/3 and the
/// sigma_hat balance equation, with s at the midpoint of its admissible
/// interval. Throws when kappa * 4 / |c1_peak| > 1 - gamma.
GolfingParameters choose_golfing_parameters(Complex c1_peak, double kappa, double gamma,
                                            const GolfingConfig& config);

struct GolfingCertificate {
  Vec nu;
  RealVec contraction_trace;  // |inner(nu_j, psi_peak) - peak_phase*sigma_hat|, j = 0..r
};

/// Golfing iteration over r disjoint blocks of p rows:
///   nu_j = nu_{j-1} - (1/p) A_j^* A_j (u_{j-1} - peak_phase * sigma_hat) psi_peak,
/// u_j = inner(nu_j, psi_peak). The minus sign realizes the per-block
/// contraction factor 1 - (1/p) ||A_j psi_peak||^2.
GolfingCertificate golfing_certificate(const Mat& measurement, int blocks, int block_rows,
                                       const Vec& psi_peak, const GolfingParameters& params);

struct SeparationConditionReport {
  double peak_slack = 0.0;         // epsilon minus the peak proximity error
  double off_support_slack = 0.0;  // (tau - kappa sigma_hat - kappa epsilon) minus the off sup
  double tau_margin = 0.0;         // (1 - kappa sigma_hat) minus tau
  double peak_error = 0.0;
  double off_support_sup = 0.0;
  bool ok = false;
};

SeparationConditionReport verify_separation_conditions(const Vec& nu,
                                                       const SeparationInstance& instance,
                                                       const GolfingParameters& params);

/// l1 distance to the best s-sparse approximant.
double best_s_term_error(const Vec& c, int s);

struct SeparationExperimentConfig {
  int n = 64;
  RowEnsemble ensemble = RowEnsemble::ScaledRandomOrthonormal;
  std::string c_profile = "peak-uniform";  // or "peak-only"
  double peak_weight = 0.5;
  double gamma = 0.5;
  int blocks = 0;      // 0 = chooser's r_min
  int block_rows = 0;  // 0 = chooser's p_min capped at n
  int trials = 20;
  std::uint64_t seed = 0;
  double support_threshold = 1e-5;  // relative to the solution TV norm
  double solver_tol = 1e-8;
  int solver_max_iter = 20000;
  GolfingConfig golfing;
};

struct SeparationTrialRow {
  int trial = 0;
  bool cert_ok = false;
  double peak_slack = 0.0;
  double off_support_slack = 0.0;
  bool recovered = false;
  double solver_gap = 0.0;
};

struct SeparationExperimentResult {
  std::vector<SeparationTrialRow> rows;
  GolfingParameters params;
  int block_rows_used = 0;
  int blocks_used = 0;
};

/// Full pipeline per trial: sample measurements, run the golfing construction,
/// verify the certificate conditions, solve the concatenated-dictionary l1
/// program, and test whether the peak index survives in the solution support.
/// Trials run concurrently with per-trial seeds. When block_rows >= n each
/// block is one full deterministic sweep of the scaled system (fresh system per
/// block), which is the exact-certificate regime of the construction.
SeparationExperimentResult run_separation_experiment(const SeparationExperimentConfig& config);

}  // namespace softrec
