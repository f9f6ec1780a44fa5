#include "softrec/separation.hpp"

#include "softrec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace softrec {

namespace {

void require_orthonormal(const Mat& basis, const char* name) {
  const Mat gram = basis.adjoint() * basis;
  const double err = (gram - Mat::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-9)
    throw ValidationError(std::string(name) + ": columns are not orthonormal (error " +
                          std::to_string(err) + ")");
}

}  // namespace

SeparationInstance::SeparationInstance(Mat psi, Mat theta, Vec c1, Vec c2, int peak_index)
    : psi_(std::move(psi)), theta_(std::move(theta)), c1_(std::move(c1)), c2_(std::move(c2)),
      peak_index_(peak_index) {
  if (psi_.rows() != psi_.cols() || theta_.rows() != theta_.cols() ||
      psi_.rows() != theta_.rows())
    throw ValidationError("separation instance: psi and theta must be square and same size");
  require_orthonormal(psi_, "psi");
  require_orthonormal(theta_, "theta");
  if (c1_.size() != psi_.cols() || c2_.size() != theta_.cols())
    throw ValidationError("separation instance: coefficient lengths mismatch");
  const double mass = c1_.cwiseAbs().sum() + c2_.cwiseAbs().sum();
  if (std::abs(mass - 1.0) > 1e-9)
    throw ValidationError("separation instance: combined l1 mass must be one");
  if (peak_index_ < 0 || peak_index_ >= c1_.size() || std::abs(c1_[peak_index_]) == 0.0)
    throw ValidationError("separation instance: peak index not in the support of c1");
  kappa_ = mutual_coherence(psi_, theta_);
}

double mutual_coherence(const Mat& psi, const Mat& theta) {
  if (psi.rows() != theta.rows()) throw ValidationError("mutual_coherence: dimension mismatch");
  require_orthonormal(psi, "psi");
  require_orthonormal(theta, "theta");
  return (psi.adjoint() * theta).cwiseAbs().maxCoeff();
}

Mat fourier_basis(int n) {
  Mat f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double angle = -2.0 * std::numbers::pi * j * k / n;
      f(j, k) = scale * Complex(std::cos(angle), std::sin(angle));
    }
  }
  return f;
}

IsotropicSample sample_isotropic_rows(int n, int m, RowEnsemble ensemble, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ValidationError("sample_isotropic_rows: need n, m >= 1");
  Rng rng(seed);
  Mat system;
  switch (ensemble) {
    case RowEnsemble::ScaledStandardBasis:
      system = Mat::Identity(n, n);
      break;
    case RowEnsemble::ScaledRandomOrthonormal:
      system = rng.random_orthogonal(n).cast<Complex>();
      break;
    case RowEnsemble::ScaledFourier:
      system = fourier_basis(n);
      break;
    default:
      throw ValidationError("sample_isotropic_rows: unknown ensemble");
  }
  const double scale = std::sqrt(static_cast<double>(n));
  IsotropicSample sample;
  sample.rows = Mat(m, n);
  for (int l = 0; l < m; ++l) {
    const auto pick = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    sample.rows.row(l) = scale * system.row(pick);
  }
  sample.spike_incoherence = sample.rows.cwiseAbs().maxCoeff();
  return sample;
}

double incoherence_bound(const Mat& rows, const Mat& basis) {
  if (rows.cols() != basis.rows()) throw ValidationError("incoherence_bound: dimension mismatch");
  return (rows.conjugate() * basis).cwiseAbs().maxCoeff();
}

GolfingParameters choose_golfing_parameters(Complex c1_peak, double kappa, double gamma,
                                            const GolfingConfig& config) {
  const double c = std::abs(c1_peak);
  if (c <= 0.0) throw ValidationError("choose_golfing_parameters: zero peak coefficient");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("choose_golfing_parameters: gamma must lie in (0, 1)");
  if (kappa * 4.0 / c > 1.0 - gamma)
    throw ValidationError("choose_golfing_parameters: coherence condition violated");

  GolfingParameters params;
  params.gamma = gamma;
  params.peak_phase = c1_peak / c;
  // Midpoint of the admissible window gamma/16 <= s kappa / c <= gamma/12.
  params.s = gamma * (1.0 / 16.0 + 1.0 / 12.0) * 0.5 * c / kappa;
  params.epsilon = params.s / c;
  // tau = 1 - kappa sigma_hat - gamma/3 together with the sigma_hat balance
  // c sigma_hat = 1 + (1 - c)(tau - kappa sigma_hat) + s is linear 2x2.
  params.sigma_hat =
      (1.0 + (1.0 - gamma / 3.0) * (1.0 - c) + params.s) / (c + 2.0 * kappa * (1.0 - c));
  params.tau = 1.0 - kappa * params.sigma_hat - gamma / 3.0;
  params.c_gamma = (3.0 / gamma) * (1.0 - 2.0 * gamma / 3.0);
  params.r_min = static_cast<int>(std::ceil(std::log(8.0 / gamma)));

  const double m2 = sqr(config.incoherence);
  const int n = std::max(config.dictionary_dim, 2);
  const double log_factor =
      std::log(static_cast<double>(n) * std::max(params.r_min, 1) / config.failure_prob);
  params.p_min = static_cast<long>(std::ceil(
      config.block_rows_constant *
      (sqr(params.c_gamma) * m2 / sqr(kappa) + params.c_gamma * (m2 + kappa) / kappa) *
      log_factor));
  return params;
}

GolfingCertificate golfing_certificate(const Mat& measurement, int blocks, int block_rows,
                                       const Vec& psi_peak, const GolfingParameters& params) {
  if (blocks < 0 || block_rows < 1)
    throw ValidationError("golfing_certificate: bad block layout");
  if (measurement.rows() != static_cast<Eigen::Index>(blocks) * block_rows)
    throw ValidationError("golfing_certificate: rows must equal blocks * block_rows");
  if (measurement.cols() != psi_peak.size())
    throw ValidationError("golfing_certificate: dimension mismatch");

  const Complex target = params.peak_phase * params.sigma_hat;
  GolfingCertificate cert;
  cert.nu = Vec::Zero(psi_peak.size());
  cert.contraction_trace = RealVec(blocks + 1);
  cert.contraction_trace[0] = std::abs(-target);

  for (int j = 0; j < blocks; ++j) {
    const auto block = measurement.middleRows(static_cast<Eigen::Index>(j) * block_rows,
                                              block_rows);
    const Complex u = inner(cert.nu, psi_peak);
    cert.nu -= (u - target) / static_cast<double>(block_rows) *
               (block.adjoint() * (block * psi_peak));
    cert.contraction_trace[j + 1] = std::abs(inner(cert.nu, psi_peak) - target);
  }
  return cert;
}

SeparationConditionReport verify_separation_conditions(const Vec& nu,
                                                       const SeparationInstance& instance,
                                                       const GolfingParameters& params) {
  const Complex target = params.peak_phase * params.sigma_hat;
  const Vec psi_peak = instance.psi().col(instance.peak_index());

  SeparationConditionReport report;
  report.peak_error = std::abs(inner(nu, psi_peak) - target);

  const Vec psi_pairings = instance.psi().adjoint() * nu;  // conj of inner(nu, psi_i)
  const Vec theta_pairings = instance.theta().adjoint() * nu;
  double off = 0.0;
  for (Eigen::Index i = 0; i < psi_pairings.size(); ++i) {
    if (i == instance.peak_index()) continue;
    off = std::max(off, std::abs(psi_pairings[i]));
  }
  for (Eigen::Index i = 0; i < theta_pairings.size(); ++i)
    off = std::max(off, std::abs(theta_pairings[i]));
  report.off_support_sup = off;

  const double kappa = instance.kappa();
  const double off_bound = params.tau - kappa * params.sigma_hat - kappa * params.epsilon;
  report.peak_slack = params.epsilon - report.peak_error;
  report.off_support_slack = off_bound - report.off_support_sup;
  report.tau_margin = (1.0 - kappa * params.sigma_hat) - params.tau;
  report.ok = report.peak_slack >= 0.0 && report.off_support_slack >= 0.0 &&
              report.tau_margin > 0.0;
  return report;
}

double best_s_term_error(const Vec& c, int s) {
  if (s < 0) throw ValidationError("best_s_term_error: s must be nonnegative");
  std::vector<double> moduli(static_cast<std::size_t>(c.size()));
  for (Eigen::Index k = 0; k < c.size(); ++k)
    moduli[static_cast<std::size_t>(k)] = std::abs(c[k]);
  std::sort(moduli.begin(), moduli.end(), std::greater<double>());
  double tail = 0.0;
  for (std::size_t k = static_cast<std::size_t>(s); k < moduli.size(); ++k) tail += moduli[k];
  return tail;
}

namespace {

SeparationInstance make_profile_instance(const SeparationExperimentConfig& config, Rng& rng) {
  const int n = config.n;
  const Mat psi = Mat::Identity(n, n);
  const Mat theta = fourier_basis(n);
  const int peak = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));

  Vec c1 = Vec::Zero(n), c2 = Vec::Zero(n);
  if (config.c_profile == "peak-only") {
    c1[peak] = config.peak_weight;
    const double rest = (1.0 - config.peak_weight) / n;
    for (int i = 0; i < n; ++i) c2[i] = rest * rng.unit_phase();
  } else if (config.c_profile == "peak-uniform") {
    // Peak plus a flat tail split evenly between the two systems.
    c1[peak] = config.peak_weight;
    const double tail = (1.0 - config.peak_weight) / 2.0;
    for (int i = 0; i < n; ++i) {
      if (i != peak) c1[i] = tail / (n - 1) * rng.unit_phase();
      c2[i] = tail / n * rng.unit_phase();
    }
  } else {
    throw ConfigError("separation experiment: unknown c profile '" + config.c_profile + "'");
  }
  // Renormalize away the accumulated rounding so the instance invariant holds.
  const double mass = c1.cwiseAbs().sum() + c2.cwiseAbs().sum();
  c1 /= mass;
  c2 /= mass;
  return SeparationInstance(psi, theta, std::move(c1), std::move(c2), peak);
}

Mat sample_measurement_blocks(int n, int blocks, int block_rows, RowEnsemble ensemble,
                              Rng& rng) {
  Mat rows(static_cast<Eigen::Index>(blocks) * block_rows, n);
  const double scale = std::sqrt(static_cast<double>(n));
  for (int j = 0; j < blocks; ++j) {
    Mat system;
    switch (ensemble) {
      case RowEnsemble::ScaledStandardBasis:
        system = Mat::Identity(n, n);
        break;
      case RowEnsemble::ScaledRandomOrthonormal:
        system = rng.random_orthogonal(n).cast<Complex>();
        break;
      case RowEnsemble::ScaledFourier:
        system = fourier_basis(n);
        break;
    }
    if (block_rows >= n) {
      // Full deterministic sweep: every index once, then i.i.d. top-up rows.
      for (int l = 0; l < block_rows; ++l) {
        const auto pick = l < n ? static_cast<Eigen::Index>(l)
                                : static_cast<Eigen::Index>(
                                      rng.uniform_index(static_cast<std::uint64_t>(n)));
        rows.row(static_cast<Eigen::Index>(j) * block_rows + l) = scale * system.row(pick);
      }
    } else {
      for (int l = 0; l < block_rows; ++l) {
        const auto pick =
            static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
        rows.row(static_cast<Eigen::Index>(j) * block_rows + l) = scale * system.row(pick);
      }
    }
  }
  return rows;
}

}  // namespace

SeparationExperimentResult run_separation_experiment(const SeparationExperimentConfig& config) {
  if (config.trials < 0) throw ConfigError("separation experiment: negative trial count");
  if (config.n < 2) throw ConfigError("separation experiment: n must be at least 2");

  SeparationExperimentResult result;
  GolfingConfig golfing = config.golfing;
  if (golfing.dictionary_dim == 0) golfing.dictionary_dim = config.n;
  if (golfing.incoherence <= 0.0) golfing.incoherence = 1.0;

  const double kappa = 1.0 / std::sqrt(static_cast<double>(config.n));  // spikes vs Fourier
  result.params = choose_golfing_parameters(Complex(config.peak_weight, 0.0), kappa,
                                            config.gamma, golfing);
  result.blocks_used = config.blocks > 0 ? config.blocks : std::max(result.params.r_min, 1);
  result.block_rows_used =
      config.block_rows > 0
          ? config.block_rows
          : static_cast<int>(std::min<long>(result.params.p_min, config.n));
  if (result.block_rows_used < 1) throw ConfigError("separation experiment: empty blocks");

  result.rows.resize(static_cast<std::size_t>(config.trials));
  parallel_for(config.trials, [&](int t) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    SeparationTrialRow row;
    row.trial = t;

    const SeparationInstance instance = make_profile_instance(config, rng);
    GolfingParameters params = result.params;
    params.peak_phase = instance.c1()[instance.peak_index()] /
                        std::abs(instance.c1()[instance.peak_index()]);
    const Mat measurement = sample_measurement_blocks(
        config.n, result.blocks_used, result.block_rows_used, config.ensemble, rng);

    const GolfingCertificate cert =
        golfing_certificate(measurement, result.blocks_used, result.block_rows_used,
                            instance.psi().col(instance.peak_index()), params);
    const SeparationConditionReport report =
        verify_separation_conditions(cert.nu, instance, params);
    row.cert_ok = report.ok;
    row.peak_slack = report.peak_slack;
    row.off_support_slack = report.off_support_slack;

    EqualityConstrainedProblem problem;
    problem.op = Mat(measurement.rows(), 2 * config.n);
    problem.op.leftCols(config.n) = measurement * instance.psi();
    problem.op.rightCols(config.n) = measurement * instance.theta();
    problem.rhs = measurement * instance.signal();
    problem.regularizer = L1Reg{};
    const SolveResult solve =
        solve_equality_constrained(problem, config.solver_tol, config.solver_max_iter);
    row.solver_gap = solve.duality_gap;
    if (solve.converged) {
      const double tv = regularizer_value(L1Reg{}, solve.coefficients);
      row.recovered =
          std::abs(solve.coefficients[instance.peak_index()]) > config.support_threshold * tv;
    } else {
      row.recovered = false;  // non-convergence counts as trial failure
    }
    result.rows[static_cast<std::size_t>(t)] = row;
  });
  return result;
}

}  // namespace softrec
