#include "softrec/superres.hpp"

#include "softrec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace softrec {

namespace {

constexpr double kPi = std::numbers::pi;

double trapezoid(const RealVec& x, const RealVec& y) {
  double total = 0.0;
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k)
    total += 0.5 * (x[k + 1] - x[k]) * (y[k] + y[k + 1]);
  return total;
}

}  // namespace

TabulatedFilter::TabulatedFilter(RealVec frequencies, RealVec power)
    : freqs_(std::move(frequencies)), power_(std::move(power)) {
  if (freqs_.size() != power_.size() || freqs_.size() < 2)
    throw ValidationError("tabulated filter: need matching grids with at least two nodes");
  for (Eigen::Index k = 0; k + 1 < freqs_.size(); ++k)
    if (freqs_[k + 1] <= freqs_[k])
      throw ValidationError("tabulated filter: frequencies must be increasing");
  if (power_.minCoeff() < 0.0)
    throw ValidationError("tabulated filter: spectrum must be nonnegative");
  const double mass = trapezoid(freqs_, power_) / (2.0 * kPi);
  if (mass <= 0.0) throw ValidationError("tabulated filter: zero spectrum");
  power_ /= mass;  // a(0) = 1
}

Complex autocorrelation(const FilterSpec& filter, double x) {
  if (const auto* gauss = std::get_if<GaussianFilter>(&filter)) {
    return Complex(std::exp(-x * x / (2.0 * sqr(gauss->width))), 0.0);
  }
  const auto& tab = std::get<TabulatedFilter>(filter);
  RealVec re(tab.frequencies().size()), im(tab.frequencies().size());
  for (Eigen::Index k = 0; k < tab.frequencies().size(); ++k) {
    const double t = tab.frequencies()[k];
    re[k] = tab.power()[k] * std::cos(x * t);
    im[k] = tab.power()[k] * std::sin(x * t);
  }
  return Complex(trapezoid(tab.frequencies(), re), trapezoid(tab.frequencies(), im)) /
         (2.0 * kPi);
}

double filter_first_moment_norm(const FilterSpec& filter) {
  if (const auto* gauss = std::get_if<GaussianFilter>(&filter)) return 1.0 / gauss->width;
  const auto& tab = std::get<TabulatedFilter>(filter);
  RealVec integrand(tab.frequencies().size());
  for (Eigen::Index k = 0; k < tab.frequencies().size(); ++k)
    integrand[k] = sqr(tab.frequencies()[k]) * tab.power()[k];
  const double peak = integrand.maxCoeff();
  const double edge = std::max(integrand[0], integrand[integrand.size() - 1]);
  if (peak > 0.0 && edge > 1e-6 * peak)
    throw NumericError("filter_first_moment_norm: spectrum tail too heavy for a finite moment");
  return std::sqrt(trapezoid(tab.frequencies(), integrand) / (2.0 * kPi));
}

RealVec filter_time_samples(const FilterSpec& filter, const RealVec& points) {
  RealVec out(points.size());
  if (const auto* gauss = std::get_if<GaussianFilter>(&filter)) {
    // a = phi * phi with a(0) = 1 forces phi(x) = c exp(-x^2 / width^2),
    // c = (width sqrt(pi/2))^{-1/2}; phi is l2-normalized.
    const double c = std::pow(gauss->width * std::sqrt(kPi / 2.0), -0.5);
    for (Eigen::Index k = 0; k < points.size(); ++k)
      out[k] = c * std::exp(-sqr(points[k]) / sqr(gauss->width));
    return out;
  }
  const auto& tab = std::get<TabulatedFilter>(filter);
  RealVec amplitude(tab.power().size());
  for (Eigen::Index k = 0; k < amplitude.size(); ++k)
    amplitude[k] = std::sqrt(tab.power()[k]);
  RealVec integrand(amplitude.size());
  for (Eigen::Index k = 0; k < points.size(); ++k) {
    for (Eigen::Index j = 0; j < amplitude.size(); ++j)
      integrand[j] = amplitude[j] * std::cos(points[k] * tab.frequencies()[j]);
    out[k] = trapezoid(tab.frequencies(), integrand) / (2.0 * kPi);
  }
  return out;
}

GridFrame::GridFrame(double lo, double hi, int n, FilterSpec filter, double padding)
    : lo_(lo), hi_(hi), filter_(std::move(filter)) {
  if (!(hi > lo)) throw ValidationError("grid frame: empty interval");
  if (n < 64 || (n & (n - 1)) != 0)
    throw ValidationError("grid frame: n must be a power of two >= 64");

  const double width_eff = 1.0 / filter_first_moment_norm(filter_);
  if (padding <= 0.0) padding = 8.0 * width_eff;
  step_ = (hi - lo) / n;

  const int n_pad = static_cast<int>(std::ceil(padding / step_));
  const int total = n + 2 * n_pad;
  grid_ = RealVec(n);
  for (int j = 0; j < n; ++j) grid_[j] = lo + (j + 0.5) * step_;
  enlarged_grid_ = RealVec(total);
  for (int j = 0; j < total; ++j) enlarged_grid_[j] = lo - n_pad * step_ + (j + 0.5) * step_;

  // Orthonormal DCT-II rows.
  basis_ = RealMat(total, total);
  const double c0 = std::sqrt(1.0 / total), ck = std::sqrt(2.0 / total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j)
      basis_(i, j) = (i == 0 ? c0 : ck) * std::cos(kPi * i * (j + 0.5) / total);

  for (const double edge : {lo, hi}) {
    const double mass = delta_norm_sq(edge);
    if (std::abs(mass - 1.0) > 1e-6)
      throw ConfigError("grid frame: padding leaves filter mass " + std::to_string(1.0 - mass) +
                        " outside the enlarged grid");
  }
}

RealVec GridFrame::sampled_shift(double x) const {
  const double root_h = std::sqrt(step_);
  RealVec shifted(enlarged_grid_.size());
  for (Eigen::Index j = 0; j < enlarged_grid_.size(); ++j) shifted[j] = enlarged_grid_[j] - x;
  RealVec samples = filter_time_samples(filter_, shifted);
  return root_h * samples;
}

RealVec GridFrame::coefficients_at(double x) const { return basis_ * sampled_shift(x); }

RealVec GridFrame::coefficients_at(double x, const std::vector<int>& index_set) const {
  const RealVec w = sampled_shift(x);
  RealVec out(static_cast<Eigen::Index>(index_set.size()));
  for (std::size_t k = 0; k < index_set.size(); ++k) {
    const int i = index_set[k];
    if (i < 0 || i >= frame_size())
      throw ValidationError("grid frame: index outside the frame");
    out[static_cast<Eigen::Index>(k)] = basis_.row(i).dot(w);
  }
  return out;
}

double GridFrame::delta_norm_sq(double x) const { return sampled_shift(x).squaredNorm(); }

double GridFrame::e_inner(double x, double y) const {
  return sampled_shift(x).dot(sampled_shift(y));
}

double GridFrame::approximation_error(const std::vector<int>& index_set, double x) const {
  const RealVec w = sampled_shift(x);
  double captured = 0.0;
  for (int i : index_set) {
    if (i < 0 || i >= frame_size())
      throw ValidationError("grid frame: index outside the frame");
    captured += sqr(basis_.row(i).dot(w));
  }
  return std::sqrt(std::max(w.squaredNorm() - captured, 0.0));
}

RealVec GridFrame::frame_combination(const std::vector<int>& index_set,
                                     const RealVec& weights) const {
  if (static_cast<Eigen::Index>(index_set.size()) != weights.size())
    throw ValidationError("grid frame: combination lengths mismatch");
  RealVec out = RealVec::Zero(basis_.cols());
  for (std::size_t k = 0; k < index_set.size(); ++k) {
    const int i = index_set[k];
    if (i < 0 || i >= frame_size())
      throw ValidationError("grid frame: index outside the frame");
    out += weights[static_cast<Eigen::Index>(k)] * basis_.row(i).transpose();
  }
  return out;
}

double GridFrame::shifted_inner(const RealVec& enlarged_vector, double y) const {
  if (enlarged_vector.size() != enlarged_grid_.size())
    throw ValidationError("grid frame: vector does not live on the enlarged grid");
  return enlarged_vector.dot(sampled_shift(y));
}

CoverResult cover_interval_frame_set(const GridFrame& frame, double lo, double hi, double eps) {
  if (eps <= 0.0) throw ValidationError("cover_interval_frame_set: eps must be positive");
  if (hi < lo) throw ValidationError("cover_interval_frame_set: empty interval");

  // Discretization floor: the rounding residual of the full-set tail.
  double floor_sq = 0.0;
  for (const double probe : {lo, 0.5 * (lo + hi), hi}) {
    const RealVec coef = frame.coefficients_at(probe);
    floor_sq = std::max(floor_sq,
                        std::abs(frame.delta_norm_sq(probe) - coef.squaredNorm()));
  }
  const double floor = 4.0 * std::sqrt(floor_sq) + 1e-12;
  if (eps < floor)
    throw ConfigError("cover_interval_frame_set: eps below the achievable floor " +
                      std::to_string(floor));

  const double moment = filter_first_moment_norm(frame.filter());
  const double radius = eps / (2.0 * moment);
  const double spacing = 2.0 * radius;

  std::vector<double> centers;
  if (hi - lo <= spacing) {
    centers.push_back(0.5 * (lo + hi));
  } else {
    for (double c = lo + radius; c - radius < hi; c += spacing) centers.push_back(std::min(c, hi));
  }

  const double target_tail = sqr(eps / 2.0);
  std::set<int> selected;
  std::vector<int> order(static_cast<std::size_t>(frame.frame_size()));
  for (const double center : centers) {
    const RealVec coef = frame.coefficients_at(center);
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    // Largest coefficient first, ties to the lower index for determinism.
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return sqr(coef[a]) != sqr(coef[b]) ? sqr(coef[a]) > sqr(coef[b]) : a < b;
    });
    double tail = frame.delta_norm_sq(center);
    for (int idx : order) {
      if (tail <= target_tail) break;
      tail -= sqr(coef[idx]);
      selected.insert(idx);
    }
  }

  CoverResult result;
  result.indices.assign(selected.begin(), selected.end());

  const double test_step = radius / 10.0;
  for (double x = lo; x <= hi + 0.5 * test_step; x += test_step) {
    result.achieved_sup =
        std::max(result.achieved_sup, frame.approximation_error(result.indices, std::min(x, hi)));
  }
  if (result.achieved_sup > eps + 1e-8)
    throw NumericError("cover_interval_frame_set: covering bound violated, sup = " +
                       std::to_string(result.achieved_sup));
  return result;
}

SuperresParamResult superres_parameters(double c_abs, double gamma, double theta,
                                        const GaussianFilter& filter, double delta_sep) {
  if (!(c_abs > 0.0 && c_abs < 1.0))
    throw ValidationError("superres_parameters: peak weight must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("superres_parameters: gamma must lie in (0, 1)");
  if (!(theta > 0.0 && theta <= 1.0))
    throw ValidationError("superres_parameters: theta must lie in (0, 1]");
  if (delta_sep <= 0.0)
    throw ValidationError("superres_parameters: separation must be positive");

  SuperresParamResult result;
  auto& p = result.params;
  p.gamma = gamma;
  p.theta = theta;
  p.c_abs = c_abs;
  p.width = filter.width;
  p.delta_sep = delta_sep;
  p.tail_bound = std::exp(-sqr(delta_sep) / (2.0 * sqr(filter.width)));
  p.level = theta * (1.0 - gamma) * c_abs;
  p.delta = filter.width * std::sqrt(2.0 * std::log(1.0 / p.level));
  p.delta_sep_min =
      theta >= 1.0 ? std::numeric_limits<double>::infinity()
                   : filter.width * std::sqrt(2.0 * std::log((1.0 - c_abs) /
                                                             (c_abs * (1.0 - theta))));

  const double floor = c_abs * (1.0 + p.tail_bound) - p.tail_bound;
  if (floor <= 0.0) {
    result.failed_condition = "peak weight below the tail bound: c(1+L) - L <= 0";
    return result;
  }
  if (floor * (1.0 - gamma) < p.level - 1e-12) {
    result.failed_condition = "(c(1+L) - L)(1-gamma) < level";
    return result;
  }
  result.feasible = true;
  return result;
}

double theta_for_separation(double c_abs, const GaussianFilter& filter, double delta_sep) {
  const double tail = std::exp(-sqr(delta_sep) / (2.0 * sqr(filter.width)));
  return 1.0 - tail * (1.0 - c_abs) / c_abs;
}

double certificate_eps_budget(double c_abs, double gamma, double tail_bound) {
  const double d0 = c_abs * (1.0 + tail_bound) - tail_bound;
  if (d0 <= 0.0) throw InfeasibleError("certificate_eps_budget: peak below the tail bound");
  return gamma * d0 / ((2.0 - gamma) * d0 + 2.0 * tail_bound + 2.0);
}

SuperresCertificate::SuperresCertificate(const GridFrame& frame, std::vector<int> index_set,
                                         double x0, Complex peak_phase, double scale)
    : frame_(&frame), index_set_(std::move(index_set)), x0_(x0), peak_phase_(peak_phase),
      scale_(scale) {
  weights_ = frame.coefficients_at(x0, index_set_);
  combined_ = frame.frame_combination(index_set_, weights_);
}

Complex SuperresCertificate::eval(double y) const {
  return scale_ * peak_phase_ * frame_->shifted_inner(combined_, y);
}

Vec SuperresCertificate::samples(const RealVec& points) const {
  Vec out(points.size());
  for (Eigen::Index k = 0; k < points.size(); ++k) out[k] = eval(points[k]);
  return out;
}

SuperresCertificate build_superres_certificate(const GridFrame& frame,
                                               const std::vector<int>& index_set, double x0,
                                               Complex peak_phase, double eps0, double tail_bound,
                                               double c_abs) {
  if (std::abs(std::abs(peak_phase) - 1.0) > 1e-12)
    throw ValidationError("build_superres_certificate: peak phase must be unimodular");
  const double achieved = frame.approximation_error(index_set, x0);
  if (achieved > eps0 + 1e-12)
    throw ValidationError("build_superres_certificate: index set misses the eps budget (" +
                          std::to_string(achieved) + " > " + std::to_string(eps0) + ")");
  const double denom =
      c_abs * (1.0 - eps0 + (1.0 - eps0) * tail_bound) - (1.0 + eps0) * tail_bound;
  if (denom <= 0.0)
    throw InfeasibleError("build_superres_certificate: nonpositive normalization constant");
  return SuperresCertificate(frame, index_set, x0, peak_phase, 1.0 / denom);
}

CorGReport verify_cor_g(const SuperresCertificate& cert, const SpikeTrain& mu0, double x0,
                        const FilterSpec& filter, const RealVec& dense_grid) {
  if (mu0.positions.size() != mu0.weights.size())
    throw ValidationError("verify_cor_g: spike train lengths mismatch");

  CorGReport report;
  for (Eigen::Index k = 0; k < mu0.positions.size(); ++k)
    report.alignment += (mu0.weights[k] * cert.eval(mu0.positions[k])).real();

  const Complex g_peak = cert.eval(x0);
  report.sigma = std::abs(g_peak);
  double deviation = 0.0;
  for (Eigen::Index k = 0; k < dense_grid.size(); ++k) {
    const Complex expected = autocorrelation(filter, dense_grid[k] - x0) * g_peak;
    deviation = std::max(deviation, std::abs(cert.eval(dense_grid[k]) - expected));
  }
  report.t = 1.0 - deviation;
  report.radius = report.sigma > 0.0 ? report.t / report.sigma : 0.0;
  report.valid = report.alignment >= 1.0 - 1e-12 && report.t > 0.0 && report.sigma > 0.0;
  return report;
}

TvRecovery tv_grid_recover(const GridFrame& frame, const std::vector<int>& index_set,
                           const SpikeTrain& mu0, double solver_tol, int max_iter) {
  const auto m = static_cast<Eigen::Index>(index_set.size());
  const Eigen::Index n = frame.grid().size();

  Vec rhs = Vec::Zero(m);
  for (Eigen::Index k = 0; k < mu0.positions.size(); ++k) {
    const RealVec coef = frame.coefficients_at(mu0.positions[k], index_set);
    for (Eigen::Index i = 0; i < m; ++i) rhs[i] += mu0.weights[k] * coef[i];
  }

  EqualityConstrainedProblem problem;
  problem.op = Mat(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const RealVec coef = frame.coefficients_at(frame.grid()[j], index_set);
    for (Eigen::Index i = 0; i < m; ++i) problem.op(i, j) = Complex(coef[i], 0.0);
  }
  problem.rhs = rhs;
  problem.regularizer = L1Reg{};

  TvRecovery recovery;
  recovery.solve = solve_equality_constrained(problem, solver_tol, max_iter);

  const double tv = recovery.solve.coefficients.cwiseAbs().sum();
  std::vector<int> support;
  std::vector<Complex> weights;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex w = recovery.solve.coefficients[j];
    if (std::abs(w) > 1e-12 * (1.0 + tv)) {
      support.push_back(static_cast<int>(j));
      weights.push_back(w);
    }
  }
  Vec weight_vec(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t k = 0; k < weights.size(); ++k)
    weight_vec[static_cast<Eigen::Index>(k)] = weights[k];
  recovery.measure = DiscreteMeasure(std::move(support), std::move(weight_vec));
  return recovery;
}

SuperresRecoveryResult run_superres_recovery(const SuperresRecoveryConfig& config) {
  if (config.trials < 0) throw ConfigError("superres recovery: negative trial count");
  const GaussianFilter filter{config.width};
  const double delta_sep = config.delta_sep_over_width * config.width;
  const double theta = theta_for_separation(config.c_abs, filter, delta_sep);
  if (!(theta > 0.0))
    throw ConfigError("superres recovery: separation too small for this peak weight");

  SuperresRecoveryResult result;
  const SuperresParamResult params = superres_parameters(config.c_abs, config.gamma, theta,
                                                         filter, delta_sep);
  if (!params.feasible)
    throw ConfigError("superres recovery: infeasible parameters (" + params.failed_condition +
                      ")");
  result.params = params.params;
  result.eps_budget =
      certificate_eps_budget(config.c_abs, config.gamma, result.params.tail_bound);

  const GridFrame frame(config.lo, config.hi, config.grid_n, filter);
  const CoverResult cover = cover_interval_frame_set(
      frame, config.lo, config.hi, config.cover_safety * result.eps_budget);
  result.measurements = static_cast<int>(cover.indices.size());

  // Dense verification grid: four points per grid step, padded past the
  // interval so the deviation sup is effectively global.
  const double pad = 10.0 * config.width;
  const double dense_step = frame.step() / 4.0;
  const int dense_n = static_cast<int>((config.hi - config.lo + 2.0 * pad) / dense_step) + 1;
  RealVec dense_grid(dense_n);
  for (int k = 0; k < dense_n; ++k) dense_grid[k] = config.lo - pad + k * dense_step;

  const double margin = delta_sep + 3.0 * config.width;
  result.rows.resize(static_cast<std::size_t>(config.trials));
  parallel_for(config.trials, [&](int t) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    SuperresTrialRow row;
    row.trial = t;

    const double x0 = rng.uniform(config.lo + margin, config.hi - margin);
    const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
    SpikeTrain mu0;
    mu0.positions = RealVec(2);
    mu0.weights = Vec(2);
    mu0.positions[0] = x0;
    mu0.positions[1] = x0 + side * delta_sep;
    mu0.weights[0] = Complex(config.c_abs, 0.0);
    mu0.weights[1] = Complex(1.0 - config.c_abs, 0.0);
    row.true_x0 = x0;

    const SuperresCertificate cert =
        build_superres_certificate(frame, cover.indices, x0, Complex(1.0, 0.0),
                                   result.eps_budget, result.params.tail_bound, config.c_abs);
    const CorGReport report = verify_cor_g(cert, mu0, x0, frame.filter(), dense_grid);
    row.cert_valid = report.valid;
    row.cert_radius = report.radius;

    const TvRecovery recovery =
        tv_grid_recover(frame, cover.indices, mu0, config.solver_tol, config.solver_max_iter);
    row.solver_gap = recovery.solve.duality_gap;

    const double tv = recovery.measure.tv_norm();
    double nearest = std::numeric_limits<double>::infinity();
    double nearest_pos = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < recovery.measure.support.size(); ++k) {
      if (std::abs(recovery.measure.weights[static_cast<Eigen::Index>(k)]) <=
          config.support_threshold * tv)
        continue;
      const double pos = frame.grid()[recovery.measure.support[k]];
      if (std::abs(pos - x0) < nearest) {
        nearest = std::abs(pos - x0);
        nearest_pos = pos;
      }
    }
    row.nearest_support = nearest_pos;
    row.distance = nearest;
    // The solver returns its best certified-feasible iterate even when the gap
    // target is out of reach; the localization test is about that support.
    row.recovered_within_delta =
        recovery.solve.residual_norm <= 1e-6 * (1.0 + mu0.tv_norm()) &&
        nearest <= result.params.delta + frame.step();
    result.rows[static_cast<std::size_t>(t)] = row;
  });
  return result;
}

std::vector<DeltasCurvePoint> deltas_curve(const std::vector<double>& c_abs_list, double gamma,
                                           int points_per_curve) {
  if (points_per_curve < 2) throw ConfigError("deltas_curve: need at least two points");
  std::vector<DeltasCurvePoint> points;
  const GaussianFilter unit{1.0};
  for (const double c : c_abs_list) {
    if (!(c > 0.0 && c < 1.0)) throw ConfigError("deltas_curve: peak weights must lie in (0,1)");
    const double theta_lo = std::max(0.02, (2.0 * c - 1.0) / c + 1e-3);
    const double theta_hi = 1.0 - 1e-7;
    for (int j = 0; j < points_per_curve; ++j) {
      // Uniform sweep in log(1 - theta) resolves the steep end of the curve.
      const double frac = static_cast<double>(j) / (points_per_curve - 1);
      const double theta = 1.0 - std::exp(std::log(1.0 - theta_lo) * (1.0 - frac) +
                                          std::log(1.0 - theta_hi) * frac);
      const double sep_max = unit.width * std::sqrt(2.0 * std::log((1.0 - c) /
                                                                   (c * (1.0 - theta))));
      if (!(sep_max > 0.0) || !std::isfinite(sep_max)) continue;
      const SuperresParamResult params = superres_parameters(c, gamma, theta, unit, sep_max);
      if (!params.feasible) continue;
      points.push_back({c, sep_max, params.params.delta});
    }
  }
  return points;
}

}  // namespace softrec
