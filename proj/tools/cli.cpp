#include "cli.hpp"

#include "softrec/certificates.hpp"
#include "softrec/json_io.hpp"
#include "softrec/rng.hpp"
#include "softrec/separation.hpp"
#include "softrec/statdim.hpp"
#include "softrec/superres.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace softrec::cli {

using nlohmann::json;

namespace {

// Shortest round-trip formatting keeps outputs byte-identical across runs.
std::string fmt(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, ptr);
}

std::string fmt(int value) { return std::to_string(value); }
std::string fmt(bool value) { return value ? "1" : "0"; }

class CsvWriter {
 public:
  CsvWriter(std::string schema, std::string header)
      : schema_(std::move(schema)), header_(std::move(header)) {}

  template <typename... Fields>
  void row(const Fields&... fields) {
    std::string line;
    ((line += fmt(fields) + ","), ...);
    if (!line.empty()) line.pop_back();
    rows_.push_back(std::move(line));
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "# softrec " << schema_ << "\n" << header_ << "\n";
    for (const auto& line : rows_) out << line << "\n";
  }

 private:
  std::string schema_, header_;
  std::vector<std::string> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void reject_unknown_keys(const json& config, const std::vector<std::string>& allowed) {
  for (const auto& item : config.items()) {
    bool known = false;
    for (const auto& key : allowed) known = known || key == item.key();
    if (!known) throw ConfigError("unknown config field '" + item.key() + "'");
  }
}

std::filesystem::path output_base(const json& config, const std::string& fallback) {
  const std::string base = config.value("output", fallback);
  const std::filesystem::path path(base);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  return path;
}

std::uint64_t config_seed(const json& config, std::optional<std::uint64_t> seed_override) {
  if (seed_override) return *seed_override;
  return config.value("seed", std::uint64_t{0});
}

RealVec json_to_grid(const json& j) {
  RealVec grid(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    grid[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  return grid;
}

int run_statdim(const json& config, std::optional<std::uint64_t> seed_override) {
  reject_unknown_keys(config, {"k", "n", "ranks", "sigma_grid", "t_grid", "sigma1", "samples",
                               "seed", "include_exact", "output"});
  const int k = config.value("k", 30);
  const int n = config.value("n", 30);
  const std::vector<int> ranks = config.value("ranks", std::vector<int>{1, 2, 3, 4});
  const double sigma1 = config.value("sigma1", 0.7);
  const int samples = config.value("samples", 25);
  const std::uint64_t seed = config_seed(config, seed_override);

  RealVec sigma_grid, t_grid;
  if (config.contains("sigma_grid")) {
    sigma_grid = json_to_grid(config.at("sigma_grid"));
  } else {
    sigma_grid = RealVec(10);
    for (int i = 0; i < 10; ++i) sigma_grid[i] = 1.1 + 0.1 * i;
  }
  if (config.contains("t_grid")) {
    t_grid = json_to_grid(config.at("t_grid"));
  } else {
    t_grid = RealVec(19);
    for (int i = 0; i < 19; ++i) t_grid[i] = (i + 1) / 20.0;
  }

  CsvWriter csv("statdim v1", "rank,sigma,t,t_over_sigma,d_minus_delta,stderr");
  json summary;
  summary["k"] = k;
  summary["n"] = n;
  summary["samples"] = samples;
  summary["exact"] = json::array();

  std::uint64_t combo = 0;
  for (const int rank : ranks) {
    RealVec singular(rank);
    if (rank == 1) {
      singular[0] = 1.0;
    } else {
      singular[0] = sigma1;
      for (int i = 1; i < rank; ++i) singular[i] = (1.0 - sigma1) / (rank - 1);
    }
    for (Eigen::Index si = 0; si < sigma_grid.size(); ++si) {
      for (Eigen::Index ti = 0; ti < t_grid.size(); ++ti) {
        const SoftCone cone{sigma_grid[si], t_grid[ti], singular, k, n};
        const StatDimEstimate est =
            estimate_statdim(ConeSpec(cone), samples, derive_seed(seed, combo++));
        csv.row(rank, sigma_grid[si], t_grid[ti], t_grid[ti] / sigma_grid[si], est.complement,
                est.std_error);
      }
    }
    if (config.value("include_exact", true)) {
      const StatDimEstimate est =
          estimate_statdim(ConeSpec(ExactCone{rank, k, n}), samples, derive_seed(seed, combo++));
      summary["exact"].push_back(
          {{"rank", rank}, {"d_minus_delta", est.complement}, {"stderr", est.std_error}});
    }
  }

  const auto base = output_base(config, "statdim");
  csv.write(base.string() + ".csv");
  write_text(base.string() + ".json", summary.dump(2) + "\n");
  return kExitOk;
}

RowEnsemble parse_ensemble(const std::string& name) {
  if (name == "standard") return RowEnsemble::ScaledStandardBasis;
  if (name == "random-orthonormal") return RowEnsemble::ScaledRandomOrthonormal;
  if (name == "fourier") return RowEnsemble::ScaledFourier;
  throw ConfigError("unknown ensemble '" + name + "'");
}

int run_separate(const json& config, std::optional<std::uint64_t> seed_override) {
  reject_unknown_keys(config, {"n", "ensemble", "c_profile", "peak_weight", "gamma", "blocks",
                               "block_rows", "trials", "seed", "support_threshold", "solver_tol",
                               "solver_max_iter", "incoherence", "failure_prob",
                               "block_rows_constant", "output"});
  SeparationExperimentConfig experiment;
  experiment.n = config.value("n", 64);
  experiment.ensemble = parse_ensemble(config.value("ensemble", "random-orthonormal"));
  experiment.c_profile = config.value("c_profile", "peak-uniform");
  experiment.peak_weight = config.value("peak_weight", 0.5);
  experiment.gamma = config.value("gamma", 0.5);
  experiment.blocks = config.value("blocks", 0);
  experiment.block_rows = config.value("block_rows", 0);
  experiment.trials = config.value("trials", 20);
  experiment.seed = config_seed(config, seed_override);
  experiment.support_threshold = config.value("support_threshold", 1e-5);
  experiment.solver_tol = config.value("solver_tol", 1e-8);
  experiment.solver_max_iter = config.value("solver_max_iter", 20000);
  experiment.golfing.incoherence = config.value("incoherence", 1.0);
  experiment.golfing.failure_prob = config.value("failure_prob", 0.1);
  experiment.golfing.block_rows_constant = config.value("block_rows_constant", 8.0);

  const SeparationExperimentResult result = run_separation_experiment(experiment);

  CsvWriter csv("separate v1", "trial,cert_ok,inoll_slack,offbound_slack,recovered,solver_gap");
  int cert_ok = 0, recovered = 0;
  for (const auto& row : result.rows) {
    csv.row(row.trial, row.cert_ok, row.peak_slack, row.off_support_slack, row.recovered,
            row.solver_gap);
    cert_ok += row.cert_ok ? 1 : 0;
    recovered += row.recovered ? 1 : 0;
  }

  json summary;
  summary["trials"] = static_cast<int>(result.rows.size());
  summary["cert_ok"] = cert_ok;
  summary["recovered"] = recovered;
  summary["blocks_used"] = result.blocks_used;
  summary["block_rows_used"] = result.block_rows_used;
  summary["parameters"] = {{"gamma", result.params.gamma},
                           {"epsilon", result.params.epsilon},
                           {"tau", result.params.tau},
                           {"sigma_hat", result.params.sigma_hat},
                           {"c_gamma", result.params.c_gamma},
                           {"r_min", result.params.r_min},
                           {"p_min", result.params.p_min}};

  const auto base = output_base(config, "separate");
  csv.write(base.string() + ".csv");
  write_text(base.string() + ".json", summary.dump(2) + "\n");
  return kExitOk;
}

int run_superres(const json& config, std::optional<std::uint64_t> seed_override) {
  const std::string mode = config.value("mode", "recover");
  if (mode == "deltas-curve") {
    reject_unknown_keys(config, {"mode", "c_abs_list", "gamma", "points", "output"});
    const std::vector<double> c_list =
        config.value("c_abs_list", std::vector<double>{0.05, 0.1, 0.2, 0.3});
    const auto points =
        deltas_curve(c_list, config.value("gamma", 0.5), config.value("points", 60));
    CsvWriter csv("superres-deltas v1", "c_abs,delta_sep_over_lambda,delta_over_lambda");
    for (const auto& p : points) csv.row(p.c_abs, p.delta_sep_over_lambda, p.delta_over_lambda);
    const auto base = output_base(config, "superres_deltas");
    csv.write(base.string() + ".csv");
    json summary;
    summary["points"] = static_cast<int>(points.size());
    summary["gamma"] = config.value("gamma", 0.5);
    write_text(base.string() + ".json", summary.dump(2) + "\n");
    return kExitOk;
  }
  if (mode != "recover") throw ConfigError("unknown superres mode '" + mode + "'");

  reject_unknown_keys(config, {"mode", "width", "lo", "hi", "grid", "c_abs", "gamma",
                               "delta_sep_over_width", "trials", "seed", "support_threshold",
                               "solver_tol", "solver_max_iter", "cover_safety", "output"});
  SuperresRecoveryConfig experiment;
  experiment.width = config.value("width", 0.05);
  experiment.lo = config.value("lo", 0.0);
  experiment.hi = config.value("hi", 1.0);
  experiment.grid_n = config.value("grid", 1024);
  experiment.c_abs = config.value("c_abs", 0.1);
  experiment.gamma = config.value("gamma", 0.5);
  experiment.delta_sep_over_width = config.value("delta_sep_over_width", 3.95);
  experiment.trials = config.value("trials", 20);
  experiment.seed = config_seed(config, seed_override);
  experiment.support_threshold = config.value("support_threshold", 1e-5);
  experiment.solver_tol = config.value("solver_tol", 1e-8);
  experiment.solver_max_iter = config.value("solver_max_iter", 60000);
  experiment.cover_safety = config.value("cover_safety", 0.95);

  const SuperresRecoveryResult result = run_superres_recovery(experiment);

  CsvWriter csv("superres-recover v1", "trial,true_x0,nearest_support,distance_over_lambda");
  int cert_valid = 0, localized = 0;
  for (const auto& row : result.rows) {
    csv.row(row.trial, row.true_x0, row.nearest_support, row.distance / experiment.width);
    cert_valid += row.cert_valid ? 1 : 0;
    localized += row.recovered_within_delta ? 1 : 0;
  }

  json summary;
  summary["trials"] = static_cast<int>(result.rows.size());
  summary["cert_valid"] = cert_valid;
  summary["localized_within_delta"] = localized;
  summary["measurements"] = result.measurements;
  summary["eps_budget"] = result.eps_budget;
  summary["parameters"] = {{"level", result.params.level},
                           {"tail_bound", result.params.tail_bound},
                           {"delta", result.params.delta},
                           {"delta_over_width", result.params.delta / result.params.width},
                           {"delta_sep", result.params.delta_sep},
                           {"theta", result.params.theta},
                           {"gamma", result.params.gamma}};

  const auto base = output_base(config, "superres_recover");
  csv.write(base.string() + ".csv");
  write_text(base.string() + ".json", summary.dump(2) + "\n");
  return kExitOk;
}

int run_certify(const json& config, std::optional<std::uint64_t>) {
  reject_unknown_keys(config, {"dictionary", "measure", "nu", "x0_index", "j0", "output"});
  const SampledDictionary dict = dictionary_from_json(config.at("dictionary").dump());
  const DiscreteMeasure mu0 = measure_from_json(config.at("measure").dump());
  const auto& nu_json = config.at("nu");
  Vec nu(static_cast<Eigen::Index>(nu_json.size()));
  for (std::size_t i = 0; i < nu_json.size(); ++i) {
    if (!nu_json[i].is_array() || nu_json[i].size() != 2)
      throw ConfigError("nu must be an array of [re, im] pairs");
    nu[static_cast<Eigen::Index>(i)] =
        Complex(nu_json[i][0].get<double>(), nu_json[i][1].get<double>());
  }
  const SoftCertificateReport report = verify_soft_certificate(
      nu, config.at("x0_index").get<int>(), config.at("j0").get<int>(), mu0, dict);
  const auto base = output_base(config, "certify");
  write_text(base.string() + ".json", to_json(report, 2) + "\n");
  std::cout << (report.valid ? "valid" : "invalid") << " certificate, radius "
            << fmt(report.conclusion_radius) << "\n";
  return kExitOk;
}

int run_solve_crosscheck(const json& config, std::optional<std::uint64_t> seed_override) {
  reject_unknown_keys(config, {"trials", "dim", "max_atoms", "seed", "tol", "max_iter", "output"});
  const int trials = config.value("trials", 50);
  const int dim = config.value("dim", 3);
  const int max_atoms = config.value("max_atoms", 6);
  const double tol = config.value("tol", 1e-8);
  const int max_iter = config.value("max_iter", 20000);
  const std::uint64_t seed = config_seed(config, seed_override);
  if (trials < 0 || dim < 1 || max_atoms < 1) throw ConfigError("bad crosscheck parameters");

  CsvWriter csv("solve-crosscheck v1", "trial,gauge_value,solver_value,abs_diff,solver_gap");
  double max_diff = 0.0;
  int converged = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int atoms =
        1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_atoms)));
    Mat atom_matrix(dim, atoms);
    for (int a = 0; a < atoms; ++a)
      atom_matrix.col(a) = rng.real_unit_vector(dim).cast<Complex>();
    const SampledDictionary dict = SampledDictionary::from_atoms(atom_matrix);
    Vec coef(atoms);
    for (int a = 0; a < atoms; ++a) coef[a] = Complex(2.0 * rng.gaussian(), 0.0);
    const Vec v = atom_matrix * coef;

    const GaugeResult gauge = gauge_atomic_norm(v, dict);
    EqualityConstrainedProblem problem;
    problem.op = atom_matrix;
    problem.rhs = v;
    problem.regularizer = L1Reg{};
    const SolveResult solve = solve_equality_constrained(problem, tol, max_iter);
    const double diff = std::abs(gauge.value - solve.objective);
    max_diff = std::max(max_diff, diff);
    converged += solve.converged ? 1 : 0;
    csv.row(t, gauge.value, solve.objective, diff, solve.duality_gap);
  }

  json summary;
  summary["trials"] = trials;
  summary["converged"] = converged;
  summary["max_abs_diff"] = max_diff;
  summary["within_1e-6"] = max_diff <= 1e-6;

  const auto base = output_base(config, "solve_crosscheck");
  csv.write(base.string() + ".csv");
  write_text(base.string() + ".json", summary.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int run_subcommand(const std::string& name, const std::string& config_text,
                   std::optional<std::uint64_t> seed_override) {
  json config;
  try {
    config = config_text.empty() ? json::object() : json::parse(config_text);
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
  } catch (const json::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  }
  try {
    if (name == "statdim") return run_statdim(config, seed_override);
    if (name == "separate") return run_separate(config, seed_override);
    if (name == "superres") return run_superres(config, seed_override);
    if (name == "certify") return run_certify(config, seed_override);
    if (name == "solve-crosscheck") return run_solve_crosscheck(config, seed_override);
    std::cerr << "unknown subcommand '" << name << "'\n";
    return kExitBadConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"soft-recovery experiment driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_value = 0;
  bool seed_set = false;

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"statdim", "statistical-dimension sweeps over certificate cones"},
      {"separate", "component-separation experiments with golfing certificates"},
      {"superres", "super-resolution trade-off curves and recovery trials"},
      {"certify", "verify a soft certificate against a dictionary and measure"},
      {"solve-crosscheck", "gauge oracle versus solver cross-check"}};
  for (const auto& [name, description] : subcommands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "JSON config path")->required();
    sub->add_option("--seed", seed_value, "override the config seed")
        ->each([&seed_set](const std::string&) { seed_set = true; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read config '" << config_path << "'\n";
    return kExitBadConfig;
  }
  const std::string config_text((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  const std::string name = app.get_subcommands().front()->get_name();
  return run_subcommand(name, config_text,
                        seed_set ? std::optional<std::uint64_t>(seed_value) : std::nullopt);
}

}  // namespace softrec::cli
