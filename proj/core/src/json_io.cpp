#include "softrec/json_io.hpp"

#include <json.hpp>

namespace softrec {

using nlohmann::json;

namespace {

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("json: expected [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json cvector_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_to_json(v[k]));
  return out;
}

Vec cvector_from_json(const json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v[static_cast<Eigen::Index>(k)] = complex_from_json(j[k]);
  return v;
}

json measure_to_json_impl(const DiscreteMeasure& mu) {
  json out = json::array();
  for (std::size_t k = 0; k < mu.support.size(); ++k) {
    const Complex w = mu.weights[static_cast<Eigen::Index>(k)];
    out.push_back({{"index", mu.support[k]}, {"re", w.real()}, {"im", w.imag()}});
  }
  return out;
}

DiscreteMeasure measure_from_json_impl(const json& j) {
  if (!j.is_array()) throw ValidationError("json: measure must be an array of {index, re, im}");
  std::vector<int> support;
  Vec weights(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& entry = j[k];
    support.push_back(entry.at("index").get<int>());
    weights[static_cast<Eigen::Index>(k)] =
        Complex(entry.at("re").get<double>(), entry.at("im").get<double>());
  }
  return DiscreteMeasure(std::move(support), std::move(weights));
}

std::string dump(const json& j, int indent) { return indent < 0 ? j.dump() : j.dump(indent); }

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("json: parse failure: ") + e.what());
  }
}

}  // namespace

std::string to_json(const SampledDictionary& dict, int indent) {
  json atoms = json::array();
  for (int k = 0; k < dict.size(); ++k) atoms.push_back(cvector_to_json(dict.atom(k)));
  json points = json::array();
  for (const auto& p : dict.index_points()) {
    json coords = json::array();
    for (Eigen::Index i = 0; i < p.coords.size(); ++i) coords.push_back(p.coords[i]);
    points.push_back(coords);
  }
  const json out = {{"ambient_dim", dict.ambient_dim()},
                    {"atoms", atoms},
                    {"index_points", points},
                    {"subfamily", dict.subfamily()}};
  return dump(out, indent);
}

SampledDictionary dictionary_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    const int dim = j.at("ambient_dim").get<int>();
    const auto& atoms_json = j.at("atoms");
    Mat atoms(dim, static_cast<Eigen::Index>(atoms_json.size()));
    for (std::size_t k = 0; k < atoms_json.size(); ++k) {
      const Vec atom = cvector_from_json(atoms_json[k]);
      if (atom.size() != dim) throw ValidationError("json: atom length mismatch");
      atoms.col(static_cast<Eigen::Index>(k)) = atom;
    }
    std::vector<IndexPoint> points;
    for (const auto& coords : j.at("index_points")) {
      RealVec c(static_cast<Eigen::Index>(coords.size()));
      for (std::size_t i = 0; i < coords.size(); ++i)
        c[static_cast<Eigen::Index>(i)] = coords[i].get<double>();
      points.emplace_back(std::move(c));
    }
    return SampledDictionary(std::move(atoms), std::move(points),
                             j.at("subfamily").get<std::vector<int>>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("json: bad dictionary: ") + e.what());
  }
}

std::string to_json(const DiscreteMeasure& mu, int indent) {
  return dump(measure_to_json_impl(mu), indent);
}

DiscreteMeasure measure_from_json(const std::string& text) {
  try {
    return measure_from_json_impl(parse(text));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("json: bad measure: ") + e.what());
  }
}

std::string to_json(const EqualityConstrainedProblem& problem, int indent) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < problem.op.rows(); ++i)
    rows.push_back(cvector_to_json(problem.op.row(i).transpose()));
  json reg;
  if (std::holds_alternative<L1Reg>(problem.regularizer)) {
    reg = {{"kind", "l1"}};
  } else if (const auto* group = std::get_if<GroupL12Reg>(&problem.regularizer)) {
    reg = {{"kind", "group_l12"}, {"groups", group->groups}};
  } else {
    const auto& nuc = std::get<NuclearReg>(problem.regularizer);
    reg = {{"kind", "nuclear"}, {"shape", {nuc.rows, nuc.cols}}};
  }
  const json out = {{"operator", rows}, {"rhs", cvector_to_json(problem.rhs)},
                    {"regularizer", reg}};
  return dump(out, indent);
}

EqualityConstrainedProblem problem_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    const auto& rows = j.at("operator");
    EqualityConstrainedProblem problem;
    problem.rhs = cvector_from_json(j.at("rhs"));
    const auto m = static_cast<Eigen::Index>(rows.size());
    if (m == 0) throw ValidationError("json: empty operator");
    const Vec first = cvector_from_json(rows[0]);
    problem.op = Mat(m, first.size());
    problem.op.row(0) = first.transpose();
    for (Eigen::Index i = 1; i < m; ++i)
      problem.op.row(i) = cvector_from_json(rows[static_cast<std::size_t>(i)]).transpose();
    const auto& reg = j.at("regularizer");
    const std::string kind = reg.at("kind").get<std::string>();
    if (kind == "l1") {
      problem.regularizer = L1Reg{};
    } else if (kind == "group_l12") {
      problem.regularizer = GroupL12Reg{reg.at("groups").get<std::vector<std::vector<int>>>()};
    } else if (kind == "nuclear") {
      const auto shape = reg.at("shape").get<std::vector<int>>();
      if (shape.size() != 2) throw ValidationError("json: nuclear shape must be [rows, cols]");
      problem.regularizer = NuclearReg{shape[0], shape[1]};
    } else {
      throw ValidationError("json: unknown regularizer kind '" + kind + "'");
    }
    problem.validate();
    return problem;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("json: bad problem: ") + e.what());
  }
}

std::string to_json(const SolveResult& result, int indent) {
  const json out = {{"coefficients", cvector_to_json(result.coefficients)},
                    {"objective", result.objective},
                    {"residual_norm", result.residual_norm},
                    {"duality_gap", result.duality_gap},
                    {"iterations", result.iterations},
                    {"converged", result.converged},
                    {"infeasible", result.infeasible}};
  return dump(out, indent);
}

SolveResult solve_result_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    SolveResult result;
    result.coefficients = cvector_from_json(j.at("coefficients"));
    result.objective = j.at("objective").get<double>();
    result.residual_norm = j.at("residual_norm").get<double>();
    result.duality_gap = j.at("duality_gap").get<double>();
    result.iterations = j.at("iterations").get<int>();
    result.converged = j.at("converged").get<bool>();
    result.infeasible = j.at("infeasible").get<bool>();
    return result;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("json: bad solve result: ") + e.what());
  }
}

std::string to_json(const SoftCertificateReport& report, int indent) {
  const json out = {{"alignment", report.alignment},
                    {"other_family_sup", report.other_family_sup},
                    {"at_peak", report.at_peak},
                    {"orth_comp_sup", report.orth_comp_sup},
                    {"sigma_min", report.sigma_min},
                    {"t_max", report.t_max},
                    {"conclusion_radius", report.conclusion_radius},
                    {"valid", report.valid}};
  return dump(out, indent);
}

std::string to_json(const ExactCertificateReport& report, int indent) {
  const json out = {{"interpolation_error", report.interpolation_error},
                    {"off_support_sup", report.off_support_sup},
                    {"valid", report.valid}};
  return dump(out, indent);
}

std::string to_json(const StatDimEstimate& estimate, int indent) {
  const json out = {{"delta_hat", estimate.delta_hat},
                    {"std_error", estimate.std_error},
                    {"samples", estimate.samples},
                    {"complement", estimate.complement}};
  return dump(out, indent);
}

}  // namespace softrec
