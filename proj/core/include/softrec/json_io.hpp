#pragma once

#include "softrec/certificates.hpp"
#include "softrec/dictionary.hpp"
#include "softrec/solvers.hpp"
#include "softrec/statdim.hpp"

#include <string>

namespace softrec {

// JSON wire formats. Atoms serialize as row arrays of [re, im] pairs, measures
// as arrays of {index, re, im}. Parsing failures throw ValidationError.

std::string to_json(const SampledDictionary& dict, int indent = -1);
SampledDictionary dictionary_from_json(const std::string& text);

std::string to_json(const DiscreteMeasure& mu, int indent = -1);
DiscreteMeasure measure_from_json(const std::string& text);

std::string to_json(const EqualityConstrainedProblem& problem, int indent = -1);
EqualityConstrainedProblem problem_from_json(const std::string& text);

std::string to_json(const SolveResult& result, int indent = -1);
SolveResult solve_result_from_json(const std::string& text);

std::string to_json(const SoftCertificateReport& report, int indent = -1);
std::string to_json(const ExactCertificateReport& report, int indent = -1);
std::string to_json(const StatDimEstimate& estimate, int indent = -1);

}  // namespace softrec
