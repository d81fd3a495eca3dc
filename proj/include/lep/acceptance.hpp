#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace lep {

struct CriterionResult {
    int id{0};
    std::string name;
    bool passed{false};
    std::string detail;
};

/// CSV artifacts produced while checking, keyed by file name. Contents are
/// deterministic for a given build.
using ArtifactMap = std::map<std::string, std::string>;

struct Criterion {
    int id;
    std::string name;
    std::function<CriterionResult(unsigned threads, ArtifactMap&)> check;
};

const std::vector<Criterion>& acceptance_criteria();

/// Runs every criterion; a throwing check is recorded as a failure.
std::vector<CriterionResult> run_acceptance(unsigned threads, ArtifactMap& artifacts);

std::string format_result_line(const CriterionResult& r);

/// id,name,passed,detail
std::string results_csv(const std::vector<CriterionResult>& results);

} // namespace lep
