#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace ibdwaves::cli {

enum class Verdict { Pass, Fail, Skip };

struct CriterionResult {
    int id = 0;
    std::string title;
    Verdict verdict = Verdict::Skip;
    std::string detail;
    nlohmann::json metrics = nlohmann::json::object();
    double seconds = 0.0;
};

struct ValidationOptions {
    std::set<int> skip;
    bool fast = false;     // skips the long PDE criteria (8, 9)
    double tamper = 1.0;   // alpha2 multiplier on the numerical side; references stay untouched
    std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kCriterionCount = 11;

std::vector<CriterionResult> run_validation(const ValidationOptions& opts);

std::string format_line(const CriterionResult& r);
nlohmann::json to_json(const std::vector<CriterionResult>& results);
bool all_passed(const std::vector<CriterionResult>& results);  // skips count as passing

}  // namespace ibdwaves::cli
