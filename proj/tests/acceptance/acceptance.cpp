#include <cstdio>
#include <iostream>

#include "ibdwaves_cli/validation.hpp"

int main() {
    using namespace ibdwaves::cli;
    ValidationOptions opts;
    opts.on_result = [](const CriterionResult& r) {
        std::cout << format_line(r) << std::endl;
    };
    const auto results = run_validation(opts);
    int failed = 0;
    for (const auto& r : results) failed += r.verdict == Verdict::Fail;
    std::printf("%d of %d criteria passed\n", kCriterionCount - failed, kCriterionCount);
    return all_passed(results) ? 0 : 1;
}
