// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <cstdio>

#include "lep/acceptance.hpp"
#include "lep/parallel.hpp"

int main()
{
    lep::ArtifactMap artifacts;
    const auto results = lep::run_acceptance(lep::default_threads(), artifacts);
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s\n", lep::format_result_line(r).c_str());
        failed += r.passed ? 0 : 1;
    }
    std::printf("%zu criteria, %d passed, %d failed\n", results.size(), static_cast<int>(results.size()) - failed,
                failed);
    return failed == 0 ? 0 : 1;
}
