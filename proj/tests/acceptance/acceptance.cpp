// Runs the thirteen acceptance criteria with the default configuration and
// prints one line per criterion. Exit status is nonzero if any criterion
// fails or exceeds its runtime budget.

#include <cstdio>
#include <exception>
#include <iostream>

#include "subwalk/error.hpp"
#include "subwalk/report.hpp"

int main() {
  using namespace subwalk;
  try {
    const ReportOutcome out = run_report(ReportConfig{}, [](const CriterionResult& r) {
      std::fprintf(stderr, "  finished criterion %d in %.1f s\n", r.id, r.seconds);
    });
    bool ok = true;
    for (const CriterionResult& r : out.results) {
      const bool pass = r.passed && r.within_limit();
      ok = ok && pass;
      char budget[32] = "  n/a";
      if (r.limit_seconds > 0.0) std::snprintf(budget, sizeof budget, "%4.0fs", r.limit_seconds);
      std::printf("[%s] %2d %-28s %7.1fs / %s  %s\n", pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                  budget, r.summary.c_str());
    }
    std::printf("digest %s\n%s\n", out.digest.c_str(), ok ? "all criteria passed" : "some criteria FAILED");
    return ok ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "acceptance: %s: %s\n", to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 1;
  }
}
