#pragma once

#include "mildito/cli/config.hpp"
#include "mildito/cli/report.hpp"

#include <ostream>
#include <vector>

namespace mildito::cli {

/// Exit codes of the runner.
enum ExitCode : int {
    kAllPassed = 0,
    kChecksFailed = 1,
    kBadInput = 2,  // invalid config or violated hypothesis
    kBlowUp = 3,    // non-finite state during simulation
};

struct RunResult {
    int exit_code = kAllPassed;
    std::vector<ReportRow> rows;
    std::string error;  // empty unless exit_code is 2 or 3
};

/// Validates `c`, runs its suites and writes report.csv and summary.json
/// under `c.out`. Progress and errors go to `log`.
RunResult run(const ExperimentConfig& c, std::ostream& log);

}  // namespace mildito::cli
