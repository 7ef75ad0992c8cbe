#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dualchart/report.hpp"
#include "dualchart/scenario.hpp"

namespace dualchart {

/// Result of one experiment suite: its checks plus the report files written
/// (paths relative to the output directory).
struct SuiteResult {
    std::string name;
    std::vector<CheckResult> checks;
    std::vector<std::string> files;
    bool failed_to_run = false;
    std::string error;

    bool all_passed() const;
};

/// Registered suite names, in execution order: brackets, gauge, dynamics,
/// quantum.
const std::vector<std::string>& suite_names();

/// Runs one suite, writing its CSV reports under out_dir/<suite>/.
SuiteResult run_suite(const std::string& name, const ScenarioConfig& cfg,
                      const std::filesystem::path& out_dir);

/// Runs the configured selection (or all), writes summary.json and
/// digest.txt, and returns the suite results. A suite that throws is
/// reported failed and the remaining suites still run.
std::vector<SuiteResult> run_selected(const ScenarioConfig& cfg,
                                      const std::filesystem::path& out_dir);

/// Exit status for a finished run: 0 all checks passed, 1 otherwise.
int exit_status(const std::vector<SuiteResult>& results);

}  // namespace dualchart
