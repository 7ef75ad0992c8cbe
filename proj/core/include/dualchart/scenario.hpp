#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "dualchart/phase_space.hpp"

namespace dualchart {

/// Scenario parameters for the experiment suites. Parsed from a sectioned
/// key-value text file (schema in docs/formats.md). The constants block is
/// mandatory; everything else has defaults.
struct ScenarioConfig {
    int schema_version = 1;

    int dimensions = 2;
    std::vector<int> signature;  ///< empty = Euclidean

    PhysicalConstants constants;
    double omega0 = 1.0;

    // lattice
    int lattice_n = 64;
    double lattice_a = 0.05;

    // truncation
    int d_p = 24;
    int d_f = 24;

    // integrator
    double dt = 1e-3;
    long steps = 1000;

    // run
    std::vector<std::string> suites;  ///< empty or {"all"} = every suite
    std::uint64_t seed = 42;
    std::string out_dir = "reports";

    Metric metric() const;
    void validate() const;  ///< throws ConfigError naming "section.key"
};

/// Parses the sectioned key-value format. Unknown keys are rejected (throws
/// ConfigError naming them); missing mandatory keys are reported the same
/// way, e.g. "constants.m".
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& file);

}  // namespace dualchart
