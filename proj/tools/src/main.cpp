#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dualchart/errors.hpp"
#include "dualchart/scenario.hpp"
#include "dualchart/suites.hpp"

namespace {

// Output directory precedence: --out flag, then DUALCHART_OUT, then config.
std::string resolve_out_dir(const std::string& flag_value, const dualchart::ScenarioConfig& cfg) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("DUALCHART_OUT"); env && *env) return env;
    return cfg.out_dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scenario runner: executes the experiment suites against a config"};

    std::string config_path;
    std::string suite;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool list_suites = false;
    app.add_option("--config", config_path, "Config file (sectioned key-value)");
    app.add_option("--suite", suite, "Suite name or 'all' (overrides the config)");
    app.add_option("--out", out_dir, "Output directory (overrides DUALCHART_OUT and the config)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_flag("--list-suites", list_suites, "Print the registered suites and exit");

    CLI11_PARSE(app, argc, argv);

    if (list_suites) {
        for (const std::string& name : dualchart::suite_names()) std::cout << name << '\n';
        return 0;
    }

    try {
        dualchart::ScenarioConfig cfg;
        if (!config_path.empty()) cfg = dualchart::load_config(config_path);
        if (!suite.empty()) cfg.suites = {suite};
        if (seed_opt->count() > 0) cfg.seed = seed;
        cfg.out_dir = resolve_out_dir(out_dir, cfg);
        cfg.validate();

        const auto results = dualchart::run_selected(cfg, cfg.out_dir);
        for (const auto& result : results) {
            std::cout << result.name << ": "
                      << (result.failed_to_run ? "did not run (" + result.error + ")"
                          : result.all_passed() ? "pass"
                                                : "FAIL")
                      << '\n';
        }
        const int status = dualchart::exit_status(results);
        std::cout << "reports written to " << cfg.out_dir << '\n';
        return status;
    } catch (const dualchart::ConfigError& bad_config) {
        std::cerr << bad_config.what() << '\n';
        return 2;
    } catch (const std::exception& failure) {
        std::cerr << "error: " << failure.what() << '\n';
        return 1;
    }
}
