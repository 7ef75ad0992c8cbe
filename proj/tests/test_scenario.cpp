#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dualchart/errors.hpp"
#include "dualchart/report.hpp"
#include "dualchart/scenario.hpp"
#include "dualchart/suites.hpp"

using namespace dualchart;
namespace fs = std::filesystem;

namespace {

/// Unique scratch directory, removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("dualchart_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

ScenarioConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const std::string kMinimalConfig =
    "schema_version = 1\n"
    "[constants]\n"
    "m = 1.3\n"
    "c = 2.0\n"
    "chi = 0.7\n";

}  // namespace

TEST_CASE("config parsing: full file and defaults") {
    const ScenarioConfig cfg = parse_text(
        "# comment line\n"
        "schema_version = 1\n"
        "\n"
        "[constants]\n"
        "m = 1.3\n"
        "c = 2.0   # trailing comment\n"
        "chi = 0.7\n"
        "hbar = 0.7\n"
        "\n"
        "[model]\n"
        "dimensions = 3\n"
        "signature = 1, -1, -1\n"
        "omega0 = 2.5\n"
        "\n"
        "[lattice]\n"
        "n = 32\n"
        "a = 0.1\n"
        "\n"
        "[truncation]\n"
        "d_p = 16\n"
        "d_f = 12\n"
        "\n"
        "[integrator]\n"
        "dt = 5e-4\n"
        "steps = 200\n"
        "\n"
        "[run]\n"
        "suites = brackets dynamics\n"
        "seed = 99\n"
        "out_dir = out/reports\n");
    CHECK(cfg.constants.m == 1.3);
    CHECK(cfg.constants.hbar == 0.7);
    CHECK(cfg.dimensions == 3);
    REQUIRE(cfg.signature.size() == 3);
    CHECK(cfg.signature[1] == -1);
    CHECK(cfg.omega0 == 2.5);
    CHECK(cfg.lattice_n == 32);
    CHECK(cfg.d_f == 12);
    CHECK(cfg.dt == 5e-4);
    CHECK(cfg.steps == 200);
    REQUIRE(cfg.suites.size() == 2);
    CHECK(cfg.suites[1] == "dynamics");
    CHECK(cfg.seed == 99);
    CHECK(cfg.out_dir == "out/reports");
    CHECK(cfg.metric().g(0) == 1.0);
    CHECK(cfg.metric().g(2) == -1.0);

    const ScenarioConfig minimal = parse_text(kMinimalConfig);
    CHECK(minimal.constants.hbar == 1.0);
    CHECK(minimal.dimensions == 2);
    CHECK(minimal.signature.empty());
    CHECK(minimal.metric().dim() == 2);
    CHECK(minimal.metric().g(1) == 1.0);
    CHECK(minimal.lattice_n == 64);
    CHECK(minimal.d_p == 24);
    CHECK(minimal.dt == 1e-3);
    CHECK(minimal.steps == 1000);
    CHECK(minimal.suites.empty());
    CHECK(minimal.seed == 42);
    CHECK(minimal.out_dir == "reports");
}

TEST_CASE("config parsing: rejections name the offending key") {
    auto field_of = [](const std::string& text) -> std::string {
        try {
            parse_text(text);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return "<no throw>";
    };

    CHECK(field_of("schema_version = 1\n[constants]\nc = 2.0\nchi = 0.7\n") == "constants.m");
    CHECK(field_of(kMinimalConfig + "[constants]\nbogus = 1\n") == "constants.bogus");
    CHECK(field_of(kMinimalConfig + "[constants]\nm = 1.4\n") == "constants.m");  // duplicate
    CHECK(field_of("schema_version = 1\n[constants]\nm = abc\nc = 2.0\nchi = 0.7\n") ==
          "constants.m");
    CHECK(field_of(kMinimalConfig + "[integrator]\nsteps = 1.5\n") == "integrator.steps");
    CHECK(field_of(kMinimalConfig + "[model]\ndimensions = 3\nsignature = 1, -1\n") ==
          "model.signature");
    CHECK(field_of(kMinimalConfig + "[model]\nsignature = 1, 2\n") == "model.signature");
    CHECK(field_of("schema_version = 3\n[constants]\nm = 1.3\nc = 2.0\nchi = 0.7\n") ==
          "schema_version");
    CHECK(field_of(kMinimalConfig + "[constants\nhbar = 1\n") != "<no throw>");
    CHECK(field_of("orphan = 1\n" + kMinimalConfig) == "orphan");  // key before any section
    CHECK(field_of(kMinimalConfig + "[integrator]\ndt = -1e-3\n") == "integrator.dt");
    CHECK(field_of(kMinimalConfig + "[truncation]\nd_p = 4\n") == "truncation.d_p");
}

TEST_CASE("load_config reports an unreadable path") {
    CHECK_THROWS_AS(load_config("/nonexistent/dualchart.cfg"), ConfigError);
}

TEST_CASE("check direction lives with the check") {
    const CheckResult up = check_upper("x", 1.0, 1.0);
    CHECK_FALSE(up.pass);  // budget is exclusive from above
    CHECK(check_upper("x", 0.999, 1.0).pass);
    const CheckResult low = check_lower("y", 1.0, 1.0);
    CHECK(low.pass);  // floor is inclusive
    CHECK_FALSE(check_lower("y", 0.999, 1.0).pass);
    CHECK(up.measured == 1.0);
    CHECK(up.budget == 1.0);
}

TEST_CASE("format_double round-trips and is deterministic") {
    // (stod rejects subnormals with ERANGE, so the smallest probe stays normal)
    for (double x : {0.0, 1.0, -1.5, 1e-300, -3.141592653589793, 0.1, 4.45e-308, 1e17}) {
        const std::string s = format_double(x);
        CHECK(std::stod(s) == x);
        CHECK(format_double(x) == s);
    }
    CHECK(format_double(0.1) == "0.1");  // shortest form, not 0.100000000000000006
}

TEST_CASE("csv writer emits newline-only endings") {
    TempDir tmp("csv");
    const fs::path file = tmp.path / "t.csv";
    {
        CsvWriter w(file);
        w.header({"a", "b"});
        w.row({"1", "2"});
        CHECK(w.good());
    }
    const std::string text = read_file(file);
    CHECK(text == "a,b\n1,2\n");
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("run_selected: single suite writes reports and a summary") {
    TempDir tmp("run");
    ScenarioConfig cfg;  // defaults are valid (unit constants)
    cfg.suites = {"brackets"};
    cfg.seed = 7;

    const auto results = run_selected(cfg, tmp.path);
    REQUIRE(results.size() == 1);
    CHECK(results[0].name == "brackets");
    CHECK_FALSE(results[0].failed_to_run);
    CHECK(results[0].all_passed());
    CHECK(exit_status(results) == 0);
    for (const std::string& rel : results[0].files) CHECK(fs::exists(tmp.path / rel));

    const nlohmann::json summary = nlohmann::json::parse(read_file(tmp.path / "summary.json"));
    CHECK(summary["schema_version"] == 1);
    CHECK(summary["seed"] == 7);
    REQUIRE(summary["suites"].size() == 1);
    CHECK(summary["suites"][0]["name"] == "brackets");
    CHECK(summary["suites"][0]["passed"] == true);
    CHECK(summary["suites"][0]["checks"].size() > 0);

    const std::string digest = read_file(tmp.path / "digest.txt");
    CHECK(digest.find("[PASS]") != std::string::npos);
    CHECK(digest.find("RESULT: PASS") != std::string::npos);
}

TEST_CASE("run_selected: a failing suite is contained, the rest still run") {
    TempDir tmp("fail");
    ScenarioConfig cfg;
    cfg.omega0 = 1e8;  // stiff oscillator at dt = 1e-3: the integrator diverges
    cfg.suites = {"dynamics", "brackets"};

    const auto results = run_selected(cfg, tmp.path);
    REQUIRE(results.size() == 2);
    const SuiteResult* dyn = nullptr;
    const SuiteResult* bra = nullptr;
    for (const auto& r : results) (r.name == "dynamics" ? dyn : bra) = &r;
    REQUIRE(dyn != nullptr);
    REQUIRE(bra != nullptr);
    CHECK(dyn->failed_to_run);
    CHECK(dyn->error.find("step") != std::string::npos);
    CHECK_FALSE(dyn->all_passed());
    CHECK_FALSE(bra->failed_to_run);
    CHECK(bra->all_passed());
    CHECK(exit_status(results) == 1);

    const nlohmann::json summary = nlohmann::json::parse(read_file(tmp.path / "summary.json"));
    bool saw_error = false;
    for (const auto& s : summary["suites"])
        if (s["failed_to_run"] == true && s.contains("error")) saw_error = true;
    CHECK(saw_error);
}

TEST_CASE("run_selected rejects an unknown suite before running anything") {
    TempDir tmp("unknown");
    ScenarioConfig cfg;
    cfg.suites = {"brackets", "warp"};
    CHECK_THROWS_AS(run_selected(cfg, tmp.path), ConfigError);
    CHECK_FALSE(fs::exists(tmp.path / "summary.json"));
}

#ifdef DUALCHART_CLI_PATH

namespace {

int run_cli(const std::string& args, const fs::path& out_file) {
    const std::string cmd =
        std::string(DUALCHART_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    return WEXITSTATUS(raw);
}

}  // namespace

TEST_CASE("cli: --list-suites prints the registry and exits 0") {
    TempDir tmp("cli_list");
    const fs::path out = tmp.path / "out.txt";
    CHECK(run_cli("--list-suites", out) == 0);
    const std::string text = read_file(out);
    for (const std::string& name : {"brackets", "gauge", "dynamics", "quantum"})
        CHECK(text.find(name) != std::string::npos);
}

TEST_CASE("cli: malformed config names the missing key and exits 2") {
    TempDir tmp("cli_bad");
    const fs::path cfg = tmp.path / "bad.cfg";
    std::ofstream(cfg) << "schema_version = 1\n[constants]\nc = 2.0\nchi = 0.7\n";
    const fs::path out = tmp.path / "out.txt";
    CHECK(run_cli("--config " + cfg.string(), out) == 2);
    CHECK(read_file(out).find("constants.m") != std::string::npos);
}

TEST_CASE("cli: runs a configured suite and honors the output-dir precedence") {
    TempDir tmp("cli_run");
    const fs::path cfg = tmp.path / "run.cfg";
    std::ofstream(cfg) << kMinimalConfig << "[run]\nsuites = brackets\nout_dir = "
                       << (tmp.path / "from_config").string() << "\n";

    SUBCASE("config out_dir is used when nothing overrides it") {
        const fs::path out = tmp.path / "out.txt";
        CHECK(run_cli("--config " + cfg.string(), out) == 0);
        CHECK(fs::exists(tmp.path / "from_config" / "summary.json"));
    }

    SUBCASE("environment overrides the config") {
        const fs::path out = tmp.path / "out.txt";
        const std::string cmd = "DUALCHART_OUT=" + (tmp.path / "from_env").string() +
                                " " + std::string(DUALCHART_CLI_PATH) + " --config " +
                                cfg.string() + " > " + out.string() + " 2>&1";
        const int raw = std::system(cmd.c_str());
        REQUIRE(raw != -1);
        CHECK(WEXITSTATUS(raw) == 0);
        CHECK(fs::exists(tmp.path / "from_env" / "summary.json"));
        CHECK_FALSE(fs::exists(tmp.path / "from_config" / "summary.json"));
    }

    SUBCASE("--out beats both, --seed beats the config") {
        const fs::path out = tmp.path / "out.txt";
        const std::string cmd = "DUALCHART_OUT=" + (tmp.path / "from_env").string() +
                                " " + std::string(DUALCHART_CLI_PATH) + " --config " +
                                cfg.string() + " --out " + (tmp.path / "from_flag").string() +
                                " --seed 9 > " + out.string() + " 2>&1";
        const int raw = std::system(cmd.c_str());
        REQUIRE(raw != -1);
        CHECK(WEXITSTATUS(raw) == 0);
        const fs::path summary = tmp.path / "from_flag" / "summary.json";
        REQUIRE(fs::exists(summary));
        CHECK(nlohmann::json::parse(read_file(summary))["seed"] == 9);
    }
}

TEST_CASE("cli: --suite restricts the run") {
    TempDir tmp("cli_suite");
    const fs::path cfg = tmp.path / "run.cfg";
    std::ofstream(cfg) << kMinimalConfig;
    const fs::path out = tmp.path / "out.txt";
    CHECK(run_cli("--config " + cfg.string() + " --suite brackets --out " +
                      (tmp.path / "r").string(),
                  out) == 0);
    const nlohmann::json summary =
        nlohmann::json::parse(read_file(tmp.path / "r" / "summary.json"));
    REQUIRE(summary["suites"].size() == 1);
    CHECK(summary["suites"][0]["name"] == "brackets");
}

#endif  // DUALCHART_CLI_PATH
