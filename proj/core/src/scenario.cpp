#include "dualchart/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dualchart/errors.hpp"

namespace dualchart {

Metric ScenarioConfig::metric() const {
    if (signature.empty()) return Metric(dimensions);
    return Metric(signature);
}

void ScenarioConfig::validate() const {
    if (schema_version != 1)
        throw ConfigError("schema_version", "unsupported schema version");
    if (dimensions < 1) throw ConfigError("model.dimensions", "must be at least 1");
    if (!signature.empty()) {
        if (static_cast<int>(signature.size()) != dimensions)
            throw ConfigError("model.signature", "length must equal model.dimensions");
        for (int s : signature)
            if (s != 1 && s != -1)
                throw ConfigError("model.signature", "entries must be +1 or -1");
    }
    auto positive = [](const char* field, double v) {
        if (!std::isfinite(v) || v <= 0.0)
            throw ConfigError(field, "must be finite and > 0");
    };
    positive("constants.m", constants.m);
    positive("constants.c", constants.c);
    positive("constants.chi", constants.chi);
    positive("constants.hbar", constants.hbar);
    if (!std::isfinite(omega0) || omega0 < 0.0)
        throw ConfigError("model.omega0", "must be finite and >= 0");
    if (lattice_n < 8) throw ConfigError("lattice.n", "must be at least 8");
    positive("lattice.a", lattice_a);
    if (d_p < 8) throw ConfigError("truncation.d_p", "must be at least 8");
    if (d_f < 8) throw ConfigError("truncation.d_f", "must be at least 8");
    positive("integrator.dt", dt);
    if (steps < 1) throw ConfigError("integrator.steps", "must be at least 1");
    if (out_dir.empty()) throw ConfigError("run.out_dir", "must not be empty");
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& field, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + value + "'");
    }
}

long parse_integer(const std::string& field, const std::string& value) {
    try {
        size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an integer, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& field, const std::string& value) {
    try {
        size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an unsigned integer, got '" + value + "'");
    }
}

/// Splits on commas and/or whitespace.
std::vector<std::string> parse_list(const std::string& value) {
    std::vector<std::string> items;
    std::string token;
    std::istringstream in(value);
    while (std::getline(in, token, ',')) {
        std::istringstream fields(token);
        std::string word;
        while (fields >> word) items.push_back(word);
    }
    return items;
}

}  // namespace

ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    std::set<std::string> seen;
    std::string section;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string field = section.empty() ? key : section + "." + key;
        if (!seen.insert(field).second) throw ConfigError(field, "duplicate key");

        if (field == "schema_version") {
            cfg.schema_version = static_cast<int>(parse_integer(field, value));
        } else if (field == "constants.m") {
            cfg.constants.m = parse_number(field, value);
        } else if (field == "constants.c") {
            cfg.constants.c = parse_number(field, value);
        } else if (field == "constants.chi") {
            cfg.constants.chi = parse_number(field, value);
        } else if (field == "constants.hbar") {
            cfg.constants.hbar = parse_number(field, value);
        } else if (field == "model.dimensions") {
            cfg.dimensions = static_cast<int>(parse_integer(field, value));
        } else if (field == "model.signature") {
            cfg.signature.clear();
            for (const auto& item : parse_list(value))
                cfg.signature.push_back(static_cast<int>(parse_integer(field, item)));
        } else if (field == "model.omega0") {
            cfg.omega0 = parse_number(field, value);
        } else if (field == "lattice.n") {
            cfg.lattice_n = static_cast<int>(parse_integer(field, value));
        } else if (field == "lattice.a") {
            cfg.lattice_a = parse_number(field, value);
        } else if (field == "truncation.d_p") {
            cfg.d_p = static_cast<int>(parse_integer(field, value));
        } else if (field == "truncation.d_f") {
            cfg.d_f = static_cast<int>(parse_integer(field, value));
        } else if (field == "integrator.dt") {
            cfg.dt = parse_number(field, value);
        } else if (field == "integrator.steps") {
            cfg.steps = parse_integer(field, value);
        } else if (field == "run.suites") {
            cfg.suites = parse_list(value);
        } else if (field == "run.seed") {
            cfg.seed = parse_u64(field, value);
        } else if (field == "run.out_dir") {
            cfg.out_dir = value;
        } else {
            throw ConfigError(field, "unknown key");
        }
    }

    // The constants block is mandatory; report the first missing key by name.
    for (const char* field : {"constants.m", "constants.c", "constants.chi"})
        if (!seen.count(field)) throw ConfigError(field, "missing mandatory key");

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(file.string(), "cannot open config file");
    return parse_config(in);
}

}  // namespace dualchart
