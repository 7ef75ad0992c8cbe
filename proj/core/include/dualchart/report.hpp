#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace dualchart {

/// Shortest round-trippable decimal form of a double ("%.17g" trimmed by
/// round-trip search). Deterministic across runs; no locale dependence.
std::string format_double(double x);

/// One checked quantity: a measured value against its budget. `pass` is
/// stored rather than recomputed so that direction (<, >=) stays with the
/// check that produced it.
struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double budget = 0.0;
    std::string note;  ///< direction and context, e.g. "max deviation, budget is an upper bound"
};

CheckResult check_upper(const std::string& name, double measured, double budget,
                        const std::string& note = "");
CheckResult check_lower(const std::string& name, double measured, double budget,
                        const std::string& note = "");

/// Minimal deterministic CSV writer: '\n' endings, no quoting (callers pass
/// clean tokens), numbers through format_double.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& file);
    void header(std::initializer_list<std::string> columns);
    void row(const std::vector<std::string>& cells);
    bool good() const { return out_.good(); }

private:
    std::ofstream out_;
};

}  // namespace dualchart
