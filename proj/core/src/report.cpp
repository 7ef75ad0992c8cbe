#include "dualchart/report.hpp"

#include <charconv>

#include "dualchart/errors.hpp"

namespace dualchart {

std::string format_double(double x) {
    // std::to_chars emits the shortest decimal form that parses back to the
    // same bits, with no locale involvement.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

CheckResult check_upper(const std::string& name, double measured, double budget,
                        const std::string& note) {
    return {name, measured < budget, measured, budget,
            note.empty() ? "budget is an upper bound" : note};
}

CheckResult check_lower(const std::string& name, double measured, double budget,
                        const std::string& note) {
    return {name, measured >= budget, measured, budget,
            note.empty() ? "budget is a lower bound" : note};
}

CsvWriter::CsvWriter(const std::filesystem::path& file) : out_(file, std::ios::binary) {
    if (!out_) throw Error("cannot open '" + file.string() + "' for writing");
}

void CsvWriter::header(std::initializer_list<std::string> columns) {
    bool first = true;
    for (const auto& col : columns) {
        if (!first) out_ << ',';
        out_ << col;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

}  // namespace dualchart
