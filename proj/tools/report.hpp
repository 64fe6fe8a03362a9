#pragma once

#include <string>
#include <utility>
#include <vector>

namespace startrace::cli {

struct CaseResult {
    std::string id;
    /// (order label, rendered residual) in report order.
    std::vector<std::pair<std::string, std::string>> residuals;
    std::vector<std::string> failed_orders;
    bool pass = true;
    std::string note;
};

struct Report {
    std::string scenario;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<CaseResult> cases;

    std::size_t passed() const;
    bool pass() const { return passed() == cases.size(); }
};

enum class Format { Json, Text };

/// JSON: {scenario, params, cases: [{id, residuals_by_order, pass, ...}], summary}.
std::string emit_report(const Report& r, Format format);

}  // namespace startrace::cli
