#include "report.hpp"

#include "json.hpp"

#include <algorithm>
#include <sstream>

namespace startrace::cli {

std::size_t Report::passed() const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return c.pass; }));
}

namespace {

std::string emit_json(const Report& r) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["scenario"] = r.scenario;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    j["params"] = std::move(params);
    ordered_json cases = ordered_json::array();
    for (const auto& c : r.cases) {
        ordered_json jc;
        jc["id"] = c.id;
        ordered_json res = ordered_json::object();
        for (const auto& [k, v] : c.residuals) res[k] = v;
        jc["residuals_by_order"] = std::move(res);
        jc["pass"] = c.pass;
        if (!c.failed_orders.empty()) jc["failed_orders"] = c.failed_orders;
        if (!c.note.empty()) jc["note"] = c.note;
        cases.push_back(std::move(jc));
    }
    j["cases"] = std::move(cases);
    j["summary"] = {{"cases", r.cases.size()}, {"passed", r.passed()}, {"failed", r.cases.size() - r.passed()},
                    {"pass", r.pass()}};
    return j.dump(2) + "\n";
}

std::string emit_text(const Report& r) {
    std::ostringstream out;
    out << "scenario " << r.scenario << "\n";
    for (const auto& [k, v] : r.params) out << "  " << k << " = " << v << "\n";
    std::size_t width = 4;
    for (const auto& c : r.cases) width = std::max(width, c.id.size());
    for (const auto& c : r.cases) {
        out << (c.pass ? "PASS  " : "FAIL  ") << c.id << std::string(width - c.id.size() + 2, ' ');
        bool first = true;
        for (const auto& [k, v] : c.residuals) {
            out << (first ? "" : ", ") << k << ": " << v;
            first = false;
        }
        if (!c.failed_orders.empty()) {
            out << "  [failed:";
            for (const auto& f : c.failed_orders) out << " " << f;
            out << "]";
        }
        if (!c.note.empty()) out << "  (" << c.note << ")";
        out << "\n";
    }
    out << r.passed() << "/" << r.cases.size() << " cases passed\n";
    return out.str();
}

}  // namespace

std::string emit_report(const Report& r, Format format) {
    return format == Format::Json ? emit_json(r) : emit_text(r);
}

}  // namespace startrace::cli
