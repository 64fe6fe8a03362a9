#include "startrace/io.hpp"

#include "startrace/errors.hpp"
#include "startrace/parse.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace startrace {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
}

template <class F>
auto field(const json& j, const char* key, F&& convert) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    try {
        return convert(j.at(key));
    } catch (const json::exception& e) {
        throw InputError(std::string("bad field '") + key + "': " + e.what());
    }
}

Rational rational_of(const json& j) {
    try {
        if (j.is_number_integer()) return Rational(j.get<long long>());
        if (j.is_string()) return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("bad rational: ") + e.what());
    }
    throw InputError("rationals must be integers or \"p/q\" strings");
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Equivalence equivalence_from_json(const std::string& text, PhaseSpace space, int order) {
    const json j = parse_json(text);
    if (!j.is_array()) throw InputError("equivalence file must be a JSON array");
    std::map<int, DiffOp> terms;
    for (const auto& entry : j) {
        const int k = field(entry, "order", [](const json& v) { return v.get<int>(); });
        const std::string op = field(entry, "operator", [](const json& v) { return v.get<std::string>(); });
        if (k < 1) throw InputError("equivalence orders start at 1");
        if (terms.contains(k)) throw InputError("duplicate equivalence order " + std::to_string(k));
        if (k <= order) terms.emplace(k, parse_diffop(op, space));
    }
    return Equivalence(space, order, std::move(terms));
}

std::string equivalence_to_json(const Equivalence& t) {
    json j = json::array();
    for (const auto& [k, op] : t.terms()) j.push_back({{"order", k}, {"operator", op.to_string()}});
    return j.dump(2);
}

RationalMatrix matrix_from_json(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    RationalMatrix m(j.size(), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw InputError("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = rational_of(j[i][c]);
    }
    return m;
}

std::string matrix_to_json(const RationalMatrix& m) {
    json j = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_string(m(i, c)));
        j.push_back(std::move(row));
    }
    return j.dump();
}

GridFn grid_from_json(const std::string& text) {
    const json j = parse_json(text);
    const int dim = field(j, "dimension", [](const json& v) { return v.get<int>(); });
    auto hw = field(j, "half_widths", [](const json& v) { return v.get<std::vector<double>>(); });
    const int points = field(j, "points_per_axis", [](const json& v) { return v.get<int>(); });
    const int margin = field(j, "margin_cells", [](const json& v) { return v.get<int>(); });
    auto values = field(j, "values", [](const json& v) { return v.get<std::vector<double>>(); });
    if (dim < 1 || static_cast<std::size_t>(dim) != hw.size()) throw InputError("half_widths must have one entry per axis");
    try {
        return GridFn(std::move(hw), points, margin, std::move(values));
    } catch (const PreconditionViolation& e) {
        throw InputError(e.what());
    }
}

std::string grid_to_json(const GridFn& g) {
    json j;
    j["dimension"] = g.dimension();
    j["half_widths"] = g.half_widths();
    j["points_per_axis"] = g.points();
    j["margin_cells"] = g.margin();
    j["values"] = g.values();
    return j.dump();
}

std::vector<GaussFn> probes_from_json(const std::string& text, PhaseSpace space) {
    const json j = parse_json(text);
    if (!j.is_array()) throw InputError("probe file must be a JSON array of expressions");
    std::vector<GaussFn> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw InputError("probes must be expression strings");
        GaussFn f = parse_gauss(e.get<std::string>(), space);
        if (!f.is_integrable() || f.is_zero()) throw InputError("probe is not a nonzero integrable function: " + e.get<std::string>());
        out.push_back(std::move(f));
    }
    return out;
}

std::string probes_to_json(const std::vector<GaussFn>& probes) {
    json j = json::array();
    for (const auto& p : probes) j.push_back(p.to_string());
    return j.dump(2);
}

TraceFunctional trace_from_json(const std::string& text, PhaseSpace space, int order) {
    const json j = parse_json(text);
    const int prefactor = field(j, "prefactor", [](const json& v) { return v.get<int>(); });
    const json density = field(j, "density", [](const json& v) { return v; });
    if (!density.is_array()) throw InputError("density must be an array");
    std::map<int, Poly> coeffs;
    for (const auto& entry : density) {
        const int k = field(entry, "order", [](const json& v) { return v.get<int>(); });
        const std::string f = field(entry, "function", [](const json& v) { return v.get<std::string>(); });
        if (k > order) continue;
        auto it = coeffs.try_emplace(k, space).first;
        it->second += parse_poly(f, space);
    }
    const int lo = coeffs.empty() ? order : std::min(coeffs.begin()->first, order);
    std::vector<Poly> dense(static_cast<std::size_t>(order - lo + 1), Poly(space));
    for (auto& [k, p] : coeffs) dense[static_cast<std::size_t>(k - lo)] = std::move(p);
    try {
        return TraceFunctional(space, PolySeries(lo, order, std::move(dense)), prefactor);
    } catch (const PreconditionViolation& e) {
        throw InputError(e.what());
    }
}

std::string trace_to_json(const TraceFunctional& t) {
    json j;
    j["prefactor"] = t.prefactor();
    json d = json::array();
    const auto& rho = t.density();
    for (int k = rho.min_degree(); k <= rho.order(); ++k) {
        const Poly c = rho.coeff(k);
        if (!c.is_zero()) d.push_back({{"order", k}, {"function", c.to_string()}});
    }
    j["density"] = std::move(d);
    return j.dump(2);
}

}  // namespace startrace
