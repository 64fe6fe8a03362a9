#pragma once

// JSON file formats. Operators and densities are stored as expression strings.
//
//   equivalence  [{"order": k, "operator": "<diffop>"}, ...]
//   matrix       [["1", "0"], ["0", "1"]]          (rationals as strings or integers)
//   grid         {"dimension", "half_widths", "points_per_axis", "margin_cells", "values"}
//   probes       ["<gauss>", ...]
//   trace        {"prefactor": m, "density": [{"order": k, "function": "<poly>"}, ...]}

#include "startrace/equiv.hpp"
#include "startrace/gsdecomp.hpp"
#include "startrace/linalg.hpp"
#include "startrace/trace.hpp"

#include <string>
#include <vector>

namespace startrace {

/// Whole file as a string; throws InputError when unreadable.
std::string read_text_file(const std::string& path);

Equivalence equivalence_from_json(const std::string& text, PhaseSpace space, int order);
std::string equivalence_to_json(const Equivalence& t);

RationalMatrix matrix_from_json(const std::string& text);
std::string matrix_to_json(const RationalMatrix& m);

GridFn grid_from_json(const std::string& text);
std::string grid_to_json(const GridFn& g);

std::vector<GaussFn> probes_from_json(const std::string& text, PhaseSpace space);
std::string probes_to_json(const std::vector<GaussFn>& probes);

TraceFunctional trace_from_json(const std::string& text, PhaseSpace space, int order);
std::string trace_to_json(const TraceFunctional& t);

}  // namespace startrace
