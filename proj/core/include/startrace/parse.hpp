#pragma once

// Text grammar shared by files, reports and the command line.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*'? unary) | '/' nat)*    juxtaposition composes, like '*'
//   unary  := '-' unary | factor
//   factor := atom ('^' nat)?
//   atom   := rational | var | deriv | 'exp' '(' expr ')' | '(' expr ')' | '(' expr '|' expr ')'
//   var    := ('q' | 'p') nat               deriv := ('dq' | 'dp') nat
//
// A top-level "A | B" is the bidifferential operator A (x) B. Inside exp(...) the token
// |x|^2 stands for q1^2 + ... + pn^2; the quadratic part there must be isotropic.

#include "startrace/diffop.hpp"
#include "startrace/gaussfn.hpp"
#include "startrace/poly.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace startrace {

using ParsedValue = std::variant<Poly, GaussFn, DiffOp, BiDiffOp>;

/// Throws ParseError (with the byte offset) on malformed text or variables beyond n.
ParsedValue parse_expression(std::string_view text, PhaseSpace space);

Poly parse_poly(std::string_view text, PhaseSpace space);
/// Accepts polynomials too.
GaussFn parse_gauss(std::string_view text, PhaseSpace space);
/// Accepts polynomials (as multiplication operators).
DiffOp parse_diffop(std::string_view text, PhaseSpace space);
BiDiffOp parse_bidiff(std::string_view text, PhaseSpace space);

/// "poly", "gauss", "diffop" or "bidiff".
std::string kind_name(const ParsedValue& v);
std::string to_string(const ParsedValue& v);

/// Smallest n for which every variable named in `text` exists (at least 1).
int infer_half_dimension(std::string_view text);

}  // namespace startrace
