#include "startrace/parse.hpp"

#include "startrace/errors.hpp"

#include <cctype>
#include <optional>

namespace startrace {

namespace {

enum class Tok { Num, Var, Deriv, Exp, Norm, Bar, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t pos;
    std::string text;  // digits for Num; index digits for Var/Deriv
    bool is_q = false;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto digits = [&](std::size_t from) {
        std::size_t j = from;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        return j;
    };
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            i = digits(i);
            out.push_back({Tok::Num, start, std::string(s.substr(start, i - start))});
            continue;
        }
        if (c == 'q' || c == 'p') {
            const std::size_t end = digits(i + 1);
            if (end == i + 1) throw ParseError("variable needs an index", start);
            out.push_back({Tok::Var, start, std::string(s.substr(i + 1, end - i - 1)), c == 'q'});
            i = end;
            continue;
        }
        if (c == 'd' && i + 1 < s.size() && (s[i + 1] == 'q' || s[i + 1] == 'p')) {
            const std::size_t end = digits(i + 2);
            if (end == i + 2) throw ParseError("derivative needs an index", start);
            out.push_back({Tok::Deriv, start, std::string(s.substr(i + 2, end - i - 2)), s[i + 1] == 'q'});
            i = end;
            continue;
        }
        if (s.substr(i, 3) == "exp") {
            out.push_back({Tok::Exp, start, "exp"});
            i += 3;
            continue;
        }
        if (s.substr(i, 3) == "|x|") {
            out.push_back({Tok::Norm, start, "|x|"});
            i += 3;
            continue;
        }
        Tok k;
        switch (c) {
            case '|': k = Tok::Bar; break;
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
        out.push_back({k, start, std::string(1, c)});
        ++i;
    }
    out.push_back({Tok::End, s.size(), ""});
    return out;
}

/// sum_alpha g_alpha d^alpha with Gaussian-class coefficients; the common parse value.
struct Op {
    std::map<MultiIndex, GaussFn, GradedLex> terms;

    void add(const MultiIndex& a, const GaussFn& g) {
        if (g.is_zero()) return;
        auto [it, inserted] = terms.try_emplace(a, g);
        if (inserted) return;
        it->second += g;
        if (it->second.is_zero()) terms.erase(it);
    }
    bool is_function() const {
        for (const auto& [a, g] : terms)
            if (!a.is_zero()) return false;
        return true;
    }
};

Op op_function(const GaussFn& g) {
    Op o;
    o.add(MultiIndex{}, g);
    return o;
}

Op op_sum(const Op& a, const Op& b, const Rational& sign) {
    Op r = a;
    for (const auto& [k, g] : b.terms) r.add(k, sign * g);
    return r;
}

Op op_compose(const Op& a, const Op& b, int dim) {
    Op r;
    for (const auto& [beta, bc] : b.terms) {
        DerivativeCache<GaussFn> db(bc);
        for (const auto& [alpha, ac] : a.terms)
            for_each_sub_index(alpha, dim, [&](const MultiIndex& gamma) {
                const GaussFn& d = db.get(gamma);
                if (d.is_zero()) return;
                r.add(alpha - gamma + beta, multi_binomial(alpha, gamma) * (ac * d));
            });
    }
    return r;
}

std::optional<Poly> as_poly(const GaussFn& g) {
    Poly p(g.space());
    for (const auto& [e, c] : g.terms()) {
        if (!e.is_polynomial()) return std::nullopt;
        p += c;
    }
    return p;
}

using Value = std::variant<Op, BiDiffOp>;

class Parser {
public:
    Parser(std::string_view text, PhaseSpace space) : toks_(tokenize(text)), space_(space) {}

    Value parse_top() {
        Value v = parse_slot_pair();
        if (peek().kind != Tok::End) throw ParseError("unexpected '" + peek().text + "'", peek().pos);
        return v;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& next() { return toks_[i_++]; }
    void expect(Tok k, const char* what) {
        if (peek().kind != k) throw ParseError(std::string("expected ") + what, peek().pos);
        ++i_;
    }

    /// expr or expr '|' expr.
    Value parse_slot_pair() {
        const std::size_t at = peek().pos;
        Value left = parse_expr();
        if (peek().kind != Tok::Bar) return left;
        const std::size_t bar = next().pos;
        Value right = parse_expr();
        return BiDiffOp::tensor(to_diffop(left, at), to_diffop(right, bar + 1));
    }

    DiffOp to_diffop(const Value& v, std::size_t pos) const {
        const Op* o = std::get_if<Op>(&v);
        if (!o) throw ParseError("bidifferential slot must be a differential operator", pos);
        DiffOp d(space_);
        for (const auto& [a, g] : o->terms) {
            auto p = as_poly(g);
            if (!p) throw ParseError("operator coefficients must be polynomials", pos);
            d.add_term(a, *p);
        }
        return d;
    }

    Value parse_expr() {
        Value v = parse_term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const Token& t = next();
            const Rational sign = t.kind == Tok::Plus ? Rational(1) : Rational(-1);
            v = add(v, parse_term(), sign, t.pos);
        }
        return v;
    }

    static bool starts_atom(Tok k) {
        return k == Tok::Num || k == Tok::Var || k == Tok::Deriv || k == Tok::Exp || k == Tok::Norm ||
               k == Tok::LParen;
    }

    Value parse_term() {
        Value v = parse_unary();
        for (;;) {
            const std::size_t pos = peek().pos;
            if (peek().kind == Tok::Slash) {
                ++i_;
                if (peek().kind != Tok::Num || peek().text.find_first_not_of('0') == std::string::npos)
                    throw ParseError("expected a nonzero integer divisor", peek().pos);
                v = scale(v, Rational(1) / Rational(Integer{next().text}), pos);
                continue;
            }
            if (peek().kind == Tok::Star)
                ++i_;
            else if (!starts_atom(peek().kind))
                break;
            v = multiply(v, parse_unary(), pos);
        }
        return v;
    }

    Value parse_unary() {
        if (peek().kind == Tok::Minus) {
            const std::size_t pos = next().pos;
            return scale(parse_unary(), Rational(-1), pos);
        }
        return parse_factor();
    }

    Value parse_factor() {
        const std::size_t pos = peek().pos;
        Value base = parse_atom();
        if (peek().kind != Tok::Caret) return base;
        ++i_;
        if (peek().kind != Tok::Num) throw ParseError("exponent must be a natural number", peek().pos);
        const std::string digits = next().text;
        if (digits.size() > 3) throw ParseError("exponent too large", pos);
        const int k = std::stoi(digits);
        const Op* o = std::get_if<Op>(&base);
        if (!o) throw ParseError("cannot raise a bidifferential operator to a power", pos);
        Op result = op_function(GaussFn(Poly(space_, Rational(1))));
        for (int j = 0; j < k; ++j) result = op_compose(result, *o, space_.dimension());
        return result;
    }

    int index_of(const Token& t) const {
        if (t.text.size() > 3) throw ParseError("variable index too large", t.pos);
        const int i = std::stoi(t.text);
        if (i < 1 || i > space_.n())
            throw ParseError("unknown variable for n=" + std::to_string(space_.n()), t.pos);
        return t.is_q ? space_.q(i - 1) : space_.p(i - 1);
    }

    Value parse_atom() {
        const Token t = next();
        switch (t.kind) {
            case Tok::Num: {
                Integer num{t.text};
                Integer den{1};
                if (peek().kind == Tok::Slash) {
                    ++i_;
                    if (peek().kind != Tok::Num) throw ParseError("expected denominator", peek().pos);
                    den = Integer{next().text};
                    if (den == 0) throw ParseError("zero denominator", t.pos);
                }
                return op_function(GaussFn(Poly(space_, Rational(num, den))));
            }
            case Tok::Var: return op_function(GaussFn(Poly::variable(space_, index_of(t))));
            case Tok::Deriv: {
                Op o;
                o.add(MultiIndex::unit(index_of(t)), GaussFn(Poly(space_, Rational(1))));
                return o;
            }
            case Tok::Norm: {
                if (!in_exp_) throw ParseError("|x|^2 is only allowed inside exp(...)", t.pos);
                expect(Tok::Caret, "'^2' after |x|");
                if (peek().kind != Tok::Num || peek().text != "2") throw ParseError("expected '^2' after |x|", peek().pos);
                ++i_;
                Poly r(space_);
                for (int v = 0; v < space_.dimension(); ++v) r.add_term(MultiIndex::unit(v) + MultiIndex::unit(v), Rational(1));
                return op_function(GaussFn(r));
            }
            case Tok::Exp: {
                expect(Tok::LParen, "'(' after exp");
                const bool outer = in_exp_;
                in_exp_ = true;
                const std::size_t at = peek().pos;
                Value arg = parse_expr();
                in_exp_ = outer;
                expect(Tok::RParen, "')'");
                return op_function(exponential(arg, at));
            }
            case Tok::LParen: {
                Value v = in_exp_ ? parse_expr() : parse_slot_pair();
                expect(Tok::RParen, "')'");
                return v;
            }
            case Tok::End: throw ParseError("unexpected end of input", t.pos);
            default: throw ParseError("unexpected '" + t.text + "'", t.pos);
        }
    }

    GaussFn exponential(const Value& arg, std::size_t pos) const {
        const Op* o = std::get_if<Op>(&arg);
        std::optional<Poly> p;
        if (o && o->is_function()) {
            auto it = o->terms.find(MultiIndex{});
            p = it == o->terms.end() ? Poly(space_) : as_poly(it->second);
        }
        if (!p) throw ParseError("exp argument must be a polynomial", pos);
        const int dim = space_.dimension();
        Rational t = 0;
        std::vector<Rational> b(static_cast<std::size_t>(dim), Rational(0));
        Rational c = p->constant_term();
        bool first = true;
        for (int v = 0; v < dim; ++v) {
            b[static_cast<std::size_t>(v)] = p->coefficient(MultiIndex::unit(v));
            const Rational sq = p->coefficient(MultiIndex::unit(v) + MultiIndex::unit(v));
            if (first) t = -2 * sq;
            else if (-2 * sq != t) throw ParseError("quadratic part of exp argument is not isotropic", pos);
            first = false;
        }
        for (const auto& [e, coeff] : p->terms()) {
            if (e.total() > 2) throw ParseError("exp argument has degree above 2", pos);
            if (e.total() == 2) {
                bool square = false;
                for (int v = 0; v < dim; ++v) square = square || e[v] == 2;
                if (!square) throw ParseError("exp argument has a mixed quadratic term", pos);
            }
        }
        if (t < 0) throw ParseError("exp argument grows at infinity", pos);
        return GaussFn::gaussian(Poly(space_, Rational(1)), t, std::move(b), c);
    }

    Value add(const Value& a, const Value& b, const Rational& sign, std::size_t pos) const {
        if (auto* x = std::get_if<Op>(&a)) {
            if (auto* y = std::get_if<Op>(&b)) return op_sum(*x, *y, sign);
        } else if (auto* y = std::get_if<BiDiffOp>(&b)) {
            return std::get<BiDiffOp>(a) + sign * *y;
        }
        throw ParseError("cannot add a bidifferential operator to a different kind of value", pos);
    }

    Value scale(const Value& a, const Rational& r, std::size_t) const {
        if (auto* x = std::get_if<Op>(&a)) {
            Op o;
            for (const auto& [k, g] : x->terms) o.add(k, r * g);
            return o;
        }
        return r * std::get<BiDiffOp>(a);
    }

    Value multiply(const Value& a, const Value& b, std::size_t pos) const {
        const Op* x = std::get_if<Op>(&a);
        const Op* y = std::get_if<Op>(&b);
        if (x && y) return op_compose(*x, *y, space_.dimension());
        // A polynomial factor scales the output of a bidifferential operator.
        const Op* f = x ? x : y;
        const BiDiffOp& bi = x ? std::get<BiDiffOp>(b) : std::get<BiDiffOp>(a);
        if (!f) throw ParseError("cannot compose two bidifferential operators", pos);
        if (!f->is_function()) throw ParseError("cannot compose a differential and a bidifferential operator", pos);
        auto it = f->terms.find(MultiIndex{});
        if (it == f->terms.end()) return BiDiffOp(space_);
        auto p = as_poly(it->second);
        if (!p) throw ParseError("bidifferential coefficients must be polynomials", pos);
        return *p * bi;
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    PhaseSpace space_;
    bool in_exp_ = false;
};

}  // namespace

ParsedValue parse_expression(std::string_view text, PhaseSpace space) {
    Value v = Parser(text, space).parse_top();
    if (auto* bi = std::get_if<BiDiffOp>(&v)) return *bi;
    const Op& o = std::get<Op>(v);
    if (o.is_function()) {
        auto it = o.terms.find(MultiIndex{});
        if (it == o.terms.end()) return Poly(space);
        if (auto p = as_poly(it->second)) return *p;
        return it->second;
    }
    DiffOp d(space);
    for (const auto& [a, g] : o.terms) {
        auto p = as_poly(g);
        if (!p) throw ParseError("operator coefficients must be polynomials", 0);
        d.add_term(a, *p);
    }
    return d;
}

Poly parse_poly(std::string_view text, PhaseSpace space) {
    ParsedValue v = parse_expression(text, space);
    if (auto* p = std::get_if<Poly>(&v)) return *p;
    throw ParseError("expected a polynomial, got a " + kind_name(v), 0);
}

GaussFn parse_gauss(std::string_view text, PhaseSpace space) {
    ParsedValue v = parse_expression(text, space);
    if (auto* p = std::get_if<Poly>(&v)) return GaussFn(*p);
    if (auto* g = std::get_if<GaussFn>(&v)) return *g;
    throw ParseError("expected a function, got a " + kind_name(v), 0);
}

DiffOp parse_diffop(std::string_view text, PhaseSpace space) {
    ParsedValue v = parse_expression(text, space);
    if (auto* p = std::get_if<Poly>(&v)) return DiffOp::multiplication(*p);
    if (auto* d = std::get_if<DiffOp>(&v)) return *d;
    throw ParseError("expected a differential operator, got a " + kind_name(v), 0);
}

BiDiffOp parse_bidiff(std::string_view text, PhaseSpace space) {
    ParsedValue v = parse_expression(text, space);
    if (auto* b = std::get_if<BiDiffOp>(&v)) return *b;
    if (auto* p = std::get_if<Poly>(&v); p && p->is_zero()) return BiDiffOp(space);
    throw ParseError("expected a bidifferential operator, got a " + kind_name(v), 0);
}

std::string kind_name(const ParsedValue& v) {
    static const char* names[] = {"poly", "gauss", "diffop", "bidiff"};
    return names[v.index()];
}

std::string to_string(const ParsedValue& v) {
    return std::visit([](const auto& x) { return x.to_string(); }, v);
}

int infer_half_dimension(std::string_view text) {
    int n = 1;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != 'q' && c != 'p') continue;
        std::size_t j = i + 1;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i + 1 && j - i - 1 <= 3) n = std::max(n, std::stoi(std::string(text.substr(i + 1, j - i - 1))));
    }
    return std::min(n, kMaxHalfDimension);
}

}  // namespace startrace
