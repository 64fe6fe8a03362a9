#include "startrace/poly.hpp"

#include "startrace/errors.hpp"

#include <limits>

namespace startrace {

PhaseSpace::PhaseSpace(int n) : n_(n) {
    if (n < 1 || n > kMaxHalfDimension)
        throw PreconditionViolation("half-dimension must lie in [1, " + std::to_string(kMaxHalfDimension) + "]");
}

std::string PhaseSpace::variable_name(int var) const {
    check_variable(var);
    return (is_q(var) ? "q" : "p") + std::to_string((is_q(var) ? var : var - n_) + 1);
}

void PhaseSpace::check_variable(int var) const {
    if (var < 0 || var >= dimension())
        throw DimensionMismatch("variable index " + std::to_string(var) + " outside phase space of dimension " +
                                std::to_string(dimension()));
}

Rational PhaseSpace::poisson(int a, int b) const {
    if (conjugate(a) != b) return Rational(0);
    return is_q(a) ? Rational(-1) : Rational(1);
}

RationalMatrix PhaseSpace::structure_matrix() const {
    const auto d = static_cast<std::size_t>(dimension());
    RationalMatrix j(d, d);
    for (int a = 0; a < dimension(); ++a)
        for (int b = 0; b < dimension(); ++b) j(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = poisson(a, b);
    return j;
}

void check_same_space(const PhaseSpace& a, const PhaseSpace& b) {
    if (!(a == b))
        throw DimensionMismatch("phase spaces differ (n=" + std::to_string(a.n()) + " vs n=" + std::to_string(b.n()) + ")");
}

void MultiIndex::set(int var, int value) {
    if (value < 0 || value > std::numeric_limits<std::uint8_t>::max())
        throw PreconditionViolation("multi-index entry out of range");
    e_[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(value);
}

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex c;
    for (int i = 0; i < kMaxVariables; ++i) c.set(i, a[i] + b[i]);
    return c;
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex c;
    for (int i = 0; i < kMaxVariables; ++i) c.set(i, a[i] - b[i]);
    return c;
}

Rational multi_binomial(const MultiIndex& alpha, const MultiIndex& beta) {
    Rational r = 1;
    for (int i = 0; i < kMaxVariables; ++i)
        if (beta[i] != 0) r *= binomial(static_cast<unsigned>(alpha[i]), static_cast<unsigned>(beta[i]));
    return r;
}

Rational multi_factorial(const MultiIndex& alpha) {
    Rational r = 1;
    for (int i = 0; i < kMaxVariables; ++i) r *= factorial(static_cast<unsigned>(alpha[i]));
    return r;
}

Poly::Poly(PhaseSpace space, const Rational& constant) : space_(space) {
    if (constant != 0) terms_.emplace(MultiIndex{}, constant);
}

Poly Poly::variable(PhaseSpace space, int var) {
    space.check_variable(var);
    return monomial(space, MultiIndex::unit(var), Rational(1));
}

Poly Poly::monomial(PhaseSpace space, const MultiIndex& exponent, const Rational& coeff) {
    Poly p(space);
    p.add_term(exponent, coeff);
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_zero());
}

Rational Poly::constant_term() const { return coefficient(MultiIndex{}); }

Rational Poly::coefficient(const MultiIndex& exponent) const {
    auto it = terms_.find(exponent);
    return it == terms_.end() ? Rational(0) : it->second;
}

int Poly::degree() const { return terms_.empty() ? -1 : terms_.begin()->first.total(); }

void Poly::add_term(const MultiIndex& exponent, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(exponent, c);
    if (inserted) return;
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

Poly& Poly::operator+=(const Poly& b) {
    check_same_space(space_, b.space_);
    for (const auto& [e, c] : b.terms_) add_term(e, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& b) {
    check_same_space(space_, b.space_);
    for (const auto& [e, c] : b.terms_) add_term(e, -c);
    return *this;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r = a;
    r += b;
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly r = a;
    r -= b;
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    check_same_space(a.space_, b.space_);
    Poly r(a.space_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
    return r;
}

Poly operator*(const Rational& c, const Poly& a) {
    Poly r(a.space_);
    if (c == 0) return r;
    r.terms_ = a.terms_;
    for (auto& [e, x] : r.terms_) x *= c;
    return r;
}

Poly Poly::pow(unsigned k) const {
    Poly result(space_, Rational(1));
    for (unsigned i = 0; i < k; ++i) result = result * *this;
    return result;
}

Poly Poly::diff(int var) const {
    space_.check_variable(var);
    Poly r(space_);
    for (const auto& [e, c] : terms_) {
        const int k = e[var];
        if (k == 0) continue;
        MultiIndex d = e;
        d.set(var, k - 1);
        r.add_term(d, c * k);
    }
    return r;
}

Poly Poly::diff(const MultiIndex& alpha) const {
    Poly r(space_);
    for (const auto& [e, c] : terms_) {
        if (!alpha.divides(e)) continue;
        Rational f = c;
        for (int v = 0; v < space_.dimension(); ++v)
            for (int j = 0; j < alpha[v]; ++j) f *= e[v] - j;
        r.add_term(e - alpha, f);
    }
    return r;
}

Rational Poly::evaluate(const std::vector<Rational>& x) const {
    if (static_cast<int>(x.size()) != space_.dimension()) throw DimensionMismatch("evaluation point has wrong length");
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (int v = 0; v < space_.dimension(); ++v) t *= ipow(x[static_cast<std::size_t>(v)], e[v]);
        sum += t;
    }
    return sum;
}

bool operator==(const Poly& a, const Poly& b) { return a.space_ == b.space_ && a.terms_ == b.terms_; }

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        Rational mag = c < 0 ? Rational(-c) : c;
        if (first)
            out += c < 0 ? "-" : "";
        else
            out += c < 0 ? " - " : " + ";
        first = false;
        std::string mono;
        for (int v = 0; v < space_.dimension(); ++v) {
            if (e[v] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += space_.variable_name(v);
            if (e[v] > 1) mono += "^" + std::to_string(e[v]);
        }
        if (mono.empty())
            out += mag.str();
        else if (mag == 1)
            out += mono;
        else
            out += mag.str() + "*" + mono;
    }
    return out;
}

Poly poisson_bracket(const Poly& f, const Poly& g) {
    check_same_space(f.space(), g.space());
    const PhaseSpace& s = f.space();
    Poly r(s);
    for (int i = 0; i < s.n(); ++i) {
        r += f.diff(s.p(i)) * g.diff(s.q(i));
        r -= f.diff(s.q(i)) * g.diff(s.p(i));
    }
    return r;
}

namespace {

/// Substitutes x_v -> images[v] (each an arbitrary polynomial).
Poly substitute(const Poly& a, const std::vector<Poly>& images) {
    const PhaseSpace& s = a.space();
    std::vector<std::vector<Poly>> powers(images.size());
    Poly r(s);
    for (const auto& [e, c] : a.terms()) {
        Poly term(s, c);
        for (int v = 0; v < s.dimension(); ++v) {
            const int k = e[v];
            if (k == 0) continue;
            auto& pw = powers[static_cast<std::size_t>(v)];
            if (pw.empty()) pw.emplace_back(s, Rational(1));
            while (static_cast<int>(pw.size()) <= k) pw.push_back(pw.back() * images[static_cast<std::size_t>(v)]);
            term = term * pw[static_cast<std::size_t>(k)];
        }
        r += term;
    }
    return r;
}

}  // namespace

Poly pullback_linear(const Poly& a, const RationalMatrix& m) {
    const PhaseSpace& s = a.space();
    const auto d = static_cast<std::size_t>(s.dimension());
    if (m.rows() != d || m.cols() != d) throw DimensionMismatch("pullback matrix has wrong size");
    if (m.determinant() == 0) throw PreconditionViolation("pullback matrix is singular");
    std::vector<Poly> images;
    images.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        Poly img(s);
        for (std::size_t j = 0; j < d; ++j) img.add_term(MultiIndex::unit(static_cast<int>(j)), m(i, j));
        images.push_back(std::move(img));
    }
    return substitute(a, images);
}

Poly translate(const Poly& a, const std::vector<Rational>& shift) {
    const PhaseSpace& s = a.space();
    if (static_cast<int>(shift.size()) != s.dimension()) throw DimensionMismatch("shift vector has wrong length");
    std::vector<Poly> images;
    for (int v = 0; v < s.dimension(); ++v) {
        Poly img = Poly::variable(s, v);
        img.add_term(MultiIndex{}, shift[static_cast<std::size_t>(v)]);
        images.push_back(std::move(img));
    }
    return substitute(a, images);
}

}  // namespace startrace
