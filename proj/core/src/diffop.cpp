#include "startrace/diffop.hpp"

#include "startrace/errors.hpp"

namespace startrace {

namespace {

std::string derivative_string(const PhaseSpace& s, const MultiIndex& alpha) {
    std::string out;
    for (int v = 0; v < s.dimension(); ++v) {
        if (alpha[v] == 0) continue;
        if (!out.empty()) out += "*";
        out += "d" + s.variable_name(v);
        if (alpha[v] > 1) out += "^" + std::to_string(alpha[v]);
    }
    return out;
}

/// Renders coeff * d^alpha; the sign is returned separately so sums print as "a - b".
std::string term_string(const PhaseSpace& s, const Poly& coeff, const MultiIndex& alpha, bool& negative) {
    Poly c = coeff;
    negative = false;
    if (c.size() == 1 && c.terms().begin()->second < 0) {
        negative = true;
        c = -c;
    }
    const std::string d = derivative_string(s, alpha);
    std::string cs = c.to_string();
    if (c.size() > 1) cs = "(" + cs + ")";
    if (d.empty()) return cs;
    if (c.is_constant() && c.constant_term() == 1) return d;
    return cs + "*" + d;
}

/// Symplectic form Omega = sum_i dq_i ^ dp_i as a matrix.
Rational omega(const PhaseSpace& s, int a, int b) {
    if (s.conjugate(a) != b) return Rational(0);
    return s.is_q(a) ? Rational(1) : Rational(-1);
}

}  // namespace

// ---------------------------------------------------------------- DiffOp

DiffOp DiffOp::identity(PhaseSpace space) { return multiplication(Poly(space, Rational(1))); }

DiffOp DiffOp::multiplication(const Poly& a) { return derivative(a, MultiIndex{}); }

DiffOp DiffOp::derivative(const Poly& coeff, const MultiIndex& alpha) {
    DiffOp op(coeff.space());
    op.add_term(alpha, coeff);
    return op;
}

DiffOp DiffOp::partial(PhaseSpace space, int var) {
    space.check_variable(var);
    return derivative(Poly(space, Rational(1)), MultiIndex::unit(var));
}

int DiffOp::order() const {
    int k = -1;
    for (const auto& [alpha, a] : terms_) k = std::max(k, alpha.total());
    return k;
}

Poly DiffOp::coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? Poly(space_) : it->second;
}

void DiffOp::add_term(const MultiIndex& alpha, const Poly& coeff) {
    check_same_space(space_, coeff.space());
    for (int v = space_.dimension(); v < kMaxVariables; ++v)
        if (alpha[v] != 0) throw DimensionMismatch("derivative index outside phase space");
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(alpha, coeff);
    if (inserted) return;
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
}

DiffOp DiffOp::operator-() const {
    DiffOp r = *this;
    for (auto& [alpha, a] : r.terms_) a = -a;
    return r;
}

DiffOp& DiffOp::operator+=(const DiffOp& b) {
    check_same_space(space_, b.space_);
    for (const auto& [alpha, a] : b.terms_) add_term(alpha, a);
    return *this;
}

DiffOp operator+(const DiffOp& a, const DiffOp& b) {
    DiffOp r = a;
    r += b;
    return r;
}

DiffOp operator-(const DiffOp& a, const DiffOp& b) { return a + (-b); }

DiffOp operator*(const DiffOp& a, const DiffOp& b) {
    check_same_space(a.space_, b.space_);
    const int dim = a.space_.dimension();
    DiffOp r(a.space_);
    // (a d^alpha) o (b d^beta) = sum_{gamma <= alpha} C(alpha, gamma) a (d^gamma b) d^{alpha - gamma + beta}
    for (const auto& [beta, bc] : b.terms_) {
        DerivativeCache<Poly> db(bc);
        for (const auto& [alpha, ac] : a.terms_) {
            for_each_sub_index(alpha, dim, [&](const MultiIndex& gamma) {
                const Poly& dg = db.get(gamma);
                if (dg.is_zero()) return;
                r.add_term(alpha - gamma + beta, multi_binomial(alpha, gamma) * (ac * dg));
            });
        }
    }
    return r;
}

DiffOp operator*(const Rational& c, const DiffOp& a) {
    DiffOp r(a.space_);
    if (c == 0) return r;
    r.terms_ = a.terms_;
    for (auto& [alpha, x] : r.terms_) x = c * x;
    return r;
}

DiffOp operator*(const Poly& p, const DiffOp& a) {
    DiffOp r(a.space_);
    for (const auto& [alpha, x] : a.terms_) r.add_term(alpha, p * x);
    return r;
}

bool operator==(const DiffOp& a, const DiffOp& b) { return a.space_ == b.space_ && a.terms_ == b.terms_; }

std::string DiffOp::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [alpha, a] : terms_) {
        bool neg = false;
        std::string t = term_string(space_, a, alpha, neg);
        if (out.empty())
            out = (neg ? "-" : "") + t;
        else
            out += (neg ? " - " : " + ") + t;
    }
    return out;
}

DiffOp adjoint(const DiffOp& a) {
    const PhaseSpace& s = a.space();
    DiffOp r(s);
    // (c d^alpha)* f = (-1)^|alpha| sum_gamma C(alpha, gamma) (d^{alpha-gamma} c) d^gamma f
    for (const auto& [alpha, c] : a.terms()) {
        const Rational sign = alpha.total() % 2 == 0 ? Rational(1) : Rational(-1);
        DerivativeCache<Poly> dc(c);
        for_each_sub_index(alpha, s.dimension(), [&](const MultiIndex& gamma) {
            const Poly& d = dc.get(alpha - gamma);
            if (d.is_zero()) return;
            r.add_term(gamma, (sign * multi_binomial(alpha, gamma)) * d);
        });
    }
    return r;
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) { return a * b - b * a; }

namespace {

// d/dx_i (f(m x)) = sum_j m_ji (d_j f)(m x)
std::vector<DiffOp> chain_operators(const PhaseSpace& s, const RationalMatrix& m) {
    std::vector<DiffOp> chain;
    for (int i = 0; i < s.dimension(); ++i) {
        DiffOp di(s);
        for (int j = 0; j < s.dimension(); ++j)
            di.add_term(MultiIndex::unit(j), Poly(s, m(static_cast<std::size_t>(j), static_cast<std::size_t>(i))));
        chain.push_back(std::move(di));
    }
    return chain;
}

DiffOp chain_power(const PhaseSpace& s, const std::vector<DiffOp>& chain, const MultiIndex& alpha) {
    DiffOp d = DiffOp::identity(s);
    for (int i = 0; i < s.dimension(); ++i)
        for (int k = 0; k < alpha[i]; ++k) d = d * chain[static_cast<std::size_t>(i)];
    return d;
}

}  // namespace

DiffOp conjugate_by_linear(const DiffOp& a, const RationalMatrix& m) {
    const PhaseSpace& s = a.space();
    const RationalMatrix minv = m.inverse();
    const auto chain = chain_operators(s, m);
    DiffOp r(s);
    for (const auto& [alpha, c] : a.terms()) r += pullback_linear(c, minv) * chain_power(s, chain, alpha);
    return r;
}

BiDiffOp conjugate_by_linear(const BiDiffOp& b, const RationalMatrix& m) {
    const PhaseSpace& s = b.space();
    const RationalMatrix minv = m.inverse();
    const auto chain = chain_operators(s, m);
    BiDiffOp r(s);
    for (const auto& [key, c] : b.terms())
        r += pullback_linear(c, minv) *
             BiDiffOp::tensor(chain_power(s, chain, key.first), chain_power(s, chain, key.second));
    return r;
}

bool is_conformal_vector_field(const DiffOp& x) {
    const PhaseSpace& s = x.space();
    const int dim = s.dimension();
    if (x.order() > 1) return false;
    if (!x.coefficient(MultiIndex{}).is_zero()) return false;
    std::vector<Poly> comp;
    for (int a = 0; a < dim; ++a) comp.push_back(x.coefficient(MultiIndex::unit(a)));
    // (L_X Omega)_{bc} = sum_a Omega_{ac} d_b X^a + Omega_{ba} d_c X^a
    for (int b = 0; b < dim; ++b)
        for (int c = b + 1; c < dim; ++c) {
            Poly lie(s);
            for (int a = 0; a < dim; ++a) {
                lie += omega(s, a, c) * comp[static_cast<std::size_t>(a)].diff(b);
                lie += omega(s, b, a) * comp[static_cast<std::size_t>(a)].diff(c);
            }
            if (!(lie == Poly(s, omega(s, b, c)))) return false;
        }
    return true;
}

DiffOp euler_vector_field(PhaseSpace space) {
    DiffOp x(space);
    for (int v = 0; v < space.dimension(); ++v)
        x.add_term(MultiIndex::unit(v), Rational(1, 2) * Poly::variable(space, v));
    return x;
}

// ---------------------------------------------------------------- BiDiffOp

BiDiffOp BiDiffOp::product(PhaseSpace space) {
    BiDiffOp b(space);
    b.add_term(MultiIndex{}, MultiIndex{}, Poly(space, Rational(1)));
    return b;
}

BiDiffOp BiDiffOp::tensor(const DiffOp& left, const DiffOp& right) {
    check_same_space(left.space(), right.space());
    BiDiffOp b(left.space());
    for (const auto& [alpha, a] : left.terms())
        for (const auto& [beta, c] : right.terms()) b.add_term(alpha, beta, a * c);
    return b;
}

int BiDiffOp::order() const {
    int k = -1;
    for (const auto& [key, a] : terms_) k = std::max(k, key.first.total() + key.second.total());
    return k;
}

void BiDiffOp::add_term(const MultiIndex& alpha, const MultiIndex& beta, const Poly& coeff) {
    check_same_space(space_, coeff.space());
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(Key{alpha, beta}, coeff);
    if (inserted) return;
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
}

BiDiffOp BiDiffOp::operator-() const {
    BiDiffOp r = *this;
    for (auto& [key, a] : r.terms_) a = -a;
    return r;
}

BiDiffOp& BiDiffOp::operator+=(const BiDiffOp& b) {
    check_same_space(space_, b.space_);
    for (const auto& [key, a] : b.terms_) add_term(key.first, key.second, a);
    return *this;
}

BiDiffOp operator+(const BiDiffOp& a, const BiDiffOp& b) {
    BiDiffOp r = a;
    r += b;
    return r;
}

BiDiffOp operator-(const BiDiffOp& a, const BiDiffOp& b) { return a + (-b); }

BiDiffOp operator*(const Rational& c, const BiDiffOp& a) {
    BiDiffOp r(a.space_);
    if (c == 0) return r;
    r.terms_ = a.terms_;
    for (auto& [key, x] : r.terms_) x = c * x;
    return r;
}

BiDiffOp operator*(const Poly& p, const BiDiffOp& a) {
    BiDiffOp r(a.space_);
    for (const auto& [key, x] : a.terms_) r.add_term(key.first, key.second, p * x);
    return r;
}

bool operator==(const BiDiffOp& a, const BiDiffOp& b) { return a.space_ == b.space_ && a.terms_ == b.terms_; }

BiDiffOp BiDiffOp::swapped() const {
    BiDiffOp r(space_);
    for (const auto& [key, a] : terms_) r.add_term(key.second, key.first, a);
    return r;
}

BiDiffOp BiDiffOp::antisymmetric_part() const { return *this - swapped(); }

DiffOp BiDiffOp::with_left(const Poly& a) const {
    DerivativeCache<Poly> da(a);
    DiffOp r(space_);
    for (const auto& [key, c] : terms_) r.add_term(key.second, c * da.get(key.first));
    return r;
}

DiffOp BiDiffOp::with_right(const Poly& a) const { return swapped().with_left(a); }

std::string BiDiffOp::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [key, a] : terms_) {
        bool neg = false;
        std::string left = term_string(space_, a, key.first, neg);
        std::string right = derivative_string(space_, key.second);
        if (right.empty()) right = "1";
        if (!out.empty()) out += " + ";
        out += "(" + std::string(neg ? "-" : "") + left + " | " + right + ")";
    }
    return out;
}

BiDiffOp compose_inputs(const BiDiffOp& b, const DiffOp& left, const DiffOp& right) {
    check_same_space(b.space(), left.space());
    check_same_space(b.space(), right.space());
    const PhaseSpace& s = b.space();
    std::map<MultiIndex, DiffOp> lcache, rcache;
    auto lift = [&](std::map<MultiIndex, DiffOp>& cache, const DiffOp& op, const MultiIndex& alpha) -> const DiffOp& {
        auto it = cache.find(alpha);
        if (it == cache.end())
            it = cache.emplace(alpha, DiffOp::derivative(Poly(s, Rational(1)), alpha) * op).first;
        return it->second;
    };
    BiDiffOp r(s);
    for (const auto& [key, a] : b.terms()) {
        const DiffOp& l = lift(lcache, left, key.first);
        const DiffOp& rr = lift(rcache, right, key.second);
        for (const auto& [gamma, lc] : l.terms()) {
            const Poly al = a * lc;
            for (const auto& [delta, rc] : rr.terms()) r.add_term(gamma, delta, al * rc);
        }
    }
    return r;
}

BiDiffOp compose_output(const DiffOp& out, const BiDiffOp& b) {
    check_same_space(out.space(), b.space());
    const PhaseSpace& s = b.space();
    const int dim = s.dimension();
    BiDiffOp r(s);
    // d^mu (f d^gamma u d^delta v) = sum_{mu1+mu2+mu3 = mu} mu!/(mu1! mu2! mu3!) d^mu1 f d^{gamma+mu2} u d^{delta+mu3} v
    for (const auto& [key, f] : b.terms()) {
        DerivativeCache<Poly> df(f);
        for (const auto& [mu, sc] : out.terms()) {
            const Rational mu_fact = multi_factorial(mu);
            for_each_sub_index(mu, dim, [&](const MultiIndex& mu1) {
                const Poly& d1 = df.get(mu1);
                if (d1.is_zero()) return;
                const MultiIndex rest = mu - mu1;
                const Poly coeff = sc * d1;
                for_each_sub_index(rest, dim, [&](const MultiIndex& mu2) {
                    const MultiIndex mu3 = rest - mu2;
                    const Rational m = mu_fact / (multi_factorial(mu1) * multi_factorial(mu2) * multi_factorial(mu3));
                    r.add_term(key.first + mu2, key.second + mu3, m * coeff);
                });
            });
        }
    }
    return r;
}

BiDiffOp conjugate(const DiffOp& out, const BiDiffOp& b, const DiffOp& left, const DiffOp& right) {
    return compose_output(out, compose_inputs(b, left, right));
}

BiDiffOp poisson_cochain(PhaseSpace space) {
    BiDiffOp b(space);
    const Poly one(space, Rational(1));
    for (int i = 0; i < space.n(); ++i) {
        b.add_term(MultiIndex::unit(space.p(i)), MultiIndex::unit(space.q(i)), one);
        b.add_term(MultiIndex::unit(space.q(i)), MultiIndex::unit(space.p(i)), -one);
    }
    return b;
}

}  // namespace startrace
