#include "startrace/equiv.hpp"

#include "startrace/errors.hpp"

#include <random>

namespace startrace {

Equivalence::Equivalence(PhaseSpace space, int order, std::map<int, DiffOp> terms)
    : space_(space), order_(order), terms_(std::move(terms)) {
    if (order_ < 1) throw PreconditionViolation("equivalence order must be >= 1");
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->first < 1) throw PreconditionViolation("equivalence terms start at nu^1");
        check_same_space(space_, it->second.space());
        it = (it->second.is_zero() || it->first > order_) ? terms_.erase(it) : std::next(it);
    }
}

Equivalence Equivalence::exponential(const DiffOp& l, int order) {
    std::map<int, DiffOp> terms;
    DiffOp power = DiffOp::identity(l.space());
    for (int k = 1; k <= order; ++k) {
        power = l * power;
        terms.emplace(k, (Rational(1) / factorial(static_cast<unsigned>(k))) * power);
    }
    return Equivalence(l.space(), order, std::move(terms));
}

Equivalence Equivalence::from_series(const OpSeries& s) {
    const PhaseSpace& space = s.leading().space();
    if (s.min_degree() != 0 || !(s.coeff(0) == DiffOp::identity(space)))
        throw PreconditionViolation("equivalence series must start with the identity");
    std::map<int, DiffOp> terms;
    for (int k = 1; k <= s.order(); ++k) terms.emplace(k, s.coeff(k));
    return Equivalence(space, s.order(), std::move(terms));
}

DiffOp Equivalence::term(int k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? DiffOp(space_) : it->second;
}

OpSeries Equivalence::series() const {
    std::vector<DiffOp> coeffs{DiffOp::identity(space_)};
    for (int k = 1; k <= order_; ++k) coeffs.push_back(term(k));
    return OpSeries(0, order_, std::move(coeffs));
}

Equivalence equiv_invert(const Equivalence& t) { return Equivalence::from_series(t.series().inverse()); }

Equivalence compose(const Equivalence& a, const Equivalence& b) {
    check_same_space(a.space(), b.space());
    return Equivalence::from_series(a.series() * b.series());
}

Equivalence equiv_adjoint(const Equivalence& t) {
    std::map<int, DiffOp> terms;
    for (const auto& [k, op] : t.terms()) terms.emplace(k, adjoint(op));
    return Equivalence(t.space(), t.order(), std::move(terms));
}

StarProduct transport_star(const Equivalence& t, const StarProduct& s) {
    check_same_space(t.space(), s.space());
    const int order = std::min(t.order(), s.order());
    const OpSeries fwd = t.series();
    const OpSeries inv = t.series().inverse();
    // M_m(u, v) = sum_{b+c+d=m} C_b(T_c u, T_d v); C'_r = sum_{a+m=r} Tinv_a o M_m.
    std::vector<BiDiffOp> mid;
    for (int m = 0; m <= order; ++m) {
        BiDiffOp acc(s.space());
        for (int b = 0; b <= m; ++b)
            for (int c = 0; b + c <= m; ++c) {
                const DiffOp tc = fwd.coeff(c);
                const DiffOp td = fwd.coeff(m - b - c);
                if (tc.is_zero() || td.is_zero()) continue;
                acc += compose_inputs(s.cochain(b), tc, td);
            }
        mid.push_back(std::move(acc));
    }
    std::vector<BiDiffOp> cochains;
    for (int r = 1; r <= order; ++r) {
        BiDiffOp acc(s.space());
        for (int a = 0; a <= r; ++a) {
            const DiffOp ia = inv.coeff(a);
            if (ia.is_zero() || mid[static_cast<std::size_t>(r - a)].is_zero()) continue;
            acc += compose_output(ia, mid[static_cast<std::size_t>(r - a)]);
        }
        cochains.push_back(std::move(acc));
    }
    return StarProduct(s.space(), std::move(cochains));
}

TraceFunctional pullback_trace(const TraceFunctional& tau, const Equivalence& t) {
    check_same_space(tau.space(), t.space());
    const OpSeries adj = equiv_adjoint(t).series();
    const PolySeries rho = cauchy(adj, tau.density(), [](const DiffOp& op, const Poly& f) { return op.apply(f); });
    return TraceFunctional(tau.space(), rho, tau.prefactor());
}

TraceFunctional density_from_equivalence(const Equivalence& t) {
    return pullback_trace(TraceFunctional::moyal(t.space(), t.order()), t);
}

StarProduct pullback_star(const StarProduct& s, const RationalMatrix& m) {
    std::vector<BiDiffOp> cochains;
    for (int r = 1; r <= s.order(); ++r) cochains.push_back(conjugate_by_linear(s.cochain(r), m));
    return StarProduct(s.space(), std::move(cochains));
}

EulerDerivation pullback_euler(const EulerDerivation& d, const RationalMatrix& m) {
    std::map<int, DiffOp> corrections;
    for (const auto& [r, op] : d.corrections()) corrections.emplace(r, conjugate_by_linear(op, m));
    return EulerDerivation(conjugate_by_linear(d.vector_field(), m), std::move(corrections), d.has_nu_scaling());
}

TraceFunctional pullback_trace(const TraceFunctional& tau, const RationalMatrix& m) {
    // integral u(m x) rho(x) dx = |det m|^{-1} integral u(y) rho(m^{-1} y) dy
    const Rational det = abs(m.determinant());
    if (det == 0) throw PreconditionViolation("singular matrix");
    const RationalMatrix minv = m.inverse();
    const PolySeries rho = tau.density().map([&](const Poly& p) { return (Rational(1) / det) * pullback_linear(p, minv); });
    return TraceFunctional(tau.space(), rho, tau.prefactor());
}

EulerDerivation transport_euler(const Equivalence& t, const EulerDerivation& d) {
    check_same_space(t.space(), d.space());
    const int order = t.order();
    const OpSeries fwd = t.series();
    const OpSeries inv = fwd.inverse();
    // T^{-1}(nu d/dnu + A) T = nu d/dnu + T^{-1}(N(T) + A T), N(T) = sum k nu^k T_k.
    OpSeries inner = d.operator_series(order) * fwd;
    if (d.has_nu_scaling()) inner += fwd.nu_derivative();
    const OpSeries result = inv * inner;
    if (!(result.coeff(0) == d.vector_field()))
        throw PreconditionViolation("transported derivation changed its vector field");
    std::map<int, DiffOp> corrections;
    for (int r = 1; r <= result.order(); ++r) corrections.emplace(r, result.coeff(r));
    return EulerDerivation(d.vector_field(), std::move(corrections), d.has_nu_scaling());
}

bool is_symplectic(const PhaseSpace& space, const RationalMatrix& m) {
    const RationalMatrix j = space.structure_matrix();
    if (m.rows() != j.rows() || m.cols() != j.cols()) return false;
    return m.transpose() * j * m == j;
}

BigFloat symplectic_automorphism_check(const RationalMatrix& m, const GaussFn& u, unsigned digits10) {
    if (!is_symplectic(u.space(), m)) throw PreconditionViolation("matrix is not symplectic");
    PrecisionScope scope(digits10);
    const GeneralGaussFn pulled = pullback_linear(u, m);
    const IntegralValue base = integrate_exact(u);
    if (auto iso = pulled.to_isotropic()) {
        const IntegralValue diff = integrate_exact(*iso) - base;
        if (diff.is_zero()) return BigFloat(0);
        return abs(diff.to_bigfloat(digits10));
    }
    const BigFloat diff = integrate_bigfloat(pulled, digits10) - base.to_bigfloat(digits10);
    return abs(diff);
}

Equivalence random_equivalence(PhaseSpace space, int order, std::uint64_t seed, int max_k) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto random_coefficient = [&] {
        Rational c;
        do c = Rational(pick(-3, 3), pick(1, 2));
        while (c == 0);
        return c;
    };
    auto random_index = [&](int lo, int hi) {
        MultiIndex a;
        const int total = pick(lo, hi);
        for (int i = 0; i < total; ++i) a.increment(pick(0, space.dimension() - 1));
        return a;
    };
    std::map<int, DiffOp> terms;
    for (int k = 1; k <= std::min(order, max_k); ++k) {
        DiffOp op(space);
        const int count = pick(1, 3);
        for (int i = 0; i < count; ++i) {
            Poly coeff(space);
            const int monomials = pick(1, 2);
            for (int j = 0; j < monomials; ++j) coeff.add_term(random_index(0, 2), random_coefficient());
            op.add_term(random_index(1, 2), coeff);
        }
        terms.emplace(k, std::move(op));
    }
    return Equivalence(space, order, std::move(terms));
}

}  // namespace startrace
