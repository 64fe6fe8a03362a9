#include "startrace/trace.hpp"

#include "startrace/errors.hpp"

namespace startrace {

namespace {

void check_floor(const PhaseSpace& s, int degree, int order) {
    if (degree < -(s.n() + order))
        throw PreconditionViolation("Laurent degree " + std::to_string(degree) + " below the floor -(n+K)");
}

}  // namespace

TraceFunctional::TraceFunctional(PhaseSpace space, PolySeries density, int prefactor)
    : space_(space), density_(std::move(density)), prefactor_(prefactor) {
    check_same_space(space_, density_.leading().space());
    check_floor(space_, prefactor_ + density_.min_degree(), density_.order());
}

TraceFunctional TraceFunctional::moyal(PhaseSpace space, int order) {
    return TraceFunctional(space, PolySeries::constant(Poly(space, Rational(1)), order), -space.n());
}

bool TraceFunctional::is_standard() const {
    if (prefactor_ != -space_.n() || density_.min_degree() != 0) return false;
    const Poly& lead = density_.leading();
    return lead.is_constant() && lead.constant_term() == 1;
}

ValueSeries TraceFunctional::evaluate(const GaussSeries& u) const {
    check_same_space(space_, u.leading().space());
    const GaussSeries weighted = cauchy(density_, u, [](const Poly& p, const GaussFn& g) { return p * g; });
    ValueSeries out = integrate_exact(weighted).shifted(prefactor_);
    check_floor(space_, out.min_degree(), order());
    return out;
}

IntegralValue TraceFunctional::component(int s, const GaussFn& w) const {
    return integrate_exact(density_.coeff(s) * w);
}

ValueSeries trace_residual(const TraceFunctional& t, const StarProduct& s, const GaussFn& u, const GaussFn& v) {
    const int k = std::min(t.order(), s.order());
    const auto su = GaussSeries::constant(u, k);
    const auto sv = GaussSeries::constant(v, k);
    return t.evaluate(s.multiply(su, sv)) - t.evaluate(s.multiply(sv, su));
}

IntegralValue trk_residual(const TraceFunctional& t, const StarProduct& s, int k, const GaussFn& u, const GaussFn& v) {
    if (k < 0 || k > std::min(t.order(), s.order()) - 1)
        throw PreconditionViolation("trace condition order " + std::to_string(k) + " out of range");
    IntegralValue total;
    for (int j = 0; j <= k; ++j) total += t.component(k - j, s.antisymmetric_cochain(j + 1).apply(u, v));
    return total;
}

TraceFunctional standardize(const TraceFunctional& t) {
    const PolySeries& rho = t.density();
    if (rho.is_zero()) throw PreconditionViolation("cannot standardize the zero trace");
    const Poly& lead = rho.leading();
    if (!lead.is_constant())
        throw PreconditionViolation("leading density coefficient is not constant: " + lead.to_string());
    const Rational a_inv = Rational(1) / lead.constant_term();
    PolySeries scaled = rho.map([&](const Poly& p) { return a_inv * p; }).shifted(-rho.min_degree());
    return TraceFunctional(t.space(), std::move(scaled), -t.space().n());
}

RationalSeries proportionality_factor(const TraceFunctional& t1, const TraceFunctional& t2,
                                      const std::vector<GaussFn>& probes) {
    if (probes.empty()) throw PreconditionViolation("proportionality needs at least one probe");
    std::vector<ValueSeries> a, b;
    for (const auto& f : probes) {
        a.push_back(t1.evaluate(f));
        b.push_back(t2.evaluate(f));
    }
    std::size_t pivot = probes.size();
    for (std::size_t i = 0; i < probes.size(); ++i)
        if (!a[i].is_zero() && a[i].leading().is_single_term()) {
            pivot = i;
            break;
        }
    if (pivot == probes.size()) throw NonInvertible("no probe has an invertible leading trace value");

    const ValueSeries& A = a[pivot];
    const ValueSeries& B = b[pivot];
    if (B.is_zero()) return RationalSeries::zero(Rational(0), B.order() - A.min_degree());

    // B_{m2+j} = sum_{i<=j} c_i A_{m1+j-i}
    const int m1 = A.min_degree();
    const int m2 = B.min_degree();
    const int shift = m2 - m1;
    const int steps = std::min(B.order() - m2, A.order() - m1);
    const IntegralValue lead_inv = A.leading().inverse();
    std::vector<Rational> c;
    for (int j = 0; j <= steps; ++j) {
        IntegralValue acc = B.coeff(m2 + j);
        for (int i = 0; i < j; ++i) acc = acc - c[static_cast<std::size_t>(i)] * A.coeff(m1 + j - i);
        const auto r = (acc * lead_inv).as_rational();
        if (!r) throw InconsistentRatio("order " + std::to_string(j) + " ratio is not a rational number");
        c.push_back(*r);
    }
    RationalSeries factor(shift, shift + steps, c);

    for (std::size_t p = 0; p < probes.size(); ++p) {
        const ValueSeries& ap = a[p];
        const ValueSeries& bp = b[p];
        // Degrees of B where c * A is fully determined.
        const int lo = std::min(bp.min_degree(), ap.min_degree() + shift);
        const int hi = std::min({bp.order(), ap.order() + shift, ap.min_degree() + shift + steps});
        for (int d = lo; d <= hi; ++d) {
            IntegralValue predicted;
            for (int i = 0; i <= steps; ++i) {
                const int k = d - shift - i;
                if (k < ap.min_degree()) break;
                predicted += c[static_cast<std::size_t>(i)] * ap.coeff(k);
            }
            if (!((predicted - bp.coeff(d)).is_zero()))
                throw InconsistentRatio("probe " + std::to_string(p) + " disagrees at nu^" + std::to_string(d));
        }
    }
    return factor;
}

ValueSeries normalization_residual(const TraceFunctional& t, const EulerDerivation& d, const GaussSeries& u) {
    return t.evaluate(d.apply(u)) - t.evaluate(u).nu_derivative();
}

std::vector<GaussFn> default_probes(PhaseSpace s) {
    const int q1 = s.q(0), p1 = s.p(0), qn = s.q(s.n() - 1), pn = s.p(s.n() - 1);
    auto var = [&](int v) { return Poly::variable(s, v); };
    const Poly one(s, Rational(1));
    auto shift = [&](std::initializer_list<std::pair<int, Rational>> entries) {
        std::vector<Rational> b(static_cast<std::size_t>(s.dimension()), Rational(0));
        for (const auto& [v, x] : entries) b[static_cast<std::size_t>(v)] = x;
        return b;
    };
    std::vector<GaussFn> probes;
    probes.push_back(GaussFn::standard(s));
    probes.push_back(GaussFn::gaussian(var(q1) * var(q1), Rational(1)));
    probes.push_back(GaussFn::gaussian(one, Rational(2)));
    probes.push_back(GaussFn::gaussian(one + var(p1), Rational(1), shift({{q1, Rational(1)}})));
    probes.push_back(GaussFn::gaussian((var(qn) + one) * var(pn), Rational(3, 2), shift({{pn, Rational(1, 2)}})));
    probes.push_back(GaussFn::gaussian(var(q1) * var(q1) + var(pn) * var(pn), Rational(1, 3)));
    probes.push_back(GaussFn::gaussian(var(p1).pow(4), Rational(1), {}, Rational(1, 2)));
    probes.push_back(GaussFn::gaussian(one + var(q1) * var(pn) + var(qn) * var(qn), Rational(2),
                                       shift({{q1, Rational(1)}, {pn, Rational(-1)}})));
    return probes;
}

}  // namespace startrace
