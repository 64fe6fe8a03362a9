#include "startrace/equiv.hpp"
#include "startrace/errors.hpp"

#include "../support/generators.hpp"

#include <gtest/gtest.h>

using namespace startrace;

namespace {

const PhaseSpace one(1), two(2);
Poly q(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.q(i)); }
Poly p(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.p(i)); }
Poly k(const Rational& c, PhaseSpace s = one) { return Poly(s, c); }
DiffOp dq(PhaseSpace s = one, int i = 0) { return DiffOp::partial(s, s.q(i)); }
DiffOp dp(PhaseSpace s = one, int i = 0) { return DiffOp::partial(s, s.p(i)); }
DiffOp mul(const Poly& a) { return DiffOp::multiplication(a); }
DiffOp id(PhaseSpace s = one) { return DiffOp::identity(s); }

void expect_same_star(const StarProduct& a, const StarProduct& b) {
    ASSERT_EQ(a.order(), b.order());
    for (int r = 0; r <= a.order(); ++r) EXPECT_EQ(a.cochain(r), b.cochain(r)) << "C_" << r;
}

const std::vector<RationalMatrix>& symplectic_matrices() {
    static const std::vector<RationalMatrix> ms{
        RationalMatrix{{Rational(3, 5), Rational(4, 5)}, {Rational(-4, 5), Rational(3, 5)}},
        RationalMatrix{{2, 0}, {0, Rational(1, 2)}},
        RationalMatrix{{1, 1}, {0, 1}},
        RationalMatrix{{3, 5}, {1, 2}},
    };
    return ms;
}

}  // namespace

TEST(Equivalence, InvertGeometric) {
    const Equivalence t(one, 3, {{1, dq()}});
    const Equivalence inv = equiv_invert(t);
    EXPECT_EQ(inv.term(1), -dq());
    EXPECT_EQ(inv.term(2), dq() * dq());
    EXPECT_EQ(inv.term(3), -(dq() * dq() * dq()));
    EXPECT_EQ(compose(t, inv), Equivalence::identity(one, 3));
    EXPECT_EQ(compose(inv, t), Equivalence::identity(one, 3));
}

TEST(Equivalence, ComposeOrder) {
    const Equivalence a(one, 2, {{1, mul(q())}}), b(one, 2, {{1, dq()}});
    // (1 + nu q)(1 + nu d) = 1 + nu (q + d) + nu^2 q d
    const Equivalence ab = compose(a, b);
    EXPECT_EQ(ab.term(1), mul(q()) + dq());
    EXPECT_EQ(ab.term(2), mul(q()) * dq());
    EXPECT_EQ(compose(b, a).term(2), dq() * mul(q()));
}

TEST(Equivalence, FromSeries) {
    EXPECT_EQ(Equivalence::from_series(Equivalence(one, 2, {{2, dp()}}).series()), Equivalence(one, 2, {{2, dp()}}));
    EXPECT_THROW(Equivalence::from_series(OpSeries(0, 2, {Rational(2) * id()})), PreconditionViolation);
}

TEST(Equivalence, Exponential) {
    const DiffOp l = mul(p()) * dq();
    const Equivalence e = Equivalence::exponential(l, 3);
    EXPECT_EQ(e.term(1), l);
    EXPECT_EQ(e.term(2), Rational(1, 2) * l * l);
    EXPECT_EQ(e.term(3), Rational(1, 6) * l * l * l);
    // exp(nu L) q = q + nu p
    const PolySeries got = e.apply(PolySeries::constant(q(), 3));
    EXPECT_EQ(got.coeff(0), q());
    EXPECT_EQ(got.coeff(1), p());
    EXPECT_TRUE(got.coeff(2).is_zero());
}

TEST(Equivalence, AdjointExamples) {
    EXPECT_EQ(equiv_adjoint(Equivalence(one, 2, {{1, dq()}})).term(1), -dq());
    EXPECT_EQ(equiv_adjoint(Equivalence(one, 2, {{1, mul(q()) * dq()}})).term(1), -id() - mul(q()) * dq());
}

TEST(Density, Examples) {
    const auto t1 = density_from_equivalence(Equivalence(one, 3, {{1, dq()}}));
    EXPECT_EQ(t1, TraceFunctional::moyal(one, 3));
    // (q d)' = -1 - q d, so rho = T'(1) = 1 - nu
    const auto t2 = density_from_equivalence(Equivalence(one, 3, {{1, mul(q()) * dq()}}));
    EXPECT_EQ(t2.density().coeff(0), k(1));
    EXPECT_EQ(t2.density().coeff(1), k(-1));
    EXPECT_TRUE(t2.density().coeff(2).is_zero());
    EXPECT_EQ(t2.prefactor(), -1);
}

TEST(Transport, FirstCochainFormula) {
    // T_1 = d_q d_p: C'_1(u, v) = {u, v}/2 - u_q v_p - u_p v_q
    const Equivalence t(one, 2, {{1, dq() * dp()}});
    const StarProduct s = transport_star(t, StarProduct::moyal(one, 2));
    gen::Random r(71);
    for (int trial = 0; trial < 20; ++trial) {
        const Poly u = r.poly(one, 4), v = r.poly(one, 4);
        const auto du = gen::to_dense(u), dv = gen::to_dense(v);
        const auto want = Rational(1, 2) * oracle::poisson(1, du, dv) - du.diff(0) * dv.diff(1) - du.diff(1) * dv.diff(0);
        EXPECT_EQ(gen::to_dense(s.cochain(1).apply(u, v)), want);
    }
}

TEST(Transport, FirstEulerCorrection) {
    // T^{-1} D T through nu^1: D'_1 = [xi, T_1] + T_1
    const DiffOp t1 = mul(q()) * dq() * dq() + dp();
    const Equivalence t(one, 3, {{1, t1}});
    const DiffOp xi = euler_vector_field(one);
    const EulerDerivation d = transport_euler(t, EulerDerivation::moyal(one));
    EXPECT_EQ(d.vector_field(), xi);
    EXPECT_EQ(d.correction(1), xi * t1 - t1 * xi + t1);
}

TEST(Transport, ExponentialOfShearIsAutomorphism) {
    const Equivalence e = Equivalence::exponential(mul(p()) * dq(), 4);
    expect_same_star(transport_star(e, StarProduct::moyal(one, 4)), StarProduct::moyal(one, 4));
    // but the Euler derivation moves: L is not homogeneous of degree 0 in nu
    EXPECT_FALSE(transport_euler(e, EulerDerivation::moyal(one)) == EulerDerivation::moyal(one));
}

TEST(Linear, SymplecticExamples) {
    for (const auto& m : symplectic_matrices()) EXPECT_TRUE(is_symplectic(one, m));
    EXPECT_FALSE(is_symplectic(one, RationalMatrix{{2, 0}, {0, 1}}));
    EXPECT_FALSE(is_symplectic(one, RationalMatrix{{0, 1}, {1, 0}}));
}

TEST(Linear, MoyalIsInvariant) {
    const StarProduct moyal = StarProduct::moyal(one, 3);
    for (const auto& m : symplectic_matrices()) {
        expect_same_star(pullback_star(moyal, m), moyal);
        EXPECT_EQ(pullback_trace(TraceFunctional::moyal(one, 3), m), TraceFunctional::moyal(one, 3));
        EXPECT_EQ(pullback_euler(EulerDerivation::moyal(one), m), EulerDerivation::moyal(one));
    }
    // a dilation of one axis rescales the bracket and the trace
    const RationalMatrix d{{2, 0}, {0, 1}};
    EXPECT_EQ(pullback_star(moyal, d).cochain(1), Rational(2) * moyal.cochain(1));
    EXPECT_EQ(pullback_trace(TraceFunctional::moyal(one, 3), d).density().coeff(0), k(Rational(1, 2)));
}

TEST(Linear, AutomorphismCheck) {
    const GaussFn u = GaussFn::gaussian(q() * p() + k(1), 1, {1, Rational(-1, 2)});
    for (const auto& m : symplectic_matrices()) EXPECT_LT(symplectic_automorphism_check(m, u, 50), BigFloat("1e-40"));
    EXPECT_THROW(symplectic_automorphism_check(RationalMatrix{{2, 0}, {0, 1}}, u, 50), PreconditionViolation);
}

TEST(Random, EquivalencePreservesConstants) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Equivalence t = random_equivalence(one, 4, seed);
        const PolySeries img = t.apply(PolySeries::constant(k(1), 4));
        EXPECT_EQ(img, PolySeries::constant(k(1), 4));
        EXPECT_EQ(t, random_equivalence(one, 4, seed));
        for (const auto& [j, op] : t.terms()) {
            EXPECT_GE(op.order(), 1);
            EXPECT_LE(op.order(), 2);
            EXPECT_LE(j, 3);
        }
    }
}

TEST(EquivProperty, InverseAndCompose) {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const PhaseSpace s(seed % 2 ? 1 : 2);
        const Equivalence a = random_equivalence(s, 3, seed), b = random_equivalence(s, 3, seed + 100);
        EXPECT_EQ(compose(a, equiv_invert(a)), Equivalence::identity(s, 3));
        EXPECT_EQ(equiv_invert(compose(a, b)), compose(equiv_invert(b), equiv_invert(a)));
        EXPECT_EQ(equiv_adjoint(compose(a, b)), compose(equiv_adjoint(b), equiv_adjoint(a)));
    }
}

TEST(EquivProperty, AdjointDuality) {
    gen::Random r(72);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Equivalence t = random_equivalence(one, 3, seed);
        const Equivalence ta = equiv_adjoint(t);
        const GaussFn f = r.gauss(one, 2), g = r.gauss(one, 2);
        for (int j = 1; j <= 3; ++j) EXPECT_EQ(integrate_exact(t.term(j).apply(f) * g), integrate_exact(f * ta.term(j).apply(g)));
    }
}

TEST(EquivProperty, TransportedStructuresAreCompatible) {
    gen::Random r(73);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Equivalence t = random_equivalence(one, 3, seed);
        const StarProduct s = transport_star(t, StarProduct::moyal(one, 3));
        const TraceFunctional tau = pullback_trace(TraceFunctional::moyal(one, 3), t);
        const EulerDerivation d = transport_euler(t, EulerDerivation::moyal(one));
        const Poly a = r.poly(one, 3), b = r.poly(one, 3), c = r.poly(one, 3);
        EXPECT_TRUE(associativity_residual(s, a, b, c).is_zero());
        const GaussFn u = r.gauss(one, 2), v = r.gauss(one, 2);
        EXPECT_TRUE(trace_residual(tau, s, u, v).is_zero());
        EXPECT_TRUE(derivation_residual(s, d, PolySeries::constant(a, 3), PolySeries::constant(b, 3)).is_zero());
        EXPECT_TRUE(normalization_residual(tau, d, GaussSeries::constant(u, 3)).is_zero());
        // T intertwines: T(u *' v) = T u * T v
        const PolySeries ua = PolySeries::constant(a, 3), ub = PolySeries::constant(b, 3);
        EXPECT_EQ(t.apply(s.multiply(ua, ub)), StarProduct::moyal(one, 3).multiply(t.apply(ua), t.apply(ub)));
    }
}

TEST(EquivProperty, PullbackTraceMatchesDirectEvaluation) {
    gen::Random r(74);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Equivalence t = random_equivalence(one, 3, seed);
        const TraceFunctional tau(one, PolySeries(0, 3, {k(1), r.poly(one, 2)}), -1);
        const GaussSeries u = GaussSeries::constant(r.gauss(one, 2), 3);
        EXPECT_EQ(pullback_trace(tau, t).evaluate(u), tau.evaluate(t.apply(u)));
    }
}

TEST(EquivProperty, LinearPullbackMatchesSubstitution) {
    gen::Random r(75);
    const StarProduct moyal = StarProduct::moyal(one, 3);
    const std::vector<RationalMatrix> ms{RationalMatrix{{2, 0}, {0, 1}}, RationalMatrix{{1, 2}, {0, 3}}, RationalMatrix{{3, 5}, {1, 2}}};
    for (const auto& m : ms) {
        const StarProduct s = pullback_star(moyal, m);
        const RationalMatrix minv = m.inverse();
        for (int trial = 0; trial < 6; ++trial) {
            const Poly u = r.poly(one, 3), v = r.poly(one, 3);
            const std::vector<Rational> x{r.rational(), r.rational()};
            const PolySeries lhs = s.multiply(u, v);
            const PolySeries rhs = moyal.multiply(pullback_linear(u, m), pullback_linear(v, m));
            for (int j = 0; j <= 3; ++j) EXPECT_EQ(lhs.coeff(j).evaluate(x), rhs.coeff(j).evaluate(minv.apply(x)));
        }
    }
}
