#include "startrace/errors.hpp"
#include "startrace/poly.hpp"

#include "../support/generators.hpp"

#include <gtest/gtest.h>

using namespace startrace;

namespace {

const PhaseSpace one(1), two(2);
Poly q(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.q(i)); }
Poly p(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.p(i)); }

}  // namespace

TEST(Poly, Arithmetic) {
    EXPECT_EQ(q() * p() * q(), q().pow(2) * p());
    const Poly a = q() * p() + Poly(one, 3);
    EXPECT_TRUE((a + Rational(-1) * a).is_zero());
    EXPECT_EQ((q() + p()).pow(2), q().pow(2) + Rational(2) * q() * p() + p().pow(2));
}

TEST(Poly, Derivatives) {
    EXPECT_EQ((q().pow(2) * p()).diff(one.q(0)), Rational(2) * q() * p());
    EXPECT_TRUE(q().pow(2).diff(one.p(0)).is_zero());
    EXPECT_EQ((q(two, 0) * q(two, 1)).diff(two.q(1)), q(two, 0));
}

TEST(Poly, MixedSpacesThrow) {
    EXPECT_THROW(q(one) + q(two), DimensionMismatch);
}

TEST(Poly, CanonicalText) {
    EXPECT_EQ((q().pow(2) * p() + Poly(one, Rational(1, 2))).to_string(), "q1^2*p1 + 1/2");
    EXPECT_EQ(Poly(one).to_string(), "0");
}

TEST(Poisson, ConventionIdentity) {
    // dv/dp = {v, q} for v = q p^2
    const Poly v = q() * p().pow(2);
    EXPECT_EQ(poisson_bracket(v, q()), Rational(2) * q() * p());
    EXPECT_EQ(poisson_bracket(v, q()), v.diff(one.p(0)));
    EXPECT_EQ(poisson_bracket(q(), p()), Poly(one, -1));
}

TEST(Poisson, SelfBracketVanishes) {
    const Poly f = q().pow(3) + q() * p();
    EXPECT_TRUE(poisson_bracket(f, f).is_zero());
}

TEST(Poisson, AgainstOracle) {
    const Poly got = poisson_bracket(p().pow(2), q().pow(2));
    EXPECT_EQ(got, Rational(4) * q() * p());
    EXPECT_EQ(gen::to_dense(got), oracle::poisson(1, gen::to_dense(p().pow(2)), gen::to_dense(q().pow(2))));
}

TEST(Pullback, Examples) {
    const Poly f = q() * p();
    EXPECT_EQ(pullback_linear(f, RationalMatrix::identity(2)), f);
    // (q, p) -> (p, -q)
    EXPECT_EQ(pullback_linear(f, RationalMatrix{{0, 1}, {-1, 0}}), -f);
    EXPECT_EQ(pullback_linear(f, RationalMatrix{{2, 0}, {0, Rational(1, 2)}}), f);
    EXPECT_THROW(pullback_linear(f, RationalMatrix{{1, 1}, {1, 1}}), PreconditionViolation);
}

TEST(PolyProperty, JacobiAndLeibniz) {
    gen::Random r(21);
    for (int trial = 0; trial < 60; ++trial) {
        const PhaseSpace s(r.integer(1, 2));
        const Poly f = r.poly(s, 4), g = r.poly(s, 4), h = r.poly(s, 4);
        const Poly jacobi = poisson_bracket(f, poisson_bracket(g, h)) + poisson_bracket(g, poisson_bracket(h, f)) +
                            poisson_bracket(h, poisson_bracket(f, g));
        EXPECT_TRUE(jacobi.is_zero());
        EXPECT_EQ(poisson_bracket(f, g * h), poisson_bracket(f, g) * h + g * poisson_bracket(f, h));
        EXPECT_EQ(poisson_bracket(f, g), -poisson_bracket(g, f));
        EXPECT_EQ(gen::to_dense(poisson_bracket(f, g)), oracle::poisson(s.n(), gen::to_dense(f), gen::to_dense(g)));
    }
}

TEST(PolyProperty, RingMatchesOracle) {
    gen::Random r(22);
    for (int trial = 0; trial < 100; ++trial) {
        const PhaseSpace s(r.integer(1, 2));
        const Poly f = r.poly(s, 4), g = r.poly(s, 4);
        EXPECT_EQ(gen::to_dense(f * g), gen::to_dense(f) * gen::to_dense(g));
        EXPECT_EQ(gen::to_dense(f - g), gen::to_dense(f) - gen::to_dense(g));
        const int v = r.integer(0, s.dimension() - 1);
        EXPECT_EQ(gen::to_dense(f.diff(v)), gen::to_dense(f).diff(v));
    }
}

TEST(PolyProperty, SymplecticPullbackCommutesWithBracket) {
    gen::Random r(23);
    const std::vector<RationalMatrix> ms{
        RationalMatrix{{1, 1}, {0, 1}},
        RationalMatrix{{2, 1}, {1, 1}},
        RationalMatrix{{Rational(3, 5), Rational(4, 5)}, {Rational(-4, 5), Rational(3, 5)}},
        RationalMatrix{{1, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}},
        RationalMatrix{{1, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, -1, 1}},
    };
    for (const auto& m : ms) {
        const PhaseSpace s(static_cast<int>(m.rows()) / 2);
        ASSERT_EQ(m.transpose() * s.structure_matrix() * m, s.structure_matrix());
        for (int trial = 0; trial < 20; ++trial) {
            const Poly f = r.poly(s, 3), g = r.poly(s, 3);
            EXPECT_EQ(poisson_bracket(pullback_linear(f, m), pullback_linear(g, m)), pullback_linear(poisson_bracket(f, g), m));
        }
    }
}

TEST(PolyProperty, PullbackIsSubstitution) {
    gen::Random r(24);
    const RationalMatrix m{{2, 1}, {1, 1}};
    for (int trial = 0; trial < 30; ++trial) {
        const Poly f = r.poly(one, 4);
        const std::vector<Rational> x{r.rational(), r.rational()};
        EXPECT_EQ(pullback_linear(f, m).evaluate(x), f.evaluate(m.apply(x)));
    }
}
