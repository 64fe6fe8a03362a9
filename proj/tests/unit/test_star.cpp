#include "startrace/star.hpp"

#include "../support/generators.hpp"

#include <gtest/gtest.h>

using namespace startrace;

namespace {

const PhaseSpace one(1), two(2);
Poly q(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.q(i)); }
Poly p(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.p(i)); }
Poly k(const Rational& c, PhaseSpace s = one) { return Poly(s, c); }

PolySeries lift(const Poly& u, int order) { return PolySeries::constant(u, order); }

}  // namespace

TEST(Moyal, CanonicalPair) {
    const StarProduct s = StarProduct::moyal(one, 3);
    const PolySeries qp = s.multiply(q(), p());
    EXPECT_EQ(qp.coeff(0), q() * p());
    EXPECT_EQ(qp.coeff(1), k(Rational(-1, 2)));
    EXPECT_TRUE(qp.coeff(2).is_zero());
    EXPECT_EQ(s.commutator(q(), p()), PolySeries::monomial(k(-1), 1, 3));
}

TEST(Moyal, SquaresExample) {
    const StarProduct s = StarProduct::moyal(one, 3);
    const PolySeries got = s.multiply(p().pow(2), q().pow(2));
    EXPECT_EQ(got.coeff(0), p().pow(2) * q().pow(2));
    EXPECT_EQ(got.coeff(1), Rational(2) * p() * q());
    EXPECT_EQ(got.coeff(2), k(Rational(1, 2)));
    EXPECT_TRUE(got.coeff(3).is_zero());
}

TEST(Moyal, FirstCochainIsHalfPoisson) {
    const StarProduct s = StarProduct::moyal(two, 2);
    EXPECT_EQ(s.cochain(1), Rational(1, 2) * poisson_cochain(two));
    EXPECT_EQ(s.antisymmetric_cochain(1), poisson_cochain(two));
    EXPECT_EQ(s.cochain(0), BiDiffOp::product(two));
    EXPECT_EQ(s.order(), 2);
}

TEST(Moyal, TruncationWindow) {
    const StarProduct s = StarProduct::moyal(one, 2);
    // inputs known through nu^1 cap the product at nu^1
    const PolySeries u(0, 1, {q(), p()});
    EXPECT_EQ(s.multiply(u, u).order(), 1);
    // a nu^-1 valuation lowers the cochain reach to lo + order
    const PolySeries w(-1, 4, {q()});
    EXPECT_EQ(s.multiply(w, w).order(), 0);
}

TEST(Euler, MoyalDerivation) {
    const EulerDerivation d = EulerDerivation::moyal(one);
    EXPECT_TRUE(d.has_nu_scaling());
    EXPECT_EQ(d.vector_field(), euler_vector_field(one));
    // D(q) = q/2, D(nu) = nu
    EXPECT_EQ(d.apply(lift(q(), 2)), lift(Rational(1, 2) * q(), 2));
    EXPECT_EQ(d.apply(PolySeries::monomial(k(1), 1, 2)), PolySeries::monomial(k(1), 1, 2));
}

TEST(Euler, HomogeneityExamples) {
    const GaussFn u = GaussFn::standard(one);
    EXPECT_TRUE(homogeneity_residual(euler_vector_field(one), u).is_zero());
    const DiffOp qdq = DiffOp::multiplication(q()) * DiffOp::partial(one, one.q(0));
    EXPECT_TRUE(homogeneity_residual(qdq, u).is_zero());
    EXPECT_EQ(homogeneity_residual(Rational(2) * qdq, u), -integrate_exact(u));
}

TEST(Euler, PlusInnerKeepsDerivation) {
    const StarProduct s = StarProduct::moyal(one, 4);
    const EulerDerivation d = EulerDerivation::moyal(one).plus_inner(s, q().pow(3) + q() * p());
    gen::Random r(51);
    for (int trial = 0; trial < 10; ++trial) {
        const PolySeries u = lift(r.poly(one, 3), 3), v = lift(r.poly(one, 3), 3);
        EXPECT_TRUE(derivation_residual(s, d, u, v).is_zero());
    }
    // ad of a quadratic is a vector field: no nu^2 correction
    const EulerDerivation e = EulerDerivation::moyal(one).plus_inner(s, q() * p());
    EXPECT_TRUE(e.correction(1).is_zero());
}

TEST(StarProperty, MoyalCochainsMatchBruteForce) {
    gen::Random r(52);
    for (int trial = 0; trial < 30; ++trial) {
        const PhaseSpace sp(r.integer(1, 2));
        const int kmax = sp.n() == 1 ? 4 : 2;
        const StarProduct s = StarProduct::moyal(sp, kmax);
        const Poly u = r.poly(sp, 4, 3), v = r.poly(sp, 4, 3);
        const auto want = oracle::moyal_product(sp.n(), kmax, gen::to_dense(u), gen::to_dense(v));
        const PolySeries got = s.multiply(u, v);
        for (int j = 0; j <= kmax; ++j) EXPECT_EQ(gen::to_dense(got.coeff(j)), want[static_cast<std::size_t>(j)]) << j;
    }
}

TEST(StarProperty, Associative) {
    gen::Random r(53);
    for (int trial = 0; trial < 30; ++trial) {
        const PhaseSpace sp(r.integer(1, 2));
        const StarProduct s = StarProduct::moyal(sp, sp.n() == 1 ? 5 : 3);
        const Poly u = r.poly(sp, 3), v = r.poly(sp, 3), w = r.poly(sp, 3);
        EXPECT_TRUE(associativity_residual(s, u, v, w).is_zero());
    }
}

TEST(StarProperty, NuZeroLimitAndBracket) {
    gen::Random r(54);
    const StarProduct s = StarProduct::moyal(one, 3);
    for (int trial = 0; trial < 30; ++trial) {
        const Poly u = r.poly(one, 4), v = r.poly(one, 4);
        const PolySeries c = s.commutator(u, v);
        EXPECT_TRUE(c.coeff(0).is_zero());
        EXPECT_EQ(gen::to_dense(c.coeff(1)), oracle::poisson(1, gen::to_dense(u), gen::to_dense(v)));
        // Moyal is parity-symmetric: even cochains are symmetric
        EXPECT_TRUE(c.coeff(2).is_zero());
        EXPECT_EQ(s.multiply(u, Poly(one, 1)), lift(u, 3));
    }
}

TEST(StarProperty, ClosedAgainstQuadrature) {
    gen::Random r(55);
    const StarProduct s = StarProduct::moyal(one, 3);
    for (int trial = 0; trial < 6; ++trial) {
        const GaussFn u = r.gauss(one, 2), v = r.gauss(one, 2);
        for (int j = 1; j <= 3; ++j) {
            EXPECT_TRUE(closedness_integral(s, j, u, v).is_zero());
            const GaussFn c = s.antisymmetric_cochain(j).apply(u, v);
            const long double num =
                oracle::quadrature(2, [&](const std::vector<long double>& x) { return gen::eval_gauss(c, x); }, 16.0L, 161);
            EXPECT_NEAR(num, 0.0L, 1e-9L);
        }
    }
}

TEST(StarProperty, ClosedInFourDimensions) {
    gen::Random r(56);
    const StarProduct s = StarProduct::moyal(two, 3);
    for (int trial = 0; trial < 6; ++trial) {
        const GaussFn u = r.gauss(two, 2), v = r.gauss(two, 2);
        for (int j = 1; j <= 3; ++j) EXPECT_TRUE(closedness_integral(s, j, u, v).is_zero());
    }
}

TEST(StarProperty, NotClosedWithoutSymmetry) {
    // C_1 = {.,.}/2 + q d(x)1: the antisymmetric extra term integrates to -q uv, nonzero off-centre
    BiDiffOp c1 = Rational(1, 2) * poisson_cochain(one);
    c1.add_term(MultiIndex::unit(one.q(0)), MultiIndex{}, q());
    const StarProduct s(one, {c1});
    EXPECT_FALSE(closedness_integral(s, 1, GaussFn::standard(one), GaussFn::gaussian(k(1), 1, {1, 0})).is_zero());
}

TEST(StarProperty, EulerIsDerivation) {
    gen::Random r(57);
    for (int trial = 0; trial < 20; ++trial) {
        const PhaseSpace sp(r.integer(1, 2));
        const StarProduct s = StarProduct::moyal(sp, 4);
        const EulerDerivation d = EulerDerivation::moyal(sp);
        const PolySeries u(0, 4, {r.poly(sp, 3), r.poly(sp, 2)}), v(0, 4, {r.poly(sp, 3), Poly(sp), r.poly(sp, 2)});
        EXPECT_TRUE(derivation_residual(s, d, u, v).is_zero());
    }
}

TEST(StarProperty, HomogeneityOfEuler) {
    gen::Random r(58);
    for (int trial = 0; trial < 30; ++trial) {
        const PhaseSpace sp(r.integer(1, 2));
        EXPECT_TRUE(homogeneity_residual(euler_vector_field(sp), r.gauss(sp, 3)).is_zero());
    }
}
