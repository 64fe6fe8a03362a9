#include "startrace/errors.hpp"
#include "startrace/gaussfn.hpp"

#include "../support/generators.hpp"

#include <gtest/gtest.h>

using namespace startrace;

namespace {

const PhaseSpace one(1), two(2);
Poly q(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.q(i)); }
Poly p(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.p(i)); }
Poly c1(PhaseSpace s = one) { return Poly(s, Rational(1)); }

MultiIndex mi(int a, int b) {
    MultiIndex m;
    m.set(0, a);
    m.set(1, b);
    return m;
}

long double as_ld(const IntegralValue& v) { return v.to_bigfloat(30).convert_to<long double>(); }

// t = 1/2 with a shifted centre still carries ~1e-11 of mass past |x| = 12.
long double quad(const GaussFn& f) {
    return oracle::quadrature(
        f.space().dimension(), [&](const std::vector<long double>& x) { return gen::eval_gauss(f, x); }, 18.0L, 361);
}

}  // namespace

TEST(Integral, Examples) {
    const IntegralValue two_pi = IntegralValue::term(2, 0, 1);
    EXPECT_EQ(integrate_exact(GaussFn::standard(one)), two_pi);
    EXPECT_EQ(integrate_exact(GaussFn::gaussian(q().pow(2), 1)), two_pi);
    EXPECT_TRUE(integrate_exact(GaussFn::gaussian(q(), 1)).is_zero());
    // (2 pi)^2 in four dimensions
    EXPECT_EQ(integrate_exact(GaussFn::standard(two)), IntegralValue::term(4, 0, 2));
    // exp(-|x|^2/2 + q) -> 2 pi e^{1/2}
    EXPECT_EQ(integrate_exact(GaussFn::gaussian(c1(), 1, {1, 0})), IntegralValue::term(2, Rational(1, 2), 1));
}

TEST(Integral, MatchesQuadrature) {
    const GaussFn f = GaussFn::gaussian(q().pow(2) * p() + p(), Rational(3, 2), {Rational(1, 2), -1}, Rational(-1, 2));
    EXPECT_NEAR(as_ld(integrate_exact(f)), quad(f), 1e-12);
}

TEST(Integral, PolynomialThrows) {
    EXPECT_THROW(integrate_exact(GaussFn(q())), NotIntegrable);
    EXPECT_FALSE(GaussFn(q()).is_integrable());
    EXPECT_TRUE(GaussFn(one).is_integrable());
}

TEST(Integral, BigfloatExamples) {
    PrecisionScope scope(40);
    const BigFloat pi = acos(BigFloat(-1));
    const BigFloat tol("1e-35");
    EXPECT_LT(abs(integrate_bigfloat(GaussFn::standard(one), 40) - 2 * pi), tol);
    // exp(-q^2 - p^2/4) has S = diag(2, 1/2), det 1: integral 2 pi
    GeneralGaussFn g(one);
    g.add_term({c1(), RationalMatrix{{2, 0}, {0, Rational(1, 2)}}, {0, 0}, 0});
    EXPECT_LT(abs(integrate_bigfloat(g, 40) - 2 * pi), tol);
    const BigFloat shifted = integrate_bigfloat(GaussFn::gaussian(c1(), 1, {1, 0}), 40);
    EXPECT_LT(abs(shifted - 2 * pi * exp(BigFloat("0.5"))), tol);
}

TEST(Integral, BigfloatRejectsIndefinite) {
    GeneralGaussFn g(one);
    g.add_term({c1(), RationalMatrix{{1, 0}, {0, -1}}, {0, 0}, 0});
    EXPECT_THROW(integrate_bigfloat(g, 30), PreconditionViolation);
}

TEST(Integral, GaussianMoments) {
    EXPECT_EQ(gaussian_moment(RationalMatrix{{2, 0}, {0, 3}}, mi(2, 2)), 6);
    const RationalMatrix c{{1, Rational(1, 2)}, {Rational(1, 2), 1}};
    EXPECT_EQ(gaussian_moment(c, mi(1, 1)), Rational(1, 2));
    // E[x^2 y^2] = c11 c22 + 2 c12^2
    EXPECT_EQ(gaussian_moment(c, mi(2, 2)), Rational(3, 2));
    EXPECT_EQ(gaussian_moment(c, mi(1, 2)), 0);
    EXPECT_EQ(gaussian_moment(c, mi(4, 0)), 3);
}

TEST(IntegralValue, Arithmetic) {
    const auto a = IntegralValue::term(2, 0, 1), b = IntegralValue::term(3, Rational(1, 2), 1);
    EXPECT_EQ((a + b) - b, a);
    EXPECT_THROW(a + IntegralValue::from_rational(1), DimensionMismatch);
    EXPECT_EQ(a * a, IntegralValue::term(4, 0, 2));
    EXPECT_EQ(a.inverse() * a, IntegralValue::from_rational(1));
    EXPECT_THROW((a + b).inverse(), NonInvertible);
    EXPECT_EQ(IntegralValue::from_rational(Rational(5, 3)).as_rational(), Rational(5, 3));
    EXPECT_FALSE(a.as_rational().has_value());
}

TEST(GaussFn, Derivative) {
    // d/dq e^{-|x|^2/2} = -q e^{-|x|^2/2}
    EXPECT_EQ(GaussFn::standard(one).diff(one.q(0)), GaussFn::gaussian(-q(), 1));
    EXPECT_EQ(GaussFn(q().pow(3)).diff(one.q(0)), GaussFn(Rational(3) * q().pow(2)));
}

TEST(GaussFn, ProductCombinesExponents) {
    const GaussFn f = GaussFn::gaussian(q(), 1, {1, 0}) * GaussFn::gaussian(p(), Rational(1, 2), {0, 1}, 1);
    EXPECT_EQ(f, GaussFn::gaussian(q() * p(), Rational(3, 2), {1, 1}, 1));
}

TEST(Pullback, Examples) {
    // a rotation keeps the exponent isotropic
    const RationalMatrix rot{{Rational(3, 5), Rational(-4, 5)}, {Rational(4, 5), Rational(3, 5)}};
    const auto iso = pullback_linear(GaussFn::standard(one), rot).to_isotropic();
    ASSERT_TRUE(iso.has_value());
    EXPECT_EQ(*iso, GaussFn::standard(one));
    EXPECT_FALSE(pullback_linear(GaussFn::standard(one), RationalMatrix{{2, 0}, {0, 1}}).to_isotropic().has_value());
    EXPECT_THROW(pullback_linear(GaussFn::standard(one), RationalMatrix{{1, 2}, {2, 4}}), PreconditionViolation);
}

TEST(GaussFnProperty, ExactMatchesQuadrature) {
    gen::Random r(31);
    for (int trial = 0; trial < 12; ++trial) {
        const GaussFn f = r.gauss(one, 3) + r.gauss(one, 2);
        const long double want = quad(f);
        EXPECT_NEAR(as_ld(integrate_exact(f)), want, 1e-11L * (1 + std::fabs(want))) << f.to_string();
    }
}

TEST(GaussFnProperty, ExactMatchesBigfloat) {
    gen::Random r(32);
    for (int trial = 0; trial < 40; ++trial) {
        const PhaseSpace s(r.integer(1, 2));
        const GaussFn f = r.gauss(s, 3) + r.gauss(s, 2);
        PrecisionScope scope(50);
        const BigFloat exact = integrate_exact(f).to_bigfloat(50);
        EXPECT_LT(abs(exact - integrate_bigfloat(f, 50)), BigFloat("1e-40") * (1 + abs(exact))) << f.to_string();
    }
}

TEST(GaussFnProperty, TotalDerivativesIntegrateToZero) {
    gen::Random r(33);
    for (int trial = 0; trial < 60; ++trial) {
        const PhaseSpace s(r.integer(1, 2));
        const GaussFn f = r.gauss(s, 3), g = r.gauss(s, 3);
        const int v = r.integer(0, s.dimension() - 1);
        EXPECT_TRUE(integrate_exact(f.diff(v)).is_zero());
        // integration by parts
        EXPECT_EQ(integrate_exact(f * g.diff(v)), -integrate_exact(f.diff(v) * g));
    }
}

TEST(GaussFnProperty, DerivativeMatchesFiniteDifference) {
    gen::Random r(34);
    for (int trial = 0; trial < 30; ++trial) {
        const GaussFn f = r.gauss(one, 3);
        const int v = r.integer(0, 1);
        std::vector<long double> x{static_cast<long double>(r.rational().convert_to<double>()),
                                   static_cast<long double>(r.rational().convert_to<double>())};
        const long double h = 1e-5L;
        auto xp = x, xm = x;
        xp[static_cast<std::size_t>(v)] += h;
        xm[static_cast<std::size_t>(v)] -= h;
        const long double fd = (gen::eval_gauss(f, xp) - gen::eval_gauss(f, xm)) / (2 * h);
        EXPECT_NEAR(gen::eval_gauss(f.diff(v), x), fd, 1e-6L * (1 + std::fabs(fd)));
    }
}

TEST(GaussFnProperty, PullbackScalesIntegralByDeterminant) {
    gen::Random r(35);
    const std::vector<RationalMatrix> ms{
        RationalMatrix{{2, 0}, {0, Rational(1, 2)}},
        RationalMatrix{{1, 1}, {0, 1}},
        RationalMatrix{{2, 1}, {1, 3}},
        RationalMatrix{{0, -1}, {1, 0}},
    };
    for (const auto& m : ms) {
        for (int trial = 0; trial < 8; ++trial) {
            const GaussFn f = r.gauss(one, 2);
            PrecisionScope scope(40);
            const BigFloat base = integrate_exact(f).to_bigfloat(40);
            const BigFloat det = abs(to_bigfloat(m.determinant()));
            const BigFloat got = integrate_bigfloat(pullback_linear(f, m), 40);
            EXPECT_LT(abs(got * det - base), BigFloat("1e-30") * (1 + abs(base)));
            // pointwise: (f o m)(x) against the oracle evaluation of f at m x
            const std::vector<Rational> x{r.rational(), r.rational()};
            const auto mx = m.apply(x);
            GeneralGaussFn pulled = pullback_linear(f, m);
            const long double want = gen::eval_gauss(f, {static_cast<long double>(mx[0].convert_to<double>()),
                                                        static_cast<long double>(mx[1].convert_to<double>())});
            long double value = 0;
            for (const auto& t : pulled.terms()) {
                const auto sx = t.quadratic.apply(x);
                Rational expo = t.c;
                for (std::size_t i = 0; i < 2; ++i) expo += t.b[i] * x[i] - x[i] * sx[i] / 2;
                value += static_cast<long double>(t.poly.evaluate(x).convert_to<double>()) *
                         std::exp(static_cast<long double>(expo.convert_to<double>()));
            }
            EXPECT_NEAR(value, want, 1e-12L * (1 + std::fabs(want)));
        }
    }
}
