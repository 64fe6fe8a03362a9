#include "startrace/errors.hpp"
#include "startrace/trace.hpp"

#include "../support/generators.hpp"

#include <gtest/gtest.h>

using namespace startrace;

namespace {

const PhaseSpace one(1), two(2);
Poly q(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.q(i)); }
Poly p(PhaseSpace s = one, int i = 0) { return Poly::variable(s, s.p(i)); }
Poly k(const Rational& c, PhaseSpace s = one) { return Poly(s, c); }

IntegralValue pi_times(const Rational& r, int power = 1) { return IntegralValue::term(r, 0, power); }

TraceFunctional scaled(const TraceFunctional& t, const RationalSeries& c) {
    const PolySeries rho = cauchy(c, t.density(), [](const Rational& a, const Poly& b) { return a * b; });
    return TraceFunctional(t.space(), rho, t.prefactor());
}

}  // namespace

TEST(Trace, MoyalOnStandardGaussian) {
    const auto v = TraceFunctional::moyal(one, 3).evaluate(GaussFn::standard(one));
    EXPECT_EQ(v.min_degree(), -1);
    EXPECT_EQ(v.coeff(-1), pi_times(2));
    for (int j = 0; j <= 3; ++j) EXPECT_TRUE(v.coeff(j).is_zero());
    EXPECT_TRUE(TraceFunctional::moyal(one, 3).is_standard());
}

TEST(Trace, WorkedDensityExample) {
    // rho = 1 - nu: tau(e^{-|x|^2/2}) = 2 pi nu^-1 - 2 pi
    const TraceFunctional t(one, PolySeries(0, 3, {k(1), k(-1)}), -1);
    const auto v = t.evaluate(GaussFn::standard(one));
    EXPECT_EQ(v.coeff(-1), pi_times(2));
    EXPECT_EQ(v.coeff(0), pi_times(-2));
    EXPECT_TRUE(v.coeff(1).is_zero());
    EXPECT_TRUE(t.is_standard());
}

TEST(Trace, FourDimensions) {
    const auto v = TraceFunctional::moyal(two, 2).evaluate(GaussFn::standard(two));
    EXPECT_EQ(v.coeff(-2), pi_times(4, 2));
}

TEST(Trace, LaurentFloor) {
    EXPECT_THROW(TraceFunctional(one, PolySeries::constant(k(1), 2), -4), PreconditionViolation);
    EXPECT_NO_THROW(TraceFunctional(one, PolySeries::constant(k(1), 2), -3));
}

TEST(TraceConditions, MoyalResidualVanishes) {
    const TraceFunctional t = TraceFunctional::moyal(one, 4);
    const StarProduct s = StarProduct::moyal(one, 4);
    const GaussFn u = GaussFn::gaussian(q() * p() + k(1), 1, {1, 0}), v = GaussFn::gaussian(p().pow(2), 2);
    EXPECT_TRUE(trace_residual(t, s, u, v).is_zero());
    for (int j = 0; j <= 3; ++j) EXPECT_TRUE(trk_residual(t, s, j, u, v).is_zero());
    EXPECT_THROW(trk_residual(t, s, 4, u, v), PreconditionViolation);
}

TEST(TraceConditions, FirstOrderDensityBreaksTrace) {
    // rho = 1 + nu q: trk(1) = integral of q {u, v}; for u = e, v = p e this is
    // integral of q^2 e^{-|x|^2} = pi / 2.
    const TraceFunctional t(one, PolySeries(0, 3, {k(1), q()}), -1);
    const StarProduct s = StarProduct::moyal(one, 3);
    const GaussFn u = GaussFn::standard(one), v = GaussFn::gaussian(p(), 1);
    EXPECT_TRUE(trk_residual(t, s, 0, u, v).is_zero());
    EXPECT_EQ(trk_residual(t, s, 1, u, v), pi_times(Rational(1, 2)));
    const auto res = trace_residual(t, s, u, v);
    // the nu^k trace condition sits at nu^(prefactor + k + 1)
    EXPECT_EQ(res.coeff(t.prefactor() + 2), pi_times(Rational(1, 2)));
}

TEST(Standardize, Examples) {
    // nu^-1 * 3 nu^2 (1 + nu) -> nu^-1 (1 + nu)
    const TraceFunctional t(one, PolySeries(2, 4, {k(3), k(3)}), -1);
    const TraceFunctional st = standardize(t);
    EXPECT_TRUE(st.is_standard());
    EXPECT_EQ(st.prefactor(), -1);
    EXPECT_EQ(st.density().coeff(0), k(1));
    EXPECT_EQ(st.density().coeff(1), k(1));
    EXPECT_EQ(standardize(st), st);
    EXPECT_THROW(standardize(TraceFunctional(one, PolySeries::constant(q(), 2), -1)), PreconditionViolation);
}

TEST(Proportionality, Examples) {
    const TraceFunctional t1(one, PolySeries(0, 4, {k(1), q() * q(), k(2)}), -1);
    const auto probes = default_probes(one);
    const RationalSeries c(0, 4, {1, 3, 0, Rational(-1, 2)});
    EXPECT_EQ(proportionality_factor(t1, scaled(t1, c), probes), c);
    const RationalSeries shift(-1, 4, {2, 5});
    const auto got = proportionality_factor(t1, scaled(t1, shift), probes);
    EXPECT_EQ(got.coeff(-1), 2);
    EXPECT_EQ(got.coeff(0), 5);
    EXPECT_EQ(proportionality_factor(t1, t1, probes).coeff(0), 1);
}

TEST(Proportionality, InconsistentPair) {
    const TraceFunctional t1 = TraceFunctional::moyal(one, 3);
    const TraceFunctional t2(one, PolySeries(0, 3, {k(1), Rational(-2) * q()}), -1);
    // the standard Gaussian alone cannot see the q term; the shifted probes do
    EXPECT_NO_THROW(proportionality_factor(t1, t2, {GaussFn::standard(one)}));
    EXPECT_THROW(proportionality_factor(t1, t2, default_probes(one)), InconsistentRatio);
    EXPECT_THROW(proportionality_factor(t1, t2, {}), PreconditionViolation);
}

TEST(Probes, Battery) {
    for (int n = 1; n <= 3; ++n) {
        const PhaseSpace s(n);
        const auto probes = default_probes(s);
        EXPECT_EQ(probes.size(), 8u);
        for (const auto& f : probes) {
            EXPECT_TRUE(f.is_integrable());
            const auto v = integrate_exact(f);
            EXPECT_FALSE(v.is_zero());
            EXPECT_TRUE(v.is_single_term());
        }
    }
}

TEST(Normalization, MoyalEuler) {
    const TraceFunctional t = TraceFunctional::moyal(one, 3);
    const GaussSeries u(0, 3, {GaussFn::gaussian(q() * q(), 1), GaussFn::standard(one)});
    EXPECT_TRUE(normalization_residual(t, EulerDerivation::moyal(one), u).is_zero());
    // a trace with the wrong nu power is not normalised
    const TraceFunctional off(one, PolySeries::constant(k(1), 3), 0);
    EXPECT_FALSE(normalization_residual(off, EulerDerivation::moyal(one), u).is_zero());
}

TEST(TraceProperty, MoyalIsTrace) {
    gen::Random r(61);
    for (int trial = 0; trial < 20; ++trial) {
        const PhaseSpace s(r.integer(1, 2));
        const int order = s.n() == 1 ? 4 : 2;
        const TraceFunctional t = TraceFunctional::moyal(s, order);
        const StarProduct sp = StarProduct::moyal(s, order);
        const GaussFn u = r.gauss(s, 2), v = r.gauss(s, 2);
        EXPECT_TRUE(trace_residual(t, sp, u, v).is_zero());
    }
}

TEST(TraceProperty, TrkMatchesResidualCoefficient) {
    gen::Random r(62);
    for (int trial = 0; trial < 20; ++trial) {
        const PolySeries rho(0, 3, {k(1), r.poly(one, 2), r.poly(one, 2)});
        const TraceFunctional t(one, rho, -1);
        const StarProduct s = StarProduct::moyal(one, 3);
        const GaussFn u = r.gauss(one, 2), v = r.gauss(one, 2);
        const auto res = trace_residual(t, s, u, v);
        for (int j = 0; j <= 2; ++j) EXPECT_EQ(trk_residual(t, s, j, u, v), res.coeff(t.prefactor() + j + 1)) << j;
    }
}

TEST(TraceProperty, InnerDerivationsAnnihilate) {
    gen::Random r(63);
    const TraceFunctional t = TraceFunctional::moyal(one, 3);
    const StarProduct s = StarProduct::moyal(one, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const GaussFn a(r.poly(one, 3)), u = r.gauss(one, 2);
        EXPECT_TRUE(trace_residual(t, s, a, u).is_zero());
    }
}

TEST(TraceProperty, NormalizationIndependentOfEulerChoice) {
    gen::Random r(64);
    const TraceFunctional t = TraceFunctional::moyal(one, 4);
    const StarProduct s = StarProduct::moyal(one, 4);
    for (int trial = 0; trial < 10; ++trial) {
        const EulerDerivation d = EulerDerivation::moyal(one).plus_inner(s, r.poly(one, 3));
        const GaussSeries u = GaussSeries::constant(r.gauss(one, 2), 3);
        EXPECT_TRUE(normalization_residual(t, d, u).is_zero());
    }
}

TEST(TraceProperty, ProportionalityRoundTrip) {
    gen::Random r(65);
    const auto probes = default_probes(one);
    for (int trial = 0; trial < 15; ++trial) {
        const TraceFunctional t1(one, PolySeries(0, 3, {k(1), r.poly(one, 2)}), -1);
        const int lo = r.integer(-1, 1);
        std::vector<Rational> cs{r.nonzero_rational()};
        for (int j = lo + 1; j <= 3; ++j) cs.push_back(r.rational());
        const RationalSeries c(lo, 3, cs);
        const RationalSeries got = proportionality_factor(t1, scaled(t1, c), probes);
        for (int d = got.min_degree(); d <= got.order(); ++d) EXPECT_EQ(got.coeff(d), c.coeff(d)) << d;
    }
}
