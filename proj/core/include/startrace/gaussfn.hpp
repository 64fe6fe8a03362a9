#pragma once

// Gaussian-polynomial function class P(x) exp(-t|x|^2/2 + b.x + c) and its exact integrals.
//
// The class stands in for compactly supported test functions: it is closed under
// products, derivatives and linear pullbacks, and integrals of total derivatives
// vanish identically, which is the only property of compact support the trace
// identities rely on.

#include "startrace/formal.hpp"
#include "startrace/linalg.hpp"
#include "startrace/poly.hpp"
#include "startrace/rational.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace startrace {

using BigFloat = boost::multiprecision::mpfr_float;

/// RAII guard setting the default MPFR precision (decimal digits) for new BigFloats.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits10);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

BigFloat to_bigfloat(const Rational& r);

/// sum_j r_j e^{s_j} pi^k with rational r_j, s_j. Distinct exponents s_j are treated
/// as linearly independent, so equality and zero tests are exact.
class IntegralValue {
public:
    using Terms = std::map<Rational, Rational>;  // exponent s -> coefficient r

    IntegralValue() = default;
    IntegralValue(int pi_power, Terms terms);

    static IntegralValue from_rational(const Rational& r) { return term(r, Rational(0), 0); }
    /// r e^s pi^k.
    static IntegralValue term(const Rational& r, const Rational& s, int pi_power);

    int pi_power() const { return pi_power_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_single_term() const { return terms_.size() == 1; }
    /// The value as a rational when it carries no pi and no exponential.
    std::optional<Rational> as_rational() const;

    IntegralValue operator-() const;
    /// Throws DimensionMismatch when both sides are nonzero with different pi powers.
    friend IntegralValue operator+(const IntegralValue& a, const IntegralValue& b);
    friend IntegralValue operator-(const IntegralValue& a, const IntegralValue& b) { return a + (-b); }
    friend IntegralValue operator*(const IntegralValue& a, const IntegralValue& b);
    friend IntegralValue operator*(const Rational& r, const IntegralValue& a);
    IntegralValue& operator+=(const IntegralValue& b) { return *this = *this + b; }
    friend bool operator==(const IntegralValue& a, const IntegralValue& b);

    /// Defined for single-term values only; otherwise NonInvertible.
    IntegralValue inverse() const;

    BigFloat to_bigfloat(unsigned digits10) const;
    std::string to_string() const;

private:
    int pi_power_ = 0;
    Terms terms_;
};

/// Exponent data of a term: -t|x|^2/2 + b.x + c.
struct GaussExponent {
    Rational t;
    std::vector<Rational> b;
    Rational c;

    bool is_polynomial() const;
    friend bool operator<(const GaussExponent& x, const GaussExponent& y);
    friend bool operator==(const GaussExponent& x, const GaussExponent& y) = default;
};

class GaussFn {
public:
    using Terms = std::map<GaussExponent, Poly>;

    explicit GaussFn(PhaseSpace space) : space_(space) {}
    /// A pure polynomial (t = 0, b = 0, c = 0); not integrable unless zero.
    GaussFn(const Poly& p);

    /// P(x) exp(-t|x|^2/2 + b.x + c); t must be >= 0.
    static GaussFn gaussian(const Poly& p, const Rational& t, std::vector<Rational> b = {}, const Rational& c = 0);
    /// exp(-|x|^2/2).
    static GaussFn standard(PhaseSpace space);

    const PhaseSpace& space() const { return space_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    /// True when every term decays (t > 0); the zero function counts as integrable.
    bool is_integrable() const;

    void add_term(const GaussExponent& e, const Poly& p);

    GaussFn operator-() const;
    friend GaussFn operator+(const GaussFn& a, const GaussFn& b);
    friend GaussFn operator-(const GaussFn& a, const GaussFn& b);
    friend GaussFn operator*(const GaussFn& a, const GaussFn& b);
    friend GaussFn operator*(const Poly& p, const GaussFn& a);
    friend GaussFn operator*(const GaussFn& a, const Poly& p) { return p * a; }
    friend GaussFn operator*(const Rational& r, const GaussFn& a);
    GaussFn& operator+=(const GaussFn& b);
    friend bool operator==(const GaussFn& a, const GaussFn& b);

    /// d/dx_var (P e^Q) = (dP + P dQ) e^Q.
    GaussFn diff(int var) const;
    GaussFn diff(const MultiIndex& alpha) const;

    /// Floating-point value at x (used for plotting-free spot checks only).
    double evaluate(const std::vector<double>& x) const;

    std::string to_string() const;

private:
    PhaseSpace space_;
    Terms terms_;
};

/// Exact integral over R^{2n} with Lebesgue measure (= omega^n/n!).
/// Throws NotIntegrable if some term has t = 0.
IntegralValue integrate_exact(const GaussFn& f);

/// P(x) exp(-x^T S x / 2 + b.x + c) with a general symmetric S.
struct GeneralGaussTerm {
    Poly poly;
    RationalMatrix quadratic;  // S
    std::vector<Rational> b;
    Rational c;
};

/// Gaussian-class function whose quadratic parts need not be isotropic (result of
/// pulling back by non-conformal linear maps). Integrated by the bigfloat backend.
class GeneralGaussFn {
public:
    explicit GeneralGaussFn(PhaseSpace space) : space_(space) {}
    GeneralGaussFn(const GaussFn& f);

    const PhaseSpace& space() const { return space_; }
    const std::vector<GeneralGaussTerm>& terms() const { return terms_; }

    void add_term(GeneralGaussTerm term);

    /// The isotropic representation when every S is t*Id.
    std::optional<GaussFn> to_isotropic() const;

private:
    PhaseSpace space_;
    std::vector<GeneralGaussTerm> terms_;
};

/// f(m x). Throws PreconditionViolation for singular m.
GeneralGaussFn pullback_linear(const GaussFn& f, const RationalMatrix& m);

/// Closed form (2 pi)^n det(S)^{-1/2} exp(c + b^T S^{-1} b / 2) E[P(mu + y)], with the
/// polynomial moment evaluated exactly (Isserlis) and the transcendental prefactor in
/// MPFR at `digits10` decimal digits. Throws PreconditionViolation unless every S is
/// positive definite.
BigFloat integrate_bigfloat(const GeneralGaussFn& f, unsigned digits10);

/// E[y^alpha] for y ~ N(0, covariance), exact.
Rational gaussian_moment(const RationalMatrix& covariance, const MultiIndex& alpha);

template <>
struct RingTraits<IntegralValue> {
    static IntegralValue zero_like(const IntegralValue&) { return {}; }
    static bool is_zero(const IntegralValue& x) { return x.is_zero(); }
    static IntegralValue scale(const IntegralValue& x, const Rational& r) { return r * x; }
    static std::string to_string(const IntegralValue& x) { return x.to_string(); }
    static bool needs_parens(const IntegralValue& x) { return x.terms().size() > 1; }
    static IntegralValue inverse(const IntegralValue& x) { return x.inverse(); }
};

template <>
struct RingTraits<GaussFn> {
    static GaussFn zero_like(const GaussFn& x) { return GaussFn(x.space()); }
    static bool is_zero(const GaussFn& x) { return x.is_zero(); }
    static GaussFn scale(const GaussFn& x, const Rational& r) { return r * x; }
    static std::string to_string(const GaussFn& x) { return x.to_string(); }
    static bool needs_parens(const GaussFn& x) { return x.size() > 1; }
};

/// Series with function coefficients ("formal functions") and trace values.
using GaussSeries = FormalScalar<GaussFn>;
using ValueSeries = FormalScalar<IntegralValue>;

/// Coefficientwise exact integration.
ValueSeries integrate_exact(const GaussSeries& f);

}  // namespace startrace
