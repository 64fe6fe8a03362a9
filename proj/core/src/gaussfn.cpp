#include "startrace/gaussfn.hpp"

#include "startrace/errors.hpp"

#include <cmath>

namespace startrace {

namespace {

std::vector<Rational> zero_vector(const PhaseSpace& s) {
    return std::vector<Rational>(static_cast<std::size_t>(s.dimension()));
}

Rational half_norm_squared(const std::vector<Rational>& b) {
    Rational s = 0;
    for (const auto& x : b) s += x * x;
    return s / 2;
}

}  // namespace

PrecisionScope::PrecisionScope(unsigned digits10) : saved_(BigFloat::default_precision()) {
    BigFloat::default_precision(digits10 + 5);
}

PrecisionScope::~PrecisionScope() { BigFloat::default_precision(saved_); }

BigFloat to_bigfloat(const Rational& r) {
    BigFloat num(numerator(r).str());
    BigFloat den(denominator(r).str());
    return num / den;
}

// ---------------------------------------------------------------- IntegralValue

IntegralValue::IntegralValue(int pi_power, Terms terms) : pi_power_(pi_power) {
    for (auto& [s, r] : terms)
        if (r != 0) terms_.emplace(s, r);
    if (terms_.empty()) pi_power_ = 0;
}

IntegralValue IntegralValue::term(const Rational& r, const Rational& s, int pi_power) {
    return IntegralValue(pi_power, Terms{{s, r}});
}

std::optional<Rational> IntegralValue::as_rational() const {
    if (terms_.empty()) return Rational(0);
    if (pi_power_ != 0 || terms_.size() != 1 || terms_.begin()->first != 0) return std::nullopt;
    return terms_.begin()->second;
}

IntegralValue IntegralValue::operator-() const {
    IntegralValue r = *this;
    for (auto& [s, c] : r.terms_) c = -c;
    return r;
}

IntegralValue operator+(const IntegralValue& a, const IntegralValue& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.pi_power_ != b.pi_power_)
        throw DimensionMismatch("cannot add integral values with pi powers " + std::to_string(a.pi_power_) + " and " +
                                std::to_string(b.pi_power_));
    IntegralValue r = a;
    for (const auto& [s, c] : b.terms_) {
        auto [it, inserted] = r.terms_.try_emplace(s, c);
        if (inserted) continue;
        it->second += c;
        if (it->second == 0) r.terms_.erase(it);
    }
    if (r.terms_.empty()) r.pi_power_ = 0;
    return r;
}

IntegralValue operator*(const IntegralValue& a, const IntegralValue& b) {
    if (a.is_zero() || b.is_zero()) return {};
    IntegralValue r;
    r.pi_power_ = a.pi_power_ + b.pi_power_;
    for (const auto& [sa, ca] : a.terms_)
        for (const auto& [sb, cb] : b.terms_) {
            auto [it, inserted] = r.terms_.try_emplace(sa + sb, ca * cb);
            if (inserted) continue;
            it->second += ca * cb;
            if (it->second == 0) r.terms_.erase(it);
        }
    if (r.terms_.empty()) r.pi_power_ = 0;
    return r;
}

IntegralValue operator*(const Rational& r, const IntegralValue& a) {
    if (r == 0) return {};
    IntegralValue out = a;
    for (auto& [s, c] : out.terms_) c *= r;
    return out;
}

bool operator==(const IntegralValue& a, const IntegralValue& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.pi_power_ == b.pi_power_ && a.terms_ == b.terms_;
}

IntegralValue IntegralValue::inverse() const {
    if (!is_single_term())
        throw NonInvertible("only single-term integral values are invertible, got " + to_string());
    const auto& [s, r] = *terms_.begin();
    return term(Rational(1) / r, -s, -pi_power_);
}

BigFloat IntegralValue::to_bigfloat(unsigned digits10) const {
    PrecisionScope scope(digits10);
    BigFloat sum = 0;
    for (const auto& [s, r] : terms_) sum += startrace::to_bigfloat(r) * exp(startrace::to_bigfloat(s));
    return sum * pow(boost::math::constants::pi<BigFloat>(), pi_power_);
}

std::string IntegralValue::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [s, r] : terms_) {
        Rational mag = r < 0 ? Rational(-r) : r;
        out += first ? (r < 0 ? "-" : "") : (r < 0 ? " - " : " + ");
        first = false;
        std::string factors;
        if (s != 0) factors += "*exp(" + s.str() + ")";
        if (pi_power_ == 1) factors += "*pi";
        if (pi_power_ != 0 && pi_power_ != 1) factors += "*pi^" + std::to_string(pi_power_);
        if (mag == 1 && !factors.empty())
            out += factors.substr(1);
        else
            out += mag.str() + factors;
    }
    return out;
}

// ---------------------------------------------------------------- GaussFn

bool GaussExponent::is_polynomial() const {
    if (t != 0 || c != 0) return false;
    for (const auto& x : b)
        if (x != 0) return false;
    return true;
}

bool operator<(const GaussExponent& x, const GaussExponent& y) {
    if (x.t != y.t) return x.t < y.t;
    if (x.b != y.b) return x.b < y.b;
    return x.c < y.c;
}

GaussFn::GaussFn(const Poly& p) : space_(p.space()) {
    add_term(GaussExponent{Rational(0), zero_vector(p.space()), Rational(0)}, p);
}

GaussFn GaussFn::gaussian(const Poly& p, const Rational& t, std::vector<Rational> b, const Rational& c) {
    const PhaseSpace& s = p.space();
    if (t < 0) throw PreconditionViolation("Gaussian decay rate t must be nonnegative");
    if (b.empty()) b = zero_vector(s);
    if (static_cast<int>(b.size()) != s.dimension()) throw DimensionMismatch("linear exponent has wrong length");
    GaussFn f(s);
    f.add_term(GaussExponent{t, std::move(b), c}, p);
    return f;
}

GaussFn GaussFn::standard(PhaseSpace space) { return gaussian(Poly(space, Rational(1)), Rational(1)); }

bool GaussFn::is_integrable() const {
    for (const auto& [e, p] : terms_)
        if (e.t <= 0) return false;
    return true;
}

void GaussFn::add_term(const GaussExponent& e, const Poly& p) {
    check_same_space(space_, p.space());
    if (p.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, p);
    if (inserted) return;
    it->second += p;
    if (it->second.is_zero()) terms_.erase(it);
}

GaussFn GaussFn::operator-() const {
    GaussFn r = *this;
    for (auto& [e, p] : r.terms_) p = -p;
    return r;
}

GaussFn& GaussFn::operator+=(const GaussFn& b) {
    check_same_space(space_, b.space_);
    for (const auto& [e, p] : b.terms_) add_term(e, p);
    return *this;
}

GaussFn operator+(const GaussFn& a, const GaussFn& b) {
    GaussFn r = a;
    r += b;
    return r;
}

GaussFn operator-(const GaussFn& a, const GaussFn& b) { return a + (-b); }

GaussFn operator*(const GaussFn& a, const GaussFn& b) {
    check_same_space(a.space_, b.space_);
    GaussFn r(a.space_);
    for (const auto& [ea, pa] : a.terms_)
        for (const auto& [eb, pb] : b.terms_) {
            GaussExponent e{ea.t + eb.t, ea.b, ea.c + eb.c};
            for (std::size_t i = 0; i < e.b.size(); ++i) e.b[i] += eb.b[i];
            r.add_term(e, pa * pb);
        }
    return r;
}

GaussFn operator*(const Poly& p, const GaussFn& a) {
    check_same_space(p.space(), a.space_);
    GaussFn r(a.space_);
    if (p.is_zero()) return r;
    for (const auto& [e, q] : a.terms_) r.add_term(e, p * q);
    return r;
}

GaussFn operator*(const Rational& c, const GaussFn& a) {
    GaussFn r(a.space_);
    if (c == 0) return r;
    r.terms_ = a.terms_;
    for (auto& [e, p] : r.terms_) p = c * p;
    return r;
}

bool operator==(const GaussFn& a, const GaussFn& b) { return a.space_ == b.space_ && a.terms_ == b.terms_; }

GaussFn GaussFn::diff(int var) const {
    space_.check_variable(var);
    GaussFn r(space_);
    const Poly x = Poly::variable(space_, var);
    for (const auto& [e, p] : terms_) {
        Poly dq = (-e.t) * x;
        dq.add_term(MultiIndex{}, e.b[static_cast<std::size_t>(var)]);
        r.add_term(e, p.diff(var) + p * dq);
    }
    return r;
}

GaussFn GaussFn::diff(const MultiIndex& alpha) const {
    GaussFn r = *this;
    for (int v = 0; v < space_.dimension(); ++v)
        for (int k = 0; k < alpha[v]; ++k) r = r.diff(v);
    return r;
}

double GaussFn::evaluate(const std::vector<double>& x) const {
    double sum = 0;
    for (const auto& [e, p] : terms_) {
        double q = 0;
        double r2 = 0, lin = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            r2 += x[i] * x[i];
            lin += e.b[i].convert_to<double>() * x[i];
        }
        q += -e.t.convert_to<double>() * r2 / 2 + lin + e.c.convert_to<double>();
        double pv = 0;
        for (const auto& [m, c] : p.terms()) {
            double t = c.convert_to<double>();
            for (std::size_t i = 0; i < x.size(); ++i) t *= std::pow(x[i], m[static_cast<int>(i)]);
            pv += t;
        }
        sum += pv * std::exp(q);
    }
    return sum;
}

std::string GaussFn::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, p] : terms_) {
        if (!out.empty()) out += " + ";
        out += "(" + p.to_string() + ")";
        if (e.is_polynomial()) continue;
        Poly exponent(space_, e.c);
        for (int v = 0; v < space_.dimension(); ++v)
            exponent.add_term(MultiIndex::unit(v), e.b[static_cast<std::size_t>(v)]);
        std::string arg;
        if (e.t != 0) {
            Rational k = e.t / 2;
            arg = (k == 1 ? std::string("-") : "-" + k.str() + "*") + "|x|^2";
        }
        if (!exponent.is_zero()) {
            std::string lin = exponent.to_string();
            if (arg.empty())
                arg = lin;
            else if (lin.front() == '-')
                arg += " - " + lin.substr(1);
            else
                arg += " + " + lin;
        }
        out += "*exp(" + arg + ")";
    }
    return out;
}

IntegralValue integrate_exact(const GaussFn& f) {
    const PhaseSpace& s = f.space();
    const int dim = s.dimension();
    IntegralValue total;
    for (const auto& [e, p] : f.terms()) {
        if (e.t <= 0) throw NotIntegrable("term " + p.to_string() + " has no Gaussian decay");
        // Completing the square: mean mu = b/t, constant c + |b|^2/(2t).
        std::vector<Rational> mu(e.b.size());
        for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = e.b[i] / e.t;
        const Rational exponent = e.c + half_norm_squared(e.b) / e.t;
        // Moments of (y + mu) with y ~ N(0, Id/t), per axis, cached by power.
        std::vector<std::vector<Rational>> axis(static_cast<std::size_t>(dim));
        auto axis_moment = [&](int v, int k) -> const Rational& {
            auto& cache = axis[static_cast<std::size_t>(v)];
            while (static_cast<int>(cache.size()) <= k) {
                const int kk = static_cast<int>(cache.size());
                Rational m = 0;
                for (int j = 0; j <= kk; j += 2)
                    m += binomial(static_cast<unsigned>(kk), static_cast<unsigned>(j)) *
                         ipow(mu[static_cast<std::size_t>(v)], kk - j) * gaussian_moment(static_cast<unsigned>(j)) *
                         ipow(e.t, -j / 2);
                cache.push_back(m);
            }
            return cache[static_cast<std::size_t>(k)];
        };
        Rational expectation = 0;
        for (const auto& [m, c] : p.terms()) {
            Rational t = c;
            for (int v = 0; v < dim && t != 0; ++v) t *= axis_moment(v, m[v]);
            expectation += t;
        }
        // Normalisation (2 pi / t)^n = pi^n (2/t)^n over 2n axes.
        const Rational norm = ipow(Rational(2) / e.t, s.n());
        total += IntegralValue::term(norm * expectation, exponent, s.n());
    }
    return total;
}

ValueSeries integrate_exact(const GaussSeries& f) {
    return f.map([](const GaussFn& g) { return integrate_exact(g); });
}

// ---------------------------------------------------------------- general quadratics

GeneralGaussFn::GeneralGaussFn(const GaussFn& f) : space_(f.space()) {
    const auto d = static_cast<std::size_t>(space_.dimension());
    for (const auto& [e, p] : f.terms())
        add_term(GeneralGaussTerm{p, e.t * RationalMatrix::identity(d), e.b, e.c});
}

void GeneralGaussFn::add_term(GeneralGaussTerm term) {
    check_same_space(space_, term.poly.space());
    if (term.poly.is_zero()) return;
    for (auto it = terms_.begin(); it != terms_.end(); ++it) {
        if (it->quadratic == term.quadratic && it->b == term.b && it->c == term.c) {
            it->poly += term.poly;
            if (it->poly.is_zero()) terms_.erase(it);
            return;
        }
    }
    terms_.push_back(std::move(term));
}

std::optional<GaussFn> GeneralGaussFn::to_isotropic() const {
    GaussFn f(space_);
    for (const auto& term : terms_) {
        Rational t;
        if (!term.quadratic.is_scalar_multiple_of_identity(&t) || t < 0) return std::nullopt;
        f += GaussFn::gaussian(term.poly, t, term.b, term.c);
    }
    return f;
}

GeneralGaussFn pullback_linear(const GaussFn& f, const RationalMatrix& m) {
    const PhaseSpace& s = f.space();
    const auto d = static_cast<std::size_t>(s.dimension());
    if (m.rows() != d || m.cols() != d) throw DimensionMismatch("pullback matrix has wrong size");
    if (m.determinant() == 0) throw PreconditionViolation("pullback matrix is singular");
    const RationalMatrix mt = m.transpose();
    const RationalMatrix gram = mt * m;
    GeneralGaussFn out(s);
    for (const auto& [e, p] : f.terms())
        out.add_term(GeneralGaussTerm{pullback_linear(p, m), e.t * gram, mt.apply(e.b), e.c});
    return out;
}

Rational gaussian_moment(const RationalMatrix& covariance, const MultiIndex& alpha) {
    std::map<MultiIndex, Rational> memo;
    const int dim = static_cast<int>(covariance.rows());
    auto rec = [&](auto&& self, const MultiIndex& a) -> Rational {
        const int total = a.total();
        if (total == 0) return Rational(1);
        if (total % 2 != 0) return Rational(0);
        if (auto it = memo.find(a); it != memo.end()) return it->second;
        int v = 0;
        while (a[v] == 0) ++v;
        MultiIndex rest = a;
        rest.set(v, a[v] - 1);
        // E[y_v y^rest] = sum_w Sigma_vw rest_w E[y^{rest - e_w}]
        Rational sum = 0;
        for (int w = 0; w < dim; ++w) {
            if (rest[w] == 0) continue;
            const Rational& sig = covariance(static_cast<std::size_t>(v), static_cast<std::size_t>(w));
            if (sig == 0) continue;
            MultiIndex r2 = rest;
            r2.set(w, rest[w] - 1);
            sum += sig * rest[w] * self(self, r2);
        }
        memo.emplace(a, sum);
        return sum;
    };
    return rec(rec, alpha);
}

BigFloat integrate_bigfloat(const GeneralGaussFn& f, unsigned digits10) {
    PrecisionScope scope(digits10);
    const PhaseSpace& s = f.space();
    BigFloat total = 0;
    const BigFloat two_pi = 2 * boost::math::constants::pi<BigFloat>();
    for (const auto& term : f.terms()) {
        if (!term.quadratic.is_positive_definite())
            throw PreconditionViolation("quadratic form is not negative definite");
        const RationalMatrix cov = term.quadratic.inverse();
        const std::vector<Rational> mu = cov.apply(term.b);
        Rational btb = 0;
        for (std::size_t i = 0; i < mu.size(); ++i) btb += term.b[i] * mu[i];
        const Poly shifted = translate(term.poly, mu);
        Rational expectation = 0;
        for (const auto& [m, c] : shifted.terms()) expectation += c * gaussian_moment(cov, m);
        if (expectation == 0) continue;
        BigFloat value = pow(two_pi, s.n()) / sqrt(to_bigfloat(term.quadratic.determinant()));
        value *= exp(to_bigfloat(term.c + btb / 2));
        total += value * to_bigfloat(expectation);
    }
    return total;
}

}  // namespace startrace
