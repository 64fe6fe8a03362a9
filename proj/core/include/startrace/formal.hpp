#pragma once

// Truncated Laurent series in the formal parameter nu over an exact coefficient ring.

#include "startrace/errors.hpp"
#include "startrace/rational.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace startrace {

/// Coefficient-ring adaptor. Specialisations provide
///   zero_like(x), is_zero(x), scale(x, rational), to_string(x), needs_parens(x)
/// and, for rings with units, inverse(x) throwing NonInvertible.
template <class R>
struct RingTraits;

template <>
struct RingTraits<Rational> {
    static Rational zero_like(const Rational&) { return Rational(0); }
    static Rational one_like(const Rational&) { return Rational(1); }
    static bool is_zero(const Rational& x) { return x == 0; }
    static std::string to_string(const Rational& x) { return startrace::to_string(x); }
    static bool needs_parens(const Rational& x) { return x < 0; }
    static Rational scale(const Rational& x, const Rational& r) { return x * r; }
    static Rational inverse(const Rational& x) {
        if (x == 0) throw NonInvertible("zero has no inverse");
        return Rational(1) / x;
    }
};

template <class R>
concept CoefficientRing = requires(const R& a, const R& b) {
    { a + b } -> std::convertible_to<R>;
    { a - b } -> std::convertible_to<R>;
    { a * b } -> std::convertible_to<R>;
    { -a } -> std::convertible_to<R>;
    { RingTraits<R>::zero_like(a) } -> std::convertible_to<R>;
    { RingTraits<R>::is_zero(a) } -> std::convertible_to<bool>;
    { RingTraits<R>::scale(a, Rational{}) } -> std::convertible_to<R>;
};

template <class R>
class FormalScalar;

template <class A, class B, class F>
auto cauchy(const FormalScalar<A>& a, const FormalScalar<B>& b, F&& f);

/// Default truncation order used when a computation does not set one.
inline constexpr int kDefaultOrder = 6;

/// c_m nu^m + ... + c_K nu^K, known through nu^K.
///
/// The stored window is exactly [min_degree, order]. The lowest stored coefficient is
/// nonzero unless the whole series is zero, in which case the window is the single
/// degree `order`. Sums and products are truncated at the smaller of the operands'
/// orders; shifts by nu^j move the whole window, order included.
template <class R>
class FormalScalar {
public:
    using value_type = R;

    FormalScalar(int min_degree, int order, std::vector<R> coeffs)
        : min_degree_(min_degree), order_(order), coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw PreconditionViolation("series needs at least one coefficient");
        if (min_degree_ > order_) throw PreconditionViolation("series window is empty");
        normalize();
    }

    static FormalScalar constant(R c, int order) { return FormalScalar(0, order, {std::move(c)}); }

    static FormalScalar monomial(R c, int degree, int order) {
        if (degree > order) return zero(RingTraits<R>::zero_like(c), order);
        return FormalScalar(degree, order, {std::move(c)});
    }

    static FormalScalar zero(R zero_element, int order) {
        return FormalScalar(order, order, {std::move(zero_element)});
    }

    int min_degree() const { return min_degree_; }
    int order() const { return order_; }
    std::span<const R> coefficients() const { return coeffs_; }

    /// Coefficient at nu^degree; zero outside the stored window.
    R coeff(int degree) const {
        if (degree < min_degree_ || degree > order_) return RingTraits<R>::zero_like(coeffs_.front());
        return coeffs_[static_cast<std::size_t>(degree - min_degree_)];
    }

    const R& leading() const { return coeffs_.front(); }

    bool is_zero() const {
        return coeffs_.size() == 1 && RingTraits<R>::is_zero(coeffs_.front()) && min_degree_ == order_;
    }

    /// Lowest degree with a nonzero coefficient, or order()+1 for the zero series.
    int valuation() const { return is_zero() ? order_ + 1 : min_degree_; }

    FormalScalar operator-() const {
        std::vector<R> out;
        out.reserve(coeffs_.size());
        for (const auto& c : coeffs_) out.push_back(-c);
        return FormalScalar(min_degree_, order_, std::move(out));
    }

    friend FormalScalar operator+(const FormalScalar& a, const FormalScalar& b) {
        return combine(a, b, [](const R& x, const R& y) { return x + y; });
    }
    friend FormalScalar operator-(const FormalScalar& a, const FormalScalar& b) {
        return combine(a, b, [](const R& x, const R& y) { return x - y; });
    }
    friend FormalScalar operator*(const FormalScalar& a, const FormalScalar& b) {
        return cauchy(a, b, [](const R& x, const R& y) { return x * y; });
    }
    friend FormalScalar operator*(const FormalScalar& a, const R& c) {
        return a.map([&](const R& x) { return x * c; });
    }
    friend FormalScalar operator*(const R& c, const FormalScalar& a) {
        return a.map([&](const R& x) { return c * x; });
    }

    FormalScalar& operator+=(const FormalScalar& b) { return *this = *this + b; }
    FormalScalar& operator-=(const FormalScalar& b) { return *this = *this - b; }
    FormalScalar& operator*=(const FormalScalar& b) { return *this = *this * b; }

    /// Exact equality of windows and coefficients.
    friend bool operator==(const FormalScalar& a, const FormalScalar& b) {
        if (a.min_degree_ != b.min_degree_ || a.order_ != b.order_ || a.coeffs_.size() != b.coeffs_.size())
            return false;
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            if (!RingTraits<R>::is_zero(a.coeffs_[i] - b.coeffs_[i])) return false;
        return true;
    }

    /// Multiplication by nu^j.
    FormalScalar shifted(int j) const { return FormalScalar(min_degree_ + j, order_ + j, coeffs_); }

    /// Drops everything above nu^order.
    FormalScalar truncated(int order) const {
        if (order >= order_) return *this;
        if (order < min_degree_) return zero(RingTraits<R>::zero_like(coeffs_.front()), order);
        std::vector<R> out(coeffs_.begin(), coeffs_.begin() + (order - min_degree_ + 1));
        return FormalScalar(min_degree_, order, std::move(out));
    }

    /// nu d/dnu: the coefficient at nu^k is multiplied by k.
    FormalScalar nu_derivative() const {
        std::vector<R> out;
        out.reserve(coeffs_.size());
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            out.push_back(RingTraits<R>::scale(coeffs_[i], Rational(min_degree_ + static_cast<int>(i))));
        return FormalScalar(min_degree_, order_, std::move(out));
    }

    /// Multiplicative inverse; keeps the relative precision, so the result is known
    /// through nu^(order - 2*min_degree). Requires RingTraits<R>::inverse.
    FormalScalar inverse() const {
        if (is_zero()) throw NonInvertible("zero series has no inverse");
        const int m = min_degree_;
        const int relative = order_ - m;
        const R lead_inv = RingTraits<R>::inverse(coeffs_.front());
        std::vector<R> b;
        b.reserve(static_cast<std::size_t>(relative + 1));
        b.push_back(lead_inv);
        for (int j = 1; j <= relative; ++j) {
            R acc = RingTraits<R>::zero_like(lead_inv);
            for (int i = 1; i <= j; ++i) acc = acc + coeffs_[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j - i)];
            b.push_back(-(lead_inv * acc));
        }
        return FormalScalar(-m, order_ - 2 * m, std::move(b));
    }

    template <class F>
    auto map(F&& f) const -> FormalScalar<std::decay_t<decltype(f(std::declval<const R&>()))>> {
        using S = std::decay_t<decltype(f(std::declval<const R&>()))>;
        std::vector<S> out;
        out.reserve(coeffs_.size());
        for (const auto& c : coeffs_) out.push_back(f(c));
        return FormalScalar<S>(min_degree_, order_, std::move(out));
    }

    /// "c_m*nu^m + ... + c_K*nu^K"; "0" for the zero series.
    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            const R& c = coeffs_[i];
            if (RingTraits<R>::is_zero(c)) continue;
            const int k = min_degree_ + static_cast<int>(i);
            std::string body = RingTraits<R>::to_string(c);
            if (RingTraits<R>::needs_parens(c)) body = "(" + body + ")";
            if (!out.empty()) out += " + ";
            out += body;
            if (k != 0) out += "*nu^" + std::to_string(k);
        }
        return out.empty() ? "0" : out;
    }

private:
    void normalize() {
        const auto wanted = static_cast<std::size_t>(order_ - min_degree_ + 1);
        R z = RingTraits<R>::zero_like(coeffs_.front());
        if (coeffs_.size() > wanted) coeffs_.resize(wanted, z);
        while (coeffs_.size() < wanted) coeffs_.push_back(z);
        std::size_t first = 0;
        while (first < coeffs_.size() && RingTraits<R>::is_zero(coeffs_[first])) ++first;
        if (first == coeffs_.size()) {
            min_degree_ = order_;
            coeffs_.assign(1, std::move(z));
            return;
        }
        if (first > 0) {
            coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(first));
            min_degree_ += static_cast<int>(first);
        }
    }

    template <class F>
    static FormalScalar combine(const FormalScalar& a, const FormalScalar& b, F&& f) {
        const int lo = std::min(a.min_degree_, b.min_degree_);
        const int hi = std::min(a.order_, b.order_);
        if (lo > hi) return zero(RingTraits<R>::zero_like(a.coeffs_.front()), hi);
        std::vector<R> out;
        out.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (int k = lo; k <= hi; ++k) out.push_back(f(a.coeff(k), b.coeff(k)));
        return FormalScalar(lo, hi, std::move(out));
    }

    int min_degree_;
    int order_;
    std::vector<R> coeffs_;
};

/// Cauchy product with a caller-supplied coefficient product f(a_i, b_j); the
/// coefficient types may differ (e.g. polynomial density times Gaussian function).
template <class A, class B, class F>
auto cauchy(const FormalScalar<A>& a, const FormalScalar<B>& b, F&& f) {
    auto ca = a.coefficients();
    auto cb = b.coefficients();
    using S = std::decay_t<decltype(f(ca.front(), cb.front()))>;
    const int order = std::min(a.order(), b.order());
    const int lo = a.min_degree() + b.min_degree();
    S z = RingTraits<S>::zero_like(f(ca.front(), cb.front()));
    if (lo > order) return FormalScalar<S>::zero(std::move(z), order);
    std::vector<S> out(static_cast<std::size_t>(order - lo + 1), z);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        if (RingTraits<A>::is_zero(ca[i])) continue;
        for (std::size_t j = 0; j < cb.size(); ++j) {
            const std::size_t k = i + j;
            if (static_cast<int>(k) + lo > order) break;
            out[k] = out[k] + f(ca[i], cb[j]);
        }
    }
    return FormalScalar<S>(lo, order, std::move(out));
}

using RationalSeries = FormalScalar<Rational>;

}  // namespace startrace
