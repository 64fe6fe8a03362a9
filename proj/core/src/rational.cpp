#include "startrace/rational.hpp"

#include <stdexcept>

namespace startrace {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    auto slash = body.find('/');
    std::string_view num = body.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    Integer d{std::string(den)};
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational r{Integer{std::string(num)}, d};
    return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) { return r.str(); }

Rational factorial(unsigned k) {
    Integer f = 1;
    for (unsigned i = 2; i <= k; ++i) f *= i;
    return Rational(f);
}

Rational binomial(unsigned n, unsigned k) {
    if (k > n) return Rational(0);
    Integer b = 1;
    for (unsigned i = 1; i <= k; ++i) {
        b *= n - k + i;
        b /= i;
    }
    return Rational(b);
}

Rational gaussian_moment(unsigned k) {
    if (k % 2 != 0) return Rational(0);
    Integer m = 1;
    for (unsigned i = k; i > 1; i -= 2) m *= i - 1;
    return Rational(m);
}

Rational ipow(const Rational& r, int e) {
    if (e < 0) {
        if (r == 0) throw std::domain_error("zero to a negative power");
        return Rational(1) / ipow(r, -e);
    }
    Rational result = 1;
    Rational base = r;
    for (unsigned k = static_cast<unsigned>(e); k != 0; k >>= 1) {
        if (k & 1u) result *= base;
        if (k > 1) base *= base;
    }
    return result;
}

}  // namespace startrace
