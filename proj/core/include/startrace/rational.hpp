#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace startrace {

/// Exact rational number (GMP backed, no expression templates so `auto` is safe).
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Parses "p", "-p" or "p/q". Throws std::invalid_argument on malformed input or q == 0.
Rational parse_rational(std::string_view text);

/// Renders as "p" or "p/q" in lowest terms.
std::string to_string(const Rational& r);

Rational factorial(unsigned k);
Rational binomial(unsigned n, unsigned k);

/// (k-1)!! for even k, i.e. the k-th moment of a unit normal; zero for odd k.
Rational gaussian_moment(unsigned k);

/// r^e for integer e (negative allowed when r != 0).
Rational ipow(const Rational& r, int e);

}  // namespace startrace
