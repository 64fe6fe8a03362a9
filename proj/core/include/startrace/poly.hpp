#pragma once

#include "startrace/formal.hpp"
#include "startrace/linalg.hpp"
#include "startrace/rational.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>

namespace startrace {

inline constexpr int kMaxHalfDimension = 4;
inline constexpr int kMaxVariables = 2 * kMaxHalfDimension;

/// Flat symplectic space R^{2n} in one Darboux chart. Variables are ordered
/// q_1..q_n, p_1..p_n (indices 0..2n-1). The Poisson bracket is
///   {f,g} = sum_i (df/dp_i dg/dq_i - df/dq_i dg/dp_i),
/// so that dv/dp_i = {v, q_i} and {q_i, p_i} = -1.
class PhaseSpace {
public:
    explicit PhaseSpace(int n);

    int n() const { return n_; }
    int dimension() const { return 2 * n_; }
    int q(int i) const { return i; }
    int p(int i) const { return n_ + i; }
    bool is_q(int var) const { return var < n_; }
    /// Index of the conjugate coordinate (q_i <-> p_i).
    int conjugate(int var) const { return is_q(var) ? var + n_ : var - n_; }

    /// "q1".."qn", "p1".."pn".
    std::string variable_name(int var) const;
    void check_variable(int var) const;

    /// Poisson tensor: {f,g} = sum_{a,b} poisson(a,b) d_a f d_b g.
    Rational poisson(int a, int b) const;
    /// Structure matrix J of the symplectic convention; m is symplectic iff m^T J m = J.
    RationalMatrix structure_matrix() const;

    friend bool operator==(const PhaseSpace&, const PhaseSpace&) = default;

private:
    int n_;
};

/// Exponent vector / derivative multi-index of length up to kMaxVariables.
class MultiIndex {
public:
    MultiIndex() { e_.fill(0); }

    static MultiIndex unit(int var) {
        MultiIndex m;
        m.e_[static_cast<std::size_t>(var)] = 1;
        return m;
    }

    int operator[](int var) const { return e_[static_cast<std::size_t>(var)]; }
    void set(int var, int value);
    void increment(int var, int by = 1) { set(var, (*this)[var] + by); }

    int total() const {
        int t = 0;
        for (auto x : e_) t += x;
        return t;
    }
    bool is_zero() const { return total() == 0; }

    /// Componentwise <=.
    bool divides(const MultiIndex& other) const {
        for (std::size_t i = 0; i < e_.size(); ++i)
            if (e_[i] > other.e_[i]) return false;
        return true;
    }

    friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
    /// Requires b.divides(a).
    friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    std::array<std::uint8_t, kMaxVariables> e_;
};

/// prod_i binom(alpha_i, beta_i).
Rational multi_binomial(const MultiIndex& alpha, const MultiIndex& beta);
/// prod_i alpha_i!
Rational multi_factorial(const MultiIndex& alpha);

/// Calls f(beta) for every beta <= alpha componentwise, in no particular order.
template <class F>
void for_each_sub_index(const MultiIndex& alpha, int dimension, F&& f) {
    MultiIndex beta;
    while (true) {
        f(beta);
        int var = 0;
        while (var < dimension) {
            if (beta[var] < alpha[var]) {
                beta.increment(var);
                break;
            }
            beta.set(var, 0);
            ++var;
        }
        if (var == dimension) return;
    }
}

/// Graded reverse ordering: higher total degree first, then lexicographically larger
/// exponent vectors first (q1 > q2 > ... > p_n). Used for canonical printing.
struct GradedLex {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const {
        const int da = a.total(), db = b.total();
        if (da != db) return da > db;
        return a > b;
    }
};

/// Exact multivariate polynomial over the rationals on a PhaseSpace.
class Poly {
public:
    using Terms = std::map<MultiIndex, Rational, GradedLex>;

    explicit Poly(PhaseSpace space) : space_(space) {}
    Poly(PhaseSpace space, const Rational& constant);

    static Poly variable(PhaseSpace space, int var);
    static Poly monomial(PhaseSpace space, const MultiIndex& exponent, const Rational& coeff);

    const PhaseSpace& space() const { return space_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_term() const;
    Rational coefficient(const MultiIndex& exponent) const;
    /// Total degree; -1 for the zero polynomial.
    int degree() const;

    /// Adds c * x^exponent, dropping the term if it cancels.
    void add_term(const MultiIndex& exponent, const Rational& c);

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(const Rational& c, const Poly& a);
    friend Poly operator*(const Poly& a, const Rational& c) { return c * a; }
    Poly& operator+=(const Poly& b);
    Poly& operator-=(const Poly& b);
    Poly pow(unsigned k) const;

    Poly diff(int var) const;
    Poly diff(const MultiIndex& alpha) const;

    /// Value at a rational point.
    Rational evaluate(const std::vector<Rational>& x) const;

    friend bool operator==(const Poly& a, const Poly& b);

    std::string to_string() const;

private:
    PhaseSpace space_;
    Terms terms_;
};

/// {f,g} under the PhaseSpace convention.
Poly poisson_bracket(const Poly& f, const Poly& g);

/// (a o m)(x) = a(m x). Throws PreconditionViolation for singular m.
Poly pullback_linear(const Poly& a, const RationalMatrix& m);

/// a(x + shift).
Poly translate(const Poly& a, const std::vector<Rational>& shift);

void check_same_space(const PhaseSpace& a, const PhaseSpace& b);

template <>
struct RingTraits<Poly> {
    static Poly zero_like(const Poly& x) { return Poly(x.space()); }
    static Poly one_like(const Poly& x) { return Poly(x.space(), Rational(1)); }
    static bool is_zero(const Poly& x) { return x.is_zero(); }
    static Poly scale(const Poly& x, const Rational& r) { return r * x; }
    static std::string to_string(const Poly& x) { return x.to_string(); }
    static bool needs_parens(const Poly& x) { return x.size() > 1 || (x.size() == 1 && x.terms().begin()->second < 0); }
};

using PolySeries = FormalScalar<Poly>;

}  // namespace startrace
