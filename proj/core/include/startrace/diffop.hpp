#pragma once

#include "startrace/errors.hpp"
#include "startrace/formal.hpp"
#include "startrace/gaussfn.hpp"
#include "startrace/poly.hpp"

#include <map>
#include <string>
#include <utility>

namespace startrace {

/// Memoised partial derivatives d^alpha f of a fixed function (Poly or GaussFn).
template <class F>
class DerivativeCache {
public:
    explicit DerivativeCache(const F& f) { cache_.emplace(MultiIndex{}, f); }

    const F& get(const MultiIndex& alpha) {
        if (auto it = cache_.find(alpha); it != cache_.end()) return it->second;
        int v = 0;
        while (alpha[v] == 0) ++v;
        MultiIndex lower = alpha;
        lower.set(v, alpha[v] - 1);
        F d = get(lower).diff(v);
        return cache_.emplace(alpha, std::move(d)).first->second;
    }

private:
    std::map<MultiIndex, F> cache_;
};

/// sum_alpha a_alpha(x) d^alpha with polynomial coefficients, coefficients to the
/// left of all derivatives. The term map is the canonical form.
class DiffOp {
public:
    using Terms = std::map<MultiIndex, Poly, GradedLex>;

    explicit DiffOp(PhaseSpace space) : space_(space) {}

    static DiffOp identity(PhaseSpace space);
    /// Multiplication by a.
    static DiffOp multiplication(const Poly& a);
    /// coeff * d^alpha.
    static DiffOp derivative(const Poly& coeff, const MultiIndex& alpha);
    static DiffOp partial(PhaseSpace space, int var);

    const PhaseSpace& space() const { return space_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// Highest |alpha| present; -1 for the zero operator.
    int order() const;
    Poly coefficient(const MultiIndex& alpha) const;

    void add_term(const MultiIndex& alpha, const Poly& coeff);

    DiffOp operator-() const;
    friend DiffOp operator+(const DiffOp& a, const DiffOp& b);
    friend DiffOp operator-(const DiffOp& a, const DiffOp& b);
    /// Composition a o b, Leibniz-expanded back to normal form.
    friend DiffOp operator*(const DiffOp& a, const DiffOp& b);
    friend DiffOp operator*(const Rational& c, const DiffOp& a);
    /// Left multiplication of every coefficient by p.
    friend DiffOp operator*(const Poly& p, const DiffOp& a);
    DiffOp& operator+=(const DiffOp& b);
    friend bool operator==(const DiffOp& a, const DiffOp& b);

    template <class F>
    F apply(const F& f) const {
        DerivativeCache<F> cache(f);
        return apply(cache, f);
    }

    template <class F>
    F apply(DerivativeCache<F>& cache, const F& f) const {
        F out = RingTraits<F>::zero_like(f);
        for (const auto& [alpha, a] : terms_) out += a * cache.get(alpha);
        return out;
    }

    template <class F>
    FormalScalar<F> apply(const FormalScalar<F>& f) const {
        return f.map([this](const F& g) { return apply(g); });
    }

    std::string to_string() const;

private:
    PhaseSpace space_;
    Terms terms_;
};

/// Formal adjoint: integral (A f) g = integral f (A* g) with no boundary terms.
/// (a d^alpha)* = (-1)^|alpha| d^alpha o a.
DiffOp adjoint(const DiffOp& a);

/// [a, b] = a o b - b o a.
DiffOp commutator(const DiffOp& a, const DiffOp& b);

/// Conjugation by the linear substitution (M f)(x) = f(m x): returns M^{-1} o a o M.
DiffOp conjugate_by_linear(const DiffOp& a, const RationalMatrix& m);

/// True when `x` is a vector field (first order, no zeroth-order part) with
/// L_x Omega = Omega for the standard symplectic form.
bool is_conformal_vector_field(const DiffOp& x);

/// 1/2 sum_i (q_i d/dq_i + p_i d/dp_i).
DiffOp euler_vector_field(PhaseSpace space);

/// sum a_{alpha beta}(x) d^alpha (x) d^beta.
class BiDiffOp {
public:
    using Key = std::pair<MultiIndex, MultiIndex>;
    struct KeyOrder {
        bool operator()(const Key& a, const Key& b) const {
            GradedLex g;
            if (a.first != b.first) return g(a.first, b.first);
            return g(a.second, b.second);
        }
    };
    using Terms = std::map<Key, Poly, KeyOrder>;

    explicit BiDiffOp(PhaseSpace space) : space_(space) {}

    /// Pointwise product 1 (x) 1.
    static BiDiffOp product(PhaseSpace space);
    /// sum a_alpha b_beta d^alpha (x) d^beta for A = sum a_alpha d^alpha, B = sum b_beta d^beta.
    static BiDiffOp tensor(const DiffOp& left, const DiffOp& right);

    const PhaseSpace& space() const { return space_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// Highest |alpha| + |beta|; -1 for zero.
    int order() const;

    void add_term(const MultiIndex& alpha, const MultiIndex& beta, const Poly& coeff);

    BiDiffOp operator-() const;
    friend BiDiffOp operator+(const BiDiffOp& a, const BiDiffOp& b);
    friend BiDiffOp operator-(const BiDiffOp& a, const BiDiffOp& b);
    friend BiDiffOp operator*(const Rational& c, const BiDiffOp& a);
    friend BiDiffOp operator*(const Poly& p, const BiDiffOp& a);
    BiDiffOp& operator+=(const BiDiffOp& b);
    friend bool operator==(const BiDiffOp& a, const BiDiffOp& b);

    template <class F>
    F apply(const F& u, const F& v) const {
        DerivativeCache<F> cu(u), cv(v);
        return apply(cu, cv, u);
    }

    template <class F>
    F apply(DerivativeCache<F>& cu, DerivativeCache<F>& cv, const F& like) const {
        F out = RingTraits<F>::zero_like(like);
        for (const auto& [key, a] : terms_) out += a * (cu.get(key.first) * cv.get(key.second));
        return out;
    }

    /// (u, v) -> B(v, u).
    BiDiffOp swapped() const;
    /// B^-(u, v) = B(u, v) - B(v, u) (not halved).
    BiDiffOp antisymmetric_part() const;

    /// v -> B(a, v).
    DiffOp with_left(const Poly& a) const;
    /// u -> B(u, a).
    DiffOp with_right(const Poly& a) const;

    std::string to_string() const;

private:
    PhaseSpace space_;
    Terms terms_;
};

/// R(u, v) = B(left u, right v).
BiDiffOp compose_inputs(const BiDiffOp& b, const DiffOp& left, const DiffOp& right);
/// R(u, v) = out(B(u, v)).
BiDiffOp compose_output(const DiffOp& out, const BiDiffOp& b);
/// R(u, v) = out(B(left u, right v)).
BiDiffOp conjugate(const DiffOp& out, const BiDiffOp& b, const DiffOp& left, const DiffOp& right);

/// (u, v) -> B(M u, M v)(m^{-1} x) for (M f)(x) = f(m x).
BiDiffOp conjugate_by_linear(const BiDiffOp& b, const RationalMatrix& m);

/// {u, v} as a bidifferential operator.
BiDiffOp poisson_cochain(PhaseSpace space);

template <>
struct RingTraits<DiffOp> {
    static DiffOp zero_like(const DiffOp& x) { return DiffOp(x.space()); }
    static DiffOp one_like(const DiffOp& x) { return DiffOp::identity(x.space()); }
    static bool is_zero(const DiffOp& x) { return x.is_zero(); }
    /// Only nonzero constant multiples of the identity are inverted.
    static DiffOp inverse(const DiffOp& x) {
        if (x.order() == 0) {
            const Poly c = x.coefficient(MultiIndex{});
            if (c.is_constant()) return (Rational(1) / c.constant_term()) * DiffOp::identity(x.space());
        }
        throw NonInvertible("operator is not a constant multiple of the identity");
    }
    static DiffOp scale(const DiffOp& x, const Rational& r) { return r * x; }
    static std::string to_string(const DiffOp& x) { return x.to_string(); }
    static bool needs_parens(const DiffOp& x) { return x.terms().size() > 1; }
};

template <>
struct RingTraits<BiDiffOp> {
    static BiDiffOp zero_like(const BiDiffOp& x) { return BiDiffOp(x.space()); }
    static bool is_zero(const BiDiffOp& x) { return x.is_zero(); }
    static BiDiffOp scale(const BiDiffOp& x, const Rational& r) { return r * x; }
    static std::string to_string(const BiDiffOp& x) { return x.to_string(); }
    static bool needs_parens(const BiDiffOp& x) { return x.terms().size() > 1; }
};

/// Operator-valued series sum nu^k A_k; products are compositions.
using OpSeries = FormalScalar<DiffOp>;

/// sum_{i,j} nu^{i+j} A_i(f_j).
template <class F>
FormalScalar<F> apply(const OpSeries& a, const FormalScalar<F>& f) {
    return cauchy(a, f, [](const DiffOp& op, const F& g) { return op.apply(g); });
}

}  // namespace startrace
