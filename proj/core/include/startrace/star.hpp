#pragma once

#include "startrace/diffop.hpp"
#include "startrace/formal.hpp"
#include "startrace/gaussfn.hpp"
#include "startrace/poly.hpp"

#include <map>
#include <vector>

namespace startrace {

using PolySeries = FormalScalar<Poly>;

/// u * v = uv + sum_{r=1..K} nu^r C_r(u, v), with C_0 the pointwise product.
class StarProduct {
public:
    /// cochains[r-1] = C_r.
    StarProduct(PhaseSpace space, std::vector<BiDiffOp> cochains);

    static StarProduct moyal(PhaseSpace space, int order);

    const PhaseSpace& space() const { return space_; }
    int order() const { return static_cast<int>(cochains_.size()); }
    /// C_r for 0 <= r <= order().
    const BiDiffOp& cochain(int r) const;
    /// C_r(u, v) - C_r(v, u).
    BiDiffOp antisymmetric_cochain(int r) const { return cochain(r).antisymmetric_part(); }

    /// Truncated at the smaller of the input orders and (valuation + order()).
    template <class F>
    FormalScalar<F> multiply(const FormalScalar<F>& u, const FormalScalar<F>& v) const {
        const int lo = u.min_degree() + v.min_degree();
        const int top = std::min({u.order(), v.order(), lo + order()});
        F z = RingTraits<F>::zero_like(u.leading());
        if (u.is_zero() || v.is_zero() || lo > top) return FormalScalar<F>::zero(std::move(z), top);
        auto cu = u.coefficients();
        auto cv = v.coefficients();
        std::vector<DerivativeCache<F>> du, dv;
        for (const auto& c : cu) du.emplace_back(c);
        for (const auto& c : cv) dv.emplace_back(c);
        std::vector<F> out(static_cast<std::size_t>(top - lo + 1), z);
        for (std::size_t i = 0; i < cu.size(); ++i) {
            if (RingTraits<F>::is_zero(cu[i])) continue;
            for (std::size_t j = 0; j < cv.size(); ++j) {
                if (RingTraits<F>::is_zero(cv[j])) continue;
                const int base = static_cast<int>(i + j);
                for (int r = 0; lo + base + r <= top; ++r)
                    out[static_cast<std::size_t>(base + r)] += cochain(r).apply(du[i], dv[j], z);
            }
        }
        return FormalScalar<F>(lo, top, std::move(out));
    }

    template <class F>
    FormalScalar<F> multiply(const F& u, const F& v) const {
        return multiply(FormalScalar<F>::constant(u, order()), FormalScalar<F>::constant(v, order()));
    }

    template <class F>
    FormalScalar<F> commutator(const FormalScalar<F>& u, const FormalScalar<F>& v) const {
        return multiply(u, v) - multiply(v, u);
    }

    template <class F>
    FormalScalar<F> commutator(const F& u, const F& v) const {
        return multiply(u, v) - multiply(v, u);
    }

private:
    PhaseSpace space_;
    BiDiffOp product_;
    std::vector<BiDiffOp> cochains_;
};

/// (u * v) * w - u * (v * w).
PolySeries associativity_residual(const StarProduct& s, const Poly& u, const Poly& v, const Poly& w);

/// Exact integral of C_r^-(u, v) over R^{2n}.
IntegralValue closedness_integral(const StarProduct& s, int r, const GaussFn& u, const GaussFn& v);

/// D = nu d/dnu + X + sum_{r>=1} nu^r D'_r with X conformal (L_X Omega = Omega).
class EulerDerivation {
public:
    EulerDerivation(DiffOp x, std::map<int, DiffOp> corrections, bool nu_scaling = true);

    /// nu d/dnu + 1/2 sum (q d/dq + p d/dp).
    static EulerDerivation moyal(PhaseSpace space);

    const PhaseSpace& space() const { return x_.space(); }
    bool has_nu_scaling() const { return nu_scaling_; }
    const DiffOp& vector_field() const { return x_; }
    const std::map<int, DiffOp>& corrections() const { return corrections_; }
    DiffOp correction(int r) const;
    /// X + sum nu^r D'_r as an operator series through nu^order.
    FormalScalar<DiffOp> operator_series(int order) const;

    template <class F>
    FormalScalar<F> apply(const FormalScalar<F>& u) const {
        FormalScalar<F> out = x_.apply(u);
        if (nu_scaling_) out += u.nu_derivative();
        for (const auto& [r, op] : corrections_) {
            if (u.min_degree() + r > u.order()) break;
            out += op.apply(u).shifted(r);
        }
        return out;
    }

    /// D + nu^{-1} ad(a) with ad(a)(u) = a * u - u * a. Known through nu^(s.order() - 1).
    EulerDerivation plus_inner(const StarProduct& s, const Poly& a) const;

    friend bool operator==(const EulerDerivation& a, const EulerDerivation& b);

private:
    DiffOp x_;
    std::map<int, DiffOp> corrections_;
    bool nu_scaling_;
};

/// D(u * v) - D(u) * v - u * D(v).
template <class F>
FormalScalar<F> derivation_residual(const StarProduct& s, const EulerDerivation& d, const FormalScalar<F>& u,
                                    const FormalScalar<F>& v) {
    return d.apply(s.multiply(u, v)) - s.multiply(d.apply(u), v) - s.multiply(u, d.apply(v));
}

/// integral of X u + n integral of u; zero when the divergence of X is n.
IntegralValue homogeneity_residual(const DiffOp& x, const GaussFn& u);

}  // namespace startrace
