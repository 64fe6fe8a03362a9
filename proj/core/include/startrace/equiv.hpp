#pragma once

#include "startrace/diffop.hpp"
#include "startrace/linalg.hpp"
#include "startrace/star.hpp"
#include "startrace/trace.hpp"

#include <cstdint>
#include <map>

namespace startrace {

/// T = Id + sum_{k=1..K} nu^k T_k.
class Equivalence {
public:
    /// Missing orders are zero.
    Equivalence(PhaseSpace space, int order, std::map<int, DiffOp> terms);

    static Equivalence identity(PhaseSpace space, int order) { return Equivalence(space, order, {}); }
    /// exp(nu L) = sum nu^k L^k / k!. For a linear Hamiltonian vector field L this is the
    /// pullback along the flow of L at time nu, an automorphism of the Moyal product.
    static Equivalence exponential(const DiffOp& l, int order);
    /// Requires a nu^0 coefficient equal to the identity.
    static Equivalence from_series(const OpSeries& s);

    const PhaseSpace& space() const { return space_; }
    int order() const { return order_; }
    /// T_k for 1 <= k <= order(); zero when absent.
    DiffOp term(int k) const;
    const std::map<int, DiffOp>& terms() const { return terms_; }
    /// Id + sum nu^k T_k as an operator series.
    OpSeries series() const;

    template <class F>
    FormalScalar<F> apply(const FormalScalar<F>& u) const {
        return startrace::apply(series(), u);
    }

    friend bool operator==(const Equivalence& a, const Equivalence& b) = default;

private:
    PhaseSpace space_;
    int order_;
    std::map<int, DiffOp> terms_;
};

Equivalence equiv_invert(const Equivalence& t);

/// a o b (apply b first).
Equivalence compose(const Equivalence& a, const Equivalence& b);

/// T'_k = adjoint(T_k).
Equivalence equiv_adjoint(const Equivalence& t);

/// *' with u *' v = T^{-1}(T u * T v).
StarProduct transport_star(const Equivalence& t, const StarProduct& s);

/// tau o T: density T'(rho), prefactor unchanged.
TraceFunctional pullback_trace(const TraceFunctional& tau, const Equivalence& t);

/// Standard trace with density T'(1).
TraceFunctional density_from_equivalence(const Equivalence& t);

/// T^{-1} o D o T, with nu d/dnu also differentiating the coefficients of T.
EulerDerivation transport_euler(const Equivalence& t, const EulerDerivation& d);

// Linear substitutions (M f)(x) = f(m x).

/// u *' v = M^{-1}(M u * M v).
StarProduct pullback_star(const StarProduct& s, const RationalMatrix& m);
/// M^{-1} o D o M.
EulerDerivation pullback_euler(const EulerDerivation& d, const RationalMatrix& m);
/// tau o M.
TraceFunctional pullback_trace(const TraceFunctional& tau, const RationalMatrix& m);

/// m^T J m == J for the structure matrix J.
bool is_symplectic(const PhaseSpace& space, const RationalMatrix& m);

/// |integral(u o m) - integral(u)|, the nu^{-n} coefficient of tau_M(u o m) - tau_M(u).
/// Exact when m^T m is a multiple of the identity (then the result is exactly 0 or the
/// exact difference), otherwise at `digits10` precision.
BigFloat symplectic_automorphism_check(const RationalMatrix& m, const GaussFn& u, unsigned digits10 = 50);

/// Seeded T with T_k (k <= min(order, max_k)) of operator order 1..2 and coefficient
/// degree <= 2. No zeroth-order part, so T(1) = 1.
Equivalence random_equivalence(PhaseSpace space, int order, std::uint64_t seed, int max_k = 3);

}  // namespace startrace
