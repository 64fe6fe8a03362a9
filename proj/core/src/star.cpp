#include "startrace/star.hpp"

#include "startrace/errors.hpp"

namespace startrace {

namespace {

/// Product of constant-coefficient bidifferential operators (derivative indices add).
BiDiffOp constant_product(const BiDiffOp& a, const BiDiffOp& b) {
    BiDiffOp r(a.space());
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
    return r;
}

}  // namespace

StarProduct::StarProduct(PhaseSpace space, std::vector<BiDiffOp> cochains)
    : space_(space), product_(BiDiffOp::product(space)), cochains_(std::move(cochains)) {
    if (cochains_.empty()) throw PreconditionViolation("star product needs order >= 1");
    for (const auto& c : cochains_) check_same_space(space_, c.space());
}

StarProduct StarProduct::moyal(PhaseSpace space, int order) {
    if (order < 1) throw PreconditionViolation("star product needs order >= 1");
    // C_k = Lambda^k / (2^k k!), Lambda the Poisson cochain.
    const BiDiffOp lambda = poisson_cochain(space);
    std::vector<BiDiffOp> cochains;
    BiDiffOp power = BiDiffOp::product(space);
    for (int k = 1; k <= order; ++k) {
        power = constant_product(power, lambda);
        const Rational scale = Rational(1) / (ipow(Rational(2), k) * factorial(static_cast<unsigned>(k)));
        cochains.push_back(scale * power);
    }
    return StarProduct(space, std::move(cochains));
}

const BiDiffOp& StarProduct::cochain(int r) const {
    if (r == 0) return product_;
    if (r < 0 || r > order())
        throw PreconditionViolation("cochain index " + std::to_string(r) + " outside 0.." + std::to_string(order()));
    return cochains_[static_cast<std::size_t>(r - 1)];
}

PolySeries associativity_residual(const StarProduct& s, const Poly& u, const Poly& v, const Poly& w) {
    const int k = s.order();
    const auto su = PolySeries::constant(u, k);
    const auto sv = PolySeries::constant(v, k);
    const auto sw = PolySeries::constant(w, k);
    return s.multiply(s.multiply(su, sv), sw) - s.multiply(su, s.multiply(sv, sw));
}

IntegralValue closedness_integral(const StarProduct& s, int r, const GaussFn& u, const GaussFn& v) {
    if (r < 1 || r > s.order()) throw PreconditionViolation("closedness order outside 1..K");
    if (!u.is_integrable() || !v.is_integrable()) throw NotIntegrable("closedness needs integrable inputs");
    return integrate_exact(s.antisymmetric_cochain(r).apply(u, v));
}

EulerDerivation::EulerDerivation(DiffOp x, std::map<int, DiffOp> corrections, bool nu_scaling)
    : x_(std::move(x)), corrections_(std::move(corrections)), nu_scaling_(nu_scaling) {
    if (!is_conformal_vector_field(x_)) throw PreconditionViolation("X is not a conformal vector field");
    for (auto it = corrections_.begin(); it != corrections_.end();) {
        if (it->first < 1) throw PreconditionViolation("correction orders start at 1");
        check_same_space(x_.space(), it->second.space());
        it = it->second.is_zero() ? corrections_.erase(it) : std::next(it);
    }
}

EulerDerivation EulerDerivation::moyal(PhaseSpace space) { return EulerDerivation(euler_vector_field(space), {}); }

DiffOp EulerDerivation::correction(int r) const {
    auto it = corrections_.find(r);
    return it == corrections_.end() ? DiffOp(space()) : it->second;
}

FormalScalar<DiffOp> EulerDerivation::operator_series(int order) const {
    std::vector<DiffOp> coeffs{x_};
    for (int r = 1; r <= order; ++r) coeffs.push_back(correction(r));
    return FormalScalar<DiffOp>(0, order, std::move(coeffs));
}

EulerDerivation EulerDerivation::plus_inner(const StarProduct& s, const Poly& a) const {
    // nu^{-1}(a * u - u * a) = sum_{r>=1} nu^{r-1} C_r^-(a, u); r = 1 is the Hamiltonian field {a, .}.
    DiffOp x = x_ + s.antisymmetric_cochain(1).with_left(a);
    std::map<int, DiffOp> corr = corrections_;
    for (int r = 2; r <= s.order(); ++r) {
        DiffOp extra = s.antisymmetric_cochain(r).with_left(a);
        auto [it, inserted] = corr.try_emplace(r - 1, extra);
        if (!inserted) it->second += extra;
    }
    // Anything the shift cannot determine is dropped.
    corr.erase(corr.lower_bound(s.order()), corr.end());
    return EulerDerivation(std::move(x), std::move(corr), nu_scaling_);
}

bool operator==(const EulerDerivation& a, const EulerDerivation& b) {
    return a.nu_scaling_ == b.nu_scaling_ && a.x_ == b.x_ && a.corrections_ == b.corrections_;
}

IntegralValue homogeneity_residual(const DiffOp& x, const GaussFn& u) {
    const Rational n(u.space().n());
    return integrate_exact(x.apply(u)) + n * integrate_exact(u);
}

}  // namespace startrace
