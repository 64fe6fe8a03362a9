#pragma once

// Sampled functions on a uniform box grid and the derivative / bracket decompositions
// of zero-integral compactly supported functions.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace startrace {

/// Default stencil order for grid differences and cumulative integrals.
inline constexpr int kGridAccuracy = 8;

/// Values on the box prod_i [-L_i, L_i] with `points` nodes per axis, row-major (last
/// axis fastest). The outermost `margin` cells on every side must hold zeros.
class GridFn {
public:
    GridFn(std::vector<double> half_widths, int points, int margin, std::vector<double> values);

    static GridFn zeros(std::vector<double> half_widths, int points, int margin);
    static GridFn sample(std::vector<double> half_widths, int points, int margin,
                         const std::function<double(std::span<const double>)>& f);

    int dimension() const { return static_cast<int>(half_widths_.size()); }
    int points() const { return points_; }
    int margin() const { return margin_; }
    const std::vector<double>& half_widths() const { return half_widths_; }
    double spacing(int axis) const;
    double coordinate(int axis, int i) const;
    std::size_t size() const { return values_.size(); }
    std::size_t stride(int axis) const;

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    /// Largest |value| inside the margin band.
    double margin_leak() const;
    /// Throws MarginViolation when margin_leak() > tol.
    void check_margin(double tol = 0.0) const;
    double sup_norm() const;
    bool same_shape(const GridFn& o) const;

    GridFn& operator+=(const GridFn& o);
    GridFn& operator-=(const GridFn& o);
    friend GridFn operator+(GridFn a, const GridFn& b) { return a += b; }
    friend GridFn operator-(GridFn a, const GridFn& b) { return a -= b; }
    friend GridFn operator*(const GridFn& a, const GridFn& b);
    friend GridFn operator*(double c, GridFn a);
    GridFn operator-() const { return -1.0 * *this; }

private:
    std::vector<double> half_widths_;
    int points_;
    int margin_;
    std::vector<double> values_;
};

/// Central difference of even order `accuracy` along `axis`; nodes whose stencil leaves
/// the grid get zero.
GridFn grid_diff(const GridFn& f, int axis, int accuracy = kGridAccuracy);

/// Composite Simpson over the box (an odd interval count closes with a trapezoid panel).
double grid_integrate(const GridFn& f);

/// F(x) = integral_{-L}^{x} f along `axis`, summing per-interval integrals of the local
/// interpolant through `accuracy` nodes (order 4 is h/24 (-1, 13, 13, -1)).
GridFn grid_cumulative(const GridFn& f, int axis, int accuracy = kGridAccuracy);

/// Full-box integral with the grid_cumulative rule (the value the decompositions need
/// to vanish for their components to stay compactly supported).
double grid_total(const GridFn& f, int accuracy = kGridAccuracy);

/// Integrates out the last axis with the rule used by grid_cumulative, so the marginal
/// equals the final value of the cumulative integral. Requires dimension >= 2.
GridFn grid_marginal(const GridFn& f, int accuracy = kGridAccuracy);

/// phi(t) = exp(-1 / (1 - t^2)) on |t| < 1, zero elsewhere.
double bump_profile(double t);

/// prod_i phi((x_i - centre_i) / radius), scaled so grid_total is 1.
GridFn bump_generate(std::vector<double> half_widths, int points, int margin, double radius,
                     std::vector<double> centre = {});

struct GsResult {
    std::vector<GridFn> components;  // g_1..g_N
    double residual = 0.0;           // sup |u - sum d_i g_i|
};

/// u = sum_i d_i g_i for zero-integral u. Throws PreconditionViolation when
/// |grid_total(u)| > 1e-8 * box volume and MarginViolation when u leaks into the margin.
GsResult gs_decompose(const GridFn& u, int accuracy = kGridAccuracy);

/// {f, g} = f_p g_q - f_q g_p on a 2D grid with axes (q, p).
GridFn grid_poisson(const GridFn& f, const GridFn& g, int accuracy = kGridAccuracy);

/// 1 on the node box [lo_i, hi_i], decaying smoothly to 0 at the grid boundary.
GridFn plateau_cutoff(const GridFn& like, const std::vector<int>& lo, const std::vector<int>& hi);

struct BracketPair {
    GridFn a;
    GridFn b;
};

struct BracketResult {
    std::vector<BracketPair> pairs;
    double residual = 0.0;  // sup |u - sum {a_j, b_j}|
};

/// u = sum_j {a_j, b_j} with b_j a cutoff times q or p, for zero-integral u on a 2D grid.
BracketResult bracket_decompose(const GridFn& u, int accuracy = kGridAccuracy);

struct BrwCheck {
    double functional_residual = 0.0;  // |sigma(u) - (int u / int phi) sigma(phi)|
    double bracket_functional = 0.0;   // |sum_j sigma({a_j, b_j})| for u0 = u - (int u / int phi) phi
    double reconstruction = 0.0;       // bracket residual of u0
};

/// sigma(f) = integral f d. For constant d both functional quantities vanish up to
/// quadrature error; for non-constant d they generally do not.
BrwCheck brw_check(const GridFn& u, const GridFn& phi, const GridFn& density, int accuracy = kGridAccuracy);

}  // namespace startrace
