#include "startrace/gsdecomp.hpp"

#include "startrace/errors.hpp"

#include "startrace/rational.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace startrace {

namespace {

std::size_t upow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

int node_index(const GridFn& f, std::size_t idx, int axis) {
    return static_cast<int>((idx / f.stride(axis)) % static_cast<std::size_t>(f.points()));
}

/// Calls fn(start) for the first node of every grid line parallel to `axis`.
template <class Fn>
void for_each_line(const GridFn& f, int axis, Fn&& fn) {
    const std::size_t stride = f.stride(axis);
    const auto p = static_cast<std::size_t>(f.points());
    for (std::size_t idx = 0; idx < f.size(); ++idx)
        if ((idx / stride) % p == 0) fn(idx);
}

void check_accuracy(int accuracy) {
    if (accuracy < 2 || accuracy > 12 || accuracy % 2 != 0)
        throw PreconditionViolation("grid accuracy must be an even order in 2..12");
}

/// Central-difference weights c_1..c_m for order 2m: f' ~ sum c_k (f_{i+k} - f_{i-k}) / h.
const std::vector<double>& diff_weights(int accuracy) {
    static std::map<int, std::vector<double>> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto& w = cache[accuracy];
    if (w.empty()) {
        const int m = accuracy / 2;
        for (int k = 1; k <= m; ++k) {
            const Rational c = Rational(k % 2 == 1 ? 1 : -1) * factorial(static_cast<unsigned>(m)) *
                               factorial(static_cast<unsigned>(m)) /
                               (Rational(k) * factorial(static_cast<unsigned>(m - k)) * factorial(static_cast<unsigned>(m + k)));
            w.push_back(c.convert_to<double>());
        }
    }
    return w;
}

/// Weights on nodes i-m+1..i+m for the integral over [x_i, x_{i+1}] (in units of h) of the
/// interpolating polynomial of degree 2m-1.
const std::vector<double>& interval_weights(int accuracy) {
    static std::map<int, std::vector<double>> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto& w = cache[accuracy];
    if (w.empty()) {
        const int m = accuracy / 2;
        for (int j = -m + 1; j <= m; ++j) {
            // Lagrange basis polynomial for node j, coefficients in ascending powers.
            std::vector<Rational> poly{Rational(1)};
            Rational denom = 1;
            for (int k = -m + 1; k <= m; ++k) {
                if (k == j) continue;
                std::vector<Rational> next(poly.size() + 1, Rational(0));
                for (std::size_t d = 0; d < poly.size(); ++d) {
                    next[d + 1] += poly[d];
                    next[d] -= Rational(k) * poly[d];
                }
                poly = std::move(next);
                denom *= Rational(j - k);
            }
            Rational integral = 0;
            for (std::size_t d = 0; d < poly.size(); ++d) integral += poly[d] / Rational(static_cast<long>(d + 1));
            w.push_back((integral / denom).convert_to<double>());
        }
    }
    return w;
}

/// Running interval-rule integral along one line; writes F_i when `out` is non-null and
/// returns the total. Nodes outside the grid count as zero.
double cumulate_line(const GridFn& f, std::size_t start, std::size_t stride, double h, int accuracy, double* out) {
    const int p = f.points();
    const int m = accuracy / 2;
    const std::vector<double>& w = interval_weights(accuracy);
    auto at = [&](int i) { return (i < 0 || i >= p) ? 0.0 : f[start + static_cast<std::size_t>(i) * stride]; };
    double acc = 0.0;
    if (out) out[0] = 0.0;
    for (int i = 0; i + 1 < p; ++i) {
        double panel = 0.0;
        for (int j = 0; j < 2 * m; ++j) panel += w[static_cast<std::size_t>(j)] * at(i - m + 1 + j);
        acc += h * panel;
        if (out) out[static_cast<std::size_t>(i + 1) * stride] = acc;
    }
    return acc;
}

std::vector<double> simpson_weights(int points, double h) {
    std::vector<double> w(static_cast<std::size_t>(points), 0.0);
    const int intervals = points - 1;
    const int simpson_end = intervals % 2 == 0 ? intervals : intervals - 1;
    for (int i = 0; i + 2 <= simpson_end; i += 2) {
        w[static_cast<std::size_t>(i)] += h / 3.0;
        w[static_cast<std::size_t>(i + 1)] += 4.0 * h / 3.0;
        w[static_cast<std::size_t>(i + 2)] += h / 3.0;
    }
    if (simpson_end != intervals) {
        w[static_cast<std::size_t>(intervals - 1)] += h / 2.0;
        w[static_cast<std::size_t>(intervals)] += h / 2.0;
    }
    return w;
}

/// out(x', t) = a(x') r(t), appending one axis.
GridFn extend(const GridFn& a, const std::vector<double>& r, double half_width) {
    std::vector<double> hw = a.half_widths();
    hw.push_back(half_width);
    std::vector<double> v;
    v.reserve(a.size() * r.size());
    for (double x : a.values())
        for (double y : r) v.push_back(x * y);
    return GridFn(std::move(hw), a.points(), a.margin(), std::move(v));
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

std::vector<GridFn> decompose(const GridFn& u, int accuracy) {
    const int n = u.dimension();
    if (n == 1) return {grid_cumulative(u, 0, accuracy)};
    const int last = n - 1;
    const double h = u.spacing(last);
    const double half = u.half_widths().back();
    const double radius = half - u.margin() * h;
    std::vector<double> r(static_cast<std::size_t>(u.points()));
    for (int i = 0; i < u.points(); ++i) r[static_cast<std::size_t>(i)] = bump_profile(u.coordinate(last, i) / radius);
    GridFn line({half}, u.points(), u.margin(), r);
    const double total = cumulate_line(line, 0, 1, h, accuracy, nullptr);
    for (double& x : r) x /= total;

    const GridFn w = grid_marginal(u, accuracy);
    std::vector<GridFn> sub = decompose(w, accuracy);
    std::vector<GridFn> out;
    for (const auto& g : sub) out.push_back(extend(g, r, half));
    out.push_back(grid_cumulative(u - extend(w, r, half), last, accuracy));
    return out;
}

std::pair<std::vector<int>, std::vector<int>> support_box(const GridFn& f, double threshold) {
    const int n = f.dimension();
    std::vector<int> lo(static_cast<std::size_t>(n), f.points()), hi(static_cast<std::size_t>(n), -1);
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        if (std::abs(f[idx]) <= threshold) continue;
        for (int a = 0; a < n; ++a) {
            const int i = node_index(f, idx, a);
            lo[static_cast<std::size_t>(a)] = std::min(lo[static_cast<std::size_t>(a)], i);
            hi[static_cast<std::size_t>(a)] = std::max(hi[static_cast<std::size_t>(a)], i);
        }
    }
    return {lo, hi};
}

}  // namespace

GridFn::GridFn(std::vector<double> half_widths, int points, int margin, std::vector<double> values)
    : half_widths_(std::move(half_widths)), points_(points), margin_(margin), values_(std::move(values)) {
    if (half_widths_.empty()) throw PreconditionViolation("grid needs at least one axis");
    for (double l : half_widths_)
        if (!(l > 0.0)) throw PreconditionViolation("grid half-widths must be positive");
    if (points_ < 5) throw PreconditionViolation("grid needs at least 5 points per axis");
    if (margin_ < 0 || 2 * margin_ >= points_) throw PreconditionViolation("grid margin does not fit");
    if (values_.size() != upow(static_cast<std::size_t>(points_), dimension()))
        throw DimensionMismatch("grid value count " + std::to_string(values_.size()) + " does not match shape");
}

GridFn GridFn::zeros(std::vector<double> half_widths, int points, int margin) {
    const std::size_t n = upow(static_cast<std::size_t>(points), static_cast<int>(half_widths.size()));
    return GridFn(std::move(half_widths), points, margin, std::vector<double>(n, 0.0));
}

GridFn GridFn::sample(std::vector<double> half_widths, int points, int margin,
                      const std::function<double(std::span<const double>)>& f) {
    GridFn g = zeros(std::move(half_widths), points, margin);
    std::vector<double> x(static_cast<std::size_t>(g.dimension()));
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        for (int a = 0; a < g.dimension(); ++a) x[static_cast<std::size_t>(a)] = g.coordinate(a, node_index(g, idx, a));
        g[idx] = f(x);
    }
    return g;
}

double GridFn::spacing(int axis) const {
    return 2.0 * half_widths_[static_cast<std::size_t>(axis)] / (points_ - 1);
}

double GridFn::coordinate(int axis, int i) const { return -half_widths_[static_cast<std::size_t>(axis)] + i * spacing(axis); }

std::size_t GridFn::stride(int axis) const {
    return upow(static_cast<std::size_t>(points_), dimension() - 1 - axis);
}

double GridFn::margin_leak() const {
    double leak = 0.0;
    for (std::size_t idx = 0; idx < size(); ++idx)
        for (int a = 0; a < dimension(); ++a) {
            const int i = node_index(*this, idx, a);
            if (i < margin_ || i >= points_ - margin_) {
                leak = std::max(leak, std::abs(values_[idx]));
                break;
            }
        }
    return leak;
}

void GridFn::check_margin(double tol) const {
    const double leak = margin_leak();
    if (leak > tol) throw MarginViolation("grid values reach the margin (|f| = " + std::to_string(leak) + ")");
}

double GridFn::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool GridFn::same_shape(const GridFn& o) const {
    return half_widths_ == o.half_widths_ && points_ == o.points_ && margin_ == o.margin_;
}

GridFn& GridFn::operator+=(const GridFn& o) {
    if (!same_shape(o)) throw DimensionMismatch("grid shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFn& GridFn::operator-=(const GridFn& o) {
    if (!same_shape(o)) throw DimensionMismatch("grid shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFn operator*(const GridFn& a, const GridFn& b) {
    if (!a.same_shape(b)) throw DimensionMismatch("grid shapes differ");
    GridFn r = a;
    for (std::size_t i = 0; i < r.values_.size(); ++i) r.values_[i] *= b.values_[i];
    return r;
}

GridFn operator*(double c, GridFn a) {
    for (double& v : a.values_) v *= c;
    return a;
}

GridFn grid_diff(const GridFn& f, int axis, int accuracy) {
    if (axis < 0 || axis >= f.dimension()) throw DimensionMismatch("axis outside grid");
    check_accuracy(accuracy);
    GridFn out = GridFn::zeros(f.half_widths(), f.points(), f.margin());
    const std::size_t s = f.stride(axis);
    const double h = f.spacing(axis);
    const int reach = accuracy / 2;
    const std::vector<double>& c = diff_weights(accuracy);
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        const int i = node_index(f, idx, axis);
        if (i < reach || i >= f.points() - reach) continue;
        double d = 0.0;
        for (int k = 1; k <= reach; ++k) {
            const std::size_t off = static_cast<std::size_t>(k) * s;
            d += c[static_cast<std::size_t>(k - 1)] * (f[idx + off] - f[idx - off]);
        }
        out[idx] = d / h;
    }
    return out;
}

double grid_integrate(const GridFn& f) {
    std::vector<std::vector<double>> w;
    for (int a = 0; a < f.dimension(); ++a) w.push_back(simpson_weights(f.points(), f.spacing(a)));
    double sum = 0.0;
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        double wt = 1.0;
        for (int a = 0; a < f.dimension(); ++a) wt *= w[static_cast<std::size_t>(a)][static_cast<std::size_t>(node_index(f, idx, a))];
        sum += wt * f[idx];
    }
    return sum;
}

GridFn grid_cumulative(const GridFn& f, int axis, int accuracy) {
    if (axis < 0 || axis >= f.dimension()) throw DimensionMismatch("axis outside grid");
    check_accuracy(accuracy);
    GridFn out = GridFn::zeros(f.half_widths(), f.points(), f.margin());
    const std::size_t s = f.stride(axis);
    const double h = f.spacing(axis);
    for_each_line(f, axis, [&](std::size_t start) { cumulate_line(f, start, s, h, accuracy, out.values().data() + start); });
    return out;
}

double grid_total(const GridFn& f, int accuracy) {
    check_accuracy(accuracy);
    GridFn g = f;
    while (g.dimension() > 1) g = grid_marginal(g, accuracy);
    return cumulate_line(g, 0, 1, g.spacing(0), accuracy, nullptr);
}

GridFn grid_marginal(const GridFn& f, int accuracy) {
    if (f.dimension() < 2) throw DimensionMismatch("marginal needs at least two axes");
    check_accuracy(accuracy);
    const int last = f.dimension() - 1;
    std::vector<double> hw(f.half_widths().begin(), f.half_widths().end() - 1);
    GridFn out = GridFn::zeros(std::move(hw), f.points(), f.margin());
    const double h = f.spacing(last);
    const auto p = static_cast<std::size_t>(f.points());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = cumulate_line(f, j * p, 1, h, accuracy, nullptr);
    return out;
}

double bump_profile(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

GridFn bump_generate(std::vector<double> half_widths, int points, int margin, double radius, std::vector<double> centre) {
    if (centre.empty()) centre.assign(half_widths.size(), 0.0);
    if (centre.size() != half_widths.size()) throw DimensionMismatch("bump centre has wrong length");
    if (!(radius > 0.0)) throw PreconditionViolation("bump radius must be positive");
    for (std::size_t a = 0; a < half_widths.size(); ++a) {
        const double h = 2.0 * half_widths[a] / (points - 1);
        if (std::abs(centre[a]) + radius > half_widths[a] - margin * h)
            throw PreconditionViolation("bump support does not fit inside the margin");
    }
    GridFn g = GridFn::sample(std::move(half_widths), points, margin, [&](std::span<const double> x) {
        double v = 1.0;
        for (std::size_t a = 0; a < x.size(); ++a) v *= bump_profile((x[a] - centre[a]) / radius);
        return v;
    });
    return (1.0 / grid_total(g)) * g;
}

GsResult gs_decompose(const GridFn& u, int accuracy) {
    check_accuracy(accuracy);
    u.check_margin();
    double volume = 1.0;
    for (double l : u.half_widths()) volume *= 2.0 * l;
    const double integral = grid_total(u, accuracy);
    if (std::abs(integral) > 1e-8 * volume)
        throw PreconditionViolation("input integral " + std::to_string(integral) + " is not zero");
    GsResult res;
    res.components = decompose(u, accuracy);
    GridFn recon = GridFn::zeros(u.half_widths(), u.points(), u.margin());
    for (int i = 0; i < u.dimension(); ++i) recon += grid_diff(res.components[static_cast<std::size_t>(i)], i, accuracy);
    res.residual = (u - recon).sup_norm();
    return res;
}

GridFn grid_poisson(const GridFn& f, const GridFn& g, int accuracy) {
    if (f.dimension() != 2) throw DimensionMismatch("Poisson bracket grids must be two-dimensional");
    return grid_diff(f, 1, accuracy) * grid_diff(g, 0, accuracy) - grid_diff(f, 0, accuracy) * grid_diff(g, 1, accuracy);
}

GridFn plateau_cutoff(const GridFn& like, const std::vector<int>& lo, const std::vector<int>& hi) {
    const int p = like.points();
    std::vector<std::vector<double>> prof;
    for (int a = 0; a < like.dimension(); ++a) {
        const int l = lo[static_cast<std::size_t>(a)], u = hi[static_cast<std::size_t>(a)];
        std::vector<double> s(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) {
            double v = 1.0;
            if (i < l) v = smooth_step(static_cast<double>(i) / l);
            if (i > u) v = smooth_step(static_cast<double>(p - 1 - i) / (p - 1 - u));
            s[static_cast<std::size_t>(i)] = v;
        }
        prof.push_back(std::move(s));
    }
    GridFn out = GridFn::zeros(like.half_widths(), p, like.margin());
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
        double v = 1.0;
        for (int a = 0; a < like.dimension(); ++a) v *= prof[static_cast<std::size_t>(a)][static_cast<std::size_t>(node_index(out, idx, a))];
        out[idx] = v;
    }
    return out;
}

BracketResult bracket_decompose(const GridFn& u, int accuracy) {
    if (u.dimension() != 2) throw DimensionMismatch("bracket decomposition needs a (q, p) grid");
    const GsResult gs = gs_decompose(u, accuracy);
    const int pad = accuracy / 2 + 1;
    const GridFn q = GridFn::sample(u.half_widths(), u.points(), u.margin(), [](std::span<const double> x) { return x[0]; });
    const GridFn p = GridFn::sample(u.half_widths(), u.points(), u.margin(), [](std::span<const double> x) { return x[1]; });
    // {g_p, s q} = d_p g_p and {-g_q, s p} = d_q g_q wherever s == 1 around the support.
    const std::pair<GridFn, const GridFn*> raw[] = {{gs.components[1], &q}, {-gs.components[0], &p}};
    const double scale = std::max(u.sup_norm(), 1.0);
    BracketResult res;
    GridFn recon = GridFn::zeros(u.half_widths(), u.points(), u.margin());
    for (const auto& [a, coord] : raw) {
        if (a.sup_norm() <= 1e-13 * scale) continue;
        auto [lo, hi] = support_box(a, 1e-13 * scale);
        for (auto& l : lo) l = std::max(l - pad, 0);
        for (auto& h : hi) h = std::min(h + pad, u.points() - 1);
        GridFn b = plateau_cutoff(u, lo, hi) * *coord;
        recon += grid_poisson(a, b, accuracy);
        res.pairs.push_back({a, std::move(b)});
    }
    res.residual = (u - recon).sup_norm();
    return res;
}

BrwCheck brw_check(const GridFn& u, const GridFn& phi, const GridFn& density, int accuracy) {
    const double int_phi = grid_total(phi, accuracy);
    if (int_phi == 0.0) throw PreconditionViolation("reference function has zero integral");
    const double c = grid_total(u, accuracy) / int_phi;
    auto sigma = [&](const GridFn& f) { return grid_total(f * density, accuracy); };
    BrwCheck out;
    out.functional_residual = std::abs(sigma(u) - c * sigma(phi));
    const BracketResult br = bracket_decompose(u - c * phi, accuracy);
    double total = 0.0;
    for (const auto& [a, b] : br.pairs) total += sigma(grid_poisson(a, b, accuracy));
    out.bracket_functional = std::abs(total);
    out.reconstruction = br.residual;
    return out;
}

}  // namespace startrace
