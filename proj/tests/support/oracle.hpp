#pragma once

// Independent reference implementations for tests. Nothing here calls the library's
// algebra: polynomials are plain exponent maps, Moyal terms are brute-force index sums,
// integrals are tensor trapezoid sums in long double.

#include "startrace/rational.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using startrace::Rational;

/// Polynomial in `dim` variables as exponent vector -> coefficient.
struct DensePoly {
    int dim = 0;
    std::map<std::vector<int>, Rational> c;

    explicit DensePoly(int d) : dim(d) {}

    static DensePoly constant(int d, const Rational& r) {
        DensePoly p(d);
        if (r != 0) p.c[std::vector<int>(static_cast<std::size_t>(d), 0)] = r;
        return p;
    }
    static DensePoly var(int d, int i) {
        DensePoly p(d);
        std::vector<int> e(static_cast<std::size_t>(d), 0);
        e[static_cast<std::size_t>(i)] = 1;
        p.c[e] = 1;
        return p;
    }

    void add(const std::vector<int>& e, const Rational& r) {
        auto& slot = c[e];
        slot += r;
        if (slot == 0) c.erase(e);
    }
    friend DensePoly operator+(DensePoly a, const DensePoly& b) {
        for (const auto& [e, r] : b.c) a.add(e, r);
        return a;
    }
    friend DensePoly operator-(DensePoly a, const DensePoly& b) {
        for (const auto& [e, r] : b.c) a.add(e, -r);
        return a;
    }
    friend DensePoly operator*(const DensePoly& a, const DensePoly& b) {
        DensePoly out(a.dim);
        for (const auto& [ea, ra] : a.c)
            for (const auto& [eb, rb] : b.c) {
                std::vector<int> e(ea);
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                out.add(e, ra * rb);
            }
        return out;
    }
    friend DensePoly operator*(const Rational& s, DensePoly a) {
        if (s == 0) return DensePoly(a.dim);
        for (auto& [e, r] : a.c) r *= s;
        return a;
    }
    DensePoly diff(int i) const {
        DensePoly out(dim);
        for (const auto& [e, r] : c) {
            if (e[static_cast<std::size_t>(i)] == 0) continue;
            std::vector<int> f(e);
            --f[static_cast<std::size_t>(i)];
            out.add(f, r * e[static_cast<std::size_t>(i)]);
        }
        return out;
    }
    DensePoly diff(const std::vector<int>& alpha) const {
        DensePoly out = *this;
        for (std::size_t i = 0; i < alpha.size(); ++i)
            for (int k = 0; k < alpha[i]; ++k) out = out.diff(static_cast<int>(i));
        return out;
    }
    bool is_zero() const { return c.empty(); }
    friend bool operator==(const DensePoly& a, const DensePoly& b) { return a.c == b.c; }

    long double eval(const std::vector<long double>& x) const {
        long double s = 0;
        for (const auto& [e, r] : c) {
            long double m = static_cast<long double>(r.convert_to<double>());
            for (std::size_t i = 0; i < e.size(); ++i) m *= std::pow(x[i], e[i]);
            s += m;
        }
        return s;
    }
};

/// Lambda^{ab} for {f,g} = sum_i f_{p_i} g_{q_i} - f_{q_i} g_{p_i} (variables q_1..q_n, p_1..p_n).
inline int lambda(int n, int a, int b) {
    if (a >= n && b == a - n) return 1;
    if (a < n && b == a + n) return -1;
    return 0;
}

inline DensePoly poisson(int n, const DensePoly& f, const DensePoly& g) {
    DensePoly out(2 * n);
    for (int i = 0; i < n; ++i) out = out + f.diff(n + i) * g.diff(i) - f.diff(i) * g.diff(n + i);
    return out;
}

/// Moyal C_k(u, v) = 1/(2^k k!) sum Lambda^{a1 b1}..Lambda^{ak bk} d_{a1..ak} u d_{b1..bk} v,
/// summed over all index tuples.
inline DensePoly moyal_cochain(int n, int k, const DensePoly& u, const DensePoly& v) {
    const int dim = 2 * n;
    DensePoly out(dim);
    std::vector<int> a(static_cast<std::size_t>(k), 0);
    Rational norm = 1;
    for (int j = 1; j <= k; ++j) norm *= 2 * j;
    const int pairs = dim * dim;
    long long total = 1;
    for (int j = 0; j < k; ++j) total *= pairs;
    for (long long idx = 0; idx < total; ++idx) {
        long long rest = idx;
        int sign = 1;
        std::vector<int> al(static_cast<std::size_t>(dim), 0), be(static_cast<std::size_t>(dim), 0);
        for (int j = 0; j < k && sign != 0; ++j) {
            const int pr = static_cast<int>(rest % pairs);
            rest /= pairs;
            const int x = pr / dim, y = pr % dim;
            sign *= lambda(n, x, y);
            ++al[static_cast<std::size_t>(x)];
            ++be[static_cast<std::size_t>(y)];
        }
        if (sign == 0) continue;
        out = out + (Rational(sign) / norm) * (u.diff(al) * v.diff(be));
    }
    return out;
}

/// Truncated Moyal product sum_{k<=order} nu^k C_k(u, v), as coefficient list.
inline std::vector<DensePoly> moyal_product(int n, int order, const DensePoly& u, const DensePoly& v) {
    std::vector<DensePoly> out;
    for (int k = 0; k <= order; ++k) out.push_back(moyal_cochain(n, k, u, v));
    return out;
}

/// Tensor trapezoid rule on [-R, R]^dim with `m` points per axis; spectrally accurate for
/// smooth rapidly decaying integrands.
inline long double quadrature(int dim, const std::function<long double(const std::vector<long double>&)>& f,
                              long double radius = 12.0L, int m = 241) {
    const long double h = 2 * radius / (m - 1);
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    std::vector<long double> x(static_cast<std::size_t>(dim));
    long double sum = 0;
    for (;;) {
        for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] = -radius + h * idx[static_cast<std::size_t>(i)];
        sum += f(x);
        int i = 0;
        while (i < dim && ++idx[static_cast<std::size_t>(i)] == m) idx[static_cast<std::size_t>(i++)] = 0;
        if (i == dim) break;
    }
    return sum * std::pow(h, dim);
}

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

}  // namespace oracle
