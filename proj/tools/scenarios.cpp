#include "scenarios.hpp"

#include "startrace/equiv.hpp"
#include "startrace/errors.hpp"
#include "startrace/gsdecomp.hpp"
#include "startrace/io.hpp"
#include "startrace/star.hpp"
#include "startrace/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <thread>

namespace startrace::cli {

namespace {

using Job = std::function<CaseResult()>;

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

std::string sci(const BigFloat& x) {
    if (x == 0) return "0";
    return x.str(6, std::ios_base::scientific);
}

/// Runs jobs on a few threads; results come back in job order.
std::vector<CaseResult> run_jobs(const std::vector<Job>& jobs, bool parallel) {
    auto guarded = [](const Job& job) {
        try {
            return job();
        } catch (const Error& e) {
            CaseResult c;
            c.id = "?";
            c.pass = false;
            c.note = e.what();
            return c;
        }
    };
    std::vector<CaseResult> out(jobs.size());
    if (!parallel) {
        for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = guarded(jobs[i]);
        return out;
    }
    const std::size_t width = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    for (std::size_t start = 0; start < jobs.size(); start += width) {
        std::vector<std::future<CaseResult>> batch;
        for (std::size_t i = start; i < std::min(jobs.size(), start + width); ++i)
            batch.push_back(std::async(std::launch::async, guarded, std::cref(jobs[i])));
        for (std::size_t i = 0; i < batch.size(); ++i) out[start + i] = batch[i].get();
    }
    return out;
}

/// Wraps a job so a thrown error keeps the case id.
Job named(std::string id, std::function<CaseResult()> f) {
    return [id, f = std::move(f)] {
        try {
            CaseResult c = f();
            c.id = id;
            return c;
        } catch (const Error& e) {
            CaseResult c;
            c.id = id;
            c.pass = false;
            c.note = e.what();
            return c;
        }
    };
}

template <class R>
void add_exact(CaseResult& c, const std::string& label, const R& value) {
    const bool zero = RingTraits<R>::is_zero(value);
    c.residuals.emplace_back(label, zero ? "0" : RingTraits<R>::to_string(value));
    if (!zero) {
        c.pass = false;
        c.failed_orders.push_back(label);
    }
}

/// Every coefficient nu^lo .. nu^order of r must vanish. Labels are "<prefix> nu^k".
template <class R>
void add_exact_series(CaseResult& c, const FormalScalar<R>& r, int lo, const std::string& prefix = "") {
    const std::string head = prefix.empty() ? "" : prefix + " ";
    for (int k = std::min(lo, r.min_degree()); k <= r.order(); ++k)
        add_exact(c, head + "nu^" + std::to_string(k), r.coeff(k));
}

void add_numeric(CaseResult& c, const std::string& label, double value, double tol) {
    c.residuals.emplace_back(label, sci(value));
    if (!(value <= tol)) {
        c.pass = false;
        c.failed_orders.push_back(label);
    }
}

// ------------------------------------------------------------ random inputs

class Generator {
public:
    Generator(PhaseSpace space, std::uint64_t seed) : space_(space), rng_(seed) {}

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    MultiIndex exponent(int max_degree) {
        MultiIndex a;
        const int d = pick(0, max_degree);
        for (int j = 0; j < d; ++j) {
            const int v = pick(0, space_.dimension() - 1);
            a.set(v, a[v] + 1);
        }
        return a;
    }

    Poly monomial(int min_degree, int max_degree) {
        MultiIndex a;
        const int d = pick(min_degree, max_degree);
        for (int j = 0; j < d; ++j) {
            const int v = pick(0, space_.dimension() - 1);
            a.set(v, a[v] + 1);
        }
        return Poly::monomial(space_, a, Rational(pick(1, 3)));
    }

    Poly poly(int max_degree, int terms) {
        Poly p(space_);
        for (int i = 0; i < terms; ++i) p.add_term(exponent(max_degree), Rational(pick(-3, 3), pick(1, 2)));
        return p.is_zero() ? Poly(space_, Rational(1)) : p;
    }

    /// P(x) exp(-t|x|^2/2 + b.x) with t in {1/2, 1, 2}, small b, deg P <= 2.
    GaussFn gauss() {
        static const Rational widths[] = {Rational(1, 2), Rational(1), Rational(2)};
        std::vector<Rational> b(static_cast<std::size_t>(space_.dimension()));
        for (auto& x : b) x = Rational(pick(-1, 1), 2);
        return GaussFn::gaussian(poly(2, 3), widths[pick(0, 2)], std::move(b));
    }

private:
    PhaseSpace space_;
    std::mt19937_64 rng_;
};

// ------------------------------------------------------------ shared inputs

std::vector<Equivalence> equivalences(const Scenario& s, PhaseSpace space, int count) {
    if (!s.equiv_file.empty()) return {equivalence_from_json(read_text_file(s.equiv_file), space, s.order)};
    std::vector<Equivalence> out;
    for (int i = 0; i < count; ++i) out.push_back(random_equivalence(space, s.order, s.seed + static_cast<std::uint64_t>(i)));
    return out;
}

std::vector<GaussFn> probes(const Scenario& s, PhaseSpace space) {
    if (!s.probes_file.empty()) return probes_from_json(read_text_file(s.probes_file), space);
    return default_probes(space);
}

std::string equiv_id(const Scenario& s, std::size_t i) {
    return s.equiv_file.empty() ? "T[seed=" + std::to_string(s.seed + i) + "]" : "T[file]";
}

/// (q_i, p_i) -> (c q_i + s p_i, -s q_i + c p_i) on every pair.
RationalMatrix rotation(PhaseSpace space, const Rational& c, const Rational& sn) {
    const auto n = static_cast<std::size_t>(space.n());
    RationalMatrix m(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = c;
        m(i, n + i) = sn;
        m(n + i, i) = -sn;
        m(n + i, n + i) = c;
    }
    return m;
}

/// The same 2x2 block (acting on (q_i, p_i)) on every pair.
RationalMatrix blocks(PhaseSpace space, const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
    const auto n = static_cast<std::size_t>(space.n());
    RationalMatrix m(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = a;
        m(i, n + i) = b;
        m(n + i, i) = c;
        m(n + i, n + i) = d;
    }
    return m;
}

/// sum p_i d/dq_i: the Hamiltonian field {H, .} of H = |p|^2/2, a shear.
DiffOp shear_field(PhaseSpace space) {
    DiffOp l(space);
    for (int i = 0; i < space.n(); ++i) l.add_term(MultiIndex::unit(space.q(i)), Poly::variable(space, space.p(i)));
    return l;
}

// ------------------------------------------------------------ exact scenarios

Report associativity(const Scenario& s, PhaseSpace space) {
    const StarProduct moyal = StarProduct::moyal(space, s.order);
    Generator gen(space, s.seed);
    std::vector<Job> jobs;
    for (int i = 0; i < 20; ++i) {
        const Poly u = gen.monomial(1, 4), v = gen.monomial(1, 4), w = gen.monomial(1, 4);
        const std::string id = "(" + u.to_string() + ", " + v.to_string() + ", " + w.to_string() + ")";
        jobs.push_back(named(id, [=] {
            CaseResult c;
            add_exact_series(c, associativity_residual(moyal, u, v, w), 0);
            return c;
        }));
    }
    return {s.name, {}, run_jobs(jobs, true)};
}

Report moyal_trace(const Scenario& s, PhaseSpace space) {
    const StarProduct moyal = StarProduct::moyal(space, s.order);
    const TraceFunctional tau = TraceFunctional::moyal(space, s.order);
    Generator gen(space, s.seed);
    std::vector<Job> jobs;
    for (int i = 0; i < 10; ++i) {
        const GaussFn u = gen.gauss(), v = gen.gauss();
        jobs.push_back(named("pair " + std::to_string(i + 1), [=] {
            CaseResult c;
            add_exact_series(c, trace_residual(tau, moyal, u, v), tau.prefactor());
            return c;
        }));
    }
    return {s.name, {}, run_jobs(jobs, true)};
}

Report strongly_closed(const Scenario& s, PhaseSpace space) {
    const StarProduct moyal = StarProduct::moyal(space, s.order);
    Generator gen(space, s.seed);
    std::vector<Job> jobs;
    for (int i = 0; i < 10; ++i) {
        const GaussFn u = gen.gauss(), v = gen.gauss();
        jobs.push_back(named("pair " + std::to_string(i + 1), [=] {
            CaseResult c;
            for (int r = 1; r <= moyal.order(); ++r) add_exact(c, "r=" + std::to_string(r), closedness_integral(moyal, r, u, v));
            return c;
        }));
    }
    return {s.name, {}, run_jobs(jobs, true)};
}

Report homogeneity(const Scenario& s, PhaseSpace space) {
    const TraceFunctional tau = TraceFunctional::moyal(space, s.order);
    const EulerDerivation d = EulerDerivation::moyal(space);
    std::vector<Job> jobs;
    // tau_M(exp(-|x|^2/2)) = (2 pi)^n nu^-n and tau_M(D_M u) = -n (2 pi)^n nu^-n.
    jobs.push_back(named("worked value", [=] {
        const GaussFn g = GaussFn::standard(space);
        const IntegralValue expected = IntegralValue::term(ipow(Rational(2), space.n()), Rational(0), space.n());
        const int n = space.n();
        CaseResult c;
        add_exact_series(c, tau.evaluate(g) - ValueSeries::monomial(expected, -n, tau.order() - n), -n, "tau(u)");
        const ValueSeries lhs = tau.evaluate(d.apply(GaussSeries::constant(g, tau.order())));
        add_exact_series(c, lhs - ValueSeries::monomial(Rational(-n) * expected, -n, tau.order() - n), -n, "tau(Du)");
        c.note = "tau(u) = " + tau.evaluate(g).to_string() + ", tau(D u) = " + lhs.to_string();
        return c;
    }));
    int i = 0;
    for (const GaussFn& u : probes(s, space)) {
        jobs.push_back(named("probe " + std::to_string(++i), [=] {
            CaseResult c;
            add_exact_series(c, normalization_residual(tau, d, GaussSeries::constant(u, tau.order())), tau.prefactor());
            add_exact(c, "integral(Xu) + n integral(u)", homogeneity_residual(d.vector_field(), u));
            return c;
        }));
    }
    return {s.name, {}, run_jobs(jobs, true)};
}

Report transport_trace(const Scenario& s, PhaseSpace space) {
    const StarProduct moyal = StarProduct::moyal(space, s.order);
    std::vector<Job> jobs;
    const auto ts = equivalences(s, space, 5);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const Equivalence t = ts[i];
        Generator gen(space, s.seed + 1000 + i);
        std::vector<std::pair<GaussFn, GaussFn>> pairs;
        for (int j = 0; j < 3; ++j) pairs.emplace_back(gen.gauss(), gen.gauss());
        jobs.push_back(named(equiv_id(s, i), [=] {
            const StarProduct star = transport_star(t, moyal);
            const TraceFunctional tau = density_from_equivalence(t);
            CaseResult c;
            for (std::size_t j = 0; j < pairs.size(); ++j)
                add_exact_series(c, trace_residual(tau, star, pairs[j].first, pairs[j].second), tau.prefactor(),
                                 "pair" + std::to_string(j + 1));
            c.note = "density " + tau.density().to_string();
            return c;
        }));
    }
    return {s.name, {}, run_jobs(jobs, true)};
}

Report normalized_uniqueness(const Scenario& s, PhaseSpace space) {
    const StarProduct moyal = StarProduct::moyal(space, s.order);
    const TraceFunctional tau_m = TraceFunctional::moyal(space, s.order);
    const EulerDerivation dm = EulerDerivation::moyal(space);
    const auto battery = probes(s, space);
    const RationalMatrix a = rotation(space, Rational(3, 5), Rational(4, 5));
    const Equivalence e = Equivalence::exponential(shear_field(space), s.order);
    std::vector<Job> jobs;
    const auto ts = equivalences(s, space, 5);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const Equivalence t = ts[i];
        const std::string id = equiv_id(s, i);
        // Pulled-back Moyal trace is normalised for the transported D.
        jobs.push_back(named(id + " normalised", [=] {
            const TraceFunctional tau = density_from_equivalence(t);
            const EulerDerivation d = transport_euler(t, dm);
            CaseResult c;
            for (std::size_t j = 0; j < battery.size(); ++j)
                add_exact_series(c, normalization_residual(tau, d, GaussSeries::constant(battery[j], s.order)),
                                 tau.prefactor(), "probe" + std::to_string(j + 1));
            return c;
        }));
        // A o T with A a rotation: the same product, traced via tau_M o A o T.
        jobs.push_back(named(id + " vs A o T", [=] {
            const StarProduct star = transport_star(t, moyal);
            const StarProduct star2 = transport_star(t, pullback_star(moyal, a));
            const TraceFunctional t1 = density_from_equivalence(t);
            const TraceFunctional t2 = pullback_trace(pullback_trace(tau_m, a), t);
            const EulerDerivation d2 = transport_euler(t, pullback_euler(dm, a));
            CaseResult c;
            for (int r = 1; r <= s.order; ++r) add_exact(c, "C_" + std::to_string(r) + " difference", star.cochain(r) - star2.cochain(r));
            for (std::size_t j = 0; j < battery.size(); ++j)
                add_exact_series(c, normalization_residual(t2, d2, GaussSeries::constant(battery[j], s.order)),
                                 t2.prefactor(), "probe" + std::to_string(j + 1));
            add_exact_series(c, proportionality_factor(t1, t2, battery) - RationalSeries::constant(Rational(1), s.order), 0,
                             "c-1");
            return c;
        }));
        // exp(nu L) o T with L a linear Hamiltonian field: a different D, same product.
        jobs.push_back(named(id + " vs exp(nu L) o T", [=] {
            const Equivalence t2 = compose(e, t);
            const StarProduct star = transport_star(t, moyal);
            const StarProduct star2 = transport_star(t2, moyal);
            const TraceFunctional tau1 = density_from_equivalence(t);
            const TraceFunctional tau2 = density_from_equivalence(t2);
            const EulerDerivation d2 = transport_euler(t2, dm);
            CaseResult c;
            for (int r = 1; r <= s.order; ++r) add_exact(c, "C_" + std::to_string(r) + " difference", star.cochain(r) - star2.cochain(r));
            for (std::size_t j = 0; j < battery.size(); ++j)
                add_exact_series(c, normalization_residual(tau2, d2, GaussSeries::constant(battery[j], s.order)),
                                 tau2.prefactor(), "probe" + std::to_string(j + 1));
            add_exact_series(c, proportionality_factor(tau1, tau2, battery) - RationalSeries::constant(Rational(1), s.order),
                             0, "c-1");
            c.note = d2 == transport_euler(t, dm) ? "same derivation" : "different derivation";
            return c;
        }));
    }
    return {s.name, {}, run_jobs(jobs, true)};
}

Report proportionality(const Scenario& s, PhaseSpace space) {
    const int k = s.order;
    const auto battery = probes(s, space);
    const Equivalence t = s.equiv_file.empty() ? random_equivalence(space, k, s.seed) : equivalences(s, space, 1).front();
    const TraceFunctional t1 = density_from_equivalence(t);
    auto scaled = [&](const RationalSeries& c) {
        const PolySeries rho = cauchy(c, t1.density(), [](const Rational& r, const Poly& p) { return r * p; });
        return TraceFunctional(space, rho, t1.prefactor());
    };
    auto factor_case = [&](const std::string& id, RationalSeries c) {
        return named(id, [=] {
            CaseResult r;
            const RationalSeries got = proportionality_factor(t1, scaled(c), battery);
            add_exact_series(r, got - c, std::min(0, c.min_degree()));
            r.note = "recovered " + got.to_string();
            return r;
        });
    };
    std::vector<Job> jobs;
    jobs.push_back(factor_case("c = 1 + 3nu - 1/2 nu^3",
                               RationalSeries(0, k, {Rational(1), Rational(3), Rational(0), Rational(-1, 2)})));
    jobs.push_back(factor_case("c = 1", RationalSeries::constant(Rational(1), k)));
    jobs.push_back(factor_case("c = nu^2", RationalSeries::monomial(Rational(1), 2, k)));
    jobs.push_back(factor_case("c = 2 nu^-1 + 5", RationalSeries(-1, k, {Rational(2), Rational(5)})));
    // The Moyal trace against the trace of a product with density 1 - 2 nu q1.
    jobs.push_back(named("inconsistent pair", [=] {
        std::map<int, DiffOp> terms;
        terms.emplace(1, DiffOp::derivative(Poly::variable(space, space.q(0)).pow(2), MultiIndex::unit(space.q(0))));
        const TraceFunctional other = density_from_equivalence(Equivalence(space, k, terms));
        CaseResult c;
        try {
            const RationalSeries got = proportionality_factor(TraceFunctional::moyal(space, k), other, battery);
            c.pass = false;
            c.note = "no inconsistency detected, factor " + got.to_string();
        } catch (const InconsistentRatio& e) {
            c.note = std::string("detected: ") + e.what();
        }
        c.residuals.emplace_back("detected", c.pass ? "yes" : "no");
        return c;
    }));
    return {s.name, {}, run_jobs(jobs, true)};
}

Report trk_conditions(const Scenario& s, PhaseSpace space) {
    const StarProduct moyal = StarProduct::moyal(space, s.order);
    const Equivalence t = s.equiv_file.empty() ? random_equivalence(space, s.order, s.seed) : equivalences(s, space, 1).front();
    Generator gen(space, s.seed + 7);
    std::vector<std::pair<GaussFn, GaussFn>> pairs;
    for (int j = 0; j < 3; ++j) pairs.emplace_back(gen.gauss(), gen.gauss());
    std::vector<Job> jobs;
    auto make = [&](const std::string& id, std::function<std::pair<StarProduct, TraceFunctional>()> build) {
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            const auto [u, v] = pairs[j];
            jobs.push_back(named(id + " pair " + std::to_string(j + 1), [=] {
                const auto [star, tau] = build();
                CaseResult c;
                const ValueSeries full = trace_residual(tau, star, u, v);
                for (int k = 0; k < star.order(); ++k) {
                    const IntegralValue r = trk_residual(tau, star, k, u, v);
                    add_exact(c, "k=" + std::to_string(k), r);
                    if (!(r == full.coeff(tau.prefactor() + k + 1))) {
                        c.pass = false;
                        c.note = "order-k value disagrees with the trace residual at k=" + std::to_string(k);
                    }
                }
                return c;
            }));
        }
    };
    make("moyal", [=] { return std::pair{moyal, TraceFunctional::moyal(space, s.order)}; });
    make("transported", [=] { return std::pair{transport_star(t, moyal), density_from_equivalence(t)}; });
    return {s.name, {}, run_jobs(jobs, true)};
}

Report automorphism_invariance(const Scenario& s, PhaseSpace space) {
    const double tol = s.tolerance.value_or(1e-40);
    Generator gen(space, s.seed);
    std::vector<GaussFn> fns{GaussFn::standard(space)};
    for (int i = 0; i < 2; ++i) fns.push_back(gen.gauss());
    const std::vector<std::pair<std::string, RationalMatrix>> orthogonal{
        {"rotation (q,p)->(p,-q)", rotation(space, Rational(0), Rational(1))},
        {"rotation 3/5, 4/5", rotation(space, Rational(3, 5), Rational(4, 5))},
        {"rotation -8/17, 15/17", rotation(space, Rational(-8, 17), Rational(15, 17))},
    };
    const std::vector<std::pair<std::string, RationalMatrix>> general{
        {"diag(2, 1/2)", blocks(space, Rational(2), Rational(0), Rational(0), Rational(1, 2))},
        {"shear q+p", blocks(space, Rational(1), Rational(1), Rational(0), Rational(1))},
        {"shear p-2q", blocks(space, Rational(1), Rational(0), Rational(-2), Rational(1))},
        {"[[2,1],[1,1]]", blocks(space, Rational(2), Rational(1), Rational(1), Rational(1))},
        {"[[3,5],[1,2]]", blocks(space, Rational(3), Rational(5), Rational(1), Rational(2))},
    };
    std::vector<Job> jobs;
    for (const auto& [name, m] : orthogonal)
        jobs.push_back(named(name, [=] {
            CaseResult c;
            for (std::size_t j = 0; j < fns.size(); ++j) {
                const BigFloat r = symplectic_automorphism_check(m, fns[j]);
                c.residuals.emplace_back("u" + std::to_string(j + 1), sci(r));
                if (r != 0) {
                    c.pass = false;
                    c.failed_orders.push_back("u" + std::to_string(j + 1));
                }
            }
            return c;
        }));
    for (const auto& [name, m] : general)
        jobs.push_back(named(name, [=] {
            CaseResult c;
            for (std::size_t j = 0; j < fns.size(); ++j) {
                const BigFloat r = symplectic_automorphism_check(m, fns[j], 50);
                c.residuals.emplace_back("u" + std::to_string(j + 1), sci(r));
                if (!(r <= tol)) {
                    c.pass = false;
                    c.failed_orders.push_back("u" + std::to_string(j + 1));
                }
            }
            return c;
        }));
    // MPFR default precision is process state; keep these sequential.
    return {s.name, {{"tolerance", sci(tol)}}, run_jobs(jobs, false)};
}

// ------------------------------------------------------------ grid scenarios

constexpr int kMargin = 5;

double dbump(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    const double d = 1.0 - t * t;
    return bump_profile(t) * (-2.0 * t / (d * d));
}

/// Subtracts the multiple of a centred bump that makes the grid integral vanish.
GridFn project(const GridFn& u) {
    const GridFn b = bump_generate(u.half_widths(), u.points(), u.margin(), 0.5);
    return u - (grid_total(u) / grid_total(b)) * b;
}

/// d/dx phi(x / 0.9) on [-1, 1].
GridFn bump_derivative_1d(int points) {
    return project(GridFn::sample({1.0}, points, kMargin, [](std::span<const double> x) { return dbump(x[0] / 0.9) / 0.9; }));
}

/// d/dx b1 + d/dy b2 for two off-centre bumps of radius 0.85 on [-1, 1]^2.
GridFn divergence_2d(int points) {
    auto f = [](std::span<const double> x) {
        const double r = 0.85, o = 0.05;
        const double ax = (x[0] - o) / r, ay = (x[1] + o) / r;
        const double bx = (x[0] + o) / r, by = (x[1] - o) / r;
        return dbump(ax) / r * bump_profile(ay) + bump_profile(bx) * dbump(by) / r;
    };
    return project(GridFn::sample({1.0, 1.0}, points, kMargin, f));
}

Report gs_decompose_scenario(const Scenario& s) {
    std::vector<Job> jobs;
    if (!s.grid_file.empty()) {
        const GridFn u = grid_from_json(read_text_file(s.grid_file));
        const double tol = s.tolerance.value_or(u.dimension() == 1 ? 1e-6 : 1e-5);
        jobs.push_back(named("grid file", [=] {
            CaseResult c;
            add_numeric(c, "sup residual", gs_decompose(u).residual, tol);
            return c;
        }));
        return {s.name, {{"tolerance", sci(tol)}}, run_jobs(jobs, false)};
    }
    const double tol1 = s.tolerance.value_or(1e-6), tol2 = s.tolerance.value_or(1e-5);
    jobs.push_back(named("1D bump derivative, 512", [=] {
        const GridFn u = bump_derivative_1d(512);
        const GsResult r = gs_decompose(u);
        const GridFn phi = GridFn::sample({1.0}, 512, kMargin, [](std::span<const double> x) { return bump_profile(x[0] / 0.9); });
        CaseResult c;
        add_numeric(c, "sup residual", r.residual, tol1);
        c.note = "sup |g_1 - phi| = " + sci((r.components[0] - phi).sup_norm());
        return c;
    }));
    jobs.push_back(named("2D divergence, 256^2", [=] {
        CaseResult c;
        add_numeric(c, "sup residual", gs_decompose(divergence_2d(256)).residual, tol2);
        return c;
    }));
    jobs.push_back(named("zero input", [=] {
        const GsResult r = gs_decompose(GridFn::zeros({1.0, 1.0}, 64, kMargin));
        double worst = r.residual;
        for (const auto& g : r.components) worst = std::max(worst, g.sup_norm());
        CaseResult c;
        add_numeric(c, "sup |g|", worst, 0.0);
        return c;
    }));
    auto convergence = [=](const std::string& id, std::function<GridFn(int)> make) {
        return named(id, [=] {
            CaseResult c;
            double prev = 0.0;
            for (int points : {128, 256, 512}) {
                const double r = gs_decompose(make(points)).residual;
                c.residuals.emplace_back(std::to_string(points), sci(r));
                if (prev > 0.0) {
                    const double rate = std::log2(prev / r);
                    c.residuals.emplace_back("order " + std::to_string(points / 2) + "->" + std::to_string(points), sci(rate));
                    if (!(rate >= 3.0)) {
                        c.pass = false;
                        c.failed_orders.push_back(std::to_string(points));
                    }
                }
                prev = r;
            }
            return c;
        });
    };
    jobs.push_back(convergence("1D refinement", bump_derivative_1d));
    jobs.push_back(convergence("2D refinement", divergence_2d));
    return {s.name, {{"tolerance_1d", sci(tol1)}, {"tolerance_2d", sci(tol2)}, {"accuracy", std::to_string(kGridAccuracy)}},
            run_jobs(jobs, true)};
}

Report brw_bracket(const Scenario& s) {
    const double tol = s.tolerance.value_or(1e-5);
    const int points = 256;
    const std::vector<double> box{1.0, 1.0};
    std::vector<Job> jobs;
    jobs.push_back(named("d/dp bump", [=] {
        const GridFn u = GridFn::sample(box, points, kMargin, [](std::span<const double> x) {
            return bump_profile(x[0] / 0.9) * dbump(x[1] / 0.9) / 0.9;
        });
        const BracketResult r = bracket_decompose(u);
        CaseResult c;
        add_numeric(c, "sup residual", r.residual, tol);
        c.residuals.emplace_back("pairs", std::to_string(r.pairs.size()));
        return c;
    }));
    jobs.push_back(named("zero input", [=] {
        const BracketResult r = bracket_decompose(GridFn::zeros(box, 64, kMargin));
        CaseResult c;
        c.residuals.emplace_back("pairs", std::to_string(r.pairs.size()));
        c.pass = r.pairs.empty() && r.residual == 0.0;
        return c;
    }));
    // Seeded sums of bumps with mixed signs, projected to zero integral.
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> centre(-0.3, 0.3), weight(-1.0, 1.0), radius(0.3, 0.5);
    std::vector<GridFn> randoms;
    for (int i = 0; i < 3; ++i) {
        struct Bump {
            double cx, cy, r, w;
        };
        std::vector<Bump> parts;
        for (int j = 0; j < 3; ++j) parts.push_back({centre(rng), centre(rng), radius(rng), weight(rng)});
        randoms.push_back(project(GridFn::sample(box, points, kMargin, [parts](std::span<const double> x) {
            double v = 0.0;
            for (const auto& b : parts) v += b.w * bump_profile((x[0] - b.cx) / b.r) * bump_profile((x[1] - b.cy) / b.r);
            return v;
        })));
    }
    for (std::size_t i = 0; i < randoms.size(); ++i)
        jobs.push_back(named("random u" + std::to_string(i + 1), [=] {
            CaseResult c;
            add_numeric(c, "sup residual", bracket_decompose(randoms[i]).residual, tol);
            return c;
        }));
    // sigma(f) = integral f d for constant and non-constant d.
    const GridFn phi = bump_generate(box, points, kMargin, 0.5);
    const GridFn u = GridFn::sample(box, points, kMargin, [](std::span<const double> x) {
        return bump_profile((x[0] - 0.3) / 0.4) * bump_profile((x[1] + 0.2) / 0.4) * (1.0 + x[0]);
    });
    jobs.push_back(named("constant density", [=] {
        const GridFn d = GridFn::sample(box, points, kMargin, [](std::span<const double>) { return 3.0; });
        const BrwCheck r = brw_check(u, phi, d);
        CaseResult c;
        add_numeric(c, "sigma(u) - c sigma(phi)", r.functional_residual, tol);
        add_numeric(c, "sum sigma({a_j, b_j})", r.bracket_functional, tol);
        add_numeric(c, "reconstruction", r.reconstruction, tol);
        return c;
    }));
    jobs.push_back(named("non-constant density", [=] {
        const GridFn d = GridFn::sample(box, points, kMargin, [](std::span<const double> x) { return 1.0 + x[0]; });
        const BrwCheck r = brw_check(u, phi, d);
        CaseResult c;
        c.residuals.emplace_back("sigma(u) - c sigma(phi)", sci(r.functional_residual));
        c.residuals.emplace_back("sum sigma({a_j, b_j})", sci(r.bracket_functional));
        add_numeric(c, "reconstruction", r.reconstruction, tol);
        if (!(r.functional_residual > 1e-3)) {
            c.pass = false;
            c.failed_orders.push_back("sigma(u) - c sigma(phi)");
        }
        c.note = "a non-constant density is expected to break the functional identity";
        return c;
    }));
    return {s.name, {{"tolerance", sci(tol)}, {"points", std::to_string(points)}}, run_jobs(jobs, true)};
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_list() {
    static const std::vector<ScenarioInfo> list{
        {"associativity", "Moyal associativity on 20 random monomial triples"},
        {"moyal-trace", "tau_M(u * v) = tau_M(v * u) on 10 Gaussian pairs"},
        {"homogeneity", "tau_M(D_M u) = nu d/dnu tau_M(u) on the probe battery"},
        {"transport-trace", "T'(1) gives a trace of the transported product, 5 seeded T"},
        {"normalized-uniqueness", "pulled-back traces are normalised and agree with A o T, exp(nu L) o T"},
        {"proportionality", "recovery of constructed factors and detection of inconsistent pairs"},
        {"strongly-closed", "integral of C_r^-(u, v) vanishes for 1 <= r <= K"},
        {"trk-conditions", "order-k trace conditions for Moyal and a transported product"},
        {"gs-decompose", "grid decomposition into derivatives, with refinement study"},
        {"brw-bracket", "grid decomposition into Poisson brackets and the density functional check"},
        {"automorphism-invariance", "tau_M(u o m) = tau_M(u) for linear symplectic m"},
    };
    return list;
}

Report run_scenario(const Scenario& s) {
    const auto& list = scenario_list();
    if (std::none_of(list.begin(), list.end(), [&](const ScenarioInfo& i) { return i.name == s.name; }))
        throw InputError("unknown scenario '" + s.name + "'");
    if (s.n < 1 || s.n > kMaxHalfDimension) throw InputError("n must be between 1 and " + std::to_string(kMaxHalfDimension));
    if (s.order < 1) throw InputError("order must be at least 1");
    const PhaseSpace space(s.n);

    Report r;
    if (s.name == "associativity") r = associativity(s, space);
    else if (s.name == "moyal-trace") r = moyal_trace(s, space);
    else if (s.name == "homogeneity") r = homogeneity(s, space);
    else if (s.name == "transport-trace") r = transport_trace(s, space);
    else if (s.name == "normalized-uniqueness") r = normalized_uniqueness(s, space);
    else if (s.name == "proportionality") r = proportionality(s, space);
    else if (s.name == "strongly-closed") r = strongly_closed(s, space);
    else if (s.name == "trk-conditions") r = trk_conditions(s, space);
    else if (s.name == "gs-decompose") r = gs_decompose_scenario(s);
    else if (s.name == "brw-bracket") r = brw_bracket(s);
    else r = automorphism_invariance(s, space);

    std::vector<std::pair<std::string, std::string>> params{
        {"n", std::to_string(s.n)}, {"order", std::to_string(s.order)}, {"seed", std::to_string(s.seed)}};
    if (!s.equiv_file.empty()) params.emplace_back("equiv", s.equiv_file);
    if (!s.grid_file.empty()) params.emplace_back("grid", s.grid_file);
    if (!s.probes_file.empty()) params.emplace_back("probes", s.probes_file);
    params.insert(params.end(), r.params.begin(), r.params.end());
    r.params = std::move(params);
    return r;
}

}  // namespace startrace::cli
