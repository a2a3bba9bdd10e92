#include "res112/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "res112/bifurcations.hpp"
#include "res112/cli/commands.hpp"
#include "res112/critical_values.hpp"
#include "res112/errors.hpp"
#include "res112/monodromy.hpp"
#include "res112/reduced_dynamics.hpp"
#include "res112/reduced_space.hpp"

namespace res112::acceptance {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Collects failures; the first few are kept verbatim.
class Tally {
public:
    void fail(const std::string& what)
    {
        ++failures_;
        if (notes_.size() < 5) notes_.push_back(what);
    }
    void check(bool ok, const std::string& what)
    {
        ++checks_;
        if (!ok) fail(what);
    }
    void info(const std::string& s) { info_.push_back(s); }

    Outcome outcome() const
    {
        std::ostringstream os;
        os << checks_ << " checks, " << failures_ << " failures";
        for (const auto& s : info_) os << "; " << s;
        for (const auto& s : notes_) os << "; " << s;
        return {failures_ == 0 && checks_ > 0, os.str()};
    }

private:
    int checks_ = 0, failures_ = 0;
    std::vector<std::string> notes_, info_;
};

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string secs(double s) { return fmt(s) + " s"; }

// ---- 1 ------------------------------------------------------------------

const Family kPositiveFamilies[] = {Family::CS1,    Family::CS2,    Family::CS3,    Family::CS4,   Family::Cusp1,
                                    Family::Cusp2,  Family::Cusp3,  Family::HHsub1, Family::HHsub2, Family::HHsub3,
                                    Family::HHsup1, Family::HHsup2, Family::HHsup3};

// lambda window (kappa = 1) sampled for each family
std::pair<double, double> lambda_window(Family f)
{
    switch (f) {
    case Family::CS1:
    case Family::CS2: return {-3.0, 0.999};
    case Family::CS3:
    case Family::HHsub1:
    case Family::HHsub2:
    case Family::HHsup1:
    case Family::HHsup2: return {-3.0, 0.499};
    case Family::CS4:
    case Family::Cusp1:
    case Family::Cusp2: return {0.501, 0.999};
    case Family::Cusp3: return {0.5, 0.5};
    case Family::HHsub3: return {-3.0, 0.999};
    case Family::HHsup3: return {1.001, 4.0};
    default: return {0.0, 0.0};
    }
}

bool two_parameter(Family f)
{
    return f == Family::CS1 || f == Family::CS2 || f == Family::CS3 || f == Family::CS4 || f == Family::CS1_k0 ||
           f == Family::CS2_k0 || f == Family::CS3_k0;
}

BifurcationEvent sample_family(Family f, double kappa, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    FamilyParams p;
    if (kappa == 0.0) {
        p.lambda = (U(rng) < 0.5 ? -1.0 : 1.0) * (0.05 + 2.95 * U(rng));
    }
    else {
        const auto [lo, hi] = lambda_window(f);
        p.lambda = lo + (hi - lo) * U(rng);
    }
    if (f == Family::Cusp3) p.mu = (U(rng) - 0.5) * 0.999;
    if (two_parameter(f)) {
        const auto r = family_a_range(f, p.lambda, kappa);
        if (!r) throw validation_error(std::string(to_string(f)) + " absent at sampled lambda");
        p.a = r->first + (r->second - r->first) * (0.001 + 0.998 * U(rng));
        p.sign = U(rng) < 0.5 ? -1 : 1;
    }
    return catalog_point(f, p, kappa);
}

// Triple-root residuals at the event, scaled.
double residual(const BifurcationEvent& e)
{
    const auto q = f_quartic(e.h, {e.lambda, e.kappa}, {e.mu, e.ell});
    const double sc = q.scale(e.a);
    return std::max({std::abs(q(e.a)), std::abs(q.deriv(e.a, 1)), std::abs(q.deriv(e.a, 2))}) / sc;
}

Outcome c1()
{
    const auto t0 = clock_type::now();
    Tally t;
    std::mt19937_64 rng(20240101);
    double worst = 0.0;
    for (Family f : kPositiveFamilies) {
        for (int i = 0; i < 200; ++i) {
            const auto e = sample_family(f, 1.0, rng);
            const double r = residual(e);
            worst = std::max(worst, r);
            t.check(r <= 1e-9, std::string(to_string(f)) + " residual " + fmt(r));
            try {
                const auto c = classify_multiple_root(e.a, f_quartic(e.h, {e.lambda, 1.0}, {e.mu, e.ell}), {e.mu, e.ell});
                t.check(c.kind == family_kind(f), std::string(to_string(f)) + " classified as " + to_string(c.kind) +
                                                      " at lambda " + fmt(e.lambda));
            }
            catch (const std::exception& ex) {
                t.fail(std::string(to_string(f)) + ": " + ex.what());
            }
        }
    }
    const double dt = seconds_since(t0);
    t.check(dt < 5.0, "runtime " + secs(dt));
    t.info("max scaled residual " + fmt(worst));
    t.info(secs(dt));
    return t.outcome();
}

// ---- 2 ------------------------------------------------------------------

Outcome c2()
{
    const auto t0 = clock_type::now();
    Tally t;
    const std::vector<double> lambdas{-1.0, 0.3, 0.48, 0.52, 0.75, 1.5};
    const auto res = solve_bifurcations_numeric(1.0, lambdas, {}, 0);
    std::size_t events = 0;
    for (const auto& r : res) {
        t.check(r.failure.empty(), "lambda " + fmt(r.lambda) + ": " + r.failure);
        t.check(r.unmatched.empty(), "lambda " + fmt(r.lambda) + ": " + std::to_string(r.unmatched.size()) + " unmatched");
        events += r.events.size();
        for (const auto& e : r.events)
            t.check(e.family && e.tag_distance <= 1e-6,
                    "lambda " + fmt(r.lambda) + ": tag distance " + fmt(e.tag_distance));
        for (Family f : kPositiveFamilies) {
            if (f == Family::Cusp3 || !family_present(f, r.lambda, 1.0)) continue;
            const bool found = std::any_of(r.events.begin(), r.events.end(), [&](const auto& e) { return e.family == f; });
            t.check(found, std::string(to_string(f)) + " missing at lambda " + fmt(r.lambda));
        }
    }

    // kappa = 2 run against the scaled kappa = 1 events
    const double k = 2.0;
    std::vector<double> l2;
    for (double l : lambdas) l2.push_back(l / k);
    const auto res2 = solve_bifurcations_numeric(k, l2, {}, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        t.check(res2[i].failure.empty() && res2[i].unmatched.empty(), "kappa 2 run at lambda " + fmt(l2[i]));
        for (const auto& e : res[i].events) {
            const auto s = kappa_scaling({e.mu, e.ell}, {e.a, 0.0, 0.0}, e.h, e.lambda, k);
            double best = INFINITY;
            for (const auto& e2 : res2[i].events) {
                if (e2.family != e.family) continue;
                best = std::min(best, std::max({std::abs(e2.mu - s.mu), std::abs(e2.ell - s.ell), std::abs(e2.h - s.H),
                                                std::abs(e2.a - s.R)}));
            }
            worst = std::max(worst, best);
            t.check(best <= 1e-8, std::string(to_string(*e.family)) + " at lambda " + fmt(e.lambda) +
                                      " has no kappa = 2 image within 1e-8 (" + fmt(best) + ")");
        }
    }
    const double dt = seconds_since(t0);
    t.check(dt < 60.0, "runtime " + secs(dt));
    t.info(std::to_string(events) + " events");
    t.info("kappa = 2 max deviation " + fmt(worst));
    t.info(secs(dt));
    return t.outcome();
}

// ---- 3 ------------------------------------------------------------------

Outcome c3()
{
    Tally t;
    const auto pts = degenerate_hopf_points(1.0);
    t.check(pts.size() == 3, "found " + std::to_string(pts.size()) + " quadruple-root events");
    const std::array<std::array<double, 3>, 3> expected{{{0.5, 0.5, 0.5}, {0.5, -0.5, 0.5}, {1.0, 0.0, -1.0}}};
    for (const auto& x : expected) {
        const auto it = std::find_if(pts.begin(), pts.end(), [&](const auto& e) {
            return std::abs(e.lambda - x[0]) <= 1e-10 && std::abs(e.mu - x[1]) <= 1e-10 &&
                   std::abs(e.ell - x[2]) <= 1e-10;
        });
        const std::string tag = "(" + fmt(x[0]) + ", " + fmt(x[1]) + ", " + fmt(x[2]) + ")";
        if (it == pts.end()) {
            t.fail("no event at " + tag);
            continue;
        }
        t.check(std::abs(it->a - (1.0 - it->lambda)) <= 1e-10, "a off at " + tag);
        const auto q = f_quartic(it->h, {it->lambda, 1.0}, {it->mu, it->ell});
        t.check(std::abs(q.deriv(it->a, 4) - 6.0) <= 1e-10, "F'''' off at " + tag);
        for (int d = 0; d < 4; ++d)
            t.check(std::abs(q.deriv(it->a, d)) <= 1e-10, "F^(" + std::to_string(d) + ") nonzero at " + tag);
    }
    return t.outcome();
}

// ---- 4 ------------------------------------------------------------------

Outcome c4()
{
    const auto t0 = clock_type::now();
    Tally t;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    int used = 0, skipped = 0;
    for (int i = 0; i < 10000; ++i) {
        const CasimirValues cas{U(rng), U(rng)};
        const ReducedParams rp{U(rng), 1.0};
        const auto eqs = equilibria(cas, rp);
        // skip draws within 1e-6 of a multiple root of the equilibrium quintic
        const auto S = equilibrium_quintic(cas, rp);
        bool near_multiple = false;
        for (const auto& e : eqs) {
            if (e.stability == Stability::SingularTip) continue;
            const double d1 = poly::eval_deriv(S, e.R, 1);
            if (e.stability == Stability::Degenerate || std::abs(d1) <= 1e-6 * poly::magnitude(poly::derivative(S), e.R))
                near_multiple = true;
            if (std::abs(e.R - r_min(cas)) <= 1e-6) near_multiple = true;
        }
        for (std::size_t a = 0; a + 1 < eqs.size(); ++a)
            if (std::abs(eqs[a + 1].R - eqs[a].R) <= 1e-6) near_multiple = true;
        if (near_multiple) {
            ++skipped;
            continue;
        }
        ++used;
        int ne = 0, nh = 0, regular = 0;
        for (const auto& e : eqs) {
            if (e.stability == Stability::SingularTip) continue;
            ++regular;
            ne += e.stability == Stability::Elliptic;
            nh += e.stability == Stability::Hyperbolic;
        }
        std::ostringstream where;
        where << "(mu, ell, lambda) = (" << cas.mu << ", " << cas.ell << ", " << rp.lambda << ")";
        t.check(regular == 1 || regular == 3, std::to_string(regular) + " regular equilibria at " + where.str());
        t.check(ne == nh + 1, std::to_string(ne) + " elliptic vs " + std::to_string(nh) + " hyperbolic at " + where.str());
    }
    const double dt = seconds_since(t0);
    t.check(dt < 10.0, "runtime " + secs(dt));
    t.info(std::to_string(used) + " draws used, " + std::to_string(skipped) + " in the band");
    t.info(secs(dt));
    return t.outcome();
}

// ---- 5 ------------------------------------------------------------------

// gradient of (R, X, Y) with respect to (q1..q3, p1..p3)
std::array<std::array<double, 6>, 3> invariant_gradients(const cvec3& z)
{
    std::array<std::array<double, 6>, 3> g{};
    for (int j = 0; j < 3; ++j) {
        if (j < 2) {
            g[0][j] = z[j].imag();
            g[0][3 + j] = z[j].real();
        }
        std::complex<double> w = 1.0;
        for (int k = 0; k < 3; ++k)
            if (k != j) w *= z[k];
        // z_j = p_j + i q_j: d/dp_j = w, d/dq_j = i w
        const std::complex<double> dq = std::complex<double>(0.0, 1.0) * w;
        g[1][j] = dq.real();
        g[2][j] = dq.imag();
        g[1][3 + j] = w.real();
        g[2][3 + j] = w.imag();
    }
    return g;
}

double canonical_bracket(const std::array<double, 6>& f, const std::array<double, 6>& g)
{
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += f[j] * g[3 + j] - f[3 + j] * g[j];
    return s;
}

Outcome c5()
{
    Tally t;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    auto random_state = [&] { return FullState::oscillator({U(rng), U(rng), U(rng)}, {U(rng), U(rng), U(rng)}); };

    double w_table = 0.0, w_canon = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto st = random_state();
        const auto red = reduce(st);
        const CasimirValues cas{red.n, red.l};
        const auto M = structure_matrix(red.point, cas);
        const auto gS = syzygy_gradient(red.point, cas);
        // {e_a, e_b} = grad S . (e_a x e_b)
        const double trip[3][3] = {{0.0, gS[2], -gS[1]}, {-gS[2], 0.0, gS[0]}, {gS[1], -gS[0], 0.0}};
        const auto gr = invariant_gradients(st.z());
        double scale = 1.0;
        for (double v : gS) scale = std::max(scale, std::abs(v));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const double e1 = std::abs(M[a][b] - trip[a][b]) / scale;
                const double e2 = std::abs(M[a][b] - canonical_bracket(gr[a], gr[b])) / scale;
                w_table = std::max(w_table, e1);
                w_canon = std::max(w_canon, e2);
                t.check(e1 <= 1e-12, "bracket table vs triple product " + fmt(e1));
                t.check(e2 <= 1e-12, "bracket table vs canonical bracket " + fmt(e2));
            }
    }
    double w_syz = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto red = reduce(random_state());
        const double R = red.point.R;
        const double r = std::abs(syzygy_residual(red.point, {red.n, red.l})) / std::max(1.0, R * R * R);
        w_syz = std::max(w_syz, r);
        t.check(r <= 1e-12, "syzygy residual " + fmt(r));
    }
    double w_rt = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const vec3 x{U(rng), U(rng), U(rng)}, y{U(rng), U(rng), U(rng)};
        const auto [q, p] = to_oscillator(x, y);
        const auto [x2, y2] = from_oscillator(q, p);
        const auto st = FullState::oscillator(q, p);
        const auto back = FullState::from_z(st.z()).as_original().as_oscillator();
        double e = 0.0;
        for (int j = 0; j < 3; ++j)
            e = std::max({e, std::abs(x2[j] - x[j]), std::abs(y2[j] - y[j]), std::abs(back.first()[j] - q[j]),
                          std::abs(back.second()[j] - p[j])});
        const CasimirValues cas{U(rng), U(rng)};
        const InvariantPoint pt{U(rng), U(rng), U(rng)};
        const double h = U(rng), lam = U(rng), k = 0.5 + std::abs(U(rng));
        const auto s = kappa_scaling(cas, pt, h, lam, k);
        const auto b = kappa_scaling_inverse({s.mu, s.ell}, {s.R, s.X, s.Y}, s.H, s.lambda, k);
        for (double d : {b.mu - cas.mu, b.ell - cas.ell, b.R - pt.R, b.X - pt.X, b.Y - pt.Y, b.H - h, b.lambda - lam})
            e = std::max(e, std::abs(d));
        w_rt = std::max(w_rt, e);
        t.check(e <= 1e-14, "round trip error " + fmt(e));
    }
    t.info("bracket " + fmt(w_table) + ", canonical " + fmt(w_canon) + ", syzygy " + fmt(w_syz) + ", round trip " +
           fmt(w_rt));
    return t.outcome();
}

// ---- 6 ------------------------------------------------------------------

Outcome c6()
{
    const auto t0 = clock_type::now();
    Tally t;
    struct Case {
        CasimirValues cas;
        double lambda;
        double f;  // start R between R_min and the largest R on the level
    };
    const Case cases[] = {{{0.3, 0.1}, 0.0, 0.3}, {{0.0, -0.5}, -1.0, 0.5}, {{0.2, 0.4}, 0.3, 0.7}, {{-0.1, 0.6}, 1.5, 0.4}};
    double worst = 0.0;
    for (const auto& c : cases) {
        const ReducedParams rp{c.lambda, 1.0};
        const double R0 = r_min(c.cas) + c.f;
        const double s = section_sq(R0, c.cas);
        const InvariantPoint start{R0, std::sqrt(std::max(s, 0.0)) * 0.6, std::sqrt(std::max(s, 0.0)) * 0.8};
        OrbitOptions oo;
        oo.t_end = 1000.0;
        oo.tol = 1e-10;
        oo.record = false;
        const auto tr = integrate_orbit(start, c.cas, rp, oo);
        worst = std::max({worst, tr.max_syzygy_drift, tr.max_energy_drift});
        t.check(tr.max_syzygy_drift <= 1e-9 && tr.max_energy_drift <= 1e-9,
                "reduced drift S " + fmt(tr.max_syzygy_drift) + ", H " + fmt(tr.max_energy_drift));
    }
    double worst_full = 0.0;
    struct FullCase {
        double delta;
        EMValue v;
    };
    const FullCase full[] = {{0.0, {0.2, 0.15, 0.2}}, {0.0, {-0.3, -0.1, 0.1}}, {-1.0, {0.05, -0.2, -0.05}}, {1.5, {0.1, 0.2, 0.5}}};
    for (const auto& fc : full) {
        ModelParams mp;
        mp.delta = fc.delta;
        try {
            const auto r = rotation_numbers(fc.v, mp);
            worst_full = std::max(worst_full, r.max_drift);
            t.check(r.max_drift <= 1e-9, "full drift " + fmt(r.max_drift));
        }
        catch (const std::exception& e) {
            t.fail(std::string("full integration: ") + e.what());
        }
    }
    t.info("reduced max drift " + fmt(worst) + " over 1000 time units");
    t.info("full max drift per period " + fmt(worst_full));
    t.info(secs(seconds_since(t0)));
    return t.outcome();
}

// ---- 7 ------------------------------------------------------------------

// ell at which the right end point changes type, found by bisection on [lo, hi]
double flip_point(int mu_sign, double lo, double hi)
{
    auto kind_at = [&](double ell) {
        const CasimirValues cas{mu_sign == 0 ? 0.0 : mu_sign * std::abs(ell), ell};
        return instability_interval(cas, 1.0)->hi_kind;
    };
    const BifKind klo = kind_at(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        const double m = 0.5 * (lo + hi);
        if (kind_at(m) == klo)
            lo = m;
        else
            hi = m;
    }
    return 0.5 * (lo + hi);
}

Outcome c7()
{
    Tally t;
    auto expect_interval = [&](const CasimirValues& cas, double lo, double hi, BifKind hi_kind) {
        const auto iv = instability_interval(cas, 1.0);
        const std::string tag = "(mu, ell) = (" + fmt(cas.mu) + ", " + fmt(cas.ell) + ")";
        if (!iv) {
            t.fail("no interval at " + tag);
            return;
        }
        t.check(std::abs(iv->lo - lo) <= 1e-12 && std::abs(iv->hi - hi) <= 1e-12, "end points off at " + tag);
        t.check(iv->lo_kind == BifKind::HopfSub, "left end not subcritical at " + tag);
        t.check(iv->hi_kind == hi_kind, std::string("right end ") + to_string(iv->hi_kind) + " at " + tag);
    };
    for (double ell : {-4.0, -0.25}) {
        const double w = std::sqrt(-ell);
        expect_interval({0.0, ell}, -w, w, ell < -1.0 ? BifKind::HopfSuper : BifKind::HopfSub);
    }
    for (double ell : {0.25, 2.0})
        for (double s : {1.0, -1.0}) {
            const double w = std::sqrt(2.0 * ell);
            expect_interval({s * ell, ell}, -w - ell, w - ell, ell > 1.0 ? BifKind::HopfSuper : BifKind::HopfSub);
        }
    const double f0 = flip_point(0, -4.0, -0.25);
    t.check(std::abs(f0 + 1.0) <= 1e-10, "mu = 0 flip at ell = " + fmt(f0));
    const double f1 = flip_point(1, 0.25, 2.0);
    // the right end turns supercritical where sqrt(2 ell) = 1
    t.check(std::abs(f1 - 1.0) <= 1e-10, "|mu| = ell flip at ell = " + fmt(f1) + ", not 1");
    t.info("flips at ell = " + fmt(f0) + " (mu = 0) and " + fmt(f1) + " (|mu| = ell)");
    return t.outcome();
}

// ---- 8 ------------------------------------------------------------------

Outcome c8()
{
    const auto t0 = clock_type::now();
    Tally t;
    int probes = 0;
    auto probe = [&](double delta, double mu, double ell, double h, const std::string& expected) {
        ++probes;
        const auto r = classify_fiber({mu, ell}, {delta, 1.0}, h);
        const std::string got = r.flagged ? "flagged" : r.summary();
        t.check(got == expected, "delta " + fmt(delta) + " (" + fmt(mu) + ", " + fmt(ell) + ", " + fmt(h) + "): " +
                                     got + " instead of " + expected);
    };
    // delta = 0
    probe(0.0, 0.0, 0.0, 0.0, "CuspPinchedT3 x1");
    for (double l : {0.1, 0.5, 1.0, 1.9}) {
        probe(0.0, l, l, 0.5 * l * l, "PinchedTorusTimesT1 x1");
        probe(0.0, -l, l, 0.5 * l * l, "PinchedTorusTimesT1 x1");
    }
    for (double l : {-0.1, -1.0, -3.0}) probe(0.0, 0.0, l, 0.0, "PinchedTorusTimesT1 x1");
    probe(0.0, 0.3, 0.1, -5.0, "Empty");
    probe(0.0, 0.3, 0.1, 1.0, "Torus3 x1");
    probe(0.0, 0.3, 0.1, h_min({0.3, 0.1}, {0.0, 1.0}), "Torus2 x1");
    probe(0.0, -0.4, -0.2, 2.0, "Torus3 x1");

    // delta = -1: faces of T from the slice sampler
    for (double mu : {0.01, 0.02, -0.02, 0.03}) {
        const double ell = 2.0 * -0.2225 - mu;
        const auto nd = critical_slice({-1.0, 1.0}, {mu, mu, ell, ell, 1, 1}).front();
        std::optional<double> he, hh;
        for (const auto& f : nd.faces) {
            if (f.kind == FaceKind::Elliptic) he = f.h;
            if (f.kind == FaceKind::Hyperbolic) hh = f.h;
        }
        if (!he || !hh || !(*hh < *he)) {
            t.fail("delta -1: no tetrahedron at mu = " + fmt(mu));
            continue;
        }
        probe(-1.0, mu, ell, 0.5 * (*he + *hh), "Torus3 x2");
        probe(-1.0, mu, ell, *he, "Torus2 x1 + Torus3 x1");
        probe(-1.0, mu, ell, *hh, "FigureEightTimesT2 x1");
        probe(-1.0, mu, ell, *he + 0.01, "Torus3 x1");
    }

    // delta = 1.5: single thread C12 ending at ell = -lambda^2
    for (double l : {-2.3, -2.26, -4.0}) probe(1.5, 0.0, l, 0.0, "PinchedTorusTimesT1 x1");
    for (double l : {-2.24, -2.0, -1.0}) probe(1.5, 0.0, l, 0.0, "Circle x1");
    const auto threads = thread_segments({1.5, 1.0});
    int with_thread = 0;
    for (const auto& s : threads) {
        if (!s.unstable) continue;
        ++with_thread;
        t.check(s.name == "C12", "unexpected thread " + s.name + " at delta 1.5");
        if (s.name == "C12") t.check(std::abs(s.unstable->hi + 2.25) <= 1e-12, "C12 ends at " + fmt(s.unstable->hi));
    }
    t.check(with_thread == 1, std::to_string(with_thread) + " threads at delta 1.5");
    t.check(probes >= 30, "only " + std::to_string(probes) + " probes");
    const double dt = seconds_since(t0);
    t.check(dt < 5.0, "runtime " + secs(dt));
    t.info(std::to_string(probes) + " probes");
    t.info(secs(dt));
    return t.outcome();
}

// ---- 9 ------------------------------------------------------------------

std::vector<EMValue> polygon(double iota, std::vector<std::pair<double, double>> c, int per_edge)
{
    std::vector<EMValue> v;
    c.push_back(c.front());
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        for (int k = 0; k < per_edge; ++k) {
            const double f = double(k) / per_edge;
            v.push_back({c[i].first + (c[i + 1].first - c[i].first) * f, iota,
                         c[i].second + (c[i + 1].second - c[i].second) * f});
        }
    v.push_back(v.front());
    return v;
}

Outcome c9()
{
    Tally t;
    auto near_integer = [](const MonodromyResult& r) {
        return std::max(std::abs(r.winding_N - std::round(r.winding_N)), std::abs(r.winding_J - std::round(r.winding_J)));
    };
    const std::pair<Generator, MonodromyVector> gens[] = {
        {Generator::Gamma1, {1, -1}}, {Generator::Gamma2, {0, 1}}, {Generator::Gamma3, {-1, 0}}};
    for (double delta : {0.0, -1.0, 0.3}) {
        const auto t0 = clock_type::now();
        ModelParams mp;
        mp.delta = delta;
        MonodromyVector sum;
        for (const auto& [g, want] : gens) {
            const std::string tag = std::string(to_string(g)) + " at delta " + fmt(delta);
            try {
                const auto r = monodromy_run(generator_loop(g, mp).points, mp);
                t.check(r.vector == want, tag + " gave (" + std::to_string(r.vector.m_N) + ", " +
                                              std::to_string(r.vector.m_J) + ")");
                t.check(near_integer(r) <= 0.02, tag + " winding off integers by " + fmt(near_integer(r)));
                sum = sum + r.vector;
            }
            catch (const std::exception& e) {
                t.fail(tag + ": " + e.what());
            }
        }
        t.check(sum == MonodromyVector{}, "generators do not sum to zero at delta " + fmt(delta));
        // loops entering the island region through its elliptic face
        std::vector<EMValue> island;
        if (delta == -1.0)
            island = polygon(-0.2225, {{-0.15, -0.02}, {0.15, -0.02}, {0.15, -0.1}, {-0.15, -0.1}}, 100);
        if (delta == 0.3)
            island = polygon(-0.015,
                             {{0.004, 0.0018}, {-0.004, 0.0018}, {-0.004, -0.01}, {-0.05, -0.01}, {-0.05, 0.02},
                              {0.05, 0.02}, {0.05, -0.01}, {0.004, -0.01}},
                             40);
        if (!island.empty()) {
            try {
                const auto r = monodromy_run(island, mp);
                t.check(r.vector == MonodromyVector{-1, 0}, "island loop at delta " + fmt(delta));
                std::reverse(island.begin(), island.end());
                t.check(monodromy_vector(island, mp) == MonodromyVector{1, 0}, "reversed island loop at delta " + fmt(delta));
            }
            catch (const std::exception& e) {
                t.fail("island loop at delta " + fmt(delta) + ": " + e.what());
            }
        }
        const double dt = seconds_since(t0);
        t.check(dt < 120.0, "delta " + fmt(delta) + " took " + secs(dt));
        t.info("delta " + fmt(delta) + " " + secs(dt));
    }
    {
        ModelParams mp;
        mp.delta = 1.5;
        for (Generator g : {Generator::Gamma1, Generator::Gamma2}) {
            bool absent = false;
            try {
                generator_loop(g, mp);
            }
            catch (const thread_absent&) {
                absent = true;
            }
            t.check(absent, std::string(to_string(g)) + " should not exist at delta 1.5");
        }
        try {
            const auto r = monodromy_run(generator_loop(Generator::Gamma3, mp).points, mp);
            t.check(r.vector == MonodromyVector{-1, 0}, "gamma3 at delta 1.5");
        }
        catch (const std::exception& e) {
            t.fail(std::string("gamma3 at delta 1.5: ") + e.what());
        }
    }
    return t.outcome();
}

// ---- 10 -----------------------------------------------------------------

Outcome c10()
{
    Tally t;
    std::mt19937_64 rng(10);
    double worst = 0.0;
    for (Family f : {Family::CS1_k0, Family::CS2_k0, Family::CS3_k0, Family::HHsub1_k0, Family::HHsub2_k0,
                     Family::HHsub3_k0}) {
        for (int i = 0; i < 100; ++i) {
            const auto e = sample_family(f, 0.0, rng);
            const double r = residual(e);
            worst = std::max(worst, r);
            t.check(r <= 1e-9, std::string(to_string(f)) + " residual " + fmt(r));
        }
    }
    std::vector<double> lambdas;
    for (int i = -20; i <= 20; ++i)
        if (i != 0) lambdas.push_back(0.1 * i);
    std::size_t events = 0;
    for (const auto& r : solve_bifurcations_numeric(0.0, lambdas, {}, 0)) {
        t.check(r.failure.empty(), "sweep failure at lambda " + fmt(r.lambda) + ": " + r.failure);
        events += r.events.size() + r.unmatched.size();
        for (const auto* list : {&r.events, &r.unmatched})
            for (const auto& e : *list)
                t.check(e.kind != BifKind::Cusp && e.kind != BifKind::HopfSuper,
                        std::string(to_string(e.kind)) + " at lambda " + fmt(r.lambda));
    }
    t.info("max scaled residual " + fmt(worst));
    t.info(std::to_string(events) + " sweep events");
    return t.outcome();
}

// ---- 11 -----------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::string& out)
{
    std::ostringstream os, es;
    const int rc = cli::run(args, os, es);
    out = os.str();
    return rc;
}

Outcome c11()
{
    Tally t;
    const std::vector<std::vector<std::string>> runs{
        {"bifdiag", "--ell", "0.125,0.75", "--grid", "101"},
        {"bifdiag", "--ell", "0.3", "--format", "json", "--workers", "4"},
        {"critvals", "--delta", "-1", "--grid", "21"},
        {"critvals", "--delta", "0.52", "--grid", "21", "--format", "json", "--workers", "0"},
    };
    for (const auto& a : runs) {
        std::string o1, o2;
        const int r1 = run_cli(a, o1), r2 = run_cli(a, o2);
        t.check(r1 == 0 && r2 == 0, a.front() + " exited " + std::to_string(r1));
        t.check(!o1.empty() && o1 == o2, a.front() + " output differs between runs");
    }
    // workers must not change the bytes
    std::string s1, s4;
    run_cli({"critvals", "--delta", "0.3", "--grid", "15", "--workers", "1"}, s1);
    run_cli({"critvals", "--delta", "0.3", "--grid", "15", "--workers", "4"}, s4);
    t.check(s1 == s4, "critvals output depends on the worker count");

    const auto t0 = clock_type::now();
    std::string fig;
    const int rc = run_cli({"bifdiag", "--kappa", "1", "--ell", "-1.25,-0.125,0,0.125,0.3125,0.75"}, fig);
    const double dt = seconds_since(t0);
    t.check(rc == 0, "six-slice run exited " + std::to_string(rc));
    t.check(dt < 60.0, "six-slice run took " + secs(dt));
    t.info("six-slice run " + secs(dt) + ", " + std::to_string(std::count(fig.begin(), fig.end(), '\n')) + " lines");
    return t.outcome();
}

}  // namespace

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all{
        {1, "catalog residuals and kinds (kappa = 1)", c1},
        {2, "numeric oracle matches the catalog", c2},
        {3, "degenerate Hopf points", c3},
        {4, "equilibrium counts", c4},
        {5, "brackets, syzygy, round trips", c5},
        {6, "conservation along orbits", c6},
        {7, "instability intervals", c7},
        {8, "fiber classification probes", c8},
        {9, "monodromy generators", c9},
        {10, "kappa = 0 catalog and sweeps", c10},
        {11, "CLI determinism and slice runtime", c11},
    };
    return all;
}

int run_criteria(const std::vector<int>& only, std::ostream& out)
{
    bool all_pass = true;
    for (const auto& c : criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        Outcome o;
        try {
            o = c.check();
        }
        catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all_pass = all_pass && o.pass;
        out << (o.pass ? "PASS" : "FAIL") << ' ' << c.id << ' ' << c.title << ": " << o.detail << '\n' << std::flush;
    }
    return all_pass ? 0 : 2;
}

}  // namespace res112::acceptance
