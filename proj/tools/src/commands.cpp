#include "res112/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "res112/bifurcations.hpp"
#include "res112/critical_values.hpp"
#include "res112/errors.hpp"
#include "res112/monodromy.hpp"
#include "res112/parallel.hpp"
#include "res112/poly.hpp"
#include "res112/reduced_space.hpp"

namespace res112::cli {

namespace {

const std::string kOracle = "numeric-oracle";

std::int64_t flag(bool b) { return b ? 1 : 0; }

class Errors {
public:
    void check(bool ok, const std::string& msg)
    {
        if (!ok) msgs_.push_back(msg);
    }
    void raise() const
    {
        if (msgs_.empty()) return;
        std::string s;
        for (const auto& m : msgs_) s += (s.empty() ? "" : "; ") + m;
        throw validation_error(s);
    }

private:
    std::vector<std::string> msgs_;
};

bool two_sided(Family f) { return f == Family::CS3 || f == Family::CS4 || f == Family::CS3_k0; }

// ---- bifdiag ------------------------------------------------------------

struct SliceRow {
    double lambda, mu, a, h;
    std::string kind, source;
    bool boundary;
};

void emit_event(const BifurcationEvent& e, std::vector<SliceRow>& out)
{
    out.push_back({e.lambda, e.mu, e.a, e.h, to_string(e.kind), to_string(*e.family), e.boundary});
}

// Members of a two-parameter family with ell = ell0 at fixed lambda.
void surface_crossings(Family f, double lam, double ell0, const BifdiagConfig& c, std::vector<SliceRow>& out)
{
    const auto r = family_a_range(f, lam, c.kappa);
    if (!r || !(r->second > r->first)) return;
    auto at = [&](double a, int sign) {
        FamilyParams p;
        p.lambda = lam;
        p.a = a;
        p.sign = sign;
        return catalog_point(f, p, c.kappa);
    };
    auto g = [&](double a) { return at(a, 1).ell - ell0; };
    auto emit = [&](double a) {
        emit_event(at(a, 1), out);
        if (two_sided(f) && at(a, 1).mu != 0.0) emit_event(at(a, -1), out);
    };
    const int n = std::max(2, c.a_scan);
    double a0 = r->first, g0 = g(a0);
    if (g0 == 0.0) emit(a0);
    for (int k = 1; k <= n; ++k) {
        const double a1 = k == n ? r->second : r->first + (r->second - r->first) * k / n;
        const double g1 = g(a1);
        if (g1 == 0.0) {
            emit(a1);
        }
        else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
            double lo = a0, hi = a1, glo = g0;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
                const double m = 0.5 * (lo + hi);
                const double gm = g(m);
                if ((gm < 0.0) == (glo < 0.0)) {
                    lo = m;
                    glo = gm;
                }
                else {
                    hi = m;
                }
            }
            emit(0.5 * (lo + hi));
        }
        a0 = a1;
        g0 = g1;
    }
}

void push_multiple_root(double lam, double ell0, double kappa, double a, double x, double m, std::vector<SliceRow>& out)
{
    const double scale = std::max({1.0, std::abs(a), std::abs(ell0)});
    if (m < -1e-12 * scale * scale) return;
    m = std::max(m, 0.0);
    const double mu = std::sqrt(m);
    const CasimirValues cas{mu, ell0};
    if (a < r_min(cas) - 1e-9 * scale) return;
    const double h = x + lam * a + 0.5 * kappa * a * a;
    const ReducedParams rp{lam, kappa};
    std::string kind;
    try {
        kind = to_string(classify_multiple_root(a, f_quartic(h, rp, cas), cas).kind);
    }
    catch (const validation_error&) {
        return;
    }
    out.push_back({lam, mu, a, h, kind, kOracle, false});
    if (mu > 0.0) out.push_back({lam, -mu, a, h, kind, kOracle, false});
}

// F(a) = F'(a) = F''(a) = 0 at fixed (lambda, ell0): with x = X1(a) and
// s = lambda + kappa a the last two give x and mu^2, the first a polynomial in a.
void numeric_crossings(double lam, double ell0, double kappa, std::vector<SliceRow>& out)
{
    using namespace poly;
    if (kappa == 0.0) {
        const double a = (ell0 + lam * lam) / 3.0;
        const double b = 2.0 * lam * (a - ell0), c0 = 2.0 * a * (a - ell0) * (a - ell0);
        const double disc = b * b - 4.0 * c0;
        if (disc < 0.0) return;
        const double sq = std::sqrt(disc);
        for (double x : {0.5 * (-b - sq), 0.5 * (-b + sq)}) {
            push_multiple_root(lam, ell0, 0.0, a, x, 3 * a * a - 2 * a * ell0 + 2 * lam * x, out);
            if (sq == 0.0) break;
        }
        return;
    }
    const coeffs s{lam, kappa};
    const coeffs x = add(scale({ell0, -3.0}, 1.0 / kappa), scale(multiply(s, s), 1.0 / kappa));
    const coeffs m = add({0.0, -2.0 * ell0, 3.0}, scale(multiply(s, x), 2.0));
    const coeffs E = add(multiply(x, x), scale(multiply(add({0.0, 0.0, 1.0}, scale(m, -1.0)), {-ell0, 1.0}), -1.0));
    const coeffs Et = trimmed(E);
    if (Et.size() <= 1) return;
    for (double a : real_roots(Et)) push_multiple_root(lam, ell0, kappa, a, eval(x, a), eval(m, a), out);
}

// Codimension-two strata met by the slice: isolated points in (lambda, mu).
void point_strata(double ell0, const BifdiagConfig& c, std::vector<SliceRow>& out)
{
    const double k = c.kappa;
    auto in_window = [&](double l) { return l >= c.lambda_min && l <= c.lambda_max; };
    auto try_family = [&](Family f, double lam, FamilyParams p = {}) {
        if (!in_window(lam) || !family_present(f, lam, k)) return;
        p.lambda = lam;
        const auto e = catalog_point(f, p, k);
        if (std::abs(e.ell - ell0) <= 1e-9 * std::max(1.0, std::abs(ell0))) emit_event(e, out);
    };
    if (k == 0.0) {
        if (ell0 > 0.0)
            for (double l : {-std::sqrt(2.0 * ell0), std::sqrt(2.0 * ell0)}) {
                try_family(Family::HHsub1_k0, l);
                try_family(Family::HHsub2_k0, l);
            }
        if (ell0 < 0.0)
            for (double l : {-std::sqrt(-ell0), std::sqrt(-ell0)}) try_family(Family::HHsub3_k0, l);
        if (ell0 == 0.0) try_family(Family::HHsub3_k0, 0.0);
        return;
    }
    const double k2 = k * k, cc = k2 * ell0;
    if (ell0 > 0.0) {
        for (double u : {-cc - std::sqrt(2.0 * cc), -cc + std::sqrt(2.0 * cc)})
            for (Family f : {Family::HHsub1, Family::HHsub2, Family::HHsup1, Family::HHsup2}) try_family(f, u / k);
    }
    if (ell0 < 0.0)
        for (double l : {-std::sqrt(-ell0), std::sqrt(-ell0)})
            for (Family f : {Family::HHsub3, Family::HHsup3}) try_family(f, l);
    for (Family f : {Family::HHdeg1, Family::HHdeg2, Family::HHdeg3}) {
        const double lam = f == Family::HHdeg3 ? 1.0 / k : 0.5 / k;
        try_family(f, lam);
    }
    // Cusp1/2: ell = (1 - u - sqrt(2u - 1)) / kappa^2 decreases on (1/2, 1)
    if (ell0 < 0.5 / k2 && ell0 > -1.0 / k2) {
        auto g = [&](double u) { return (1.0 - u - std::sqrt(2.0 * u - 1.0)) / k2 - ell0; };
        double lo = 0.5, hi = 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) > 0.0 ? lo : hi) = mid;
        }
        const double u = 0.5 * (lo + hi);
        if (u > 0.5 && u < 1.0) {
            try_family(Family::Cusp1, u / k);
            try_family(Family::Cusp2, u / k);
        }
    }
    const double m2 = (ell0 - 0.25 / k2) / k2;
    if (m2 >= 0.0 && std::sqrt(m2) <= 0.5 / k2) {
        for (double mu : {std::sqrt(m2), -std::sqrt(m2)}) {
            FamilyParams p;
            p.mu = mu;
            try_family(Family::Cusp3, 0.5 / k, p);
            if (m2 == 0.0) break;
        }
    }
}

std::vector<Family> surface_families(double kappa)
{
    if (kappa == 0.0) return {Family::CS1_k0, Family::CS2_k0, Family::CS3_k0};
    return {Family::CS1, Family::CS2, Family::CS3, Family::CS4};
}

std::vector<Family> curve_families(double kappa)
{
    if (kappa == 0.0) return {Family::HHsub1_k0, Family::HHsub2_k0, Family::HHsub3_k0};
    return {Family::Cusp1, Family::Cusp2, Family::HHsub1, Family::HHsub2, Family::HHsub3,
            Family::HHsup1, Family::HHsup2, Family::HHsup3};
}

double node(double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }

Table surface_table(const BifdiagConfig& c)
{
    Table t{"bifdiag_surface", {"source", "lambda", "a", "mu", "ell", "h", "kind", "boundary"}, {}};
    auto push = [&](const BifurcationEvent& e) {
        t.add({to_string(*e.family), e.lambda, e.a, e.mu, e.ell, e.h, std::string(to_string(e.kind)),
               flag(e.boundary)});
    };
    const int n = c.surface_grid;
    if (n < 1 || c.lambda_min > c.lambda_max) return t;
    for (Family f : surface_families(c.kappa)) {
        for (int i = 0; i < n; ++i) {
            const double lam = node(c.lambda_min, c.lambda_max, n, i);
            const auto r = family_a_range(f, lam, c.kappa);
            if (!r) continue;
            for (int j = 0; j < n; ++j) {
                FamilyParams p;
                p.lambda = lam;
                p.a = node(r->first, r->second, n, j);
                for (int sign : {1, -1}) {
                    p.sign = sign;
                    push(catalog_point(f, p, c.kappa));
                    if (!two_sided(f)) break;
                }
            }
        }
    }
    for (Family f : curve_families(c.kappa)) {
        for (int i = 0; i < n; ++i) {
            const double lam = node(c.lambda_min, c.lambda_max, n, i);
            if (!family_present(f, lam, c.kappa)) continue;
            FamilyParams p;
            p.lambda = lam;
            push(catalog_point(f, p, c.kappa));
        }
    }
    if (c.kappa != 0.0) {
        const double k = c.kappa, lam = 0.5 / k;
        if (lam >= c.lambda_min && lam <= c.lambda_max) {
            for (int i = 0; i < n; ++i) {
                FamilyParams p;
                p.lambda = lam;
                p.mu = node(-0.5 / (k * k), 0.5 / (k * k), n, i);
                push(catalog_point(Family::Cusp3, p, k));
            }
        }
        for (Family f : {Family::HHdeg1, Family::HHdeg2, Family::HHdeg3}) {
            FamilyParams p;
            p.lambda = f == Family::HHdeg3 ? 1.0 / k : 0.5 / k;
            if (p.lambda >= c.lambda_min && p.lambda <= c.lambda_max) push(catalog_point(f, p, k));
        }
    }
    return t;
}

// ---- critvals -----------------------------------------------------------

double default_extent(const ModelParams& mp)
{
    const double u = mp.kappa * mp.delta;
    return 1.5 * (1.0 + std::abs(u) + u * u) / (mp.kappa * mp.kappa);
}

ReducedParams rp_at(const ModelParams& mp, const CasimirValues& cas) { return {detuning_lambda(mp, cas), mp.kappa}; }

bool tip_unstable(const CasimirValues& cas, double lambda, double kappa)
{
    const auto iv = instability_interval(cas, kappa);
    return iv && lambda > iv->lo && lambda < iv->hi;
}

std::string summary_of(const FiberReport& r)
{
    std::string s = r.summary();
    if (r.flagged) s += " (flagged)";
    return s;
}

}  // namespace

std::vector<Table> bifdiag_tables(const BifdiagConfig& c)
{
    Errors err;
    err.check(std::isfinite(c.kappa), "--kappa must be finite");
    err.check(c.grid >= 0, "--grid must be non-negative");
    err.check(c.a_scan >= 2, "a-scan resolution must be at least 2");
    err.check(std::isfinite(c.lambda_min) && std::isfinite(c.lambda_max), "lambda window must be finite");
    for (double l : c.ells) err.check(std::isfinite(l), "--ell values must be finite");
    err.check(!c.ells.empty(), "--ell needs at least one value");
    err.raise();
    if (c.kappa < 0.0) {
        // F(R; h, lambda, kappa) = F(R; -h, -lambda, -kappa); run in the kappa > 0 frame
        BifdiagConfig d = c;
        d.kappa = -c.kappa;
        d.lambda_min = -c.lambda_max;
        d.lambda_max = -c.lambda_min;
        auto tabs = bifdiag_tables(d);
        for (auto& t : tabs) {
            const auto col = [&](const char* name) {
                return std::find(t.header.begin(), t.header.end(), name) - t.header.begin();
            };
            const auto il = col("lambda"), ih = col("h");
            for (auto& row : t.rows) {
                row[il] = -std::get<double>(row[il]);
                row[ih] = -std::get<double>(row[ih]);
            }
        }
        return tabs;
    }

    Table slices{"bifdiag_slices", {"ell", "lambda", "mu", "a", "h", "kind", "source", "boundary"}, {}};
    const bool empty_window = c.grid == 0 || c.lambda_min > c.lambda_max;
    if (!empty_window) {
        const std::vector<Family> fams = surface_families(c.kappa);
        for (double ell0 : c.ells) {
            std::vector<std::vector<SliceRow>> per(static_cast<std::size_t>(c.grid));
            parallel_for(per.size(), c.workers, [&](std::size_t i) {
                const double lam = node(c.lambda_min, c.lambda_max, c.grid, static_cast<int>(i));
                for (Family f : fams) surface_crossings(f, lam, ell0, c, per[i]);
                if (c.oracle) numeric_crossings(lam, ell0, c.kappa, per[i]);
            });
            std::vector<SliceRow> pts;
            point_strata(ell0, c, pts);
            per.push_back(std::move(pts));
            for (const auto& rows : per)
                for (const auto& r : rows)
                    slices.add({ell0, r.lambda, r.mu, r.a, r.h, r.kind, r.source, flag(r.boundary)});
        }
    }
    std::vector<Table> out{std::move(slices)};
    if (c.surface) out.push_back(surface_table(c));
    return out;
}

std::vector<Table> critvals_tables(const CritvalsConfig& c)
{
    const auto& mp = c.params;
    Errors err;
    err.check(std::isfinite(mp.kappa) && mp.kappa > 0.0, "critvals requires --kappa > 0");
    err.check(std::isfinite(mp.delta) && std::isfinite(mp.lambda1) && std::isfinite(mp.lambda2),
              "detuning parameters must be finite");
    err.check(c.grid >= 2, "--grid must be at least 2");
    err.check(c.tol > 0.0, "--tol must be positive");
    if (c.mu_range) err.check(c.mu_range->first < c.mu_range->second, "--mu-range must be increasing");
    if (c.ell_range) err.check(c.ell_range->first < c.ell_range->second, "--ell-range must be increasing");
    err.raise();
    if (!(mp.kappa > 0.0)) throw unsupported_regime("critvals requires kappa > 0");

    const double E = default_extent(mp);
    const auto mr = c.mu_range.value_or(std::pair{-E, E});
    const auto lr = c.ell_range.value_or(std::pair{-E, E});
    const int n = c.grid;
    const bool flat = mp.lambda1 == 0.0 && mp.lambda2 == 0.0;

    Table B{"critvals_B", {"mu", "ell", "lambda", "h_min", "source"}, {}};
    Table faces{"critvals_faces", {"mu", "ell", "lambda", "h", "kind", "R", "validated", "source"}, {}};
    std::vector<SliceNode> nodes(static_cast<std::size_t>(n) * n);
    parallel_for(nodes.size(), c.workers, [&](std::size_t idx) {
        const int il = static_cast<int>(idx / n), im = static_cast<int>(idx % n);
        const double mu = node(mr.first, mr.second, n, im), ell = node(lr.first, lr.second, n, il);
        const auto rp = rp_at(mp, {mu, ell});
        nodes[idx] = critical_slice(rp, {mu, mu, ell, ell, 1, 1}, 1).front();
    });
    for (const auto& nd : nodes) {
        const double lam = detuning_lambda(mp, {nd.mu, nd.ell});
        if (!nd.error.empty()) {
            B.add({nd.mu, nd.ell, lam, std::nan(""), "error: " + nd.error});
            continue;
        }
        B.add({nd.mu, nd.ell, lam, nd.h_min, kOracle});
        for (const auto& f : nd.faces)
            faces.add({nd.mu, nd.ell, lam, f.h, std::string(to_string(f.kind)), f.R, flag(f.validated), kOracle});
    }

    Table threads{"critvals_threads",
                  {"thread", "ell", "mu", "lambda", "h_c", "h_min", "unstable", "above_min", "fiber", "source"},
                  {}};
    const int ns = 4 * n;
    for (const char* name : {"C23", "C13", "C12"}) {
        const std::string nm = name;
        const double lo = nm == "C12" ? lr.first : std::max(lr.first, 0.0);
        const double hi = nm == "C12" ? std::min(lr.second, 0.0) : lr.second;
        if (!(hi > lo)) continue;
        std::vector<std::vector<Cell>> rows(static_cast<std::size_t>(ns));
        parallel_for(rows.size(), c.workers, [&](std::size_t i) {
            const double ell = node(lo, hi, ns, static_cast<int>(i));
            if (ell == 0.0) return;
            const CasimirValues cas = nm == "C23" ? CasimirValues{ell, ell}
                                      : nm == "C13" ? CasimirValues{-ell, ell}
                                                    : CasimirValues{0.0, ell};
            if (cas.mu < mr.first || cas.mu > mr.second) return;
            const auto rp = rp_at(mp, cas);
            const double hc = tip_energy(cas, rp);
            const double hm = h_min(cas, rp);
            const bool above = hc - hm > 1e-12 * std::max(1.0, std::abs(hc));
            const auto rep = classify_fiber(cas, rp, hc);
            rows[i] = {nm, ell, cas.mu, rp.lambda, hc, hm, flag(tip_unstable(cas, rp.lambda, rp.kappa)),
                       flag(above), summary_of(rep), std::string("closed-form")};
        });
        for (auto& r : rows)
            if (!r.empty()) threads.add(std::move(r));
    }

    Table loci{"critvals_loci", {"locus", "mu", "ell", "h", "lambda", "source"}, {}};
    if (flat) {
        const ReducedParams rp{mp.delta, mp.kappa};
        ThreadOptions to;
        to.ell_extent = std::max({std::abs(lr.first), std::abs(lr.second), 1e-6});
        to.bisect_tol = c.tol;
        for (const auto& t : thread_segments(rp, to)) {
            if (t.unstable) {
                for (auto [tag, ell] : {std::pair{"_unstable_lo", t.unstable->lo}, std::pair{"_unstable_hi", t.unstable->hi}}) {
                    const auto cas = t.casimirs(ell);
                    loci.add({t.name + tag, cas.mu, ell, t.h_c(ell, rp), rp.lambda, std::string("closed-form")});
                }
            }
            for (const auto& iv : t.above_min) {
                for (auto [tag, ell] : {std::pair{"_above_min_lo", iv.lo}, std::pair{"_above_min_hi", iv.hi}}) {
                    const auto cas = t.casimirs(ell);
                    loci.add({t.name + tag, cas.mu, ell, t.h_c(ell, rp), rp.lambda, kOracle});
                }
            }
        }
        if (auto s = ell_star(rp, c.tol)) loci.add({std::string("ell_star"), 0.0, *s, 0.0, rp.lambda, kOracle});
        const SliceGrid g{mr.first, mr.second, lr.first, lr.second, 4 * n, 4 * n};
        for (const auto& p : elliptic_crossing_locus(rp, g, c.workers))
            loci.add({std::string(p.mu > 0.0 ? "L+" : "L-"), p.mu, p.ell, p.h, rp.lambda, kOracle});
    }
    return {std::move(B), std::move(threads), std::move(faces), std::move(loci)};
}

std::vector<Table> fiber_tables(const FiberConfig& c)
{
    const auto& mp = c.params;
    Errors err;
    err.check(std::isfinite(mp.kappa) && mp.kappa > 0.0, "fiber requires --kappa > 0");
    err.check(std::isfinite(c.mu) && std::isfinite(c.ell) && std::isfinite(c.h), "--mu, --ell and --h must be finite");
    err.raise();
    const CasimirValues cas{c.mu, c.ell};
    const auto rp = rp_at(mp, cas);
    const auto rep = classify_fiber(cas, rp, c.h);
    Table t{"fiber", {"mu", "ell", "h", "lambda", "component", "r_lo", "r_hi", "through_tip", "critical", "flagged", "source"}, {}};
    for (const auto& comp : rep.components)
        t.add({c.mu, c.ell, c.h, rp.lambda, std::string(to_string(comp.kind)), comp.r_lo, comp.r_hi,
               flag(comp.through_tip), flag(rep.is_critical), flag(rep.flagged), kOracle});
    if (rep.components.empty())
        t.add({c.mu, c.ell, c.h, rp.lambda, std::string("Empty"), std::nan(""), std::nan(""), std::int64_t{0},
               flag(rep.is_critical), flag(rep.flagged), kOracle});
    return {std::move(t)};
}

std::string fiber_text(const Table& t)
{
    std::vector<std::pair<std::string, int>> counts;
    bool flagged = false;
    for (const auto& row : t.rows) {
        const auto& k = std::get<std::string>(row[4]);
        flagged = flagged || std::get<std::int64_t>(row[9]) != 0;
        if (k == "Empty") return "Empty";
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == k; });
        if (it == counts.end())
            counts.emplace_back(k, 1);
        else
            ++it->second;
    }
    std::sort(counts.begin(), counts.end());
    std::string s;
    for (const auto& [k, n] : counts) s += (s.empty() ? "" : " + ") + k + " ×" + std::to_string(n);
    if (flagged) s += " (flagged: too close to a multiplicity threshold)";
    return s;
}

namespace {

std::vector<EMValue> read_loop(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw io_error("cannot open loop file " + path);
    std::vector<EMValue> pts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        EMValue v;
        if (!(ls >> v.mu >> v.iota >> v.h)) {
            if (lineno == 1) continue;  // header
            throw validation_error(path + ":" + std::to_string(lineno) + ": expected mu,iota,h");
        }
        pts.push_back(v);
    }
    if (in.bad()) throw io_error("read error in " + path);
    return pts;
}

}  // namespace

std::vector<Table> monodromy_tables(const MonodromyConfig& c)
{
    const auto& mp = c.params;
    Errors err;
    err.check(std::isfinite(mp.kappa) && mp.kappa > 0.0, "monodromy requires --kappa > 0");
    err.check(c.loop.empty() != c.loop_file.empty(), "give exactly one of --loop and --loop-file");
    if (!c.loop.empty()) err.check(generator_from_string(c.loop).has_value(), "--loop must be gamma1, gamma2 or gamma3");
    err.check(c.points >= 8, "--points must be at least 8");
    err.check(c.radius_scale > 0.0, "--radius-scale must be positive");
    err.check(c.tol > 0.0 && c.tol < 1e-4, "--tol must lie in (0, 1e-4)");
    err.raise();

    std::vector<EMValue> loop;
    std::string name = c.loop;
    if (!c.loop.empty()) {
        LoopOptions lo;
        lo.points = c.points;
        lo.radius_scale = c.radius_scale;
        lo.reverse = c.reverse;
        loop = generator_loop(*generator_from_string(c.loop), mp, lo).points;
    }
    else {
        loop = read_loop(c.loop_file);
        if (c.reverse) std::reverse(loop.begin(), loop.end());
        name = c.loop_file;
    }
    MonodromyOptions mo;
    mo.rotation.tol = c.tol;
    mo.workers = c.workers;
    const auto res = monodromy_run(loop, mp, mo);
    const auto M = to_matrix(res.vector);
    std::ostringstream ms;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ms << (i || j ? " " : "") << M[i][j];
    Table t{"monodromy", {"loop", "m_N", "m_J", "winding_N", "winding_J", "points", "matrix", "source"}, {}};
    t.add({name, std::int64_t{res.vector.m_N}, std::int64_t{res.vector.m_J}, res.winding_N, res.winding_J,
           static_cast<std::int64_t>(res.points), ms.str(), kOracle});
    return {std::move(t)};
}

std::vector<Table> scale_tables(const ScaleConfig& c)
{
    Errors err;
    err.check(std::isfinite(c.kappa) && c.kappa != 0.0, "scale needs a finite nonzero --kappa");
    for (double v : {c.lambda, c.mu, c.ell, c.h, c.R, c.X, c.Y}) err.check(std::isfinite(v), "values must be finite");
    err.raise();
    const CasimirValues cas{c.mu, c.ell};
    const InvariantPoint pt{c.R, c.X, c.Y};
    const auto s = c.to_kappa ? kappa_scaling(cas, pt, c.h, c.lambda, c.kappa)
                              : kappa_scaling_inverse(cas, pt, c.h, c.lambda, c.kappa);
    Table t{"scale", {"direction", "kappa", "lambda", "mu", "ell", "h", "R", "X", "Y", "source"}, {}};
    t.add({std::string(c.to_kappa ? "to-kappa" : "to-unit"), c.to_kappa ? c.kappa : 1.0, s.lambda, s.mu, s.ell, s.H,
           s.R, s.X, s.Y, std::string("closed-form")});
    return {std::move(t)};
}

// ---- command line -------------------------------------------------------

namespace {

Format parse_format(const std::string& s)
{
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    return Format::Text;
}

void emit(const std::vector<Table>& tabs, Format f, const std::string& out_dir, std::ostream& out)
{
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw io_error("cannot create " + out_dir + ": " + ec.message());
        for (const auto& t : tabs) {
            const auto path = std::filesystem::path(out_dir) / (t.name + (f == Format::Json ? ".json" : ".csv"));
            std::ofstream os(path, std::ios::binary);
            if (!os) throw io_error("cannot open " + path.string() + " for writing");
            write_table(os, t, f == Format::Text ? Format::Csv : f);
            os.flush();
            if (!os) throw io_error("write failed for " + path.string());
            out << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
        }
        return;
    }
    for (const auto& t : tabs) {
        if (tabs.size() > 1) out << "# " << t.name << '\n';
        write_table(out, t, f == Format::Text ? Format::Csv : f);
    }
}

struct Common {
    double kappa = 1.0, delta = 0.0, lambda1 = 0.0, lambda2 = 0.0;
    std::string format = "csv";
    std::string out;
    int workers = 1;

    ModelParams params() const
    {
        ModelParams mp;
        mp.kappa = kappa;
        mp.delta = delta;
        mp.lambda1 = lambda1;
        mp.lambda2 = lambda2;
        return mp;
    }
};

void add_common(CLI::App* sub, Common& c, bool detuning, const std::string& fmt_default,
                std::vector<std::string> formats = {"csv", "json"})
{
    c.format = fmt_default;
    sub->set_help_flag("--help", "print this help");  // -h would collide with --h
    sub->add_option("--kappa", c.kappa, "coefficient of R^2/2")->envname("RES112_KAPPA")->capture_default_str();
    if (detuning) {
        sub->add_option("--delta", c.delta, "detuning")->envname("RES112_DELTA")->capture_default_str();
        sub->add_option("--lambda1", c.lambda1, "detuning slope in mu")->envname("RES112_LAMBDA1")->capture_default_str();
        sub->add_option("--lambda2", c.lambda2, "detuning slope in ell")->envname("RES112_LAMBDA2")->capture_default_str();
    }
    sub->add_option("--format", c.format, "output format")
        ->envname("RES112_FORMAT")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
    sub->add_option("--out", c.out, "output directory (default: stdout)")->envname("RES112_OUT");
    sub->add_option("--workers", c.workers, "worker threads, 0 = all cores")
        ->envname("RES112_WORKERS")
        ->check(CLI::Range(0, 1024))
        ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const SelfcheckFn& selfcheck)
{
    CLI::App app{"Bifurcations, critical values and monodromy of the 1:1:-2 resonance", "res112"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "res112 0.1.0");

    Common cb, cc, cf, cm, cs;
    BifdiagConfig bd;
    std::vector<double> lambda_window;
    auto* bif = app.add_subcommand("bifdiag", "bifurcation set slices at fixed ell and catalog surface samples");
    add_common(bif, cb, false, "csv");
    bif->add_option("--ell", bd.ells, "slice values of ell")->delimiter(',')->required()->allow_extra_args(false);
    bif->add_option("--lambda-range", lambda_window, "lambda window lo,hi")
        ->delimiter(',')
        ->expected(2)
        ->envname("RES112_LAMBDA_RANGE");
    bif->add_option("--grid", bd.grid, "lambda nodes per slice")->envname("RES112_GRID")->capture_default_str();
    bool no_oracle = false, no_surface = false;
    bif->add_flag("--no-oracle", no_oracle, "skip the numeric-oracle overlay");
    bif->add_flag("--no-surface", no_surface, "skip the surface samples");
    bif->add_option("--surface-grid", bd.surface_grid, "surface samples per axis")->capture_default_str();

    CritvalsConfig cv;
    std::vector<double> mu_range, ell_range;
    auto* crit = app.add_subcommand("critvals", "critical values of the energy-momentum map");
    add_common(crit, cc, true, "csv");
    crit->add_option("--grid", cv.grid, "nodes per axis of the (mu, ell) grid")->envname("RES112_GRID")->capture_default_str();
    crit->add_option("--mu-range", mu_range, "lo,hi")->delimiter(',')->expected(2);
    crit->add_option("--ell-range", ell_range, "lo,hi")->delimiter(',')->expected(2);
    crit->add_option("--tol", cv.tol, "bisection tolerance")->envname("RES112_TOL")->capture_default_str();

    FiberConfig fc;
    auto* fib = app.add_subcommand("fiber", "classify the fiber over (mu, ell, h)");
    add_common(fib, cf, true, "text", {"text", "csv", "json"});
    fib->add_option("--mu", fc.mu)->required();
    fib->add_option("--ell", fc.ell)->required();
    fib->add_option("--h", fc.h)->required();

    MonodromyConfig mc;
    auto* mon = app.add_subcommand("monodromy", "monodromy vector of a loop of regular values");
    add_common(mon, cm, true, "text", {"text", "csv", "json"});
    mon->add_option("--loop", mc.loop, "named generator loop: gamma1, gamma2, gamma3");
    mon->add_option("--loop-file", mc.loop_file, "CSV of mu,iota,h; first point repeated at the end");
    mon->add_option("--points", mc.points, "points on a generator loop")->capture_default_str();
    mon->add_option("--radius-scale", mc.radius_scale, "shrink/grow the generator loop")->capture_default_str();
    mon->add_flag("--reverse", mc.reverse, "traverse the loop backwards");
    mon->add_option("--tol", mc.tol, "integration tolerance")->envname("RES112_TOL")->capture_default_str();

    ScaleConfig sc;
    auto* scl = app.add_subcommand("scale", "carry values between the kappa frame and kappa = 1");
    add_common(scl, cs, false, "csv");
    scl->add_option("--lambda", sc.lambda)->capture_default_str();
    scl->add_option("--mu", sc.mu)->capture_default_str();
    scl->add_option("--ell", sc.ell)->capture_default_str();
    scl->add_option("--h", sc.h)->capture_default_str();
    scl->add_option("--R", sc.R)->capture_default_str();
    scl->add_option("--X", sc.X)->capture_default_str();
    scl->add_option("--Y", sc.Y)->capture_default_str();
    scl->add_flag("--to-kappa", sc.to_kappa, "carry kappa = 1 values onto the kappa frame instead");

    std::vector<int> only;
    auto* self = app.add_subcommand("selfcheck", "run the acceptance suite");
    self->add_option("--only", only, "criterion numbers")->delimiter(',');

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    }
    catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    }
    catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    }
    catch (const CLI::CallForVersion& e) {
        out << e.what() << '\n';
        return 0;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*bif) {
            bd.kappa = cb.kappa;
            bd.workers = cb.workers;
            bd.oracle = !no_oracle;
            bd.surface = !no_surface;
            if (!lambda_window.empty()) {
                bd.lambda_min = lambda_window[0];
                bd.lambda_max = lambda_window[1];
            }
            emit(bifdiag_tables(bd), parse_format(cb.format), cb.out, out);
        }
        else if (*crit) {
            cv.params = cc.params();
            cv.workers = cc.workers;
            if (!mu_range.empty()) cv.mu_range = std::pair{mu_range[0], mu_range[1]};
            if (!ell_range.empty()) cv.ell_range = std::pair{ell_range[0], ell_range[1]};
            emit(critvals_tables(cv), parse_format(cc.format), cc.out, out);
        }
        else if (*fib) {
            fc.params = cf.params();
            auto tabs = fiber_tables(fc);
            if (parse_format(cf.format) == Format::Text && cf.out.empty())
                out << fiber_text(tabs.front()) << '\n';
            else
                emit(tabs, parse_format(cf.format), cf.out, out);
        }
        else if (*mon) {
            mc.params = cm.params();
            mc.workers = cm.workers;
            auto tabs = monodromy_tables(mc);
            if (parse_format(cm.format) == Format::Text && cm.out.empty()) {
                const auto& r = tabs.front().rows.front();
                const auto m = std::get<std::string>(r[6]);
                std::istringstream ms(m);
                long e[9];
                for (auto& x : e) ms >> x;
                out << "loop " << std::get<std::string>(r[0]) << '\n'
                    << "monodromy vector (m_N, m_J) = (" << std::get<std::int64_t>(r[1]) << ", "
                    << std::get<std::int64_t>(r[2]) << ")\n"
                    << "winding before rounding = (" << format_double(std::get<double>(r[3])) << ", "
                    << format_double(std::get<double>(r[4])) << ")\n"
                    << "loop points after refinement = " << std::get<std::int64_t>(r[5]) << '\n'
                    << "monodromy matrix:\n";
                for (int i = 0; i < 3; ++i) out << "  " << e[3 * i] << ' ' << e[3 * i + 1] << ' ' << e[3 * i + 2] << '\n';
            }
            else {
                emit(tabs, parse_format(cm.format), cm.out, out);
            }
        }
        else if (*scl) {
            sc.kappa = cs.kappa;
            emit(scale_tables(sc), parse_format(cs.format), cs.out, out);
        }
        else if (*self) {
            if (!selfcheck) {
                err << "error: selfcheck is not available in this build\n";
                return 1;
            }
            return selfcheck(only, out);
        }
    }
    catch (const validation_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    catch (const io_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return 3;
    }
    catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace res112::cli
