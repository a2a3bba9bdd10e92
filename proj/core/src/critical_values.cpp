#include "res112/critical_values.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "res112/bifurcations.hpp"
#include "res112/errors.hpp"
#include "res112/parallel.hpp"
#include "res112/poly.hpp"

namespace res112 {

const char* to_string(FiberKind k)
{
    switch (k) {
    case FiberKind::Point: return "Point";
    case FiberKind::Circle: return "Circle";
    case FiberKind::Torus2: return "Torus2";
    case FiberKind::Torus3: return "Torus3";
    case FiberKind::PinchedTorusTimesT1: return "PinchedTorusTimesT1";
    case FiberKind::FigureEightTimesT2: return "FigureEightTimesT2";
    case FiberKind::CuspPinchedT3: return "CuspPinchedT3";
    }
    return "?";
}

const char* to_string(FaceKind k)
{
    switch (k) {
    case FaceKind::Elliptic: return "Elliptic";
    case FaceKind::Hyperbolic: return "Hyperbolic";
    case FaceKind::Tip: return "Tip";
    }
    return "?";
}

int FiberReport::count(FiberKind k) const
{
    return static_cast<int>(std::count_if(components.begin(), components.end(),
                                          [&](const ComponentDescriptor& c) { return c.kind == k; }));
}

std::string FiberReport::summary() const
{
    if (components.empty()) return "Empty";
    std::map<int, int> n;
    for (const auto& c : components) ++n[static_cast<int>(c.kind)];
    std::ostringstream os;
    bool first = true;
    for (auto [k, c] : n) {
        if (!first) os << " + ";
        first = false;
        os << to_string(static_cast<FiberKind>(k)) << " x" << c;
    }
    return os.str();
}

namespace {

poly::coeffs deflate_linear(const poly::coeffs& c, double r)
{
    const std::size_t n = c.size();
    if (n < 2) return {};
    poly::coeffs b(n - 1);
    b[n - 2] = c[n - 1];
    for (std::size_t k = n - 2; k-- > 0;) b[k] = c[k + 1] + r * b[k + 1];
    return b;
}

struct Root {
    double r;
    int mult;
};

void add_note(FiberReport& rep, const std::string& s)
{
    if (!rep.note.empty()) rep.note += "; ";
    rep.note += s;
}

}  // namespace

FiberReport classify_fiber(const CasimirValues& cas, const ReducedParams& rp, double h, const FiberOptions& opt)
{
    if (!(rp.kappa > 0.0)) throw unsupported_regime("classify_fiber requires kappa > 0 (compact fibers)");
    if (!std::isfinite(cas.mu) || !std::isfinite(cas.ell) || !std::isfinite(h) || !std::isfinite(rp.lambda))
        throw validation_error("classify_fiber: non-finite input");

    FiberReport rep;
    const TipClass tip = tip_class(cas);
    const double rmin = tip.r_min;
    const double rtol = 1e-12 * std::max(1.0, std::abs(rmin));
    const auto eqs = equilibria(cas, rp);

    std::vector<Root> roots;
    Quartic q = f_quartic(h, rp, cas);
    poly::coeffs c(q.c.begin(), q.c.end());

    for (const auto& e : eqs) {
        const double d = std::abs(h - e.h);
        const double tol = opt.snap_tol * std::max(1.0, std::abs(e.h));
        if (d <= tol) {
            roots.push_back({e.R, 2});
            c = deflate_linear(deflate_linear(c, e.R), e.R);
            if (e.stability == Stability::Degenerate) {
                rep.flagged = true;
                add_note(rep, "energy of a degenerate equilibrium");
            }
        } else if (d <= opt.band * tol) {
            rep.flagged = true;
            add_note(rep, "energy within the ambiguity band of a critical height");
        }
    }

    for (double r : poly::real_roots(poly::trimmed(c))) {
        if (r < rmin - std::max(rtol, 1e-10 * std::max(1.0, std::abs(rmin)))) continue;
        r = std::max(r, rmin);
        auto hit = std::find_if(roots.begin(), roots.end(), [&](const Root& x) {
            return std::abs(x.r - r) <= opt.root_merge * std::max(1.0, std::abs(r));
        });
        if (hit != roots.end()) {
            const bool cusp_origin = tip.kind == TipKind::Cusp && std::abs(hit->r - rmin) <= rtol;
            if (hit->mult >= 2 && !cusp_origin) {
                rep.flagged = true;
                add_note(rep, "root of multiplicity above two");
            } else if (hit->mult == 1) {
                rep.flagged = true;
                add_note(rep, "two simple roots closer than the merge tolerance");
            }
            ++hit->mult;
        } else {
            roots.push_back({r, 1});
        }
    }
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.r < b.r; });

    // Signs of F on the gaps, from the right where F > 0.
    const std::size_t n = roots.size();
    std::vector<int> right(n);  // sign on (r_i, r_{i+1})
    int s = 1;
    for (std::size_t i = n; i-- > 0;) {
        right[i] = s;
        if (roots[i].mult % 2 == 1) s = -s;
    }
    const bool root_at_tip = n > 0 && roots[0].r - rmin <= rtol;
    if (!root_at_tip && s < 0) {
        rep.flagged = true;
        add_note(rep, "F(R_min) < 0 by parity");
    }

    auto at_tip_kind = [&]() {
        switch (tip.kind) {
        case TipKind::Cone: return FiberKind::Circle;
        case TipKind::Cusp: return FiberKind::Point;
        default: return FiberKind::Torus2;
        }
    };

    std::size_t i = 0;
    while (i < n) {
        const bool left_neg = i > 0 && right[i - 1] < 0;
        if (right[i] < 0 && !left_neg) {
            // start of a negative chain at roots[i]
            std::size_t j = i;
            int joins = 0;
            while (j + 1 < n && right[j + 1] < 0) {
                ++joins;
                ++j;
            }
            ComponentDescriptor comp;
            comp.r_lo = roots[i].r;
            comp.r_hi = j + 1 < n ? roots[j + 1].r : std::numeric_limits<double>::infinity();
            const bool starts_at_tip = i == 0 && root_at_tip;
            comp.through_tip = starts_at_tip;
            if (joins > 0) {
                comp.kind = FiberKind::FigureEightTimesT2;
                if (joins > 1 || (starts_at_tip && tip.kind != TipKind::Smooth)) {
                    rep.flagged = true;
                    add_note(rep, "several hyperbolic junctions in one component");
                }
            } else if (starts_at_tip && tip.kind == TipKind::Cone) {
                comp.kind = FiberKind::PinchedTorusTimesT1;
            } else if (starts_at_tip && tip.kind == TipKind::Cusp) {
                comp.kind = FiberKind::CuspPinchedT3;
                if (roots[0].mult < 3) {
                    rep.flagged = true;
                    add_note(rep, "cusp tip with F < 0 beside a double root");
                }
            } else {
                comp.kind = FiberKind::Torus3;
            }
            rep.components.push_back(comp);
            i = j + 1;
            continue;
        }
        if (right[i] > 0 && !left_neg && roots[i].mult % 2 == 0) {
            ComponentDescriptor comp;
            comp.r_lo = comp.r_hi = roots[i].r;
            const bool at_tip = i == 0 && root_at_tip;
            comp.through_tip = at_tip;
            comp.kind = at_tip ? at_tip_kind() : FiberKind::Torus2;
            rep.components.push_back(comp);
        }
        ++i;
    }

    rep.is_critical = std::any_of(rep.components.begin(), rep.components.end(),
                                  [](const ComponentDescriptor& c) { return c.kind != FiberKind::Torus3; });
    return rep;
}

CasimirValues ThreadSegment::casimirs(double ell) const
{
    if (name == "C23") return {ell, ell};
    if (name == "C13") return {-ell, ell};
    return {0.0, ell};
}

double ThreadSegment::h_c(double ell, const ReducedParams& rp) const
{
    if (name == "C12") return 0.0;
    return rp.lambda * ell + 0.5 * rp.kappa * ell * ell;
}

namespace {

double automatic_extent(const ReducedParams& rp)
{
    const double k2 = rp.kappa * rp.kappa;
    return 4.0 * (1.0 + rp.lambda * rp.lambda + (1.0 + std::abs(rp.kappa * rp.lambda)) / k2);
}

bool above_min(const ThreadSegment& t, double ell, const ReducedParams& rp)
{
    const CasimirValues cas = t.casimirs(ell);
    const double hc = t.h_c(ell, rp);
    const double hm = h_min(cas, rp);
    return hc - hm > 1e-12 * std::max(1.0, std::abs(hc));
}

std::vector<Interval> true_runs(double lo, double hi, int samples, double tol, const std::function<bool(double)>& pred)
{
    std::vector<Interval> out;
    std::vector<double> x(samples + 1);
    std::vector<char> v(samples + 1);
    for (int k = 0; k <= samples; ++k) {
        x[k] = lo + (hi - lo) * k / samples;
        v[k] = pred(x[k]);
    }
    auto edge = [&](double a, double b, bool va) {
        while (b - a > tol) {
            const double m = 0.5 * (a + b);
            if (static_cast<bool>(pred(m)) == va)
                a = m;
            else
                b = m;
        }
        return 0.5 * (a + b);
    };
    bool open = v[0];
    double start = lo;
    for (int k = 1; k <= samples; ++k) {
        if (v[k] != v[k - 1]) {
            const double e = edge(x[k - 1], x[k], v[k - 1]);
            if (v[k]) {
                start = e;
                open = true;
            } else if (open) {
                out.push_back({start, e});
                open = false;
            }
        }
    }
    if (open) out.push_back({start, hi});
    return out;
}

}  // namespace

std::vector<ThreadSegment> thread_segments(const ReducedParams& rp, const ThreadOptions& opt)
{
    if (!(rp.kappa > 0.0)) throw unsupported_regime("thread_segments requires kappa > 0");
    const double E = opt.ell_extent > 0.0 ? opt.ell_extent : automatic_extent(rp);
    const double k = rp.kappa, k2 = k * k, u = k * rp.lambda;
    // keep the scan off the cusp at ell = 0
    const double eps = 1e-9 * E;

    std::vector<ThreadSegment> out;
    for (const char* nm : {"C23", "C13", "C12"}) {
        ThreadSegment t;
        t.name = nm;
        if (t.name == "C12") {
            t.domain = {-E, -eps};
            const double top = -rp.lambda * rp.lambda;
            if (top > -E) t.unstable = Interval{-E, std::min(top, 0.0)};
        } else {
            t.domain = {eps, E};
            if (u < 0.5) {
                const double w = std::sqrt(1.0 - 2.0 * u);
                const double a = (1.0 - u - w) / k2, b = (1.0 - u + w) / k2;
                if (b > 0.0) t.unstable = Interval{std::max(a, 0.0), b};
            }
        }
        t.above_min = true_runs(t.domain.lo, t.domain.hi, opt.samples, opt.bisect_tol,
                                [&](double ell) { return above_min(t, ell, rp); });
        out.push_back(std::move(t));
    }
    return out;
}

std::optional<double> ell_star(const ReducedParams& rp, double tol)
{
    if (!(rp.kappa > 0.0)) throw unsupported_regime("ell_star requires kappa > 0");
    const double lo = -rp.lambda * rp.lambda;
    if (!(lo < 0.0)) return std::nullopt;
    ThreadSegment t;
    t.name = "C12";
    // h_c > h_min just above -lambda^2; the thread joins B where that stops
    const double a = lo * (1.0 - 1e-9), b = lo * 1e-9;
    const auto runs = true_runs(a, b, 400, tol, [&](double ell) { return above_min(t, ell, rp); });
    for (const auto& r : runs)
        if (r.hi < b) return r.hi;
    return std::nullopt;
}

std::vector<SliceNode> critical_slice(const ReducedParams& rp, const SliceGrid& g, int workers)
{
    if (!(rp.kappa > 0.0)) throw unsupported_regime("critical_slice requires kappa > 0");
    if (g.n_mu < 1 || g.n_ell < 1) throw validation_error("slice grid must have at least one node per axis");
    const std::size_t total = static_cast<std::size_t>(g.n_mu) * g.n_ell;
    std::vector<SliceNode> out(total);
    auto coord = [](double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };
    parallel_for(total, workers, [&](std::size_t idx) {
        SliceNode& node = out[idx];
        const int il = static_cast<int>(idx / g.n_mu), im = static_cast<int>(idx % g.n_mu);
        node.mu = coord(g.mu_lo, g.mu_hi, g.n_mu, im);
        node.ell = coord(g.ell_lo, g.ell_hi, g.n_ell, il);
        try {
            const CasimirValues cas{node.mu, node.ell};
            const auto eqs = equilibria(cas, rp);
            node.h_min = std::numeric_limits<double>::infinity();
            for (const auto& e : eqs) node.h_min = std::min(node.h_min, e.h);
            for (const auto& e : eqs) {
                if (e.stability != Stability::SingularTip) ++node.regular_equilibria;
                if (e.h <= node.h_min + 1e-12 * std::max(1.0, std::abs(node.h_min))) continue;
                FacePoint f;
                f.h = e.h;
                f.R = e.R;
                f.kind = e.stability == Stability::SingularTip  ? FaceKind::Tip
                         : e.stability == Stability::Hyperbolic ? FaceKind::Hyperbolic
                                                                : FaceKind::Elliptic;
                const auto rep = classify_fiber(cas, rp, e.h);
                f.validated = rep.is_critical && !rep.flagged;
                node.faces.push_back(f);
            }
            std::sort(node.faces.begin(), node.faces.end(),
                      [](const FacePoint& a, const FacePoint& b) { return a.h < b.h; });
        } catch (const std::exception& ex) {
            node.error = ex.what();
        }
    });
    return out;
}

namespace {

// h-extent where two T^3 families coexist; 0 unless three regular equilibria
double coexistence_extent(const CasimirValues& cas, const ReducedParams& rp)
{
    std::vector<Equilibrium> reg;
    for (const auto& e : equilibria(cas, rp))
        if (e.stability != Stability::SingularTip) reg.push_back(e);
    if (reg.size() != 3) return 0.0;
    double hmin = h_min(cas, rp);
    const Equilibrium* hyp = nullptr;
    const Equilibrium* other = nullptr;
    for (const auto& e : reg) {
        if (e.stability == Stability::Hyperbolic)
            hyp = &e;
        else if (e.stability == Stability::Elliptic && e.h > hmin + 1e-14 * std::max(1.0, std::abs(hmin)))
            other = &e;
    }
    if (!hyp || !other) return 0.0;
    return std::abs(hyp->h - other->h);
}

}  // namespace

double tetrahedron_volume(const ReducedParams& rp, const SliceGrid& g, int workers)
{
    if (!(rp.kappa > 0.0)) throw unsupported_regime("tetrahedron_volume requires kappa > 0");
    if (g.n_mu < 2 || g.n_ell < 2) throw validation_error("volume grid needs two nodes per axis");
    const double dmu = (g.mu_hi - g.mu_lo) / (g.n_mu - 1), dell = (g.ell_hi - g.ell_lo) / (g.n_ell - 1);
    const std::size_t total = static_cast<std::size_t>(g.n_mu) * g.n_ell;
    std::vector<double> ext(total, 0.0);
    parallel_for(total, workers, [&](std::size_t idx) {
        const int il = static_cast<int>(idx / g.n_mu), im = static_cast<int>(idx % g.n_mu);
        const CasimirValues cas{g.mu_lo + dmu * im, g.ell_lo + dell * il};
        try {
            ext[idx] = coexistence_extent(cas, rp);
        } catch (const numerical_error&) {
            ext[idx] = 0.0;
        }
    });
    double v = 0.0;
    for (double e : ext) v += e;
    return v * dmu * dell;
}

namespace {

std::optional<double> elliptic_gap(const CasimirValues& cas, const ReducedParams& rp, double* h_out = nullptr)
{
    std::vector<Equilibrium> ell;
    int reg = 0;
    for (const auto& e : equilibria(cas, rp)) {
        if (e.stability == Stability::SingularTip) continue;
        ++reg;
        if (e.stability == Stability::Elliptic) ell.push_back(e);
    }
    if (reg != 3 || ell.size() != 2) return std::nullopt;
    if (h_out) *h_out = 0.5 * (ell[0].h + ell[1].h);
    return ell.front().h - ell.back().h;
}

}  // namespace

std::vector<LocusPoint> elliptic_crossing_locus(const ReducedParams& rp, const SliceGrid& g, int workers)
{
    if (!(rp.kappa > 0.0)) throw unsupported_regime("elliptic_crossing_locus requires kappa > 0");
    if (g.n_mu < 2 || g.n_ell < 1) throw validation_error("locus grid needs two mu nodes");
    std::vector<std::vector<LocusPoint>> rows(g.n_ell);
    parallel_for(static_cast<std::size_t>(g.n_ell), workers, [&](std::size_t il) {
        const double ell = g.n_ell == 1 ? g.ell_lo : g.ell_lo + (g.ell_hi - g.ell_lo) * il / (g.n_ell - 1);
        std::optional<double> prev;
        double mprev = 0.0;
        for (int im = 0; im < g.n_mu; ++im) {
            const double mu = g.mu_lo + (g.mu_hi - g.mu_lo) * im / (g.n_mu - 1);
            std::optional<double> cur;
            try {
                cur = elliptic_gap({mu, ell}, rp);
            } catch (const numerical_error&) {
            }
            if (prev && cur && (*prev < 0.0) != (*cur < 0.0)) {
                double a = mprev, b = mu;
                const bool va = *prev < 0.0;
                bool ok = true;
                for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
                    const double m = 0.5 * (a + b);
                    const auto gm = elliptic_gap({m, ell}, rp);
                    if (!gm) {
                        ok = false;
                        break;
                    }
                    if ((*gm < 0.0) == va)
                        a = m;
                    else
                        b = m;
                }
                if (ok) {
                    LocusPoint p;
                    p.mu = 0.5 * (a + b);
                    p.ell = ell;
                    elliptic_gap({p.mu, ell}, rp, &p.h);
                    rows[il].push_back(p);
                }
            }
            prev = cur;
            mprev = mu;
        }
    });
    std::vector<LocusPoint> out;
    for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

}  // namespace res112
