#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "res112/bifurcations.hpp"
#include "res112/errors.hpp"
#include "res112/parallel.hpp"
#include "res112/reduced_space.hpp"

namespace res112 {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Triple-root data at a given a, parametrised by x = X1(a).
struct Elim {
    double lambda, kappa;

    double s(double a) const { return lambda + kappa * a; }
    double ell(double a, double x) const { return 3.0 * a - s(a) * s(a) + kappa * x; }
    double m(double a, double x) const { return 3.0 * a * a - 2.0 * a * ell(a, x) + 2.0 * s(a) * x; }
    double E(double a, double x) const
    {
        return x * x - (a * a - m(a, x)) * (a - ell(a, x));
    }
    double h(double a, double x) const { return x + lambda * a + 0.5 * kappa * a * a; }

    // E is quadratic in x; coefficients from three samples
    std::array<double, 3> quad(double a) const
    {
        const double em = E(a, -1.0), e0 = E(a, 0.0), ep = E(a, 1.0);
        return {e0, 0.5 * (ep - em), 0.5 * (ep + em) - e0};
    }
};

struct Roots {
    int n = 0;  // 0, 1, 2; -1 for E identically zero
    double x[2] = {kNaN, kNaN};
    double disc = 0.0;
};

Roots solve_quad(const std::array<double, 3>& c)
{
    Roots r;
    const double sc = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]);
    const double tiny = 1e-13 * std::max(1.0, sc);
    if (std::abs(c[2]) <= 1e-13 * std::max(1.0, std::abs(c[1]) + std::abs(c[0]))) {
        if (std::abs(c[1]) <= tiny) {
            r.n = std::abs(c[0]) <= tiny ? -1 : 0;
            return r;
        }
        r.n = 1;
        r.x[0] = -c[0] / c[1];
        r.disc = 1.0;
        return r;
    }
    r.disc = c[1] * c[1] - 4.0 * c[2] * c[0];
    if (r.disc < 0.0) return r;
    const double sq = std::sqrt(r.disc);
    const double q = -0.5 * (c[1] + std::copysign(sq, c[1]));
    double x1 = q / c[2];
    double x2 = q != 0.0 ? c[0] / q : x1;
    if (x1 > x2) std::swap(x1, x2);
    r.n = 2;
    r.x[0] = x1;
    r.x[1] = x2;
    return r;
}

struct Sweep {
    Elim el;
    double tol;
    std::vector<BifurcationEvent> events;

    bool admissible(double a, double x) const
    {
        const double l = el.ell(a, x), m = el.m(a, x);
        const double sm = 3.0 * a * a + 2.0 * std::abs(a * l) + 2.0 * std::abs(el.s(a) * x);
        const double tl = tol * std::max(1e-300, std::abs(a) + std::abs(l));
        return a >= 0.0 && m >= -tol * sm && a - l >= -tl && a * a - m >= -tol * (a * a + sm);
    }

    // The double root of E in x sits where the branch meets the tip
    // (a = ell, a^2 = mu^2); Newton on those two conditions is well posed
    // while the discriminant itself has a triple zero.
    std::pair<double, double> polish_tip(double a, double x) const
    {
        auto res = [&](double aa, double xx) {
            return std::array<double, 2>{aa - el.ell(aa, xx), aa * aa - el.m(aa, xx)};
        };
        const double a_in = a, x_in = x;
        for (int it = 0; it < 40; ++it) {
            const auto r = res(a, x);
            const double ha = 1e-7 * std::max(1.0, std::abs(a)), hx = 1e-7 * std::max(1.0, std::abs(x));
            const auto ra = res(a + ha, x), rx = res(a, x + hx);
            const double j00 = (ra[0] - r[0]) / ha, j01 = (rx[0] - r[0]) / hx;
            const double j10 = (ra[1] - r[1]) / ha, j11 = (rx[1] - r[1]) / hx;
            const double det = j00 * j11 - j01 * j10;
            if (!(std::abs(det) > 0.0)) break;
            const double da = (-r[0] * j11 + r[1] * j01) / det;
            const double dx = (-j00 * r[1] + j10 * r[0]) / det;
            a += da;
            x += dx;
            if (std::abs(da) <= 1e-16 * std::max(1.0, std::abs(a)) && std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x)))
                break;
        }
        const double sc = std::max(1.0, a * a);
        if (!std::isfinite(a) || std::abs(a - a_in) > 1e-5 * std::max(1.0, std::abs(a_in)) ||
            std::abs(el.E(a, x)) > 1e-12 * sc * sc)
            return {a_in, x_in};
        return {a, x};
    }

    void emit(double a, double x, bool on_mu0 = false)
    {
        if (!admissible(a, x)) return;
        a = std::max(a, 0.0);
        const double l = el.ell(a, x);
        const double m2 = on_mu0 ? 0.0 : std::max(0.0, el.m(a, x));
        const double mu = std::sqrt(m2);
        const double h = el.h(a, x);
        for (int sg : {-1, +1}) {
            if (sg > 0 && mu == 0.0) break;
            BifurcationEvent e;
            e.lambda = el.lambda;
            e.kappa = el.kappa;
            e.a = a;
            e.mu = sg * mu;
            e.ell = l;
            e.h = h;
            e.b = el.kappa != 0.0 ? 4.0 / (el.kappa * el.kappa) - 3.0 * a - 4.0 * el.lambda / el.kappa : kNaN;
            events.push_back(e);
        }
    }

    // constraint values along root slot k; NaN where the slot is absent
    std::array<double, 4> cons(double a, int k) const
    {
        const Roots r = solve_quad(el.quad(a));
        if (r.n < 1 || k >= r.n) return {kNaN, kNaN, kNaN, kNaN};
        const double x = r.x[k];
        const double m = el.m(a, x);
        return {a - el.ell(a, x), a * a - m, m, x};
    }

    template <class F>
    static double bisect(double lo, double hi, F&& f)
    {
        double flo = f(lo);
        for (int i = 0; i < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(hi)); ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (!std::isfinite(fm)) break;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    void line_family(double a)
    {
        // E vanishes identically: sample x along the admissible set
        const double L = 10.0 / std::max(std::pow(std::abs(el.kappa), 3), 1e-3);
        const int n = 800;
        double xp = kNaN;
        std::array<double, 3> cp{};
        for (int j = 0; j <= n; ++j) {
            const double x = -L + 2.0 * L * j / n;
            const double m = el.m(a, x);
            std::array<double, 3> c{a - el.ell(a, x), a * a - m, m};
            emit(a, x);
            if (j > 0) {
                for (int q = 0; q < 3; ++q) {
                    if ((c[q] < 0.0) != (cp[q] < 0.0)) {
                        const double xr = bisect(xp, x, [&](double t) {
                            const double mm = el.m(a, t);
                            const double v[3] = {a - el.ell(a, t), a * a - mm, mm};
                            return v[q];
                        });
                        emit(a, xr, q == 2);
                    }
                }
            }
            xp = x;
            cp = c;
        }
    }

    void run(double a_max, int grid, double a_cusp)
    {
        std::vector<double> nodes;
        for (int k = 0; k <= grid; ++k) nodes.push_back(a_max * k / grid);
        if (a_cusp > 0.0 && a_cusp < a_max) nodes.push_back(a_cusp);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

        auto disc = [&](double a) { return solve_quad(el.quad(a)).disc; };
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double a = nodes[i];
            const Roots r = solve_quad(el.quad(a));
            if (r.n == -1) {
                line_family(a);
            } else {
                for (int k = 0; k < r.n; ++k) emit(a, r.x[k]);
            }
            if (i == 0) continue;
            const double ap = nodes[i - 1];
            const Roots rp = solve_quad(el.quad(ap));
            // double root of E
            if (rp.n != -1 && r.n != -1 && (rp.disc < 0.0) != (r.disc < 0.0)) {
                const double az = bisect(ap, a, disc);
                const auto c = el.quad(az);
                if (std::abs(c[2]) > 0.0) {
                    const auto [ap2, xp2] = polish_tip(az, -c[1] / (2.0 * c[2]));
                    emit(ap2, xp2);
                }
            }
            // admissibility boundaries along each root slot
            for (int k = 0; k < 2; ++k) {
                const auto c0 = cons(ap, k), c1 = cons(a, k);
                for (int q = 0; q < 3; ++q) {
                    if (!std::isfinite(c0[q]) || !std::isfinite(c1[q])) continue;
                    if (!(c0[q] * c1[q] < 0.0)) continue;
                    const double az = bisect(ap, a, [&](double t) { return cons(t, k)[q]; });
                    const auto cz = cons(az, k);
                    if (std::isfinite(cz[3])) emit(az, cz[3], q == 2);
                }
            }
        }
    }
};

void dedupe(std::vector<BifurcationEvent>& ev)
{
    std::sort(ev.begin(), ev.end(), [](const auto& x, const auto& y) {
        return std::tie(x.a, x.mu, x.ell) < std::tie(y.a, y.mu, y.ell);
    });
    std::vector<BifurcationEvent> out;
    for (const auto& e : ev) {
        bool dup = false;
        for (std::size_t i = out.size(); i-- > 0 && out.size() - i <= 8;) {
            const auto& o = out[i];
            if (std::abs(o.a - e.a) + std::abs(o.mu - e.mu) + std::abs(o.ell - e.ell) <=
                1e-12 * std::max(1.0, std::abs(e.a)))
                dup = true;
        }
        if (!dup) out.push_back(e);
    }
    ev = std::move(out);
}

void classify_event(BifurcationEvent& e)
{
    const CasimirValues cas{e.mu, e.ell};
    const Quartic q = f_quartic(e.h, {e.lambda, e.kappa}, cas);
    ClassifyTolerances tol;
    tol.residual = 1e-6;
    e.kind = classify_multiple_root(e.a, q, cas, tol).kind;
}

OracleResult solve_one(double kappa, double lambda, const OracleOptions& opt)
{
    OracleResult res;
    res.lambda = lambda;
    const double lk = kappa < 0.0 ? -lambda : lambda;
    const double k = std::abs(kappa);
    Sweep sw{{lk, k}, opt.admissible_tol, {}};
    double a_max, a_cusp = -1.0;
    if (k > 0.0) {
        const double u = std::abs(k * lk);
        a_max = 1.2 * (u + 1.0 + std::sqrt(1.0 + 2.0 * u)) / (k * k);
        a_cusp = (1.0 - k * lk) / (k * k);
    } else {
        a_max = std::max(0.6 * lk * lk, 1e-3);
    }
    sw.run(a_max, opt.grid, a_cusp);
    dedupe(sw.events);
    for (auto& e : sw.events) {
        if (kappa < 0.0) {
            e.lambda = -e.lambda;
            e.h = -e.h;
            e.kappa = kappa;
        }
        try {
            classify_event(e);
        } catch (const validation_error& ex) {
            e.kind = BifKind::DegenerateBoundary;
        }
        tag_event(e, opt.match_radius);
        if (e.family)
            res.events.push_back(e);
        else
            res.unmatched.push_back(e);
    }
    return res;
}

int dimension(Family f)
{
    switch (f) {
    case Family::CS1:
    case Family::CS2:
    case Family::CS3:
    case Family::CS4:
    case Family::CS1_k0:
    case Family::CS2_k0:
    case Family::CS3_k0: return 2;
    case Family::Cusp1:
    case Family::Cusp2:
    case Family::Cusp3:
    case Family::HHsub1:
    case Family::HHsub2:
    case Family::HHsub3:
    case Family::HHsup1:
    case Family::HHsup2:
    case Family::HHsup3:
    case Family::HHsub1_k0:
    case Family::HHsub2_k0:
    case Family::HHsub3_k0: return 1;
    default: return 0;
    }
}

constexpr Family kAll[] = {
    Family::HHdeg1, Family::HHdeg2, Family::HHdeg3, Family::HHsub3, Family::HHsup3, Family::HHsub3_k0,
    Family::Cusp1,  Family::Cusp2,  Family::Cusp3,  Family::HHsub1, Family::HHsub2, Family::HHsup1,
    Family::HHsup2, Family::HHsub1_k0, Family::HHsub2_k0, Family::CS1, Family::CS2, Family::CS3,
    Family::CS4,    Family::CS1_k0, Family::CS2_k0, Family::CS3_k0,
};

}  // namespace

void tag_event(BifurcationEvent& e, double match_radius)
{
    e.family.reset();
    e.tag_distance = std::numeric_limits<double>::infinity();
    bool bnd = false;
    int best_dim = 99;
    for (Family f : kAll) {
        if (!family_present(f, e.lambda, e.kappa)) continue;
        std::vector<BifurcationEvent> cands;
        try {
            FamilyParams p;
            p.lambda = e.lambda;
            if (dimension(f) == 2) {
                const auto r = family_a_range(f, e.lambda, e.kappa);
                if (!r) continue;
                p.a = std::clamp(e.a, r->first, r->second);
                if (std::abs(p.a - e.a) > match_radius) continue;
                for (int sg : {-1, +1}) {
                    p.sign = sg;
                    cands.push_back(catalog_point(f, p, e.kappa));
                }
            } else if (f == Family::Cusp3) {
                const double lim = 0.5 / (e.kappa * e.kappa);
                p.mu = std::clamp(e.mu, -lim, lim);
                cands.push_back(catalog_point(f, p, e.kappa));
            } else {
                cands.push_back(catalog_point(f, p, e.kappa));
            }
        } catch (const validation_error&) {
            continue;
        }
        for (const auto& c : cands) {
            const double d = std::max({std::abs(c.mu - e.mu), std::abs(c.ell - e.ell), std::abs(c.a - e.a)});
            const double slack = 1e-11 * std::max(1.0, std::abs(e.a));
            const bool better = d < e.tag_distance - slack ||
                                (d <= e.tag_distance + slack && dimension(f) < best_dim);
            if (better) {
                e.tag_distance = d;
                e.family = f;
                best_dim = dimension(f);
                bnd = c.boundary;
            }
        }
    }
    if (!e.family || e.tag_distance > match_radius) {
        e.family.reset();
        return;
    }
    e.boundary = bnd;
}

std::vector<OracleResult> solve_bifurcations_numeric(double kappa, const std::vector<double>& lambdas,
                                                     const OracleOptions& opt, int workers)
{
    if (!std::isfinite(kappa)) throw validation_error("kappa must be finite");
    if (opt.grid < 2) throw validation_error("grid must be at least 2");
    for (double l : lambdas)
        if (!std::isfinite(l)) throw validation_error("lambda must be finite");
    std::vector<OracleResult> out(lambdas.size());
    parallel_for(lambdas.size(), workers, [&](std::size_t i) {
        try {
            out[i] = solve_one(kappa, lambdas[i], opt);
        } catch (const std::exception& ex) {
            out[i] = OracleResult{};
            out[i].lambda = lambdas[i];
            out[i].failure = ex.what();
        }
    });
    return out;
}

std::vector<BifurcationEvent> newton_bifurcations(double lambda, double mu, double kappa,
                                                  const std::vector<std::array<double, 3>>& seeds)
{
    const ReducedParams rp{lambda, kappa};
    auto residual = [&](const Eigen::Vector3d& v) {
        const Quartic q = f_quartic(v[1], rp, {mu, v[2]});
        return Eigen::Vector3d(q(v[0]), q.deriv(v[0], 1), q.deriv(v[0], 2));
    };
    std::vector<BifurcationEvent> out;
    for (const auto& s : seeds) {
        Eigen::Vector3d v(s[0], s[1], s[2]);
        Eigen::Vector3d r = residual(v);
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
            const double sc = std::max(1.0, std::pow(std::abs(v[0]), 4) * kappa * kappa + v[1] * v[1]);
            if (r.norm() <= 1e-14 * sc) {
                ok = true;
                break;
            }
            Eigen::Matrix3d J;
            for (int c = 0; c < 3; ++c) {
                Eigen::Vector3d vp = v;
                const double st = 1e-7 * std::max(1.0, std::abs(v[c]));
                vp[c] += st;
                Eigen::Vector3d vm = v;
                vm[c] -= st;
                J.col(c) = (residual(vp) - residual(vm)) / (2.0 * st);
            }
            const Eigen::Vector3d dv = J.fullPivLu().solve(-r);
            if (!dv.allFinite()) break;
            double t = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
                const Eigen::Vector3d vn = v + t * dv;
                const Eigen::Vector3d rn = residual(vn);
                if (rn.norm() < r.norm()) {
                    v = vn;
                    r = rn;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                ok = r.norm() <= 1e-10 * sc;
                break;
            }
        }
        if (!ok) continue;
        const CasimirValues cas{mu, v[2]};
        if (v[0] < r_min(cas) - 1e-9 * std::max(1.0, std::abs(v[0]))) continue;
        BifurcationEvent e;
        e.a = v[0];
        e.h = v[1];
        e.ell = v[2];
        e.mu = mu;
        e.lambda = lambda;
        e.kappa = kappa;
        e.b = kappa != 0.0 ? 4.0 / (kappa * kappa) - 3.0 * e.a - 4.0 * lambda / kappa : kNaN;
        const bool dup = std::any_of(out.begin(), out.end(), [&](const auto& o) {
            return std::abs(o.a - e.a) + std::abs(o.h - e.h) + std::abs(o.ell - e.ell) < 1e-8;
        });
        if (dup) continue;
        try {
            classify_event(e);
        } catch (const validation_error&) {
            continue;
        }
        tag_event(e, 1e-6);
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    return out;
}

}  // namespace res112
