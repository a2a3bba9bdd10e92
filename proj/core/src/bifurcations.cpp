#include "res112/bifurcations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "res112/errors.hpp"
#include "res112/reduced_space.hpp"

namespace res112 {

double Quartic::deriv(double R, int k) const
{
    double r = 0.0;
    for (int n = 4; n >= k; --n) {
        double f = 1.0;
        for (int i = 0; i < k; ++i) f *= static_cast<double>(n - i);
        r = r * R + f * c[n];
    }
    return r;
}

double Quartic::scale(double a) const
{
    const double k2 = 4.0 * std::abs(c[4]);
    return std::max(1.0, std::pow(std::abs(a), 4) * k2);
}

Quartic f_quartic(double h, const ReducedParams& rp, const CasimirValues& cas)
{
    const double l = rp.lambda, k = rp.kappa, m2 = cas.mu * cas.mu;
    Quartic q;
    q.c[4] = 0.25 * k * k;
    q.c[3] = l * k - 1.0;
    q.c[2] = l * l - h * k + cas.ell;
    q.c[1] = -2.0 * h * l + m2;
    q.c[0] = h * h - m2 * cas.ell;
    return q;
}

const char* to_string(BifKind k)
{
    switch (k) {
    case BifKind::CentreSaddle: return "CentreSaddle";
    case BifKind::Cusp: return "Cusp";
    case BifKind::HopfSub: return "HopfSub";
    case BifKind::HopfSuper: return "HopfSuper";
    case BifKind::HopfDegenerate: return "HopfDegenerate";
    case BifKind::DegenerateBoundary: return "DegenerateBoundary";
    }
    return "?";
}

namespace {
double third_scale(const Quartic& q, double a)
{
    // F''' = 24 c4 a + 6 c3
    return 24.0 * std::abs(q.c[4]) * std::abs(a) + 6.0 * std::abs(q.c[3]) + 6.0;
}
}  // namespace

RootClassification classify_multiple_root(double a, const Quartic& q, const CasimirValues& cas,
                                          const ClassifyTolerances& tol)
{
    const double sc = q.scale(a);
    const double r0 = std::abs(q(a)), r1 = std::abs(q.deriv(a, 1)), r2 = std::abs(q.deriv(a, 2));
    if (r0 > tol.residual * sc || r1 > tol.residual * sc || r2 > tol.residual * sc) {
        std::ostringstream os;
        os << "not a triple root: |F|=" << r0 << " |F'|=" << r1 << " |F''|=" << r2;
        throw validation_error(os.str());
    }

    RootClassification out;
    out.gap = a - r_min(cas);
    out.f3 = q.deriv(a, 3);
    const double gtol = tol.gap * std::max(1.0, std::abs(a));
    const double ftol = tol.third * third_scale(q, a);
    const double ag = std::abs(out.gap), af = std::abs(out.f3);

    const bool at_tip = ag <= gtol;
    const bool flat = af <= ftol;
    const bool gap_ambiguous = ag > gtol && ag <= tol.band * gtol;
    const bool f3_ambiguous = af > ftol && af <= tol.band * ftol;

    if (out.gap < -gtol) {
        out.kind = BifKind::DegenerateBoundary;
        out.note = "multiple root below R_min";
        return out;
    }
    if (gap_ambiguous || f3_ambiguous) {
        std::ostringstream os;
        os << "ambiguous: a-R_min=" << out.gap << " F'''=" << out.f3;
        out.kind = BifKind::DegenerateBoundary;
        out.note = os.str();
        return out;
    }
    if (at_tip)
        out.kind = flat ? BifKind::HopfDegenerate : (out.f3 > 0.0 ? BifKind::HopfSuper : BifKind::HopfSub);
    else
        out.kind = flat ? BifKind::Cusp : BifKind::CentreSaddle;
    return out;
}

std::optional<InstabilityInterval> instability_interval(const CasimirValues& cas, double kappa)
{
    const TipClass tip = tip_class(cas);
    if (tip.kind != TipKind::Cone) return std::nullopt;
    const double R = tip.r_min;
    // at h = h_c: F''(R_min) = 2 (lambda + kappa R)^2 - P''(R_min)
    const double p2 = cas.ell < 0.0 ? -2.0 * cas.ell : 4.0 * R;
    if (!(p2 > 0.0)) return std::nullopt;
    const double w = std::sqrt(0.5 * p2);
    InstabilityInterval iv;
    iv.lo = -kappa * R - w;
    iv.hi = -kappa * R + w;
    auto kind = [&](double lam) {
        const double f3 = 6.0 * kappa * kappa * R + 6.0 * (kappa * lam - 1.0);
        if (std::abs(f3) <= 1e-12 * (6.0 + 6.0 * std::abs(kappa * lam) + 6.0 * kappa * kappa * R))
            return BifKind::HopfDegenerate;
        return f3 > 0.0 ? BifKind::HopfSuper : BifKind::HopfSub;
    };
    iv.lo_kind = kind(iv.lo);
    iv.hi_kind = kind(iv.hi);
    return iv;
}

namespace {

struct TipCase {
    int mu_sign;  // +1, -1: ell = |mu|; 0: mu = 0, ell < 0
};

// F'' and F''' at a = R_min with h = h_c for the given tip case; unknowns
// (lambda, ell).
Eigen::Vector2d tip_residual(const Eigen::Vector2d& v, const TipCase& tc, double kappa, double& a_out,
                             double& h_out, Quartic& q_out)
{
    const double lam = v[0], ell = v[1];
    CasimirValues cas{tc.mu_sign == 0 ? 0.0 : tc.mu_sign * ell, ell};
    const double a = r_min(cas);
    const ReducedParams rp{lam, kappa};
    const double h = tip_energy(cas, rp);
    const Quartic q = f_quartic(h, rp, cas);
    a_out = a;
    h_out = h;
    q_out = q;
    return {q.deriv(a, 2), q.deriv(a, 3)};
}

}  // namespace

std::vector<BifurcationEvent> degenerate_hopf_points(double kappa)
{
    if (!(kappa > 0.0)) throw unsupported_regime("degenerate_hopf_points requires kappa > 0");
    std::vector<BifurcationEvent> found;
    const TipCase cases[] = {{+1}, {-1}, {0}};
    const double k2 = kappa * kappa;
    for (const auto& tc : cases) {
        for (int i = 0; i <= 24; ++i) {
            for (int j = 1; j <= 12; ++j) {
                const double lam0 = (-3.0 + 0.25 * i) / kappa;
                const double ell0 = (tc.mu_sign == 0 ? -0.25 * j : 0.25 * j) / k2;
                Eigen::Vector2d v(lam0, ell0);
                double a = 0, h = 0;
                Quartic q;
                Eigen::Vector2d r = tip_residual(v, tc, kappa, a, h, q);
                bool ok = false;
                for (int it = 0; it < 60; ++it) {
                    if (r.norm() <= 1e-14 * q.scale(a)) {
                        ok = true;
                        break;
                    }
                    Eigen::Matrix2d J;
                    for (int c = 0; c < 2; ++c) {
                        Eigen::Vector2d vp = v;
                        const double step = 1e-7 * std::max(1.0, std::abs(v[c]));
                        vp[c] += step;
                        double a2, h2;
                        Quartic q2;
                        J.col(c) = (tip_residual(vp, tc, kappa, a2, h2, q2) - r) / step;
                    }
                    Eigen::Vector2d dv = J.fullPivLu().solve(-r);
                    if (!dv.allFinite()) break;
                    double t = 1.0;
                    bool moved = false;
                    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
                        Eigen::Vector2d vn = v + t * dv;
                        if ((tc.mu_sign == 0 && vn[1] >= 0.0) || (tc.mu_sign != 0 && vn[1] <= 0.0)) continue;
                        double an, hn;
                        Quartic qn;
                        Eigen::Vector2d rn = tip_residual(vn, tc, kappa, an, hn, qn);
                        if (rn.norm() < r.norm()) {
                            v = vn;
                            r = rn;
                            a = an;
                            h = hn;
                            q = qn;
                            moved = true;
                            break;
                        }
                    }
                    if (!moved) {
                        ok = r.norm() <= 1e-11 * q.scale(a);
                        break;
                    }
                }
                if (!ok) continue;
                const double sc = q.scale(a);
                if (std::abs(q(a)) > 1e-11 * sc || std::abs(q.deriv(a, 1)) > 1e-11 * sc) continue;

                BifurcationEvent e;
                e.lambda = v[0];
                e.ell = v[1];
                e.mu = tc.mu_sign == 0 ? 0.0 : tc.mu_sign * v[1];
                e.a = a;
                e.h = h;
                e.kappa = kappa;
                e.b = 4.0 / k2 - 3.0 * a - 4.0 * e.lambda / kappa;
                e.kind = BifKind::HopfDegenerate;
                const bool dup = std::any_of(found.begin(), found.end(), [&](const BifurcationEvent& o) {
                    return std::abs(o.lambda - e.lambda) + std::abs(o.mu - e.mu) + std::abs(o.ell - e.ell) < 1e-8;
                });
                if (!dup) found.push_back(e);
            }
        }
    }
    for (auto& e : found) tag_event(e, 1e-6);
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
        return std::tie(x.lambda, x.mu, x.ell) < std::tie(y.lambda, y.mu, y.ell);
    });
    return found;
}

}  // namespace res112
