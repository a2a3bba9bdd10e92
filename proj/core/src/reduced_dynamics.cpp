#include "res112/reduced_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ode.hpp"
#include "res112/errors.hpp"

namespace res112 {

namespace detail {
void throw_step_collapse()
{
    throw numerical_error("integrator step size collapsed (orbit too close to a singular point?)");
}
}  // namespace detail

const char* to_string(Stability s)
{
    switch (s) {
    case Stability::Elliptic: return "Elliptic";
    case Stability::Hyperbolic: return "Hyperbolic";
    case Stability::Degenerate: return "Degenerate";
    case Stability::SingularTip: return "SingularTip";
    }
    return "?";
}

double reduced_h(const InvariantPoint& pt, const ReducedParams& rp)
{
    return pt.X + rp.lambda * pt.R + 0.5 * rp.kappa * pt.R * pt.R;
}

double tip_energy(const CasimirValues& cas, const ReducedParams& rp)
{
    return reduced_h({r_min(cas), 0.0, 0.0}, rp);
}

vec3 vector_field(const InvariantPoint& pt, const CasimirValues& cas, const ReducedParams& rp)
{
    const double hr = rp.lambda + rp.kappa * pt.R;
    const double sr = 3.0 * pt.R * pt.R - 2.0 * cas.ell * pt.R - cas.mu * cas.mu;
    return {2.0 * pt.Y, -2.0 * hr * pt.Y, 2.0 * hr * pt.X + sr};
}

poly::coeffs equilibrium_quintic(const CasimirValues& cas, const ReducedParams& rp)
{
    using namespace poly;
    const double m2 = cas.mu * cas.mu;
    coeffs lin{rp.lambda, rp.kappa};
    coeffs a = multiply(multiply(lin, lin), multiply({-cas.ell, 1.0}, {-m2, 0.0, 1.0}));
    coeffs d{-m2, -2.0 * cas.ell, 3.0};
    return add(scale(a, 4.0), scale(multiply(d, d), -1.0));
}

namespace {

// S divided by the factor that vanishes at a singular tip
poly::coeffs deflated_quintic(const CasimirValues& cas, const ReducedParams& rp, const TipClass& tip)
{
    using namespace poly;
    coeffs lin{rp.lambda, rp.kappa};
    coeffs lin2 = multiply(lin, lin);
    if (tip.kind == TipKind::Cusp) return add(scale(lin2, 4.0), {0.0, -9.0});
    if (cas.ell > 0.0 || std::abs(cas.mu) > 0.5 * std::abs(cas.ell)) {
        // ell = |mu| > 0: S = (R - ell)^2 [4 (kR+l)^2 (R + ell) - (3R + ell)^2]
        const double l = 0.5 * (std::abs(cas.mu) + cas.ell);
        coeffs sq{l, 3.0};
        return add(scale(multiply(lin2, {l, 1.0}), 4.0), scale(multiply(sq, sq), -1.0));
    }
    // mu = 0, ell < 0: S = R^2 [4 (kR+l)^2 (R - ell) - (3R - 2 ell)^2]
    coeffs sq{-2.0 * cas.ell, 3.0};
    return add(scale(multiply(lin2, {-cas.ell, 1.0}), 4.0), scale(multiply(sq, sq), -1.0));
}

double pick_branch_x(double R, const CasimirValues& cas, const ReducedParams& rp)
{
    const double s = std::sqrt(std::max(0.0, section_sq(R, cas)));
    const double hr = rp.lambda + rp.kappa * R;
    const double sr = 3.0 * R * R - 2.0 * cas.ell * R - cas.mu * cas.mu;
    const double mp = std::abs(2.0 * s * hr + sr);
    const double mm = std::abs(-2.0 * s * hr + sr);
    return mp <= mm ? s : -s;
}

}  // namespace

std::vector<Equilibrium> equilibria(const CasimirValues& cas, const ReducedParams& rp, const EquilibriumOptions& opt)
{
    const TipClass tip = tip_class(cas, opt.eps_c);
    const poly::coeffs S = equilibrium_quintic(cas, rp);
    const poly::coeffs dS = poly::derivative(S);
    const double rmin = tip.r_min;

    std::vector<double> roots;
    if (tip.kind == TipKind::Smooth) {
        roots = poly::real_roots(S);
        std::erase_if(roots, [&](double r) { return r < rmin; });
    } else {
        roots = poly::real_roots(deflated_quintic(cas, rp, tip));
        const double gap = 1e-12 * std::max(1.0, rmin);
        std::erase_if(roots, [&](double r) { return r <= rmin + gap; });
    }

    std::vector<double> merged;
    for (double r : roots) {
        if (!merged.empty() && r - merged.back() <= opt.merge_tol * std::max(1.0, std::abs(r)))
            merged.back() = 0.5 * (merged.back() + r);
        else
            merged.push_back(r);
    }

    std::vector<Equilibrium> out;
    for (double R : merged) {
        Equilibrium e;
        e.R = R;
        e.X = pick_branch_x(R, cas, rp);
        e.h = reduced_h({R, e.X, 0.0}, rp);
        e.quintic_deriv = poly::eval(dS, R);
        const double scale = poly::magnitude(dS, R);
        if (std::abs(e.quintic_deriv) <= opt.degenerate_tol * scale)
            e.stability = Stability::Degenerate;
        else
            e.stability = e.quintic_deriv > 0.0 ? Stability::Elliptic : Stability::Hyperbolic;
        out.push_back(e);
    }
    if (tip.kind != TipKind::Smooth) {
        Equilibrium e;
        e.R = rmin;
        e.X = 0.0;
        e.h = tip_energy(cas, rp);
        e.stability = Stability::SingularTip;
        out.push_back(e);
    }
    return out;
}

double h_min(const CasimirValues& cas, const ReducedParams& rp)
{
    if (!(rp.kappa > 0.0)) throw unsupported_regime("h_min requires kappa > 0");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : equilibria(cas, rp)) best = std::min(best, e.h);
    if (!std::isfinite(best)) throw numerical_error("no equilibrium found for h_min");
    return best;
}

Trajectory integrate_orbit(const InvariantPoint& start, const CasimirValues& cas, const ReducedParams& rp,
                           const OrbitOptions& opt)
{
    using state = detail::ode_state<3>;
    const double size0 = std::max({1.0, std::abs(start.R), std::abs(start.X), std::abs(start.Y)});
    if (std::abs(syzygy_residual(start, cas)) > 1e-8 * std::max(1.0, std::pow(size0, 3)))
        throw validation_error("orbit start is not on the reduced phase space");

    auto rhs = [&](const state& x, state& dx, double) {
        vec3 f = vector_field({x[0], x[1], x[2]}, cas, rp);
        dx = {f[0], f[1], f[2]};
    };
    // local error control well below the drift target; explicit RK drift grows with the step count
    const double local = std::max(opt.tol * 1e-4, 1e-15);
    detail::ode_driver<3> drv(rhs, local, local);

    Trajectory tr;
    const double s0 = syzygy_residual(start, cas);
    const double h0 = reduced_h(start, rp);
    auto record = [&](double t, const state& x) {
        InvariantPoint p{x[0], x[1], x[2]};
        tr.max_syzygy_drift = std::max(tr.max_syzygy_drift, std::abs(syzygy_residual(p, cas) - s0));
        tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(reduced_h(p, rp) - h0));
        if (opt.record) {
            tr.t.push_back(t);
            tr.points.push_back(p);
        }
    };

    state x{start.R, start.X, start.Y};
    const vec3 v0 = vector_field(start, cas, rp);
    const double speed = std::hypot(v0[0], v0[1], v0[2]);
    record(0.0, x);
    if (speed <= 1e-14 * size0 * size0) {
        // stationary point
        if (opt.record && opt.t_end > 0.0) record(opt.t_end, x);
        return tr;
    }

    const TipClass tip = tip_class(cas);
    auto g = [&](const state& y) {
        return (y[0] - start.R) * v0[0] + (y[1] - start.X) * v0[1] + (y[2] - start.Y) * v0[2];
    };

    double t = 0.0;
    double dt = std::min(opt.t_end, 1e-2 / std::max(1.0, speed));
    double gprev = 0.0;
    const double t_stop = opt.t_end;
    while (t_stop - t > 1e-14 * std::max(1.0, t)) {
        if (++tr.steps > opt.max_steps) throw numerical_error("integrate_orbit: step budget exhausted");
        const state xprev = x;
        const double tprev = t;
        const double h = drv.step(x, t, dt, t_stop);
        if (tip.kind != TipKind::Smooth) {
            const double d = std::hypot(x[0] - tip.r_min, x[1], x[2]);
            if (d < 1e-9 * std::max(1.0, tip.r_min))
                throw numerical_error("orbit reached the singular tip of the reduced phase space");
        }
        const double gcur = g(x);
        if (opt.detect_period && gprev < 0.0 && gcur >= 0.0) {
            auto [tau, xc] = drv.locate(xprev, tprev, h, g);
            const double dist = std::hypot(xc[0] - start.R, xc[1] - start.X, xc[2] - start.Y);
            if (dist <= opt.poincare_tol * size0) {
                record(tprev + tau, xc);
                tr.period = tprev + tau;
                return tr;
            }
        }
        gprev = gcur;
        record(t, x);
    }
    return tr;
}

InternalFrequencies internal_frequencies(double R, const CasimirValues& cas, const ModelParams& mp)
{
    InternalFrequencies f;
    f.dH_dN = mp.beta - mp.alpha + (mp.gamma1 - mp.gamma2) * cas.mu + (mp.gamma2 - mp.gamma3) * cas.ell +
              (mp.lambda1 - mp.lambda2) * R;
    f.dH_dJ = 2.0 * (mp.alpha + mp.gamma2 * cas.mu + mp.gamma3 * cas.ell + mp.lambda2 * R);
    return f;
}

}  // namespace res112
