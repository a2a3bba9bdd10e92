#include "res112/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ode.hpp"
#include "res112/errors.hpp"
#include "res112/parallel.hpp"
#include "res112/reduced_dynamics.hpp"
#include "res112/reduced_space.hpp"

namespace res112 {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Derived {
    double I1, I2, I3, N, L, R;
};

Derived derived(const cvec3& z)
{
    Derived d{};
    d.I1 = 0.5 * std::norm(z[0]);
    d.I2 = 0.5 * std::norm(z[1]);
    d.I3 = 0.5 * std::norm(z[2]);
    d.N = d.I1 - d.I2;
    d.L = d.I1 + d.I2 - 2.0 * d.I3;
    d.R = d.I1 + d.I2;
    return d;
}

using state6 = detail::ode_state<6>;

cvec3 unpack(const state6& x)
{
    return {std::complex<double>(x[0], x[1]), std::complex<double>(x[2], x[3]),
            std::complex<double>(x[4], x[5])};
}

state6 pack(const cvec3& z)
{
    return {z[0].real(), z[0].imag(), z[1].real(), z[1].imag(), z[2].real(), z[2].imag()};
}

double wrap_pi(double a)
{
    a = std::remainder(a, two_pi);
    return a;
}

double frac(double x)
{
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
}

double wrap_half(double d)
{
    return d - std::nearbyint(d);
}

}  // namespace

double full_energy(const cvec3& z, const ModelParams& mp)
{
    const auto d = derived(z);
    const std::complex<double> w = z[0] * z[1] * z[2];
    return mp.alpha * d.L + mp.beta * d.N + mp.delta * d.R + w.real() + 0.5 * mp.kappa * d.R * d.R +
           (mp.lambda1 * d.N + mp.lambda2 * d.L) * d.R + 0.5 * mp.gamma1 * d.N * d.N + mp.gamma2 * d.N * d.L +
           0.5 * mp.gamma3 * d.L * d.L;
}

cvec3 full_vector_field(const cvec3& z, const ModelParams& mp)
{
    const auto d = derived(z);
    const double hN = mp.beta + mp.lambda1 * d.R + mp.gamma1 * d.N + mp.gamma2 * d.L;
    const double hL = mp.alpha + mp.lambda2 * d.R + mp.gamma2 * d.N + mp.gamma3 * d.L;
    const double hR = mp.delta + mp.kappa * d.R + mp.lambda1 * d.N + mp.lambda2 * d.L;
    const double w1 = hN + hL + hR;
    const double w2 = -hN + hL + hR;
    const double w3 = -2.0 * hL;
    const std::complex<double> I(0.0, 1.0);
    return {I * (w1 * z[0] + std::conj(z[1]) * std::conj(z[2])),
            I * (w2 * z[1] + std::conj(z[0]) * std::conj(z[2])),
            I * (w3 * z[2] + std::conj(z[0]) * std::conj(z[1]))};
}

namespace {

ReducedParams reduced_params(const CasimirValues& cas, const ModelParams& mp)
{
    return {detuning_lambda(mp, cas), mp.kappa};
}

// Torus3 components of a regular fiber; throws on anything else.
std::vector<ComponentDescriptor> regular_components(const EMValue& v, const ModelParams& mp)
{
    const auto cas = v.casimirs();
    const auto rp = reduced_params(cas, mp);
    const auto rep = classify_fiber(cas, rp, v.h);
    std::ostringstream where;
    where.precision(17);
    where << "(mu, iota, h) = (" << v.mu << ", " << v.iota << ", " << v.h << ")";
    if (rep.flagged) throw validation_error("value too close to a critical value: " + where.str());
    if (rep.is_critical) throw validation_error("critical value " + where.str() + ": " + rep.summary());
    std::vector<ComponentDescriptor> out;
    for (const auto& c : rep.components) {
        if (c.kind != FiberKind::Torus3) throw validation_error("non-regular fiber at " + where.str());
        out.push_back(c);
    }
    if (out.empty()) throw validation_error("empty fiber at " + where.str());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.r_lo < b.r_lo; });
    return out;
}

const ComponentDescriptor& pick(const std::vector<ComponentDescriptor>& comps, const RotationOptions& opt)
{
    if (opt.r_hint) {
        auto dist = [&](const ComponentDescriptor& c) {
            return std::abs(0.5 * (c.r_lo + c.r_hi) - *opt.r_hint);
        };
        return *std::min_element(comps.begin(), comps.end(),
                                 [&](const auto& a, const auto& b) { return dist(a) < dist(b); });
    }
    const int k = opt.component.value_or(0);
    if (k < 0 || k >= static_cast<int>(comps.size())) throw validation_error("component index out of range");
    return comps[static_cast<std::size_t>(k)];
}

}  // namespace

RotationData rotation_numbers(const EMValue& v, const ModelParams& mp, const RotationOptions& opt)
{
    mp.validate();
    if (!(mp.kappa > 0.0)) throw unsupported_regime("rotation numbers require kappa > 0");
    if (!(opt.start_fraction > 0.0 && opt.start_fraction < 1.0))
        throw validation_error("start_fraction must lie in (0, 1)");
    const auto comps = regular_components(v, mp);
    const auto& comp = pick(comps, opt);
    const auto cas = v.casimirs();
    const auto rp = reduced_params(cas, mp);

    RotationData out;
    out.r_lo = comp.r_lo;
    out.r_hi = comp.r_hi;

    const double R0 = comp.r_lo + opt.start_fraction * (comp.r_hi - comp.r_lo);
    const double X0 = v.h - rp.lambda * R0 - 0.5 * rp.kappa * R0 * R0;
    const double Y2 = section_sq(R0, cas) - X0 * X0;
    if (!(Y2 > 0.0)) throw numerical_error("start point off the reduced orbit");
    const double Y0 = opt.upper_branch ? std::sqrt(Y2) : -std::sqrt(Y2);

    const double I1 = 0.5 * (R0 + cas.mu), I2 = 0.5 * (R0 - cas.mu), I3 = 0.5 * (R0 - cas.ell);
    if (!(I1 > 0.0 && I2 > 0.0 && I3 > 0.0)) throw validation_error("start point has a vanishing mode");
    const double phi = std::atan2(Y0, X0);
    cvec3 z0{std::complex<double>(std::sqrt(2.0 * I1), 0.0), std::complex<double>(std::sqrt(2.0 * I2), 0.0),
             std::polar(std::sqrt(2.0 * I3), phi)};
    if (opt.start_angle != 0.0) {
        z0 = torus_action(FullState::from_z(z0), opt.start_angle, opt.start_angle).z();
    }

    const auto d0 = derived(z0);
    const double N0 = d0.N, J0 = d0.I1 - d0.I3, H0 = full_energy(z0, mp);

    detail::ode_driver<6> drv(
        [&mp](const state6& x, state6& dx, double) { dx = pack(full_vector_field(unpack(x), mp)); }, opt.tol,
        opt.tol);

    // R rises on Y > 0 and falls on Y < 0; g increases through 0 on return to the start branch
    const double dir = opt.upper_branch ? 1.0 : -1.0;
    auto g = [R0, dir](const state6& x) {
        return dir * (0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]) - R0);
    };
    const double arm = -0.25 * (opt.upper_branch ? R0 - comp.r_lo : comp.r_hi - R0);

    state6 x = pack(z0);
    double t = 0.0;
    double dt = 1e-3;
    double drift = 0.0;
    bool found = false;
    bool armed = false;
    state6 xT{};
    while (t < opt.t_max) {
        const state6 xprev = x;
        const double tprev = t;
        const double gprev = g(xprev);
        drv.step(x, t, dt, opt.t_max);
        ++out.steps;
        const cvec3 zc = unpack(x);
        const auto dc = derived(zc);
        drift = std::max({drift, std::abs(dc.N - N0), std::abs(dc.I1 - dc.I3 - J0),
                          std::abs(full_energy(zc, mp) - H0)});
        const double gnow = g(x);
        if (gnow < arm) armed = true;
        if (armed && gprev < 0.0 && gnow >= 0.0) {
            auto [tau, xs] = drv.locate(xprev, tprev, t - tprev, g);
            out.T_red = tprev + tau;
            xT = xs;
            found = true;
            break;
        }
    }
    if (!found) throw numerical_error("no reduced return within t_max");
    out.max_drift = drift;

    const cvec3 zT = unpack(xT);
    const double a1 = std::arg(zT[0] * std::conj(z0[0]));
    const double a2 = std::arg(zT[1] * std::conj(z0[1]));
    const double a3 = std::arg(zT[2] * std::conj(z0[2]));
    const double s = -a2 / two_pi;
    const double tt = -a3 / two_pi;
    out.theta_N = frac(s);
    out.theta_J = frac(tt);
    out.phase_residual = std::abs(wrap_pi(a1 - two_pi * (s + tt)));
    if (out.phase_residual > 1e-6) {
        std::ostringstream os;
        os << "phase consistency failure: " << out.phase_residual << " rad";
        throw numerical_error(os.str());
    }
    const cvec3 zc = torus_action(FullState::from_z(z0), s, tt).z();
    double num = 0.0, den = 0.0;
    for (int j = 0; j < 3; ++j) {
        num += std::norm(zc[j] - zT[j]);
        den += std::norm(z0[j]);
    }
    out.closure_residual = std::sqrt(num / den);
    return out;
}

MonodromyVector operator+(const MonodromyVector& a, const MonodromyVector& b)
{
    return {a.m_N + b.m_N, a.m_J + b.m_J};
}

MonodromyVector operator-(const MonodromyVector& a)
{
    return {-a.m_N, -a.m_J};
}

MonodromyMatrix to_matrix(const MonodromyVector& v)
{
    return {{{1, 0, v.m_N}, {0, 1, v.m_J}, {0, 0, 1}}};
}

namespace {

MonodromyMatrix multiply(const MonodromyMatrix& a, const MonodromyMatrix& b)
{
    MonodromyMatrix c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

bool unitriangular(const MonodromyMatrix& m)
{
    return m[0][0] == 1 && m[0][1] == 0 && m[1][0] == 0 && m[1][1] == 1 && m[2][0] == 0 && m[2][1] == 0 &&
           m[2][2] == 1;
}

}  // namespace

MonodromyVector from_matrix(const MonodromyMatrix& m)
{
    if (!unitriangular(m)) throw validation_error("matrix is not of monodromy form");
    return {m[0][2], m[1][2]};
}

MonodromyMatrix compose(const MonodromyMatrix& a, const MonodromyMatrix& b)
{
    const auto c = multiply(a, b);
    const auto expect = to_matrix(from_matrix(a) + from_matrix(b));
    if (c != expect) throw numerical_error("monodromy product violates the additive law");
    return c;
}

MonodromyMatrix inverse(const MonodromyMatrix& m)
{
    return to_matrix(-from_matrix(m));
}

long determinant(const MonodromyMatrix& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

namespace {

struct Node {
    EMValue v;
    double r_lo = 0.0, r_hi = 0.0;
    RotationData rot;
};

bool overlaps(double a_lo, double a_hi, double b_lo, double b_hi)
{
    return a_lo <= b_hi && b_lo <= a_hi;
}

// Component continuing the one tracked at `prev`. Crossing F_h shows up as a
// merge or split; that is rejected.
ComponentDescriptor follow(const std::vector<ComponentDescriptor>& comps, const std::vector<ComponentDescriptor>& prev_comps,
                           double p_lo, double p_hi)
{
    std::vector<const ComponentDescriptor*> hits;
    for (const auto& c : comps)
        if (overlaps(c.r_lo, c.r_hi, p_lo, p_hi)) hits.push_back(&c);
    if (hits.size() != 1) throw validation_error("loop crosses a hyperbolic face or leaves the tracked component");
    int back = 0;
    for (const auto& c : prev_comps)
        if (overlaps(c.r_lo, c.r_hi, hits[0]->r_lo, hits[0]->r_hi)) ++back;
    if (back != 1) throw validation_error("loop crosses a hyperbolic face (components merge)");
    return *hits[0];
}

EMValue midpoint(const EMValue& a, const EMValue& b)
{
    return {0.5 * (a.mu + b.mu), 0.5 * (a.iota + b.iota), 0.5 * (a.h + b.h)};
}

}  // namespace

MonodromyResult monodromy_run(const std::vector<EMValue>& loop, const ModelParams& mp, const MonodromyOptions& opt)
{
    mp.validate();
    if (!(mp.kappa > 0.0)) throw unsupported_regime("monodromy requires kappa > 0");
    if (loop.size() < 4) throw validation_error("loop needs at least three distinct points");
    const auto& f = loop.front();
    const auto& l = loop.back();
    const double scale = 1.0 + std::max({std::abs(f.mu), std::abs(f.iota), std::abs(f.h)});
    if (std::max({std::abs(f.mu - l.mu), std::abs(f.iota - l.iota), std::abs(f.h - l.h)}) > 1e-12 * scale)
        throw validation_error("loop is not closed (first point must equal last)");

    // sequential component tracking on the initial discretization
    std::vector<std::vector<ComponentDescriptor>> comps(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) comps[i] = regular_components(loop[i], mp);
    auto track = [&](const ComponentDescriptor& start) {
        std::vector<Node> out(loop.size());
        for (std::size_t i = 0; i < loop.size(); ++i) {
            out[i].v = loop[i];
            const ComponentDescriptor c =
                i == 0 ? start : follow(comps[i], comps[i - 1], out[i - 1].r_lo, out[i - 1].r_hi);
            out[i].r_lo = c.r_lo;
            out[i].r_hi = c.r_hi;
        }
        if (std::abs(out.back().r_lo - out.front().r_lo) > 1e-9 * scale)
            throw validation_error("loop does not return to the tracked component");
        return out;
    };
    std::vector<Node> nodes;
    if (opt.rotation.component || opt.rotation.r_hint || comps[0].size() == 1) {
        nodes = track(pick(comps[0], opt.rotation));
    }
    else {
        std::string why;
        for (const auto& c : comps[0]) {
            try {
                nodes = track(c);
                break;
            }
            catch (const validation_error& e) {
                why = e.what();
            }
        }
        if (nodes.empty()) throw validation_error("no start component survives the loop: " + why);
    }

    auto rotation_at = [&](const Node& n) {
        RotationOptions ro = opt.rotation;
        ro.r_hint = 0.5 * (n.r_lo + n.r_hi);
        return rotation_numbers(n.v, mp, ro);
    };
    parallel_for(nodes.size() - 1, opt.workers, [&](std::size_t i) { nodes[i].rot = rotation_at(nodes[i]); });
    nodes.back().rot = nodes.front().rot;

    std::vector<ComponentDescriptor> last_comps = comps[0];
    double wN = 0.0, wJ = 0.0;
    std::size_t i = 0;
    while (i + 1 < nodes.size()) {
        const auto& a = nodes[i].rot;
        const auto& b = nodes[i + 1].rot;
        const double dN = wrap_half(b.theta_N - a.theta_N);
        const double dJ = wrap_half(b.theta_J - a.theta_J);
        if (std::abs(dN) < opt.max_jump && std::abs(dJ) < opt.max_jump) {
            wN += dN;
            wJ += dJ;
            ++i;
            continue;
        }
        if (nodes.size() >= opt.max_points) throw numerical_error("loop refinement exceeded the point cap");
        Node m;
        m.v = midpoint(nodes[i].v, nodes[i + 1].v);
        const auto cm = regular_components(m.v, mp);
        const auto c = follow(cm, regular_components(nodes[i].v, mp), nodes[i].r_lo, nodes[i].r_hi);
        m.r_lo = c.r_lo;
        m.r_hi = c.r_hi;
        m.rot = rotation_at(m);
        nodes.insert(nodes.begin() + static_cast<std::ptrdiff_t>(i + 1), m);
    }

    MonodromyResult res;
    res.winding_N = kMonodromySign * wN;
    res.winding_J = kMonodromySign * wJ;
    res.points = nodes.size();
    const double eN = std::abs(wN - std::nearbyint(wN));
    const double eJ = std::abs(wJ - std::nearbyint(wJ));
    if (eN > opt.integer_tol || eJ > opt.integer_tol) {
        std::ostringstream os;
        os << "winding (" << res.winding_N << ", " << res.winding_J << ") is not integral";
        throw numerical_error(os.str());
    }
    res.vector = {std::lround(res.winding_N), std::lround(res.winding_J)};
    res.path.reserve(nodes.size());
    res.rotations.reserve(nodes.size());
    for (const auto& n : nodes) {
        res.path.push_back(n.v);
        res.rotations.push_back(n.rot);
    }
    return res;
}

MonodromyVector monodromy_vector(const std::vector<EMValue>& loop, const ModelParams& mp, const MonodromyOptions& opt)
{
    return monodromy_run(loop, mp, opt).vector;
}

const char* to_string(Generator g)
{
    switch (g) {
    case Generator::Gamma1: return "gamma1";
    case Generator::Gamma2: return "gamma2";
    case Generator::Gamma3: return "gamma3";
    }
    return "?";
}

std::optional<Generator> generator_from_string(const std::string& s)
{
    if (s == "gamma1") return Generator::Gamma1;
    if (s == "gamma2") return Generator::Gamma2;
    if (s == "gamma3") return Generator::Gamma3;
    return std::nullopt;
}

namespace {

bool loop_regular(const std::vector<EMValue>& pts, const ModelParams& mp)
{
    try {
        std::vector<ComponentDescriptor> prev;
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto c = regular_components(pts[i], mp);
            if (c.size() != 1) return false;
            if (i > 0 && !overlaps(c[0].r_lo, c[0].r_hi, lo, hi)) return false;
            lo = c[0].r_lo;
            hi = c[0].r_hi;
            prev = std::move(c);
        }
    }
    catch (const validation_error&) {
        return false;
    }
    return true;
}

}  // namespace

GeneratorLoop generator_loop(Generator g, const ModelParams& mp, const LoopOptions& opt)
{
    mp.validate();
    if (!(mp.kappa > 0.0)) throw unsupported_regime("generator loops require kappa > 0");
    if (mp.lambda1 != 0.0 || mp.lambda2 != 0.0)
        throw unsupported_regime("generator loops need lambda1 = lambda2 = 0; pass an explicit loop instead");
    if (opt.points < 8) throw validation_error("generator loop needs at least 8 points");
    const ReducedParams rp{mp.delta, mp.kappa};
    const double k2 = mp.kappa * mp.kappa;

    GeneratorLoop out;
    out.generator = g;
    out.thread = g == Generator::Gamma1 ? "C23" : g == Generator::Gamma2 ? "C13" : "C12";

    double ell0 = 0.0;
    if (g == Generator::Gamma3) {
        ell0 = -rp.lambda * rp.lambda - 1.0 / k2;
    }
    else {
        // both C23 and C13 lose stability on the same ell-range
        const double u = mp.kappa * rp.lambda;
        if (!(u < 0.5)) {
            std::ostringstream os;
            os << "thread " << out.thread << " has no unstable part at delta = " << mp.delta;
            throw thread_absent(os.str());
        }
        ell0 = (1.0 - u) / k2;
    }
    const double mu0 = g == Generator::Gamma1 ? ell0 : g == Generator::Gamma2 ? -ell0 : 0.0;
    const CasimirValues c0{mu0, ell0};
    const double h0 = rp.lambda * r_min(c0) + 0.5 * rp.kappa * r_min(c0) * r_min(c0);
    out.center = {mu0, c0.iota(), h0};

    const double gap = h0 - h_min(c0, rp);
    double ra = 0.25 * std::abs(ell0) * opt.radius_scale;
    double rh = 0.5 * gap * opt.radius_scale;
    // gamma1 and gamma3 are clockwise in their planes, gamma2 counter-clockwise
    double orient = g == Generator::Gamma2 ? 1.0 : -1.0;
    if (opt.reverse) orient = -orient;

    const int check = 4 * opt.points;
    auto build = [&](int n) {
        std::vector<EMValue> pts;
        pts.reserve(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) {
            const double th = k == n ? 0.0 : orient * two_pi * k / n;
            const double a = ra * std::cos(th), b = rh * std::sin(th);
            EMValue v = out.center;
            if (g == Generator::Gamma3)
                v.mu += a;
            else
                v.iota += a;
            v.h += b;
            pts.push_back(v);
        }
        return pts;
    };
    for (int tries = 0;; ++tries) {
        if (tries == 12) throw numerical_error("could not size a regular loop around " + out.thread);
        if (loop_regular(build(check), mp)) break;
        ra *= 0.5;
        rh *= 0.5;
    }
    out.radius_a = ra;
    out.radius_h = rh;
    out.points = build(opt.points);
    return out;
}

}  // namespace res112
