#include "res112/model.hpp"

#include <cmath>
#include <numbers>

#include "res112/errors.hpp"

namespace res112 {

namespace {
constexpr double inv_sqrt2 = 0.70710678118654752440;
}

void ModelParams::validate() const
{
    const double v[] = {alpha, beta, delta, kappa, lambda1, lambda2, gamma1, gamma2, gamma3};
    for (double x : v)
        if (!std::isfinite(x)) throw validation_error("model parameters must be finite");
}

std::pair<vec3, vec3> from_oscillator(const vec3& q, const vec3& p)
{
    vec3 x{(q[0] - p[1]) * inv_sqrt2, (q[1] - p[0]) * inv_sqrt2, q[2]};
    vec3 y{(q[1] + p[0]) * inv_sqrt2, (q[0] + p[1]) * inv_sqrt2, p[2]};
    return {x, y};
}

std::pair<vec3, vec3> to_oscillator(const vec3& x, const vec3& y)
{
    vec3 q{(x[0] + y[1]) * inv_sqrt2, (x[1] + y[0]) * inv_sqrt2, x[2]};
    vec3 p{(y[0] - x[1]) * inv_sqrt2, (y[1] - x[0]) * inv_sqrt2, y[2]};
    return {q, p};
}

FullState FullState::oscillator(const vec3& q, const vec3& p) { return {Chart::Oscillator, q, p}; }
FullState FullState::original(const vec3& x, const vec3& y) { return {Chart::Original, x, y}; }

FullState FullState::from_z(const cvec3& z)
{
    vec3 q{z[0].imag(), z[1].imag(), z[2].imag()};
    vec3 p{z[0].real(), z[1].real(), z[2].real()};
    return oscillator(q, p);
}

FullState FullState::as_oscillator() const
{
    if (chart_ == Chart::Oscillator) return *this;
    auto [q, p] = to_oscillator(a_, b_);
    return oscillator(q, p);
}

FullState FullState::as_original() const
{
    if (chart_ == Chart::Original) return *this;
    auto [x, y] = from_oscillator(a_, b_);
    return original(x, y);
}

cvec3 FullState::z() const
{
    const FullState s = as_oscillator();
    return {std::complex<double>(s.b_[0], s.a_[0]), std::complex<double>(s.b_[1], s.a_[1]),
            std::complex<double>(s.b_[2], s.a_[2])};
}

vec3 FullState::actions() const
{
    const FullState s = as_oscillator();
    vec3 I;
    for (int j = 0; j < 3; ++j) I[j] = 0.5 * (s.a_[j] * s.a_[j] + s.b_[j] * s.b_[j]);
    return I;
}

Reduction reduce(const FullState& state)
{
    const vec3 I = state.actions();
    const cvec3 z = state.z();
    const std::complex<double> w = z[0] * z[1] * z[2];
    Reduction r;
    r.n = I[0] - I[1];
    r.l = I[0] + I[1] - 2.0 * I[2];
    r.j = 0.5 * (r.n + r.l);
    r.point = {I[0] + I[1], w.real(), w.imag()};
    return r;
}

double syzygy_residual(const InvariantPoint& pt, const CasimirValues& cas)
{
    return pt.X * pt.X + pt.Y * pt.Y - (pt.R * pt.R - cas.mu * cas.mu) * (pt.R - cas.ell);
}

vec3 syzygy_gradient(const InvariantPoint& pt, const CasimirValues& cas)
{
    const double R = pt.R;
    return {-(3.0 * R * R - 2.0 * cas.ell * R - cas.mu * cas.mu), 2.0 * pt.X, 2.0 * pt.Y};
}

mat3 structure_matrix(const InvariantPoint& pt, const CasimirValues& cas)
{
    const double rx = 2.0 * pt.Y;
    const double ry = -2.0 * pt.X;
    const double xy = cas.mu * cas.mu + 2.0 * cas.ell * pt.R - 3.0 * pt.R * pt.R;
    return {{{0.0, rx, ry}, {-rx, 0.0, xy}, {-ry, -xy, 0.0}}};
}

Isotropy isotropy_class(const FullState& state, double eps_z)
{
    const cvec3 z = state.z();
    const bool zero1 = std::norm(z[0]) <= eps_z;
    const bool zero2 = std::norm(z[1]) <= eps_z;
    const bool zero3 = std::norm(z[2]) <= eps_z;
    if (zero1 && zero2 && zero3) return Isotropy::C123;
    if (zero1 && zero2) return Isotropy::C12;
    if (zero1 && zero3) return Isotropy::C13;
    if (zero2 && zero3) return Isotropy::C23;
    return Isotropy::Trivial;
}

const char* to_string(Isotropy c)
{
    switch (c) {
    case Isotropy::Trivial: return "Trivial";
    case Isotropy::C12: return "C12";
    case Isotropy::C13: return "C13";
    case Isotropy::C23: return "C23";
    case Isotropy::C123: return "C123";
    }
    return "?";
}

FullState torus_action(const FullState& state, double s, double t)
{
    using std::numbers::pi;
    cvec3 z = state.z();
    z[0] *= std::polar(1.0, 2.0 * pi * (s + t));
    z[1] *= std::polar(1.0, -2.0 * pi * s);
    z[2] *= std::polar(1.0, -2.0 * pi * t);
    return FullState::from_z(z);
}

double detuning_lambda(const ModelParams& params, const CasimirValues& cas)
{
    return params.delta + params.lambda1 * cas.mu + params.lambda2 * cas.ell;
}

ScaledValues kappa_scaling(const CasimirValues& cas, const InvariantPoint& pt, double h, double lambda,
                           double kappa)
{
    if (kappa == 0.0 || !std::isfinite(kappa)) throw validation_error("kappa scaling needs kappa != 0");
    const double k1 = 1.0 / kappa, k2 = k1 * k1, k3 = k2 * k1;
    return {k1 * lambda, k2 * cas.mu, k2 * cas.ell, k2 * pt.R, k3 * pt.X, k3 * pt.Y, k3 * h};
}

ScaledValues kappa_scaling_inverse(const CasimirValues& cas, const InvariantPoint& pt, double h,
                                   double lambda, double kappa)
{
    if (kappa == 0.0 || !std::isfinite(kappa)) throw validation_error("kappa scaling needs kappa != 0");
    const double k2 = kappa * kappa, k3 = k2 * kappa;
    return {kappa * lambda, k2 * cas.mu, k2 * cas.ell, k2 * pt.R, k3 * pt.X, k3 * pt.Y, k3 * h};
}

}  // namespace res112
