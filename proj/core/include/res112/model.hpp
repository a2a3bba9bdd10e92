#pragma once

#include <array>
#include <complex>
#include <utility>

namespace res112 {

using vec3 = std::array<double, 3>;
using cvec3 = std::array<std::complex<double>, 3>;
using mat3 = std::array<std::array<double, 3>, 3>;

/// Normal form coefficients. Only lambda (through detuning_lambda) and kappa
/// enter the reduced dynamics; the rest shift the internal frequencies.
struct ModelParams {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double kappa = 1.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;

    bool degenerate() const { return kappa == 0.0; }
    // throws validation_error on non-finite fields
    void validate() const;
};

enum class Chart { Oscillator, Original };

/// A point of R^6 held in exactly one chart.
class FullState {
public:
    static FullState oscillator(const vec3& q, const vec3& p);
    static FullState original(const vec3& x, const vec3& y);
    // z_j = p_j + i q_j
    static FullState from_z(const cvec3& z);

    Chart chart() const { return chart_; }
    FullState as_oscillator() const;
    FullState as_original() const;

    // raw storage: (q,p) or (x,y) depending on chart
    const vec3& first() const { return a_; }
    const vec3& second() const { return b_; }

    cvec3 z() const;
    // I_j = (q_j^2 + p_j^2)/2
    vec3 actions() const;

private:
    FullState(Chart c, const vec3& a, const vec3& b) : chart_(c), a_(a), b_(b) {}
    Chart chart_;
    vec3 a_, b_;
};

struct InvariantPoint {
    double R = 0.0;
    double X = 0.0;
    double Y = 0.0;
};

struct CasimirValues {
    double mu = 0.0;
    double ell = 0.0;

    double iota() const { return 0.5 * (mu + ell); }
    static CasimirValues from_mu_iota(double mu, double iota) { return {mu, 2.0 * iota - mu}; }
};

// (x,y) -> (q,p); inverse of the orthogonal change of variables
std::pair<vec3, vec3> to_oscillator(const vec3& x, const vec3& y);
// (q,p) -> (x,y)
std::pair<vec3, vec3> from_oscillator(const vec3& q, const vec3& p);

struct Reduction {
    double n = 0.0;
    double l = 0.0;
    double j = 0.0;
    InvariantPoint point;
};

Reduction reduce(const FullState& state);

// X^2 + Y^2 - (R^2 - mu^2)(R - ell)
double syzygy_residual(const InvariantPoint& pt, const CasimirValues& cas);
// gradient of the syzygy in (R, X, Y)
vec3 syzygy_gradient(const InvariantPoint& pt, const CasimirValues& cas);

// Poisson brackets {f,g} for f,g in (R,X,Y); antisymmetric.
mat3 structure_matrix(const InvariantPoint& pt, const CasimirValues& cas);

enum class Isotropy { Trivial, C12, C13, C23, C123 };

Isotropy isotropy_class(const FullState& state, double eps_z = 1e-12);
const char* to_string(Isotropy c);

// Phi_(s,t): z1 e^{2 pi i (s+t)}, z2 e^{-2 pi i s}, z3 e^{-2 pi i t}
FullState torus_action(const FullState& state, double s, double t);

double detuning_lambda(const ModelParams& params, const CasimirValues& cas);

struct ScaledValues {
    double lambda, mu, ell, R, X, Y, H;
};

// (k^-1 lambda, k^-2 mu, k^-2 ell, k^-2 R, k^-3 X, k^-3 Y, k^-3 H).
// Carries a kappa = 1 configuration onto the kappa system.
ScaledValues kappa_scaling(const CasimirValues& cas, const InvariantPoint& pt, double h, double lambda,
                           double kappa);
// Inverse map: carries a kappa configuration onto the kappa = 1 system.
ScaledValues kappa_scaling_inverse(const CasimirValues& cas, const InvariantPoint& pt, double h,
                                   double lambda, double kappa);

}  // namespace res112
