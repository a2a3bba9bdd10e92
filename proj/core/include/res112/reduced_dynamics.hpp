#pragma once

#include <optional>
#include <vector>

#include "res112/model.hpp"
#include "res112/poly.hpp"
#include "res112/reduced_space.hpp"

namespace res112 {

struct ReducedParams {
    double lambda = 0.0;
    double kappa = 1.0;
};

enum class Stability { Elliptic, Hyperbolic, Degenerate, SingularTip };
const char* to_string(Stability s);

struct Equilibrium {
    double R = 0.0;
    double X = 0.0;  // Y is always 0
    double h = 0.0;
    Stability stability = Stability::Elliptic;
    double quintic_deriv = 0.0;  // S'(R); 0 for the tip
};

// X + lambda R + kappa/2 R^2
double reduced_h(const InvariantPoint& pt, const ReducedParams& rp);
// energy of the tip point (R_min, 0, 0)
double tip_energy(const CasimirValues& cas, const ReducedParams& rp);

// (dR, dX, dY) = grad H x grad S, so that H = X gives dR = 2Y.
vec3 vector_field(const InvariantPoint& pt, const CasimirValues& cas, const ReducedParams& rp);

// S(R) = 4 (kappa R + lambda)^2 (R - ell)(R^2 - mu^2) - (3R^2 - 2 ell R - mu^2)^2
poly::coeffs equilibrium_quintic(const CasimirValues& cas, const ReducedParams& rp);

struct EquilibriumOptions {
    double merge_tol = 1e-9;       // roots closer than this are merged
    double degenerate_tol = 1e-9;  // |S'| below this (relative) is Degenerate
    double eps_c = 1e-10;          // tip classification threshold
};

// Regular equilibria in (R_min, inf) sorted by R, then the tip if singular.
std::vector<Equilibrium> equilibria(const CasimirValues& cas, const ReducedParams& rp,
                                    const EquilibriumOptions& opt = {});

// Global minimum of H on the reduced space; kappa > 0 only.
double h_min(const CasimirValues& cas, const ReducedParams& rp);

struct OrbitOptions {
    double t_end = 1.0;
    double tol = 1e-10;  // target for the S and H drift over the run
    bool detect_period = false;
    // return tolerance for the full-state period check, relative to orbit size
    double poincare_tol = 1e-6;
    bool record = true;
    std::size_t max_steps = 50'000'000;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<InvariantPoint> points;
    std::optional<double> period;
    double max_syzygy_drift = 0.0;
    double max_energy_drift = 0.0;
    std::size_t steps = 0;
};

// Adaptive Fehlberg 7(8) integration of the reduced flow. When detect_period
// is set the run stops at the first full-state return to the start.
Trajectory integrate_orbit(const InvariantPoint& start, const CasimirValues& cas, const ReducedParams& rp,
                           const OrbitOptions& opt);

struct InternalFrequencies {
    double dH_dN = 0.0;
    double dH_dJ = 0.0;
};

InternalFrequencies internal_frequencies(double R, const CasimirValues& cas, const ModelParams& mp);

}  // namespace res112
