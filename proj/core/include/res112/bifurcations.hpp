#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "res112/model.hpp"
#include "res112/reduced_dynamics.hpp"

namespace res112 {

/// F(R) = (h - lambda R - kappa/2 R^2)^2 - (R^2 - mu^2)(R - ell)
struct Quartic {
    std::array<double, 5> c{};  // lowest degree first

    double operator()(double R) const { return deriv(R, 0); }
    double deriv(double R, int k) const;
    // rounding scale max(1, |a|^4 kappa^2) used for residual checks
    double scale(double a) const;
    double kappa() const { return 2.0 * std::sqrt(std::abs(c[4])); }
};

Quartic f_quartic(double h, const ReducedParams& rp, const CasimirValues& cas);

enum class BifKind { CentreSaddle, Cusp, HopfSub, HopfSuper, HopfDegenerate, DegenerateBoundary };
const char* to_string(BifKind k);

struct ClassifyTolerances {
    double residual = 1e-7;  // precondition on F, F', F'' (scaled)
    double gap = 1e-10;      // |a - R_min| counted as zero
    double third = 1e-8;     // |F'''(a)| (relative) counted as zero
    double band = 100.0;     // decisions within band*tol of a threshold are ambiguous
};

struct RootClassification {
    BifKind kind = BifKind::CentreSaddle;
    double gap = 0.0;  // a - R_min
    double f3 = 0.0;   // F'''(a)
    std::string note;
};

// Kind of a multiple root of F. Throws validation_error if a is not (close
// to) a triple root.
RootClassification classify_multiple_root(double a, const Quartic& q, const CasimirValues& cas,
                                          const ClassifyTolerances& tol = {});

enum class Family {
    CS1, CS2, CS3, CS4,
    Cusp1, Cusp2, Cusp3,
    HHsub1, HHsub2, HHsub3,
    HHsup1, HHsup2, HHsup3,
    HHdeg1, HHdeg2, HHdeg3,
    CS1_k0, CS2_k0, CS3_k0,
    HHsub1_k0, HHsub2_k0, HHsub3_k0,
};

const char* to_string(Family f);
std::optional<Family> family_from_string(const std::string& s);
BifKind family_kind(Family f);
bool is_kappa0_family(Family f);

// Sign of mu for two-sided families (CS3, CS4) is carried by `sign`.
struct FamilyParams {
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double a = std::numeric_limits<double>::quiet_NaN();
    double mu = std::numeric_limits<double>::quiet_NaN();  // Cusp3 only
    int sign = +1;
};

struct BifurcationEvent {
    BifKind kind = BifKind::CentreSaddle;
    double a = 0.0, b = 0.0, h = 0.0;
    double lambda = 0.0, mu = 0.0, ell = 0.0, kappa = 1.0;
    std::optional<Family> family;
    bool boundary = false;   // closure point rather than interior member
    double tag_distance = 0.0;
};

/// Closed-form family member. Rejects parameters outside the family range;
/// range end points are accepted and marked as boundary.
BifurcationEvent catalog_point(Family f, const FamilyParams& p, double kappa = 1.0);
BifurcationEvent catalog_point_kappa0(Family f, const FamilyParams& p);

// Open parameter range of a two-parameter family at fixed lambda (kappa > 0
// or the kappa = 0 table). Empty optional if the family is absent.
std::optional<std::pair<double, double>> family_a_range(Family f, double lambda, double kappa = 1.0);
// Lambda range of a one-parameter / point family (Cusp3 uses mu).
bool family_present(Family f, double lambda, double kappa = 1.0);

// Unique non-negative root of g(a); lambda < 1/kappa.
double a0_root(double lambda, double kappa = 1.0);
double g_cubic(double a, double lambda, double kappa = 1.0);

struct OracleOptions {
    int grid = 4000;              // a-nodes per lambda
    double match_radius = 1e-4;   // family tagging radius in (mu, ell)
    double admissible_tol = 1e-11;  // relative
};

struct OracleResult {
    double lambda = 0.0;
    std::vector<BifurcationEvent> events;
    std::vector<BifurcationEvent> unmatched;
    std::string failure;  // non-empty if this lambda failed
};

/// Independent numeric path: for each a on a grid solves F(a) = F'(a) =
/// F''(a) = 0 for (ell, mu^2, h) through the value x = X1(a), then refines the
/// end points of the admissible set and the F''' = 0 node. Events are tagged
/// with the nearest catalog family. kappa >= 0.
std::vector<OracleResult> solve_bifurcations_numeric(double kappa, const std::vector<double>& lambdas,
                                                     const OracleOptions& opt = {}, int workers = 1);

/// Cross-check mode: damped Newton on (F, F', F'') in (a, h, ell) at fixed
/// (lambda, mu) from a seed grid. Returns converged admissible roots.
std::vector<BifurcationEvent> newton_bifurcations(double lambda, double mu, double kappa,
                                                  const std::vector<std::array<double, 3>>& seeds);

/// Quadruple roots at a singular tip (F = F' = F'' = F''' = 0, a = R_min),
/// found by damped Newton from a seed grid and deduplicated.
std::vector<BifurcationEvent> degenerate_hopf_points(double kappa = 1.0);

// Tag an event with the nearest catalog stratum at its (lambda, a).
void tag_event(BifurcationEvent& e, double match_radius);

struct InstabilityInterval {
    double lo = 0.0, hi = 0.0;
    BifKind lo_kind = BifKind::HopfSub;
    BifKind hi_kind = BifKind::HopfSub;
};

/// lambda-interval where F''(R_min) < 0 at h = h_c (kappa = 1 frame).
/// Empty optional for a smooth tip or an empty interval.
std::optional<InstabilityInterval> instability_interval(const CasimirValues& cas, double kappa = 1.0);

}  // namespace res112
