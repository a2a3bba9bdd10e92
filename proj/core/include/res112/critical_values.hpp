#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "res112/model.hpp"
#include "res112/reduced_dynamics.hpp"

namespace res112 {

enum class FiberKind { Point, Circle, Torus2, Torus3, PinchedTorusTimesT1, FigureEightTimesT2, CuspPinchedT3 };
const char* to_string(FiberKind k);

struct ComponentDescriptor {
    FiberKind kind = FiberKind::Torus3;
    double r_lo = 0.0, r_hi = 0.0;  // R-range of the reduced component
    bool through_tip = false;
};

struct FiberReport {
    std::vector<ComponentDescriptor> components;
    bool is_critical = false;
    // set when a multiplicity decision fell inside the ambiguity band; the
    // component list is then a best guess and must not be trusted
    bool flagged = false;
    std::string note;

    bool empty() const { return components.empty(); }
    int count(FiberKind k) const;
    // "Torus2 x1 + Torus3 x1", "Empty"
    std::string summary() const;
};

struct FiberOptions {
    double snap_tol = 1e-9;   // |h - h_crit| (relative) treated as equal
    double band = 100.0;      // snap_tol * band: ambiguous
    double root_merge = 1e-7; // unsnapped roots closer than this are ambiguous
};

// Fiber of EM over (mu, ell, h). kappa > 0.
FiberReport classify_fiber(const CasimirValues& cas, const ReducedParams& rp, double h, const FiberOptions& opt = {});

struct Interval {
    double lo = 0.0, hi = 0.0;
};

struct ThreadSegment {
    std::string name;  // C23 (mu = ell > 0), C13 (mu = -ell), C12 (mu = 0, ell < 0)
    // ell-range of the whole curve scanned (C12 is truncated below)
    Interval domain;
    // unstable tip (C^0)
    std::optional<Interval> unstable;
    // h_c > h_min (C^+), ordered
    std::vector<Interval> above_min;

    CasimirValues casimirs(double ell) const;
    double h_c(double ell, const ReducedParams& rp) const;
};

struct ThreadOptions {
    double ell_extent = 0.0;  // 0: automatic
    int samples = 400;
    double bisect_tol = 1e-10;
};

std::vector<ThreadSegment> thread_segments(const ReducedParams& rp, const ThreadOptions& opt = {});

// Where C12 joins B inside (-lambda^2, 0): end of the C12^+ piece, if any.
std::optional<double> ell_star(const ReducedParams& rp, double tol = 1e-10);

enum class FaceKind { Elliptic, Hyperbolic, Tip };
const char* to_string(FaceKind k);

struct FacePoint {
    double h = 0.0;
    FaceKind kind = FaceKind::Elliptic;
    double R = 0.0;
    bool validated = false;  // classify_fiber confirmed a critical fiber
};

struct SliceNode {
    double mu = 0.0, ell = 0.0;
    double h_min = 0.0;
    std::vector<FacePoint> faces;  // critical heights strictly above h_min
    int regular_equilibria = 0;
    std::string error;
};

struct SliceGrid {
    double mu_lo = -1.0, mu_hi = 1.0;
    double ell_lo = -1.0, ell_hi = 1.0;
    int n_mu = 41, n_ell = 41;
};

std::vector<SliceNode> critical_slice(const ReducedParams& rp, const SliceGrid& grid, int workers = 1);

// Sum over the grid of the h-extent where two T^3 families coexist times the
// cell area.
double tetrahedron_volume(const ReducedParams& rp, const SliceGrid& grid, int workers = 1);

struct LocusPoint {
    double mu = 0.0, ell = 0.0, h = 0.0;
};

// Points where the two elliptic heights coincide (nodes with three regular
// equilibria), found by bisection along mu for each ell row.
std::vector<LocusPoint> elliptic_crossing_locus(const ReducedParams& rp, const SliceGrid& grid, int workers = 1);

}  // namespace res112
