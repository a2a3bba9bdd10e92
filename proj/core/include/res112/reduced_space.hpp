#pragma once

#include "res112/model.hpp"

namespace res112 {

enum class TipKind { Smooth, Cone, Cusp };

struct TipClass {
    TipKind kind = TipKind::Smooth;
    double r_min = 0.0;
    // roots of (R - mu)(R + mu)(R - ell), a1 >= a2 >= a3
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
};

double r_min(const CasimirValues& cas);
TipClass tip_class(const CasimirValues& cas, double eps_c = 1e-10);
const char* to_string(TipKind k);

// (R^2 - mu^2)(R - ell); negative off the surface
double section_sq(double R, const CasimirValues& cas);

}  // namespace res112
