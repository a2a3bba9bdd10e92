#include "res112/reduced_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace res112 {

double r_min(const CasimirValues& cas) { return std::max(std::abs(cas.mu), cas.ell); }

TipClass tip_class(const CasimirValues& cas, double eps_c)
{
    std::array<double, 3> a{cas.mu, -cas.mu, cas.ell};
    std::sort(a.begin(), a.end(), std::greater<>());
    TipClass t;
    t.a1 = a[0];
    t.a2 = a[1];
    t.a3 = a[2];
    t.r_min = r_min(cas);
    if (a[0] - a[2] <= eps_c)
        t.kind = TipKind::Cusp;
    else if (a[0] - a[1] <= eps_c)
        t.kind = TipKind::Cone;
    else
        t.kind = TipKind::Smooth;
    return t;
}

const char* to_string(TipKind k)
{
    switch (k) {
    case TipKind::Smooth: return "Smooth";
    case TipKind::Cone: return "Cone";
    case TipKind::Cusp: return "Cusp";
    }
    return "?";
}

double section_sq(double R, const CasimirValues& cas) { return (R * R - cas.mu * cas.mu) * (R - cas.ell); }

}  // namespace res112
