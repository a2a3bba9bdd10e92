#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "res112/bifurcations.hpp"
#include "res112/errors.hpp"

namespace res112 {

namespace {

struct Name {
    Family f;
    const char* s;
};
constexpr Name kNames[] = {
    {Family::CS1, "CS1"},         {Family::CS2, "CS2"},           {Family::CS3, "CS3"},
    {Family::CS4, "CS4"},         {Family::Cusp1, "Cusp1"},       {Family::Cusp2, "Cusp2"},
    {Family::Cusp3, "Cusp3"},     {Family::HHsub1, "HHsub1"},     {Family::HHsub2, "HHsub2"},
    {Family::HHsub3, "HHsub3"},   {Family::HHsup1, "HHsup1"},     {Family::HHsup2, "HHsup2"},
    {Family::HHsup3, "HHsup3"},   {Family::HHdeg1, "HHdeg1"},     {Family::HHdeg2, "HHdeg2"},
    {Family::HHdeg3, "HHdeg3"},   {Family::CS1_k0, "CS1_k0"},     {Family::CS2_k0, "CS2_k0"},
    {Family::CS3_k0, "CS3_k0"},   {Family::HHsub1_k0, "HHsub1_k0"}, {Family::HHsub2_k0, "HHsub2_k0"},
    {Family::HHsub3_k0, "HHsub3_k0"},
};

constexpr double kLamTol = 1e-12;

bool near(double x, double y) { return std::abs(x - y) <= kLamTol * std::max(1.0, std::abs(y)); }

void require_finite(const FamilyParams& p, bool need_a)
{
    if (!std::isfinite(p.lambda)) throw validation_error("family point needs a finite lambda");
    if (need_a && !std::isfinite(p.a)) throw validation_error("family point needs a finite a");
    if (p.sign != 1 && p.sign != -1) throw validation_error("sign must be +1 or -1");
}

// mu_pm^2 for kappa > 0 and 2 kappa lambda != 1
double mu_sq(int pm, double a, double l, double k)
{
    const double D = (k * a + l) * (k * a + l) - 2.0 * a;
    const double k2 = k * k, k3 = k2 * k, a2 = a * a, a3 = a2 * a, l2 = l * l;
    const double num = 2 * k3 * a3 * l - 2 * k2 * a3 + 6 * k2 * a2 * l2 - 6 * k * a2 * l + 3 * a2 +
                       6 * k * a * l2 * l - 6 * a * l2 + 2 * l2 * l2;
    return (pm * 2.0 * std::abs(l) * std::pow(std::max(D, 0.0), 1.5) + num) / (2.0 * k * l - 1.0);
}

double ell_of(double m2, double a, double l, double k)
{
    const double k2 = k * k, a2 = a * a;
    return (-2 * k2 * k * a2 * a - 6 * k2 * a2 * l + 3 * k * a2 - 6 * k * a * l * l + 6 * a * l - 2 * l * l * l +
            k * m2) /
           (2.0 * l);
}

double h_of(double m2, double a, double l, double k)
{
    return (m2 + 3 * a * a - 2 * k * k * a * a * a - 3 * k * a * a * l) / (2.0 * l);
}

double b_of(double a, double l, double k) { return 4.0 / (k * k) - 3.0 * a - 4.0 * l / k; }

void check_in(double a, std::pair<double, double> r, BifurcationEvent& e, const char* what)
{
    const double tol = 1e-12 * std::max(1.0, std::abs(r.second));
    if (a < r.first - tol || a > r.second + tol) {
        std::ostringstream os;
        os << what << ": a = " << a << " outside [" << r.first << ", " << r.second << "]";
        throw validation_error(os.str());
    }
    if (a <= r.first + tol || a >= r.second - tol) e.boundary = true;
}

BifurcationEvent point_at(Family f, double l, double a, double mu, double ell, double h, double k)
{
    BifurcationEvent e;
    e.kind = family_kind(f);
    e.family = f;
    e.lambda = l;
    e.a = a;
    e.mu = mu;
    e.ell = ell;
    e.h = h;
    e.kappa = k;
    e.b = k != 0.0 ? b_of(a, l, k) : std::numeric_limits<double>::quiet_NaN();
    return e;
}

BifurcationEvent catalog_positive(Family f, const FamilyParams& p, double k)
{
    const double l = p.lambda, k2 = k * k;
    const double u = k * l;
    auto absent = [&]() -> BifurcationEvent {
        std::ostringstream os;
        os << to_string(f) << " does not exist at lambda = " << l << " (kappa = " << k << ")";
        throw validation_error(os.str());
    };

    switch (f) {
    case Family::CS1:
    case Family::CS2:
    case Family::CS3:
    case Family::CS4: {
        require_finite(p, true);
        const auto r = family_a_range(f, l, k);
        if (!r) absent();
        const double a = p.a;
        BifurcationEvent tmp;
        check_in(a, *r, tmp, to_string(f));
        const int sgn = f == Family::CS1 ? -1 : f == Family::CS2 ? +1 : p.sign;
        BifurcationEvent e;
        if (near(u, 0.5)) {
            // the general expressions are 0/0 here
            const double mu = sgn * std::sqrt(2.0 * k2 * a * a * a);
            e = point_at(f, l, a, mu, (6.0 * k2 * a - 1.0) / (4.0 * k2), 1.5 * k * a * a, k);
            e.boundary = true;
        } else {
            const int pm = f == Family::CS3 ? +1 : -1;
            // mu vanishes at the a0 end of CS3 / CS4
            const double a0_end = f == Family::CS3 ? r->first : f == Family::CS4 ? r->second : -1.0;
            const bool at_a0 = std::abs(a - a0_end) <= 1e-12 * std::max(1.0, a0_end);
            const double m2 = at_a0 ? 0.0 : std::max(0.0, mu_sq(pm, a, l, k));
            e = point_at(f, l, a, sgn * std::sqrt(m2), ell_of(m2, a, l, k), h_of(m2, a, l, k), k);
            e.boundary = tmp.boundary;
        }
        return e;
    }
    case Family::Cusp1:
    case Family::Cusp2: {
        require_finite(p, false);
        if (!(u > 0.5 && u < 1.0)) absent();
        const double s = std::sqrt(2.0 * u - 1.0);
        const double a = (1.0 - u) / k2;
        const double mu = (f == Family::Cusp1 ? -1.0 : 1.0) * (u - s) / k2;
        const double ell = (1.0 - u - s) / k2;
        return point_at(f, l, a, mu, ell, h_of(mu * mu, a, l, k), k);
    }
    case Family::Cusp3: {
        require_finite(p, false);
        if (!near(u, 0.5)) absent();
        if (!std::isfinite(p.mu)) throw validation_error("Cusp3 needs a finite mu");
        const double lim = 0.5 / k2;
        if (std::abs(p.mu) > lim * (1.0 + 1e-12))
            throw validation_error("Cusp3: |mu| must be below 1/(2 kappa^2)");
        const double m2 = p.mu * p.mu;
        auto e = point_at(f, 0.5 / k, lim, p.mu, 0.25 / k2 + k2 * m2, 0.125 / (k2 * k) + k * m2, k);
        e.boundary = std::abs(p.mu) >= lim * (1.0 - 1e-12);
        return e;
    }
    case Family::HHsub1:
    case Family::HHsub2:
    case Family::HHsup1:
    case Family::HHsup2: {
        require_finite(p, false);
        if (!(u < 0.5)) absent();
        const bool sup = f == Family::HHsup1 || f == Family::HHsup2;
        const double a = (1.0 - u + (sup ? 1.0 : -1.0) * std::sqrt(1.0 - 2.0 * u)) / k2;
        const double mu = (f == Family::HHsub1 || f == Family::HHsup1) ? a : -a;
        return point_at(f, l, a, mu, a, l * a + 0.5 * k * a * a, k);
    }
    case Family::HHsub3:
    case Family::HHsup3: {
        require_finite(p, false);
        if (f == Family::HHsub3 ? !(u < 1.0) : !(u > 1.0)) absent();
        return point_at(f, l, 0.0, 0.0, -l * l, 0.0, k);
    }
    case Family::HHdeg1:
    case Family::HHdeg2: {
        const double a = 0.5 / k2;
        auto e = point_at(f, 0.5 / k, a, f == Family::HHdeg1 ? a : -a, a, 0.375 / (k2 * k), k);
        return e;
    }
    case Family::HHdeg3:
        return point_at(f, 1.0 / k, 0.0, 0.0, -1.0 / k2, 0.0, k);
    default:
        throw validation_error(std::string(to_string(f)) + " is a kappa = 0 family");
    }
}

}  // namespace

const char* to_string(Family f)
{
    for (const auto& n : kNames)
        if (n.f == f) return n.s;
    return "?";
}

std::optional<Family> family_from_string(const std::string& s)
{
    for (const auto& n : kNames)
        if (s == n.s) return n.f;
    return std::nullopt;
}

bool is_kappa0_family(Family f)
{
    switch (f) {
    case Family::CS1_k0:
    case Family::CS2_k0:
    case Family::CS3_k0:
    case Family::HHsub1_k0:
    case Family::HHsub2_k0:
    case Family::HHsub3_k0: return true;
    default: return false;
    }
}

BifKind family_kind(Family f)
{
    switch (f) {
    case Family::CS1:
    case Family::CS2:
    case Family::CS3:
    case Family::CS4:
    case Family::CS1_k0:
    case Family::CS2_k0:
    case Family::CS3_k0: return BifKind::CentreSaddle;
    case Family::Cusp1:
    case Family::Cusp2:
    case Family::Cusp3: return BifKind::Cusp;
    case Family::HHsup1:
    case Family::HHsup2:
    case Family::HHsup3: return BifKind::HopfSuper;
    case Family::HHdeg1:
    case Family::HHdeg2:
    case Family::HHdeg3: return BifKind::HopfDegenerate;
    default: return BifKind::HopfSub;
    }
}

double g_cubic(double a, double l, double k)
{
    const double k2 = k * k;
    return ((4 * k2 * k2 * a + (12 * k2 * k * l - 12 * k2)) * a + (12 * k2 * l * l - 18 * k * l + 9)) * a +
           4 * k * l * l * l - 4 * l * l;
}

double a0_root(double lambda, double kappa)
{
    if (!std::isfinite(lambda) || !std::isfinite(kappa)) throw validation_error("a0_root: non-finite input");
    if (lambda == 0.0) return 0.0;
    if (kappa * lambda >= 1.0) throw validation_error("a0_root: g(a) > 0 for all a > 0 when kappa lambda >= 1");
    auto g = [&](double a) { return g_cubic(a, lambda, kappa); };
    double hi = std::max(1.0, lambda * lambda);
    if (kappa != 0.0) hi = std::max(hi, 1.0 / (kappa * kappa));
    for (int i = 0; i < 200 && g(hi) <= 0.0; ++i) hi *= 2.0;
    std::uintmax_t it = 200;
    auto tol = [](double x, double y) { return std::abs(x - y) <= 4e-16 * std::max(std::abs(x), 1e-300); };
    auto r = boost::math::tools::toms748_solve(g, 0.0, hi, g(0.0), g(hi), tol, it);
    return 0.5 * (r.first + r.second);
}

std::optional<std::pair<double, double>> family_a_range(Family f, double l, double k)
{
    if (k < 0.0) return family_a_range(f, -l, -k);
    if (k == 0.0) {
        if (f == Family::HHsub3_k0) return std::pair{0.0, 0.0};
        if (l == 0.0) return std::nullopt;
        switch (f) {
        case Family::CS1_k0:
        case Family::CS2_k0: return std::pair{0.0, 0.5 * l * l};
        case Family::CS3_k0: return std::pair{4.0 * l * l / 9.0, 0.5 * l * l};
        case Family::HHsub1_k0:
        case Family::HHsub2_k0: return std::pair{0.5 * l * l, 0.5 * l * l};
        case Family::HHsub3_k0: return std::pair{0.0, 0.0};
        default: return std::nullopt;
        }
    }
    const double u = k * l, k2 = k * k;
    switch (f) {
    case Family::CS1:
    case Family::CS2:
        if (l == 0.0 || u >= 1.0) return std::nullopt;
        if (u < 0.5 && !near(u, 0.5)) return std::pair{0.0, (1.0 - u - std::sqrt(1.0 - 2.0 * u)) / k2};
        return std::pair{0.0, (1.0 - u) / k2};
    case Family::CS3:
        if (l == 0.0 || !(u < 0.5) || near(u, 0.5)) return std::nullopt;
        return std::pair{a0_root(l, k), (1.0 - u - std::sqrt(1.0 - 2.0 * u)) / k2};
    case Family::CS4:
        if (!(u > 0.5 && u < 1.0) || near(u, 0.5)) return std::nullopt;
        return std::pair{(1.0 - u) / k2, a0_root(l, k)};
    default:
        if (!family_present(f, l, k)) return std::nullopt;
        {
            FamilyParams p;
            p.lambda = l;
            p.mu = 0.0;
            const double a = catalog_point(f, p, k).a;
            return std::pair{a, a};
        }
    }
}

bool family_present(Family f, double l, double k)
{
    if (k < 0.0) return family_present(f, -l, -k);
    if (is_kappa0_family(f) != (k == 0.0)) return false;
    const double u = k * l;
    switch (f) {
    case Family::CS1:
    case Family::CS2:
    case Family::CS3:
    case Family::CS4: return family_a_range(f, l, k).has_value();
    case Family::Cusp1:
    case Family::Cusp2: return u > 0.5 && u < 1.0;
    case Family::Cusp3: return near(u, 0.5);
    case Family::HHsub1:
    case Family::HHsub2:
    case Family::HHsup1:
    case Family::HHsup2: return u < 0.5;
    case Family::HHsub3: return u < 1.0;
    case Family::HHsup3: return u > 1.0;
    case Family::HHdeg1:
    case Family::HHdeg2: return near(u, 0.5);
    case Family::HHdeg3: return near(u, 1.0);
    default: return family_a_range(f, l, 0.0).has_value();
    }
}

BifurcationEvent catalog_point(Family f, const FamilyParams& p, double kappa)
{
    if (!std::isfinite(kappa)) throw validation_error("kappa must be finite");
    if (kappa == 0.0 || is_kappa0_family(f)) {
        if (kappa != 0.0) throw validation_error(std::string(to_string(f)) + " requires kappa = 0");
        return catalog_point_kappa0(f, p);
    }
    if (kappa < 0.0) {
        // F(R; h, lambda, kappa) = F(R; -h, -lambda, -kappa)
        FamilyParams q = p;
        q.lambda = -p.lambda;
        auto e = catalog_positive(f, q, -kappa);
        e.lambda = -e.lambda;
        e.h = -e.h;
        e.kappa = kappa;
        return e;
    }
    return catalog_positive(f, p, kappa);
}

BifurcationEvent catalog_point_kappa0(Family f, const FamilyParams& p)
{
    require_finite(p, f == Family::CS1_k0 || f == Family::CS2_k0 || f == Family::CS3_k0);
    const double l = p.lambda;
    const auto r = family_a_range(f, l, 0.0);
    if (!r) {
        std::ostringstream os;
        os << to_string(f) << " does not exist at lambda = " << l << " (kappa = 0)";
        throw validation_error(os.str());
    }
    const double l2 = l * l;
    switch (f) {
    case Family::CS1_k0:
    case Family::CS2_k0:
    case Family::CS3_k0: {
        const double a = p.a;
        BifurcationEvent tmp;
        check_in(a, *r, tmp, to_string(f));
        const double pm = f == Family::CS3_k0 ? 1.0 : -1.0;
        const double m2 = std::max(
            0.0, -3 * a * a + 6 * a * l2 - 2 * l2 * l2 - pm * 2 * std::abs(l) * std::pow(std::max(0.0, l2 - 2 * a), 1.5));
        const int sgn = f == Family::CS1_k0 ? -1 : f == Family::CS2_k0 ? +1 : p.sign;
        auto e = point_at(f, l, a, sgn * std::sqrt(m2), 3 * a - l2, (m2 + 3 * a * a) / (2 * l), 0.0);
        e.boundary = tmp.boundary;
        return e;
    }
    case Family::HHsub1_k0:
    case Family::HHsub2_k0: {
        const double a = 0.5 * l2;
        return point_at(f, l, a, f == Family::HHsub1_k0 ? a : -a, a, l * a, 0.0);
    }
    case Family::HHsub3_k0: return point_at(f, l, 0.0, 0.0, -l2, 0.0, 0.0);
    default: throw validation_error(std::string(to_string(f)) + " is not a kappa = 0 family");
    }
}

}  // namespace res112
