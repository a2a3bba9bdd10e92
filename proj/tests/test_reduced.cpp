#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "res112/bifurcations.hpp"
#include "res112/reduced_dynamics.hpp"
#include "res112/reduced_space.hpp"

using namespace res112;

TEST(Energy, Examples)
{
    EXPECT_EQ(reduced_h({0, 0, 0}, {0.7, 1.0}), 0.0);
    EXPECT_DOUBLE_EQ(reduced_h({1, 1, 0}, {0.0, 1.0}), 1.5);
    for (double ell : {0.5, 1.3})
        for (double lam : {-0.4, 0.9})
            EXPECT_DOUBLE_EQ(tip_energy({ell, ell}, {lam, 1.0}), lam * ell + 0.5 * ell * ell);
}

TEST(VectorField, PureXEnergy)
{
    const InvariantPoint p{0.8, 0.3, -0.45};
    const auto v = vector_field(p, {0.2, -0.1}, {0.0, 0.0});
    EXPECT_NEAR(v[0], 2.0 * p.Y, 1e-15);
}

TEST(VectorField, TangentToLevelSets)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int i = 0; i < 500; ++i) {
        const CasimirValues cas{U(rng), U(rng)};
        const ReducedParams rp{U(rng), 1.0};
        const InvariantPoint p{U(rng) + 1.5, U(rng), U(rng)};
        const auto v = vector_field(p, cas, rp);
        const auto gS = syzygy_gradient(p, cas);
        const double dS = gS[0] * v[0] + gS[1] * v[1] + gS[2] * v[2];
        const double dH = (rp.lambda + rp.kappa * p.R) * v[0] + v[1];
        EXPECT_NEAR(dS, 0.0, 1e-12 * (1 + std::abs(gS[0]) + std::abs(gS[1]) + std::abs(gS[2])));
        EXPECT_NEAR(dH, 0.0, 1e-12 * 10);
    }
}

TEST(VectorField, VanishesAtEquilibria)
{
    const CasimirValues cas{0.3, 0.1};
    const ReducedParams rp{-0.2, 1.0};
    for (const auto& e : equilibria(cas, rp)) {
        if (e.stability == Stability::SingularTip) continue;
        const auto v = vector_field({e.R, e.X, 0.0}, cas, rp);
        EXPECT_NEAR(std::hypot(v[0], v[1], v[2]), 0.0, 1e-10);
    }
}

TEST(Equilibria, CountsAndLargestRootElliptic)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int i = 0; i < 2000; ++i) {
        const CasimirValues cas{U(rng), U(rng)};
        const ReducedParams rp{U(rng), 1.0};
        const auto eqs = equilibria(cas, rp);
        int ne = 0, nh = 0, nd = 0;
        const Equilibrium* largest = nullptr;
        for (const auto& e : eqs) {
            if (e.stability == Stability::SingularTip) continue;
            ne += e.stability == Stability::Elliptic;
            nh += e.stability == Stability::Hyperbolic;
            nd += e.stability == Stability::Degenerate;
            if (!largest || e.R > largest->R) largest = &e;
        }
        if (nd) continue;
        EXPECT_EQ(ne, nh + 1);
        ASSERT_NE(largest, nullptr);
        EXPECT_EQ(largest->stability, Stability::Elliptic);
    }
}

TEST(Equilibria, ResonanceHasOnlyTheTip)
{
    const auto eqs = equilibria({0, 0}, {0.0, 1.0});
    // S(R) = 4 R^5 - 9 R^4 at mu = ell = lambda = 0: one regular root R = 9/4
    int regular = 0;
    for (const auto& e : eqs)
        if (e.stability != Stability::SingularTip) {
            ++regular;
            EXPECT_NEAR(e.R, 2.25, 1e-9);
        }
    EXPECT_EQ(regular, 1);
    EXPECT_EQ(eqs.back().stability, Stability::SingularTip);
}

TEST(HMin, TipIsMinimumForPositiveLambda)
{
    EXPECT_NEAR(h_min({0, 0}, {1.0, 1.0}), 0.0, 1e-14);
}

TEST(HMin, AgreesWithScanOfF)
{
    // the level meets the reduced space where F(R) <= 0
    const CasimirValues cas{3.0, 0.0};
    const ReducedParams rp{0.0, 1.0};
    const double hm = h_min(cas, rp);
    auto touches = [&](double h) {
        const auto q = f_quartic(h, rp, cas);
        for (int i = 0; i <= 20000; ++i)
            if (q(r_min(cas) + 10.0 * i / 20000.0) <= 0.0) return true;
        return false;
    };
    EXPECT_TRUE(touches(hm + 1e-6));
    EXPECT_FALSE(touches(hm - 1e-3));
}

TEST(HMin, ContinuousAlongALine)
{
    double prev = h_min({-1.0, -0.7}, {0.2, 1.0});
    for (int i = 1; i <= 400; ++i) {
        const double s = -1.0 + 2.0 * i / 400.0;
        const double cur = h_min({s, 0.7 * s}, {0.2, 1.0});
        EXPECT_LT(std::abs(cur - prev), 0.05);
        prev = cur;
    }
}

TEST(Orbit, StationaryAtEquilibrium)
{
    const CasimirValues cas{0.3, 0.1};
    const ReducedParams rp{0.0, 1.0};
    const auto eqs = equilibria(cas, rp);
    const auto& e = eqs.front();
    OrbitOptions o;
    o.t_end = 5.0;
    const auto tr = integrate_orbit({e.R, e.X, 0.0}, cas, rp, o);
    for (const auto& p : tr.points) EXPECT_NEAR(p.R, e.R, 1e-9);
}

TEST(Orbit, DriftBudget)
{
    const CasimirValues cas{0.0, -0.5};
    const ReducedParams rp{-1.0, 1.0};
    const double R0 = 0.5, s = std::sqrt(section_sq(R0, cas));
    OrbitOptions o;
    o.t_end = 1000.0;
    o.tol = 1e-10;
    o.record = false;
    const auto tr = integrate_orbit({R0, 0.6 * s, 0.8 * s}, cas, rp, o);
    EXPECT_LE(tr.max_syzygy_drift, 1e-9);
    EXPECT_LE(tr.max_energy_drift, 1e-9);
}

TEST(Orbit, PeriodUsesTheFullState)
{
    const CasimirValues cas{0.0, 0.0};
    const ReducedParams rp{-1.0, 1.0};
    const double R0 = 1.0, s = std::sqrt(section_sq(R0, cas));
    const InvariantPoint p0{R0, 0.3 * s, std::sqrt(1 - 0.09) * s};
    OrbitOptions o;
    o.t_end = 200.0;
    o.detect_period = true;
    o.record = false;
    auto tr = integrate_orbit(p0, cas, rp, o);
    ASSERT_TRUE(tr.period);
    o.tol = 1e-12;
    const auto tr2 = integrate_orbit(p0, cas, rp, o);
    ASSERT_TRUE(tr2.period);
    EXPECT_NEAR(*tr.period, *tr2.period, 1e-6);
    // after one period the state, not only R, has returned
    OrbitOptions o3;
    o3.t_end = *tr2.period;
    const auto tr3 = integrate_orbit(p0, cas, rp, o3);
    const auto& e = tr3.points.back();
    EXPECT_NEAR(std::hypot(e.R - p0.R, e.X - p0.X, e.Y - p0.Y), 0.0, 1e-6);
}

TEST(Frequencies, Examples)
{
    ModelParams mp;
    mp.kappa = 0.0;
    mp.alpha = 1.0;
    const auto f = internal_frequencies(0.4, {0.2, 0.3}, mp);
    EXPECT_DOUBLE_EQ(f.dH_dN, -1.0);
    EXPECT_DOUBLE_EQ(f.dH_dJ, 2.0);
    ModelParams a = mp, b = mp;
    a.alpha = a.beta = 0.3;
    b.alpha = b.beta = 1.7;
    EXPECT_DOUBLE_EQ(internal_frequencies(0.4, {0.2, 0.3}, a).dH_dN, internal_frequencies(0.4, {0.2, 0.3}, b).dH_dN);
}
