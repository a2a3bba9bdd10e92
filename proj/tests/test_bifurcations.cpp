#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "res112/bifurcations.hpp"
#include "res112/errors.hpp"

using namespace res112;

namespace {

void expect_point(const BifurcationEvent& e, double lambda, double mu, double ell, double tol = 1e-12)
{
    EXPECT_NEAR(e.lambda, lambda, tol);
    EXPECT_NEAR(e.mu, mu, tol);
    EXPECT_NEAR(e.ell, ell, tol);
}

bool has(const OracleResult& r, Family f)
{
    return std::any_of(r.events.begin(), r.events.end(), [&](const auto& e) { return e.family == f; });
}

}  // namespace

TEST(Quartic, ExpansionAtResonance)
{
    const auto q = f_quartic(0.0, {0.0, 1.0}, {0.0, 0.0});
    const std::array<double, 5> want{0, 0, 0, -1, 0.25};
    for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(q.c[i], want[i]);
}

TEST(Quartic, FourthDerivativeAndTipSign)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int i = 0; i < 500; ++i) {
        const double k = U(rng);
        const CasimirValues cas{U(rng), U(rng)};
        const auto q = f_quartic(U(rng), {U(rng), k}, cas);
        EXPECT_NEAR(q.deriv(0.3, 4), 6.0 * k * k, 1e-12);
        EXPECT_GE(q(r_min(cas)), -1e-12);
    }
}

TEST(Classify, OriginIsSubcritical)
{
    const auto c = classify_multiple_root(0.0, f_quartic(0.0, {0.0, 1.0}, {0.0, 0.0}), {0.0, 0.0});
    EXPECT_EQ(c.kind, BifKind::HopfSub);
    EXPECT_NEAR(c.f3, -6.0, 1e-12);
}

TEST(Classify, SupercriticalAndDegenerate)
{
    EXPECT_EQ(classify_multiple_root(0.0, f_quartic(0.0, {1.5, 1.0}, {0.0, -2.25}), {0.0, -2.25}).kind,
              BifKind::HopfSuper);
    EXPECT_EQ(classify_multiple_root(0.0, f_quartic(0.0, {1.0, 1.0}, {0.0, -1.0}), {0.0, -1.0}).kind,
              BifKind::HopfDegenerate);
}

TEST(Classify, RejectsSimpleRoot)
{
    EXPECT_THROW(classify_multiple_root(1.0, f_quartic(0.3, {0.1, 1.0}, {0.2, 0.1}), {0.2, 0.1}), validation_error);
}

TEST(Catalog, TableRows)
{
    FamilyParams p;
    expect_point(catalog_point(Family::HHdeg1, p), 0.5, 0.5, 0.5);
    expect_point(catalog_point(Family::HHdeg2, p), 0.5, -0.5, 0.5);
    expect_point(catalog_point(Family::HHdeg3, p), 1.0, 0.0, -1.0);
    p.lambda = 0.5;
    p.mu = 0.0;
    expect_point(catalog_point(Family::Cusp3, p), 0.5, 0.0, 0.25);
    FamilyParams q;
    q.lambda = 0.3;
    expect_point(catalog_point(Family::HHsub3, q), 0.3, 0.0, -0.09);
    q.lambda = 0.0;
    expect_point(catalog_point(Family::HHsup1, q), 0.0, 2.0, 2.0);
}

TEST(Catalog, CuspRow)
{
    FamilyParams p;
    p.lambda = 0.75;
    const double s = std::sqrt(0.5);
    expect_point(catalog_point(Family::Cusp1, p), 0.75, -(0.75 - s), 1 - 0.75 - s);
    expect_point(catalog_point(Family::Cusp2, p), 0.75, 0.75 - s, 1 - 0.75 - s);
}

TEST(Catalog, KappaZeroRows)
{
    FamilyParams p;
    p.lambda = 1.0;
    expect_point(catalog_point(Family::HHsub1_k0, p, 0.0), 1.0, 0.5, 0.5);
    expect_point(catalog_point(Family::HHsub3_k0, p, 0.0), 1.0, 0.0, -1.0);
}

TEST(Catalog, KappaZeroCentreSaddleEndsAtHopf)
{
    FamilyParams p;
    p.lambda = 1.3;
    p.a = 0.5 * 1.3 * 1.3;
    const auto e1 = catalog_point(Family::CS1_k0, p, 0.0);
    const auto h1 = catalog_point(Family::HHsub2_k0, p, 0.0);
    EXPECT_TRUE(e1.boundary);
    EXPECT_NEAR(std::abs(e1.mu), std::abs(h1.mu), 1e-12);
    EXPECT_NEAR(e1.ell, h1.ell, 1e-12);
}

TEST(Catalog, RejectsOutOfRange)
{
    FamilyParams p;
    p.lambda = 2.0;
    EXPECT_THROW(catalog_point(Family::Cusp1, p), validation_error);
    p.lambda = 0.2;
    p.a = 100.0;
    EXPECT_THROW(catalog_point(Family::CS1, p), validation_error);
    EXPECT_THROW(catalog_point(Family::CS1_k0, p, 1.0), validation_error);
}

TEST(Catalog, ScalesWithKappa)
{
    // a kappa = 1 member carried by the scaling is the kappa = 2 member at lambda / 2
    for (Family f : {Family::CS1, Family::CS3, Family::HHsub2, Family::Cusp1}) {
        FamilyParams p;
        p.lambda = f == Family::Cusp1 ? 0.7 : 0.2;
        if (f == Family::CS1 || f == Family::CS3) {
            const auto r = *family_a_range(f, p.lambda, 1.0);
            p.a = 0.5 * (r.first + r.second);
        }
        const auto e = catalog_point(f, p, 1.0);
        const auto s = kappa_scaling({e.mu, e.ell}, {e.a, 0, 0}, e.h, e.lambda, 2.0);
        FamilyParams p2 = p;
        p2.lambda = s.lambda;
        p2.a = s.R;
        const auto e2 = catalog_point(f, p2, 2.0);
        EXPECT_NEAR(e2.mu, s.mu, 1e-12);
        EXPECT_NEAR(e2.ell, s.ell, 1e-12);
        EXPECT_NEAR(e2.h, s.H, 1e-12);
    }
}

TEST(A0, SignChangeAndLimit)
{
    EXPECT_LT(g_cubic(0.0, 0.75), 0.0);
    EXPECT_NEAR(g_cubic(0.0, 0.75), 4 * 0.75 * 0.75 * (0.75 - 1), 1e-14);
    const double a0 = a0_root(0.75);
    EXPECT_NEAR(g_cubic(a0, 0.75), 0.0, 1e-12);
    int changes = 0;
    for (int i = 0; i < 10000; ++i) {
        const double a = 5.0 * i / 10000, b = 5.0 * (i + 1) / 10000;
        changes += (g_cubic(a, 0.75) < 0) != (g_cubic(b, 0.75) < 0);
    }
    EXPECT_EQ(changes, 1);
    EXPECT_LT(a0_root(1.0 - 1e-9), 1e-4);
}

TEST(Oracle, LambdaPointThree)
{
    const auto r = solve_bifurcations_numeric(1.0, {0.3}).front();
    EXPECT_TRUE(r.failure.empty());
    EXPECT_TRUE(r.unmatched.empty());
    for (Family f : {Family::CS1, Family::CS2, Family::CS3, Family::HHsub1, Family::HHsub2, Family::HHsub3,
                     Family::HHsup1, Family::HHsup2})
        EXPECT_TRUE(has(r, f)) << to_string(f);
    EXPECT_FALSE(has(r, Family::CS4));
    for (const auto& e : r.events) EXPECT_LE(e.tag_distance, 1e-8);
}

TEST(Oracle, LambdaPointSevenFive)
{
    const auto r = solve_bifurcations_numeric(1.0, {0.75}).front();
    EXPECT_TRUE(r.unmatched.empty());
    for (Family f : {Family::CS4, Family::Cusp1, Family::Cusp2}) EXPECT_TRUE(has(r, f)) << to_string(f);
}

TEST(Oracle, OnlyTheHalfLineAtTwo)
{
    const auto r = solve_bifurcations_numeric(1.0, {2.0}).front();
    EXPECT_TRUE(r.unmatched.empty());
    ASSERT_FALSE(r.events.empty());
    for (const auto& e : r.events) {
        EXPECT_EQ(e.family, Family::HHsup3);
        expect_point(e, 2.0, 0.0, -4.0, 1e-9);
    }
}

TEST(Oracle, NewtonCrossCheck)
{
    FamilyParams p;
    p.lambda = 0.3;
    const auto r = *family_a_range(Family::CS3, 0.3, 1.0);
    p.a = 0.6 * r.first + 0.4 * r.second;
    const auto e = catalog_point(Family::CS3, p);
    const auto found = newton_bifurcations(0.3, e.mu, 1.0, {{e.a * 1.01, e.h + 1e-3, e.ell - 1e-3}});
    ASSERT_FALSE(found.empty());
    EXPECT_NEAR(found.front().ell, e.ell, 1e-10);
    EXPECT_NEAR(found.front().h, e.h, 1e-10);
}

TEST(Degenerate, ThreePoints)
{
    const auto pts = degenerate_hopf_points(1.0);
    ASSERT_EQ(pts.size(), 3u);
    for (const auto& e : pts) EXPECT_NEAR(e.a, 1.0 - e.lambda, 1e-10);
}

TEST(Instability, Intervals)
{
    auto iv = instability_interval({0.0, -4.0});
    ASSERT_TRUE(iv);
    EXPECT_NEAR(iv->lo, -2.0, 1e-12);
    EXPECT_NEAR(iv->hi, 2.0, 1e-12);
    EXPECT_EQ(iv->lo_kind, BifKind::HopfSub);
    EXPECT_EQ(iv->hi_kind, BifKind::HopfSuper);
    iv = instability_interval({0.0, -0.25});
    EXPECT_NEAR(iv->lo, -0.5, 1e-12);
    EXPECT_NEAR(iv->hi, 0.5, 1e-12);
    EXPECT_EQ(iv->hi_kind, BifKind::HopfSub);
    iv = instability_interval({2.0, 2.0});
    EXPECT_NEAR(iv->lo, -4.0, 1e-12);
    EXPECT_NEAR(iv->hi, 0.0, 1e-12);
    EXPECT_EQ(iv->hi_kind, BifKind::HopfSuper);
    EXPECT_FALSE(instability_interval({0.5, 0.2}));
}

TEST(Instability, ConeEndTurnsSupercriticalAtOneHalf)
{
    // right end sqrt(2 ell) - ell; F''' there is 6 (sqrt(2 ell) - 1)
    EXPECT_EQ(instability_interval({0.4, 0.4})->hi_kind, BifKind::HopfSub);
    EXPECT_EQ(instability_interval({0.6, 0.6})->hi_kind, BifKind::HopfSuper);
    EXPECT_EQ(instability_interval({-0.6, 0.6})->hi_kind, BifKind::HopfSuper);
}
