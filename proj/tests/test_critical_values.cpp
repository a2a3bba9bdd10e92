#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "res112/critical_values.hpp"

using namespace res112;

namespace {

std::string fiber(double lambda, double mu, double ell, double h)
{
    return classify_fiber({mu, ell}, {lambda, 1.0}, h).summary();
}

SliceNode node(double lambda, double mu, double ell)
{
    return critical_slice({lambda, 1.0}, {mu, mu, ell, ell, 1, 1}).front();
}

}  // namespace

TEST(Fiber, Resonance) { EXPECT_EQ(fiber(0.0, 0.0, 0.0, 0.0), "CuspPinchedT3 x1"); }

TEST(Fiber, BelowTheMinimumIsEmpty)
{
    const auto r = classify_fiber({0.3, 0.1}, {0.0, 1.0}, -5.0);
    EXPECT_TRUE(r.empty());
    EXPECT_EQ(r.summary(), "Empty");
}

TEST(Fiber, Threads)
{
    EXPECT_EQ(fiber(0.0, 0.7, 0.7, 0.5 * 0.49), "PinchedTorusTimesT1 x1");
    EXPECT_EQ(fiber(0.0, 0.0, -0.8, 0.0), "PinchedTorusTimesT1 x1");
    EXPECT_EQ(fiber(1.5, 0.0, -3.0, 0.0), "PinchedTorusTimesT1 x1");
    EXPECT_EQ(fiber(1.5, 0.0, -2.0, 0.0), "Circle x1");
}

TEST(Fiber, Tetrahedron)
{
    const double mu = 0.02, ell = -0.445 - mu;
    const auto nd = node(-1.0, mu, ell);
    double he = NAN, hh = NAN;
    for (const auto& f : nd.faces) {
        if (f.kind == FaceKind::Elliptic) he = f.h;
        if (f.kind == FaceKind::Hyperbolic) hh = f.h;
        EXPECT_TRUE(f.validated);
    }
    ASSERT_LT(hh, he);  // F_h below F_e
    EXPECT_EQ(fiber(-1.0, mu, ell, 0.5 * (he + hh)), "Torus3 x2");
    EXPECT_EQ(fiber(-1.0, mu, ell, he), "Torus2 x1 + Torus3 x1");
    EXPECT_EQ(fiber(-1.0, mu, ell, hh), "FigureEightTimesT2 x1");
    EXPECT_EQ(classify_fiber({mu, ell}, {-1.0, 1.0}, 0.5 * (he + hh)).count(FiberKind::Torus3), 2);
}

TEST(Fiber, MinimumIsAnEllipticTorus)
{
    const double hm = h_min({0.3, 0.1}, {0.0, 1.0});
    EXPECT_EQ(fiber(0.0, 0.3, 0.1, hm), "Torus2 x1");
    EXPECT_EQ(fiber(0.0, 0.3, 0.1, hm + 0.5), "Torus3 x1");
}

TEST(Threads, ZeroDetuning)
{
    const auto segs = thread_segments({0.0, 1.0});
    ASSERT_EQ(segs.size(), 3u);
    for (const auto& s : segs) {
        ASSERT_TRUE(s.unstable) << s.name;
        if (s.name == "C12") {
            EXPECT_GE(s.unstable->hi, -1e-12);
            EXPECT_LE(s.unstable->lo, s.domain.lo + 1e-12);
        }
        else {
            EXPECT_NEAR(s.unstable->lo, 0.0, 1e-12);
            EXPECT_NEAR(s.unstable->hi, 2.0, 1e-12);
        }
    }
}

TEST(Threads, OnlyC12AtOnePointFive)
{
    for (const auto& s : thread_segments({1.5, 1.0})) {
        if (s.name != "C12") {
            EXPECT_FALSE(s.unstable) << s.name;
            continue;
        }
        ASSERT_TRUE(s.unstable);
        EXPECT_NEAR(s.unstable->hi, -2.25, 1e-12);
    }
}

TEST(Threads, HeightOnTheCone)
{
    ThreadSegment s;
    s.name = "C23";
    EXPECT_DOUBLE_EQ(s.h_c(0.6, {0.2, 1.0}), 0.2 * 0.6 + 0.18);
    s.name = "C12";
    EXPECT_EQ(s.h_c(-0.6, {0.2, 1.0}), 0.0);
}

TEST(EllStar, InsideTheWindow)
{
    const auto s = ell_star({0.52, 1.0});
    ASSERT_TRUE(s);
    EXPECT_GT(*s, -0.52 * 0.52);
    EXPECT_LT(*s, 0.0);
    // h_c - h_min changes sign there
    const double e = 1e-6;
    EXPECT_LT(h_min({0.0, *s - e}, {0.52, 1.0}), 0.0);
    EXPECT_NEAR(h_min({0.0, *s + e}, {0.52, 1.0}), 0.0, 1e-12);
}

TEST(Slice, FacesAtOnePointFive)
{
    // B plus a single detached thread: no elliptic or hyperbolic faces off mu = 0
    for (double mu : {-0.4, 0.1, 0.3})
        for (double ell : {-1.0, 0.2, 0.8})
            for (const auto& f : node(1.5, mu, ell).faces) EXPECT_EQ(f.kind, FaceKind::Tip);
}

TEST(Slice, TetrahedronShrinks)
{
    const SliceGrid g{-0.2, 0.2, -0.6, 0.05, 61, 61};
    const double v4 = tetrahedron_volume({-0.4, 1.0}, g);
    const double v2 = tetrahedron_volume({-0.2, 1.0}, g);
    const double v1 = tetrahedron_volume({-0.1, 1.0}, g);
    EXPECT_GT(v4, v2);
    EXPECT_GT(v2, v1);
    EXPECT_GE(v1, 0.0);
}

TEST(Slice, EllipticCrossingIsSymmetric)
{
    const SliceGrid g{-0.3, 0.3, -0.05, 0.2, 121, 11};
    const auto pts = elliptic_crossing_locus({0.52, 1.0}, g);
    ASSERT_FALSE(pts.empty());
    for (const auto& p : pts) {
        const bool mirrored = std::any_of(pts.begin(), pts.end(), [&](const auto& q) {
            return std::abs(q.mu + p.mu) < 1e-9 && q.ell == p.ell && std::abs(q.h - p.h) < 1e-9;
        });
        EXPECT_TRUE(mirrored);
    }
}
