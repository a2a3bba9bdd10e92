#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "res112/errors.hpp"
#include "res112/model.hpp"
#include "res112/reduced_space.hpp"

using namespace res112;

TEST(Oscillator, UnitActionExample)
{
    const auto [x, y] = from_oscillator({std::sqrt(2.0), 0.0, 0.0}, {0.0, 0.0, 0.0});
    EXPECT_NEAR(x[0], 1.0, 1e-15);
    EXPECT_NEAR(x[1], 0.0, 1e-15);
    EXPECT_NEAR(y[1], 1.0, 1e-15);
    EXPECT_NEAR(x[0] * y[1] - x[1] * y[0], 1.0, 1e-15);
    EXPECT_NEAR(reduce(FullState::original(x, y)).n, 1.0, 1e-15);
}

TEST(Oscillator, ZeroAndRoundTrip)
{
    const auto [q0, p0] = to_oscillator({0, 0, 0}, {0, 0, 0});
    for (int j = 0; j < 3; ++j) EXPECT_EQ(q0[j] + p0[j], 0.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-3, 3);
    for (int i = 0; i < 200; ++i) {
        const vec3 x{U(rng), U(rng), U(rng)}, y{U(rng), U(rng), U(rng)};
        const auto [q, p] = to_oscillator(x, y);
        const auto [x2, y2] = from_oscillator(q, p);
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(x2[j], x[j], 1e-14);
            EXPECT_NEAR(y2[j], y[j], 1e-14);
        }
    }
}

TEST(Reduce, AllOnes)
{
    const auto r = reduce(FullState::from_z({1.0, 1.0, 1.0}));
    EXPECT_NEAR(r.n, 0.0, 1e-15);
    EXPECT_NEAR(r.l, 0.0, 1e-15);
    EXPECT_NEAR(r.point.R, 1.0, 1e-15);
    EXPECT_NEAR(r.point.X, 1.0, 1e-15);
    EXPECT_NEAR(r.point.Y, 0.0, 1e-15);
}

TEST(Reduce, ThirdModeAxis)
{
    const auto r = reduce(FullState::from_z({0.0, 0.0, std::complex<double>(0.0, 2.0)}));
    EXPECT_NEAR(r.n, 0.0, 1e-15);
    EXPECT_NEAR(r.l, -4.0, 1e-15);
    EXPECT_NEAR(r.point.R, 0.0, 1e-15);
    EXPECT_EQ(isotropy_class(FullState::from_z({0.0, 0.0, 1.0})), Isotropy::C12);
}

TEST(Isotropy, Classes)
{
    EXPECT_EQ(isotropy_class(FullState::from_z({0.0, 0.0, 0.0})), Isotropy::C123);
    EXPECT_EQ(isotropy_class(FullState::from_z({1.0, 0.5, 0.2})), Isotropy::Trivial);
}

TEST(Syzygy, Examples)
{
    EXPECT_EQ(syzygy_residual({1, 1, 0}, {0, 0}), 0.0);
    EXPECT_EQ(syzygy_residual({0, 0, 0}, {0, 0}), 0.0);
    EXPECT_EQ(syzygy_residual({2, 0, 0}, {0, 0}), -8.0);
}

TEST(Syzygy, RandomStatesLieOnTheSurface)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int i = 0; i < 10000; ++i) {
        const auto r = reduce(FullState::oscillator({U(rng), U(rng), U(rng)}, {U(rng), U(rng), U(rng)}));
        const double R = r.point.R;
        EXPECT_LE(std::abs(syzygy_residual(r.point, {r.n, r.l})), 1e-12 * std::max(1.0, R * R * R));
    }
}

TEST(Brackets, TableAtPoint)
{
    const auto M = structure_matrix({1, 1, 0}, {0, 0});
    EXPECT_NEAR(M[0][1], 0.0, 1e-15);
    EXPECT_NEAR(M[0][2], -2.0, 1e-15);
    EXPECT_NEAR(M[1][2], -3.0, 1e-15);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) EXPECT_EQ(M[a][b], -M[b][a]);
}

TEST(Brackets, OriginOnlyXY)
{
    const auto M = structure_matrix({0, 0, 0}, {0.7, -0.2});
    EXPECT_NEAR(M[0][1], 0.0, 1e-15);
    EXPECT_NEAR(M[0][2], 0.0, 1e-15);
    EXPECT_NEAR(M[1][2], 0.49, 1e-15);
}

TEST(Detuning, Examples)
{
    ModelParams mp;
    mp.delta = -1.0;
    EXPECT_EQ(detuning_lambda(mp, {0.3, -2.0}), -1.0);
    mp.delta = 0.0;
    mp.lambda1 = 1.0;
    mp.lambda2 = 2.0;
    EXPECT_EQ(detuning_lambda(mp, {1.0, 1.0}), 3.0);
    ModelParams m2;
    m2.delta = 0.48;
    EXPECT_EQ(detuning_lambda(m2, {5.0, 7.0}), 0.48);
}

TEST(Params, RejectsNonFinite)
{
    ModelParams mp;
    mp.gamma2 = NAN;
    EXPECT_THROW(mp.validate(), validation_error);
}

TEST(KappaScaling, IdentityAndExample)
{
    const auto id = kappa_scaling({0.3, 0.4}, {1, 2, 3}, 0.5, 0.7, 1.0);
    EXPECT_EQ(id.mu, 0.3);
    EXPECT_EQ(id.Y, 3.0);
    const auto s = kappa_scaling({4, 8}, {0, 0, 0}, 0.0, 2.0, 2.0);
    EXPECT_DOUBLE_EQ(s.lambda, 1.0);
    EXPECT_DOUBLE_EQ(s.mu, 1.0);
    EXPECT_DOUBLE_EQ(s.ell, 2.0);
}

TEST(TorusAction, PreservesInvariantsAndComposes)
{
    const auto st = FullState::from_z(cvec3{{{0.3, 0.4}, {-0.2, 0.9}, {1.1, -0.5}}});
    const auto a = reduce(st), b = reduce(torus_action(st, 0.17, -0.42));
    EXPECT_NEAR(a.n, b.n, 1e-14);
    EXPECT_NEAR(a.l, b.l, 1e-14);
    EXPECT_NEAR(a.point.X, b.point.X, 1e-14);
    EXPECT_NEAR(a.point.Y, b.point.Y, 1e-14);
    const auto c = torus_action(torus_action(st, 0.1, 0.2), 0.3, 0.4).z();
    const auto d = torus_action(st, 0.4, 0.6).z();
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(c[j] - d[j]), 0.0, 1e-14);
}

TEST(ReducedSpace, RMin)
{
    EXPECT_EQ(r_min({0, 0}), 0.0);
    EXPECT_EQ(r_min({-3, 1}), 3.0);
    EXPECT_EQ(r_min({1, 2}), 2.0);
}

TEST(ReducedSpace, TipKinds)
{
    EXPECT_EQ(tip_class({0, 0}).kind, TipKind::Cusp);
    EXPECT_EQ(tip_class({1, 1}).kind, TipKind::Cone);
    EXPECT_EQ(tip_class({0, -1}).kind, TipKind::Cone);
    EXPECT_EQ(tip_class({0.5, 0.2}).kind, TipKind::Smooth);
}

TEST(ReducedSpace, Section)
{
    EXPECT_EQ(section_sq(1, {0, 0}), 1.0);
    EXPECT_EQ(section_sq(2, {1, 0}), 6.0);
    for (CasimirValues c : {CasimirValues{0, 0}, CasimirValues{1, 1}, CasimirValues{0, -1}})
        EXPECT_EQ(section_sq(r_min(c), c), 0.0);
}
