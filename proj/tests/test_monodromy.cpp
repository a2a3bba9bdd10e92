#include <cmath>

#include <gtest/gtest.h>

#include "res112/bifurcations.hpp"
#include "res112/errors.hpp"
#include "res112/monodromy.hpp"

using namespace res112;

namespace {

ModelParams at(double delta)
{
    ModelParams mp;
    mp.delta = delta;
    return mp;
}

MonodromyVector generator(Generator g, double delta, LoopOptions lo = {})
{
    return monodromy_vector(generator_loop(g, at(delta), lo).points, at(delta));
}

std::vector<EMValue> box(double iota, double mu_r, double h_top, double h_bottom, int n)
{
    std::vector<EMValue> v;
    for (int k = 0; k < n; ++k) v.push_back({-mu_r + 2 * mu_r * k / n, iota, h_top});
    for (int k = 0; k < n; ++k) v.push_back({mu_r, iota, h_top + (h_bottom - h_top) * k / n});
    for (int k = 0; k < n; ++k) v.push_back({mu_r - 2 * mu_r * k / n, iota, h_bottom});
    for (int k = 0; k < n; ++k) v.push_back({-mu_r, iota, h_bottom + (h_top - h_bottom) * k / n});
    v.push_back(v.front());
    return v;
}

}  // namespace

TEST(FullSystem, VectorFieldConservesTheIntegrals)
{
    ModelParams mp;
    mp.alpha = 0.3;
    mp.beta = -0.2;
    mp.delta = 0.4;
    mp.lambda1 = 0.1;
    mp.gamma2 = 0.05;
    const cvec3 z{{{0.3, 0.4}, {-0.2, 0.9}, {1.1, -0.5}}};
    const auto v = full_vector_field(z, mp);
    // dE/dt along the flow, by finite differences
    const double e = 1e-6;
    cvec3 zp = z, zm = z;
    for (int j = 0; j < 3; ++j) {
        zp[j] += e * v[j];
        zm[j] -= e * v[j];
    }
    EXPECT_NEAR((full_energy(zp, mp) - full_energy(zm, mp)) / (2 * e), 0.0, 1e-8);
    const auto np = reduce(FullState::from_z(zp)), nm = reduce(FullState::from_z(zm));
    EXPECT_NEAR((np.n - nm.n) / (2 * e), 0.0, 1e-8);
    EXPECT_NEAR((np.l - nm.l) / (2 * e), 0.0, 1e-8);
}

TEST(Rotation, IndependentOfTheStartPoint)
{
    const EMValue v{0.2, 0.15, 0.2};
    const auto a = rotation_numbers(v, at(0.0));
    RotationOptions o;
    o.start_fraction = 0.2;
    o.start_angle = 0.37;
    o.upper_branch = false;
    const auto b = rotation_numbers(v, at(0.0), o);
    auto d = [](double x, double y) { return std::abs(std::remainder(x - y, 1.0)); };
    EXPECT_LT(d(a.theta_N, b.theta_N), 1e-7);
    EXPECT_LT(d(a.theta_J, b.theta_J), 1e-7);
    EXPECT_NEAR(a.T_red, b.T_red, 1e-7);
    EXPECT_LT(a.phase_residual, 1e-6);
    EXPECT_LT(a.closure_residual, 1e-8);
    EXPECT_LT(a.max_drift, 1e-9);
}

TEST(Rotation, RejectsCriticalValues)
{
    EXPECT_THROW(rotation_numbers({0.0, 0.0, 0.0}, at(0.0)), validation_error);
    EXPECT_THROW(rotation_numbers({0.2, 0.15, -10.0}, at(0.0)), validation_error);
}

TEST(Rotation, IslandPeriodTendsToTheEllipticPeriod)
{
    // delta = -1, inside the tetrahedron: the inner component shrinks onto the
    // elliptic torus of F_e as h rises to the face
    const double mu = 0.02, ell = -0.465;
    const CasimirValues cas{mu, ell};
    const ReducedParams rp{-1.0, 1.0};
    const auto nd = critical_slice(rp, {mu, mu, ell, ell, 1, 1}).front();
    double he = NAN, Re = NAN;
    for (const auto& f : nd.faces)
        if (f.kind == FaceKind::Elliptic) {
            he = f.h;
            Re = f.R;
        }
    ASSERT_TRUE(std::isfinite(he));
    const auto q = f_quartic(he, rp, cas);
    // R'' = -2 F'(R) about the elliptic root gives omega^2 = 2 F''(R_e)
    const double T_lin = 2 * M_PI / std::sqrt(2.0 * q.deriv(Re, 2));
    double prev_err = INFINITY;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        RotationOptions o;
        o.r_hint = Re;
        const auto r = rotation_numbers({mu, cas.iota(), he - eps * std::abs(he)}, at(-1.0), o);
        EXPECT_LT(r.r_hi, 0.1);
        const double err = std::abs(r.T_red - T_lin);
        EXPECT_LT(err, prev_err);
        prev_err = err;
    }
    EXPECT_LT(prev_err / T_lin, 1e-2);
}

TEST(Monodromy, GeneratorsAtZeroDetuning)
{
    EXPECT_EQ(generator(Generator::Gamma1, 0.0), (MonodromyVector{1, -1}));
    EXPECT_EQ(generator(Generator::Gamma2, 0.0), (MonodromyVector{0, 1}));
    EXPECT_EQ(generator(Generator::Gamma3, 0.0), (MonodromyVector{-1, 0}));
}

TEST(Monodromy, ReversalNegates)
{
    LoopOptions lo;
    lo.reverse = true;
    for (Generator g : {Generator::Gamma1, Generator::Gamma2, Generator::Gamma3})
        EXPECT_EQ(generator(g, 0.0, lo), -generator(g, 0.0));
}

TEST(Monodromy, HomotopyInvariance)
{
    LoopOptions small;
    small.radius_scale = 0.5;
    small.points = 96;
    for (double delta : {0.0, -0.5})
        for (Generator g : {Generator::Gamma1, Generator::Gamma2, Generator::Gamma3})
            EXPECT_EQ(generator(g, delta, small), generator(g, delta));
}

TEST(Monodromy, ContractibleLoopIsTrivial)
{
    std::vector<EMValue> loop;
    for (int k = 0; k <= 64; ++k) {
        const double t = 2 * M_PI * (k % 64) / 64;
        loop.push_back({0.4 + 0.05 * std::cos(t), 0.3, 1.0 + 0.1 * std::sin(t)});
    }
    EXPECT_EQ(monodromy_vector(loop, at(0.0)), (MonodromyVector{0, 0}));
}

TEST(Monodromy, IslandLoopThroughTheEllipticFace)
{
    const auto loop = box(-0.2225, 0.15, -0.02, -0.1, 100);
    EXPECT_EQ(monodromy_vector(loop, at(-1.0)), (MonodromyVector{-1, 0}));
    const std::vector<EMValue> rev(loop.rbegin(), loop.rend());
    EXPECT_EQ(monodromy_vector(rev, at(-1.0)), (MonodromyVector{1, 0}));
}

TEST(Monodromy, CrossingTheHyperbolicFaceIsRejected)
{
    EXPECT_THROW(monodromy_vector(box(-0.2225, 0.15, -0.025, -0.1, 100), at(-1.0)), validation_error);
}

TEST(Monodromy, OnlyGammaThreeAtOnePointFive)
{
    EXPECT_THROW(generator_loop(Generator::Gamma1, at(1.5)), thread_absent);
    EXPECT_THROW(generator_loop(Generator::Gamma2, at(1.5)), thread_absent);
    EXPECT_EQ(generator(Generator::Gamma3, 1.5), (MonodromyVector{-1, 0}));
}

TEST(Monodromy, DegenerateLoopsRejected)
{
    EXPECT_THROW(monodromy_vector({{0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}}, at(0.0)), validation_error);
    std::vector<EMValue> open{{0.4, 0.3, 1.0}, {0.5, 0.3, 1.0}, {0.5, 0.3, 1.1}, {0.4, 0.3, 1.1}};
    EXPECT_THROW(monodromy_vector(open, at(0.0)), validation_error);
}

TEST(Matrix, Algebra)
{
    const MonodromyMatrix id{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    EXPECT_EQ(to_matrix({0, 0}), id);
    EXPECT_EQ(compose(to_matrix({1, -1}), to_matrix({0, 1})), to_matrix({1, 0}));
    EXPECT_EQ(inverse(to_matrix({-1, 0})), to_matrix({1, 0}));
    EXPECT_EQ(from_matrix(to_matrix({3, -2})), (MonodromyVector{3, -2}));
    EXPECT_EQ(determinant(to_matrix({5, 7})), 1);
}

TEST(Generators, Names)
{
    EXPECT_EQ(generator_from_string("gamma2"), Generator::Gamma2);
    EXPECT_FALSE(generator_from_string("gamma4"));
    EXPECT_STREQ(to_string(Generator::Gamma3), "gamma3");
}
