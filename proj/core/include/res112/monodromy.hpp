#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "res112/critical_values.hpp"
#include "res112/model.hpp"

namespace res112 {

// Full Hamiltonian on R^6:
//   alpha L + beta N + delta R + X + kappa/2 R^2 + (lambda1 N + lambda2 L) R
//   + gamma1/2 N^2 + gamma2 N L + gamma3/2 L^2
double full_energy(const cvec3& z, const ModelParams& mp);
// dz/dt with z_j = p_j + i q_j
cvec3 full_vector_field(const cvec3& z, const ModelParams& mp);

struct EMValue {
    double mu = 0.0, iota = 0.0, h = 0.0;

    CasimirValues casimirs() const { return CasimirValues::from_mu_iota(mu, iota); }
};

struct RotationOptions {
    double tol = 1e-12;
    double t_max = 1e5;
    // index among Torus3 components sorted by R. Unset: 0 for a single
    // fiber; a loop follows the start component that survives all the way round.
    std::optional<int> component;
    // if set, picks the Torus3 component whose R-midpoint is nearest
    std::optional<double> r_hint;
    double start_fraction = 0.5;  // R0 = r_lo + f (r_hi - r_lo)
    double start_angle = 0.0;     // extra T^2 phase (s = t = start_angle) on the start point
    bool upper_branch = true;     // Y0 > 0
};

struct RotationData {
    double theta_N = 0.0;  // in [0, 1)
    double theta_J = 0.0;
    double T_red = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
    double closure_residual = 0.0;  // |z(T) - Phi_(s,t) z(0)| / |z(0)|
    double phase_residual = 0.0;    // z1 consistency, radians
    double max_drift = 0.0;         // max of N, J, H drift over the period
    std::size_t steps = 0;
};

// Rotation numbers of a regular fiber. EM value in (mu, iota, h); lambda is
// obtained from the detuning map.
RotationData rotation_numbers(const EMValue& v, const ModelParams& mp, const RotationOptions& opt = {});

struct MonodromyVector {
    long m_N = 0;
    long m_J = 0;
    bool operator==(const MonodromyVector&) const = default;
};
MonodromyVector operator+(const MonodromyVector& a, const MonodromyVector& b);
MonodromyVector operator-(const MonodromyVector& a);

using MonodromyMatrix = std::array<std::array<long, 3>, 3>;

MonodromyMatrix to_matrix(const MonodromyVector& v);
// throws numerical_error if the product is not of the unitriangular form
MonodromyMatrix compose(const MonodromyMatrix& a, const MonodromyMatrix& b);
MonodromyMatrix inverse(const MonodromyMatrix& m);
MonodromyVector from_matrix(const MonodromyMatrix& m);
long determinant(const MonodromyMatrix& m);

// m = kMonodromySign * (winding of theta_N, winding of theta_J). Loops are
// oriented by the right-hand rule around threads running from infinity to the
// origin. Pinned by the C13 loop in a plane N = const < 0, counter-clockwise
// in (J, H), which must give (0, 1).
inline constexpr int kMonodromySign = 1;

struct MonodromyOptions {
    RotationOptions rotation;
    double max_jump = 0.25;     // refine while a step changes theta by more
    std::size_t max_points = 10000;
    double integer_tol = 0.05;
    int workers = 1;
};

struct MonodromyResult {
    MonodromyVector vector;
    double winding_N = 0.0;  // before rounding, sign convention applied
    double winding_J = 0.0;
    std::size_t points = 0;
    std::vector<EMValue> path;  // refined loop
    std::vector<RotationData> rotations;
};

MonodromyResult monodromy_run(const std::vector<EMValue>& loop, const ModelParams& mp,
                              const MonodromyOptions& opt = {});
MonodromyVector monodromy_vector(const std::vector<EMValue>& loop, const ModelParams& mp,
                                 const MonodromyOptions& opt = {});

enum class Generator { Gamma1, Gamma2, Gamma3 };
const char* to_string(Generator g);
std::optional<Generator> generator_from_string(const std::string& s);

struct LoopOptions {
    int points = 48;
    double radius_scale = 1.0;
    bool reverse = false;
};

struct GeneratorLoop {
    Generator generator = Generator::Gamma1;
    std::string thread;  // C23, C13, C12
    EMValue center;      // thread point encircled
    double radius_a = 0.0, radius_h = 0.0;
    std::vector<EMValue> points;  // closed
};

// Loop around the thread of the generator, auto-sized to stay among regular
// values. Throws thread_absent when the thread has no unstable part.
GeneratorLoop generator_loop(Generator g, const ModelParams& mp, const LoopOptions& opt = {});

}  // namespace res112
