#pragma once

// Thin wrapper over odeint's controlled Fehlberg 7(8) stepper with
// section-crossing location. Internal header.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

namespace res112::detail {

template <std::size_t N>
using ode_state = std::array<double, N>;

template <std::size_t N>
class ode_driver {
public:
    using state = ode_state<N>;
    using rhs_fn = std::function<void(const state&, state&, double)>;

    ode_driver(rhs_fn rhs, double abs_tol, double rel_tol)
        : rhs_(std::move(rhs)),
          ctrl_(boost::numeric::odeint::make_controlled<stepper>(abs_tol, rel_tol))
    {
    }

    // One accepted step. dt is updated to the suggested next size and never
    // lets t overshoot t_stop. Returns the size actually taken.
    double step(state& x, double& t, double& dt, double t_stop)
    {
        using boost::numeric::odeint::fail;
        for (int tries = 0; tries < 200; ++tries) {
            double h = std::min(dt, t_stop - t);
            if (h <= min_step(t)) throw_collapse();
            double t0 = t;
            double h_try = h;
            if (ctrl_.try_step(sys(), x, t, h_try) != fail) {
                dt = h_try;
                return t - t0;
            }
            dt = h_try;
        }
        throw_collapse();
        return 0.0;
    }

    // Unchecked single step of size h from (x, t), used inside an already
    // accepted interval.
    state fixed_step(const state& x, double t, double h)
    {
        state out;
        ctrl_.stepper().do_step(sys(), x, t, out, h);
        return out;
    }

    // Root of g along the step [t0, t0 + h] starting from x0, where g changes
    // sign over the step. Returns (tau, state at t0 + tau).
    template <class G>
    std::pair<double, state> locate(const state& x0, double t0, double h, G&& g)
    {
        auto f = [&](double tau) { return tau == 0.0 ? g(x0) : g(fixed_step(x0, t0, tau)); };
        double fa = f(0.0), fb = f(h);
        std::uintmax_t iters = 100;
        auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
        auto r = boost::math::tools::toms748_solve(f, 0.0, h, fa, fb, tol, iters);
        double tau = 0.5 * (r.first + r.second);
        return {tau, fixed_step(x0, t0, tau)};
    }

    void rhs(const state& x, state& dx, double t) const { rhs_(x, dx, t); }

private:
    using stepper = boost::numeric::odeint::runge_kutta_fehlberg78<state>;

    auto sys()
    {
        return [this](const state& x, state& dx, double t) { rhs_(x, dx, t); };
    }
    static double min_step(double t) { return 1e-14 * std::max(1.0, std::abs(t)); }
    [[noreturn]] static void throw_collapse();

    rhs_fn rhs_;
    decltype(boost::numeric::odeint::make_controlled<stepper>(1.0, 1.0)) ctrl_;
};

[[noreturn]] void throw_step_collapse();

template <std::size_t N>
void ode_driver<N>::throw_collapse()
{
    throw_step_collapse();
}

}  // namespace res112::detail
