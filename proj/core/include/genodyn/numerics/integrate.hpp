#pragma once

#include "genodyn/numerics/matrix.hpp"

#include <functional>
#include <limits>
#include <stdexcept>

namespace genodyn::numerics {

/// Right-hand side dx/dt = f(t, x). Autonomous systems ignore t.
using Rhs = std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
    /// Time at which integration gave up.
    double time() const { return t_; }

private:
    double t_;
};

struct IntegrateOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0; // 0 = choose automatically
    /// When positive, output on the uniform grid t0, t0+sample_dt, ...
    /// (plus the endpoint) via the 5th-order dense interpolant instead of
    /// at the accepted steps.
    double sample_dt = 0.0;
    /// When positive, disables step control and takes fixed steps; used by
    /// order-verification tests.
    double fixed_step = 0.0;
    std::size_t max_steps = 20'000'000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> derivs; // f at each output point
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;

    const Vector& back_state() const { return states.back(); }
    /// Cubic Hermite interpolation between stored samples.
    Vector state_at(double t) const;
};

/// Explicit embedded Dormand-Prince 5(4) pair with PI step-size control
/// and dense output. Throws IntegrationError on step underflow.
Trajectory integrate(const Rhs& f, const Vector& x0, double t0, double t1,
                     const IntegrateOptions& opts = {});

} // namespace genodyn::numerics
