#pragma once

#include "genodyn/numerics/matrix.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace genodyn::numerics {

/// Componentwise box constraint [lo_i, hi_i] used to reject iterates that
/// wander far outside the region of interest.
struct Box {
    Vector lo;
    Vector hi;
};

struct NewtonOptions {
    double tol = 1e-12;      // on the max norm of F
    int max_iterations = 60;
    int max_halvings = 20;   // step damping when the residual does not drop
    std::optional<Box> box;
    double box_margin = 0.10; // fraction of the box extent an iterate may overshoot
};

struct NewtonResult {
    enum class Status { converged, singular_jacobian, stalled, max_iterations, left_box, non_finite };

    Status status = Status::max_iterations;
    Vector x;
    double residual = 0.0; // max norm of F at x
    int iterations = 0;
    /// Residual per iterate; kept so divergence reports carry the trail.
    std::vector<std::pair<Vector, double>> trace;

    bool ok() const { return status == Status::converged; }
};

using VectorFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

/// Damped Newton iteration: full steps while the residual decreases,
/// halving the step otherwise.
NewtonResult newton(const VectorFn& f, const JacobianFn& jac, Vector x0,
                    const NewtonOptions& opts = {});

} // namespace genodyn::numerics
