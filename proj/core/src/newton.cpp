#include "genodyn/numerics/newton.hpp"

#include "genodyn/numerics/linear.hpp"

#include <cmath>

namespace genodyn::numerics {

namespace {

bool finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool outside_box(const Vector& x, const Box& box, double margin) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double slack = margin * (box.hi[i] - box.lo[i]);
        if (x[i] < box.lo[i] - slack || x[i] > box.hi[i] + slack) return true;
    }
    return false;
}

} // namespace

NewtonResult newton(const VectorFn& f, const JacobianFn& jac, Vector x0, const NewtonOptions& opts) {
    NewtonResult res;
    res.x = std::move(x0);

    Vector fx = f(res.x);
    if (!finite(fx)) {
        res.status = NewtonResult::Status::non_finite;
        return res;
    }
    double fnorm = norm_inf(fx);
    res.trace.emplace_back(res.x, fnorm);

    for (int it = 0; it < opts.max_iterations; ++it) {
        res.iterations = it;
        res.residual = fnorm;
        if (fnorm <= opts.tol) {
            res.status = NewtonResult::Status::converged;
            return res;
        }

        Vector rhs(fx.size());
        for (std::size_t i = 0; i < fx.size(); ++i) rhs[i] = -fx[i];
        Vector step;
        try {
            step = solve_linear(jac(res.x), rhs);
        } catch (const SingularMatrixError&) {
            res.status = NewtonResult::Status::singular_jacobian;
            return res;
        }

        double damp = 1.0;
        Vector x_next;
        Vector f_next;
        double fnorm_next = fnorm;
        bool improved = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            x_next = res.x;
            for (std::size_t i = 0; i < x_next.size(); ++i) x_next[i] += damp * step[i];
            f_next = f(x_next);
            if (finite(f_next)) {
                fnorm_next = norm_inf(f_next);
                if (fnorm_next < fnorm) {
                    improved = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        if (!improved) {
            res.status = NewtonResult::Status::stalled;
            return res;
        }

        res.x = std::move(x_next);
        fx = std::move(f_next);
        fnorm = fnorm_next;
        res.trace.emplace_back(res.x, fnorm);

        if (opts.box && outside_box(res.x, *opts.box, opts.box_margin)) {
            res.status = NewtonResult::Status::left_box;
            res.residual = fnorm;
            return res;
        }
    }

    res.residual = fnorm;
    if (fnorm <= opts.tol) {
        res.status = NewtonResult::Status::converged;
        res.iterations = opts.max_iterations;
    } else {
        res.status = NewtonResult::Status::max_iterations;
    }
    return res;
}

} // namespace genodyn::numerics
