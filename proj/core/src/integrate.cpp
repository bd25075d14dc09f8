#include "genodyn/numerics/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace genodyn::numerics {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Error coefficients (5th minus embedded 4th order weights).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct DenseStep {
    // y(t + theta*h) = r1 + theta*(r2 + (1-theta)*(r3 + theta*(r4 + (1-theta)*r5)))
    Vector r1, r2, r3, r4, r5;
    double t, h;

    void eval(double theta, Vector& out) const {
        const double th1 = 1.0 - theta;
        out.resize(r1.size());
        for (std::size_t i = 0; i < r1.size(); ++i) {
            out[i] = r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
        }
    }
};

} // namespace

Vector Trajectory::state_at(double t) const {
    if (times.empty()) throw std::runtime_error("Trajectory::state_at: empty trajectory");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times.begin());
    const std::size_t i = j - 1;
    const double h = times[j] - times[i];
    const double s = (t - times[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    Vector out(states[i].size());
    for (std::size_t d = 0; d < out.size(); ++d) {
        out[d] = h00 * states[i][d] + h10 * h * derivs[i][d] + h01 * states[j][d] +
                 h11 * h * derivs[j][d];
    }
    return out;
}

Trajectory integrate(const Rhs& f, const Vector& x0, double t0, double t1,
                     const IntegrateOptions& opts) {
    if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 must be >= t0");
    const std::size_t n = x0.size();
    Trajectory traj;

    auto eval = [&](double t, const Vector& y, Vector& dy) {
        dy.resize(n);
        f(t, std::span<const double>(y), std::span<double>(dy));
        ++traj.rhs_evaluations;
    };

    auto emit = [&](double t, const Vector& y, const Vector& dy) {
        traj.times.push_back(t);
        traj.states.push_back(y);
        traj.derivs.push_back(dy);
    };

    Vector y = x0, k1(n);
    eval(t0, y, k1);
    emit(t0, y, k1);
    if (t1 == t0) return traj;

    // Initial step heuristic based on scaled norms of y, f and an Euler probe.
    double h;
    if (opts.fixed_step > 0.0) {
        h = opts.fixed_step;
    } else if (opts.initial_step > 0.0) {
        h = opts.initial_step;
    } else {
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opts.atol + opts.rtol * std::abs(y[i]);
            dnf += (k1[i] / sc) * (k1[i] / sc);
            dny += (y[i] / sc) * (y[i] / sc);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, t1 - t0);
        Vector yp(n), fp(n);
        for (std::size_t i = 0; i < n; ++i) yp[i] = y[i] + h * k1[i];
        eval(t0 + h, yp, fp);
        double der2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opts.atol + opts.rtol * std::abs(y[i]);
            der2 += ((fp[i] - k1[i]) / sc) * ((fp[i] - k1[i]) / sc);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(der2, std::sqrt(dnf));
        const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3)
                                           : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h, h1, t1 - t0});
    }
    h = std::min(h, opts.max_step);

    // PI controller state.
    const double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    const double facc1 = 5.0, facc2 = 0.1;
    double facold = 1e-4;
    bool last_rejected = false;

    Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
    double t = t0;
    std::size_t sample_idx = 1; // uniform grid t0 + k*sample_dt, avoids drift
    DenseStep dense;
    Vector interp, dinterp;

    for (std::size_t step = 0; step < opts.max_steps; ++step) {
        if (t >= t1) break;
        const double hmin = 16.0 * std::numeric_limits<double>::epsilon() *
                            std::max({std::abs(t), std::abs(t1), 1.0});
        if (h < hmin && opts.fixed_step <= 0.0) {
            throw IntegrationError(
                "integrate: step size underflow at t=" + std::to_string(t) +
                " (problem too stiff for an explicit method)", t);
        }
        bool final_step = false;
        if (t + h >= t1) {
            h = t1 - t;
            final_step = true;
        }

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        eval(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        eval(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                  a76 * k6[i]);
        eval(t + h, ynew, k7); // FSAL stage

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / static_cast<double>(n));

        const bool accept = (opts.fixed_step > 0.0) || (err <= 1.0);
        if (accept) {
            ++traj.accepted;
            if (opts.sample_dt > 0.0) {
                dense.t = t;
                dense.h = h;
                dense.r1 = y;
                dense.r2.resize(n);
                dense.r3.resize(n);
                dense.r4.resize(n);
                dense.r5.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double ydiff = ynew[i] - y[i];
                    const double bspl = h * k1[i] - ydiff;
                    dense.r2[i] = ydiff;
                    dense.r3[i] = bspl;
                    dense.r4[i] = ydiff - h * k7[i] - bspl;
                    dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                       d6 * k6[i] + d7 * k7[i]);
                }
                for (;;) {
                    const double ts = t0 + static_cast<double>(sample_idx) * opts.sample_dt;
                    if (ts > t + h + 1e-12 * std::max(1.0, std::abs(t)) || ts >= t1) break;
                    dense.eval((ts - t) / h, interp);
                    eval(ts, interp, dinterp);
                    emit(ts, interp, dinterp);
                    ++sample_idx;
                }
                if (final_step) emit(t1, ynew, k7);
            } else {
                emit(t + h, ynew, k7);
            }
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            if (final_step || t >= t1) break;

            if (opts.fixed_step <= 0.0) {
                const double fac11 = std::pow(err, expo1);
                double fac = fac11 / std::pow(facold, beta);
                fac = std::max(facc2, std::min(facc1, fac / safe));
                double hnew = h / fac;
                if (last_rejected) hnew = std::min(hnew, h);
                facold = std::max(err, 1e-4);
                h = std::min(hnew, opts.max_step);
                last_rejected = false;
            }
        } else {
            ++traj.rejected;
            const double fac11 = std::pow(err, expo1);
            h = h / std::min(facc1, fac11 / safe);
            last_rejected = true;
        }
    }

    if (t < t1) {
        throw IntegrationError("integrate: step budget exhausted at t=" + std::to_string(t), t);
    }
    return traj;
}

} // namespace genodyn::numerics
