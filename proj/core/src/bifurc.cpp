#include "genodyn/bifurc.hpp"

#include "genodyn/numerics/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace genodyn::bifurc {

using numerics::Matrix;
using numerics::Spectrum;
using numerics::Vector;

namespace {

constexpr double im_thresh = 1e-8; // below this an eigenvalue counts as real

struct PointEval {
    Vector x;
    Spectrum spectrum;
    double det_j;
    double max_re;
};

PointEval eval_point(const graph::Network& net, const field::ParamBinding& binding,
                     const std::string& param, double mu, const Vector& warm,
                     double newton_tol) {
    const field::FieldSystem sys(net, binding.with(param, mu));
    numerics::NewtonOptions nopts;
    nopts.tol = newton_tol;
    nopts.box = numerics::Box{Vector(sys.dim(), 0.0), sys.upper_bounds()};

    const auto res = numerics::newton([&](const Vector& x) { return sys.eval(x); },
                                      [&](const Vector& x) { return sys.jacobian_at(x); }, warm,
                                      nopts);
    // Near a pitchfork the Jacobian turns singular on the branch itself, so
    // accept a slightly unfinished correction if the residual is tiny.
    if (!res.ok() && res.residual > 1e-8)
        throw ContinuationError("equilibrium correction failed at mu=" + std::to_string(mu));

    PointEval out;
    out.x = res.x;
    const Matrix j = sys.jacobian_at(out.x);
    out.spectrum = numerics::eigenvalues(j);
    out.det_j = numerics::LuDecomposition(j).determinant();
    out.max_re = out.spectrum.max_real();
    return out;
}

double pair_max_re(const Spectrum& s) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : s.eigenvalues)
        if (std::abs(z.imag()) > im_thresh) m = std::max(m, z.real());
    return m;
}

} // namespace

const char* to_string(BifurcationKind k) {
    switch (k) {
        case BifurcationKind::none: return "none";
        case BifurcationKind::pitchfork: return "pitchfork";
        case BifurcationKind::hopf: return "hopf";
    }
    return "?";
}

Branch continue_branch(const graph::Network& net, const field::ParamBinding& binding,
                       const std::string& param, double from, double to,
                       const ContinueOptions& opts) {
    if (!(to > from)) throw ContinuationError("continue_branch: need from < to");
    bool param_known = binding.has(param);
    for (const auto& p : net.params()) param_known |= (p.id == param);
    if (!param_known) throw ContinuationError("continue_branch: unknown parameter '" + param + "'");

    const auto start = orbits::find_equilibria(net, binding.with(param, from), opts.start_search);
    const orbits::Equilibrium* stable = nullptr;
    for (const auto& eq : start.equilibria) {
        if (eq.stability != orbits::Stability::stable) continue;
        if (stable)
            throw ContinuationError(
                "continue_branch: multiple stable equilibria at mu=" + std::to_string(from) +
                "; the starting branch is ambiguous");
        stable = &eq;
    }
    if (!stable)
        throw ContinuationError("continue_branch: no stable equilibrium at mu=" +
                                std::to_string(from));

    Branch br;
    br.net = net;
    br.base = binding;
    br.param = param;
    br.from = from;
    br.to = to;

    double k_scale = 1.0;
    for (std::size_t g = 0; g < net.gene_count(); ++g)
        k_scale = std::max(k_scale, net.gene(g).k_max);

    const double h_nominal = (to - from) / opts.steps;
    const double h_min = (to - from) / 65536.0; // 2^16
    double h = h_nominal;

    PointEval cur = eval_point(net, binding, param, from, stable->x, opts.newton_tol);
    br.points.push_back({from, cur.x, cur.spectrum, cur.det_j, cur.max_re});

    double mu = from;
    while (mu < to - 1e-15 * (to - from)) {
        const double mu_next = std::min(mu + h, to);
        bool ok = true;
        PointEval next;
        try {
            next = eval_point(net, binding, param, mu_next, cur.x, opts.newton_tol);
            ok = numerics::dist_inf(next.x, cur.x) <= opts.x_jump_rel * k_scale &&
                 std::abs(next.max_re - cur.max_re) <= opts.re_jump_abs;
        } catch (const ContinuationError&) {
            ok = false;
        }
        if (ok) {
            mu = mu_next;
            cur = std::move(next);
            br.points.push_back({mu, cur.x, cur.spectrum, cur.det_j, cur.max_re});
            h = std::min(h * 2.0, h_nominal);
        } else {
            h *= 0.5;
            if (h < h_min) {
                br.stalled = true;
                br.stall_mu = mu;
                break;
            }
        }
    }
    return br;
}

CrossingClass classify_crossing_spectrum(const Spectrum& s, double eig_tol,
                                         double degenerate_sep) {
    CrossingClass out;
    out.real_abs = std::numeric_limits<double>::infinity();
    out.pair_abs = std::numeric_limits<double>::infinity();
    for (const auto& z : s.eigenvalues) {
        if (std::abs(z.imag()) <= im_thresh) {
            out.real_abs = std::min(out.real_abs, std::abs(z.real()));
        } else if (std::abs(z.real()) < out.pair_abs) {
            out.pair_abs = std::abs(z.real());
            out.gamma = std::abs(z.imag());
        }
    }
    if (out.real_abs <= degenerate_sep && out.pair_abs <= degenerate_sep) {
        out.degenerate = true;
        return out;
    }
    if (out.real_abs <= eig_tol && out.real_abs <= out.pair_abs) {
        out.kind = BifurcationKind::pitchfork;
    } else if (out.pair_abs <= eig_tol) {
        out.kind = BifurcationKind::hopf;
    }
    return out;
}

BifurcationReport first_bifurcation(const Branch& branch, const ClassifyOptions& opts) {
    if (branch.points.empty()) throw ContinuationError("first_bifurcation: empty branch");
    if (branch.points.front().max_re >= 0.0)
        throw ContinuationError("first_bifurcation: branch does not begin at a stable equilibrium");

    BifurcationReport rep;
    rep.param = branch.param;
    rep.from = branch.from;
    rep.to = branch.to;

    // Earliest sign change of the leading real part along the samples.
    std::size_t hit = branch.points.size();
    for (std::size_t i = 1; i < branch.points.size(); ++i) {
        if (branch.points[i].max_re >= 0.0) {
            hit = i;
            break;
        }
    }
    if (hit == branch.points.size()) {
        rep.kind = BifurcationKind::none;
        if (!branch.points.empty()) {
            rep.mu0 = branch.points.back().mu;
            rep.x0 = branch.points.back().x;
            rep.spectrum0 = branch.points.back().spectrum;
        }
        return rep;
    }

    double lo = branch.points[hit - 1].mu;
    double hi = branch.points[hit].mu;
    Vector warm = branch.points[hit - 1].x;

    // The crossing eigenvalue structure just past the crossing decides which
    // scalar function the bisection tracks.
    const Spectrum& above = branch.points[hit].spectrum;
    bool complex_crossing = false;
    {
        double best_re = -std::numeric_limits<double>::infinity();
        double best_im = 0.0;
        for (const auto& z : above.eigenvalues) {
            if (z.real() > best_re) {
                best_re = z.real();
                best_im = std::abs(z.imag());
            }
        }
        complex_crossing = best_im > im_thresh;
    }

    auto crossing_fn = [&](const PointEval& p) {
        return complex_crossing ? pair_max_re(p.spectrum) : p.det_j;
    };

    PointEval at_lo = eval_point(branch.net, branch.base, branch.param, lo, warm, opts.newton_tol);
    double f_lo = crossing_fn(at_lo);
    PointEval mid = at_lo;
    double mu0 = 0.5 * (lo + hi);
    while (hi - lo > opts.refine_mu_tol) {
        mu0 = 0.5 * (lo + hi);
        mid = eval_point(branch.net, branch.base, branch.param, mu0, mid.x, opts.newton_tol);
        const double f_mid = crossing_fn(mid);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mu0;
            f_lo = f_mid;
        } else {
            hi = mu0;
        }
    }
    mu0 = 0.5 * (lo + hi);
    mid = eval_point(branch.net, branch.base, branch.param, mu0, mid.x, opts.newton_tol);

    const CrossingClass cls = classify_crossing_spectrum(mid.spectrum, opts.eig_tol,
                                                         opts.degenerate_sep);
    if (cls.degenerate)
        throw DegenerateCrossingError(
            "first_bifurcation: simultaneous real and pair crossing at mu=" +
            std::to_string(mu0) + " (non-generic)");
    if (cls.kind == BifurcationKind::none)
        throw ContinuationError("first_bifurcation: refinement lost the crossing at mu=" +
                                std::to_string(mu0));

    rep.kind = cls.kind;
    rep.mu0 = mu0;
    rep.x0 = mid.x;
    rep.spectrum0 = mid.spectrum;
    rep.crossing.det_j = mid.det_j;
    rep.crossing.gamma = cls.kind == BifurcationKind::hopf ? cls.gamma : 0.0;
    if (cls.kind == BifurcationKind::pitchfork) {
        // The real eigenvalue nearest the axis.
        double best = std::numeric_limits<double>::infinity();
        for (const auto& z : mid.spectrum.eigenvalues) {
            if (std::abs(z.imag()) <= im_thresh && std::abs(z.real()) < std::abs(best))
                best = z.real();
        }
        rep.crossing.real_eigenvalue = best;
    }
    try {
        rep.q_at_mu0 = loop_gain(branch.net, branch.base.with(branch.param, mu0), mid.x);
    } catch (const std::invalid_argument&) {
        rep.q_at_mu0.reset();
    }
    return rep;
}

PostCheck post_bifurcation_check(const graph::Network& net, const field::ParamBinding& binding,
                                 BifurcationReport& report, const PostCheckOptions& opts) {
    PostCheck check;
    if (report.kind == BifurcationKind::none) {
        report.post_check = check;
        return check;
    }
    check.ran = true;
    const double range = report.to - report.from;

    if (report.kind == BifurcationKind::pitchfork) {
        const double mu_after = report.mu0 + opts.pitchfork_delta_rel * range;
        orbits::FindOptions fopts;
        fopts.grid_per_axis = opts.find_grid;
        const auto found =
            orbits::find_equilibria(net, binding.with(report.param, mu_after), fopts);
        check.equilibria_after = static_cast<int>(found.equilibria.size());
        for (const auto& eq : found.equilibria)
            if (eq.stability == orbits::Stability::stable) ++check.stable_after;
        check.ok = check.equilibria_after == 3 && check.stable_after == 2;
        check.flagged = !check.ok;
        check.detail = "pitchfork: " + std::to_string(check.equilibria_after) + " equilibria (" +
                       std::to_string(check.stable_after) + " stable) at mu=" +
                       std::to_string(mu_after);
        report.post_check = check;
        return check;
    }

    // Hopf: orbit amplitudes past the crossing must fit amplitude ~ delta^beta
    // with beta near 1/2 (supercritical square-root growth).
    std::vector<double> log_delta, log_amp;
    bool all_orbits = true;
    std::string detail = "hopf amplitudes:";
    for (double delta : opts.hopf_deltas) {
        const double offset =
            std::abs(report.mu0) > 1e-12 * range ? delta * std::abs(report.mu0) : delta * range;
        const double mu = report.mu0 + offset;

        PointEval at;
        try {
            at = eval_point(net, binding, report.param, mu, report.x0, 1e-12);
        } catch (const ContinuationError&) {
            all_orbits = false;
            break;
        }
        const double growth = pair_max_re(at.spectrum);
        const double gamma = report.crossing.gamma > 0.0 ? report.crossing.gamma : 1.0;
        const double t_period = 2.0 * std::numbers::pi / gamma;
        const double t_end = std::max(40.0 * t_period, growth > 0.0 ? 16.0 / growth : 0.0);

        const field::FieldSystem sys(net, binding.with(report.param, mu));
        // Asymmetric kick off the equilibrium: symmetric networks keep
        // symmetric perturbations on an invariant manifold where the
        // oscillation mode is invisible.
        Vector x0 = at.x;
        for (std::size_t i = 0; i < x0.size(); ++i) {
            const double k = sys.upper_bounds()[i];
            const double dir = std::sin(1.0 + 2.3 * static_cast<double>(i));
            x0[i] = std::clamp(x0[i] + dir * (0.05 * x0[i] + 1e-3 * k), 1e-4 * k, 0.999 * k);
        }
        std::optional<orbits::PeriodicOrbit> orbit;
        try {
            auto iopts = opts.integrate;
            // The closure test compares interpolated states to 1e-6 of the
            // amplitude; cap the step so cubic interpolation keeps up.
            iopts.max_step = std::min(iopts.max_step, t_period / 100.0);
            const auto traj = numerics::integrate(sys.rhs(), x0, 0.0, t_end, iopts);
            orbit = orbits::detect_periodic(traj, 0.5);
        } catch (const numerics::IntegrationError&) {
        }
        if (!orbit) {
            all_orbits = false;
            break;
        }
        log_delta.push_back(std::log(offset));
        log_amp.push_back(std::log(orbit->amplitude_scale()));
        detail += " " + std::to_string(orbit->amplitude_scale());
    }

    if (!all_orbits || log_delta.size() < 2) {
        check.ok = false;
        check.flagged = true;
        check.detail = "hopf: no stable orbit found past the crossing";
        report.post_check = check;
        return check;
    }

    // Least-squares slope of log(amplitude) vs log(delta).
    const double n = static_cast<double>(log_delta.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_delta.size(); ++i) {
        sx += log_delta[i];
        sy += log_amp[i];
        sxx += log_delta[i] * log_delta[i];
        sxy += log_delta[i] * log_amp[i];
    }
    const double beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    check.amplitude_exponent = beta;
    check.ok = beta >= opts.exponent_lo && beta <= opts.exponent_hi;
    check.flagged = !check.ok;
    check.detail = detail + "; exponent " + std::to_string(beta);
    report.post_check = check;
    return check;
}

QWindow q_window(double a, double b, double c) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0))
        throw std::invalid_argument("q_window: degradation rates must be positive");
    QWindow w{a, b, c, 0.0, 0.0, 0.0};
    w.q_hopf = -2.0 * a * b * c -
               (a * a * b + a * a * c + a * b * b + a * c * c + b * b * c + b * c * c);
    w.q_pitch = a * b * c;
    w.gamma = std::sqrt(a * b + a * c + b * c);
    return w;
}

double loop_gain(const graph::Network& net, const field::ParamBinding& binding,
                 const Vector& eq) {
    const std::size_t n = net.gene_count();
    if (net.input_count() != 0)
        throw std::invalid_argument("loop_gain: network has inputs; not a pure cycle");
    if (net.edges().size() != n)
        throw std::invalid_argument("loop_gain: network is not a single cycle (edge count)");

    std::vector<long> pred_of(n, -1);
    for (const auto& e : net.edges()) {
        if (e.source.kind != graph::NodeKind::gene)
            throw std::invalid_argument("loop_gain: cycle edges must run gene to gene");
        if (pred_of[e.target] != -1)
            throw std::invalid_argument("loop_gain: gene '" + net.gene(e.target).id +
                                        "' has more than one predecessor");
        pred_of[e.target] = static_cast<long>(e.source.index);
    }
    // The predecessor map must be one n-cycle.
    std::size_t seen = 0, at = 0;
    do {
        if (pred_of[at] < 0) throw std::invalid_argument("loop_gain: broken cycle");
        at = static_cast<std::size_t>(pred_of[at]);
        ++seen;
    } while (at != 0 && seen <= n);
    if (seen != n)
        throw std::invalid_argument("loop_gain: network is not one cycle through all genes");

    const field::FieldSystem sys(net, binding);
    const Matrix j = sys.jacobian_at(eq);
    double q = 1.0;
    for (const auto& e : net.edges()) q *= j(e.target, e.source.index);
    return q;
}

Spectrum cyclic_spectrum_closed(double alpha, std::size_t n, double q) {
    if (n < 2) throw std::invalid_argument("cyclic_spectrum: need n >= 2");
    const double r = std::pow(std::abs(q), 1.0 / static_cast<double>(n));
    std::vector<std::complex<double>> roots;
    roots.reserve(n);

    // n-th roots of q (a real number): radius r at angles 2k*pi/n for q >= 0
    // and (2k+1)*pi/n for q < 0. Conjugates are mirrored exactly.
    const double pi = std::numbers::pi;
    if (q >= 0.0) {
        roots.emplace_back(-alpha + r, 0.0);
        if (n % 2 == 0) roots.emplace_back(-alpha - r, 0.0);
        for (std::size_t k = 1; 2 * k < n; ++k) {
            const double theta = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
            const double re = -alpha + r * std::cos(theta);
            const double im = r * std::sin(theta);
            roots.emplace_back(re, im);
            roots.emplace_back(re, -im);
        }
    } else {
        if (n % 2 == 1) roots.emplace_back(-alpha - r, 0.0);
        for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
            const double theta = pi * static_cast<double>(2 * k + 1) / static_cast<double>(n);
            const double re = -alpha + r * std::cos(theta);
            const double im = r * std::sin(theta);
            roots.emplace_back(re, im);
            roots.emplace_back(re, -im);
        }
    }
    return numerics::make_spectrum(std::move(roots));
}

Spectrum cyclic_spectrum_companion(const Vector& degrades, double q) {
    const std::size_t n = degrades.size();
    if (n < 2) throw std::invalid_argument("cyclic_spectrum: need n >= 2");

    // Monic coefficients of prod (lambda + alpha_i), low degree first.
    Vector coeff(n + 1, 0.0);
    coeff[0] = 1.0;
    std::size_t deg = 0;
    for (double a : degrades) {
        ++deg;
        for (std::size_t k = deg; k > 0; --k) coeff[k] = coeff[k - 1] + a * coeff[k];
        coeff[0] *= a;
    }
    coeff[0] -= q; // prod (lambda + alpha_i) - Q = 0

    Matrix companion(n, n);
    for (std::size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < n; ++i) companion(i, n - 1) = -coeff[i];
    return numerics::eigenvalues(companion);
}

Spectrum cyclic_spectrum(const Vector& degrades, double q) {
    const std::size_t n = degrades.size();
    if (n < 2) throw std::invalid_argument("cyclic_spectrum: need n >= 2");
    bool equal = true;
    for (double a : degrades) equal &= (a == degrades.front());
    if (equal) return cyclic_spectrum_closed(degrades.front(), n, q);
    return cyclic_spectrum_companion(degrades, q);
}

NormalForm normal_form(BifurcationKind kind, double mu) {
    NormalForm nf;
    if (kind == BifurcationKind::pitchfork) {
        nf.dim = 1;
        nf.f = [mu](const Vector& x) { return Vector{mu * x[0] - x[0] * x[0] * x[0]}; };
        nf.jacobian = [mu](const Vector& x) {
            Matrix j(1, 1);
            j(0, 0) = mu - 3.0 * x[0] * x[0];
            return j;
        };
        nf.rhs = [mu](double, std::span<const double> x, std::span<double> dx) {
            dx[0] = mu * x[0] - x[0] * x[0] * x[0];
        };
        return nf;
    }
    if (kind == BifurcationKind::hopf) {
        nf.dim = 2;
        nf.f = [mu](const Vector& v) {
            return Vector{v[1] - (v[0] * v[0] * v[0] - mu * v[0]), -v[0]};
        };
        nf.jacobian = [mu](const Vector& v) {
            Matrix j(2, 2);
            j(0, 0) = mu - 3.0 * v[0] * v[0];
            j(0, 1) = 1.0;
            j(1, 0) = -1.0;
            j(1, 1) = 0.0;
            return j;
        };
        nf.rhs = [mu](double, std::span<const double> v, std::span<double> dv) {
            dv[0] = v[1] - (v[0] * v[0] * v[0] - mu * v[0]);
            dv[1] = -v[0];
        };
        return nf;
    }
    throw std::invalid_argument("normal_form: kind must be pitchfork or hopf");
}

} // namespace genodyn::bifurc
