#include "genodyn/orbits.hpp"

#include "genodyn/netgraph.hpp"
#include "genodyn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace genodyn::orbits {

using numerics::Matrix;
using numerics::Vector;

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::saddle: return "saddle";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

Stability classify_spectrum(const numerics::Spectrum& s, double margin) {
    bool any_pos = false, any_neg = false;
    for (const auto& z : s.eigenvalues) {
        if (std::abs(z.real()) <= margin) return Stability::marginal;
        (z.real() > 0.0 ? any_pos : any_neg) = true;
    }
    if (any_pos && any_neg) return Stability::saddle;
    return any_pos ? Stability::unstable : Stability::stable;
}

int determinant_sign(const numerics::Spectrum& s, double margin) {
    for (const auto& z : s.eigenvalues)
        if (std::abs(z) <= margin) return 0;
    const double det = s.product().real();
    return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
}

Equilibrium classify_equilibrium(const field::FieldSystem& sys, Vector x, double margin) {
    Equilibrium eq;
    eq.residual = numerics::norm_inf(sys.eval(x));
    eq.spectrum = numerics::eigenvalues(sys.jacobian_at(x));
    eq.stability = classify_spectrum(eq.spectrum, margin);
    eq.det_sign = determinant_sign(eq.spectrum, margin);
    eq.x = std::move(x);
    return eq;
}

namespace {

// Interior multistart grid: cell midpoints of the expression box, optionally
// jittered (seeded, off by default so runs are reproducible).
std::vector<Vector> interior_grid(const Vector& k, int per_axis, double jitter,
                                  std::uint64_t seed) {
    const std::size_t n = k.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);

    std::vector<Vector> starts;
    starts.reserve(total);
    std::vector<int> idx(n, 0);
    for (std::size_t s = 0; s < total; ++s) {
        Vector x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double cell = k[i] / per_axis;
            double xi = (idx[i] + 0.5) * cell;
            if (jitter > 0.0) xi += jitter * cell * unit(rng);
            x[i] = std::clamp(xi, 0.0, k[i]);
        }
        starts.push_back(std::move(x));
        for (std::size_t i = 0; i < n; ++i) {
            if (++idx[i] < per_axis) break;
            idx[i] = 0;
        }
    }
    return starts;
}

} // namespace

EquilibriaResult find_equilibria(const graph::Network& net, const field::ParamBinding& binding,
                                 const FindOptions& opts) {
    if (opts.grid_per_axis < 2)
        throw std::invalid_argument("find_equilibria: grid_per_axis must be >= 2");
    const field::FieldSystem sys(net, binding);
    const Vector& k = sys.upper_bounds();
    const std::size_t n = sys.dim();

    const auto starts = interior_grid(k, opts.grid_per_axis, opts.jitter, opts.seed);

    numerics::NewtonOptions nopts;
    nopts.tol = opts.newton_tol;
    nopts.max_iterations = opts.newton_max_iterations;
    nopts.box = numerics::Box{Vector(n, 0.0), k};

    auto f = [&sys](const Vector& x) { return sys.eval(x); };
    auto j = [&sys](const Vector& x) { return sys.jacobian_at(x); };

    std::vector<std::optional<Vector>> roots(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        const auto r = numerics::newton(f, j, starts[i], nopts);
        if (!r.ok()) return;
        // Inside the closed box, with a whisker for roundoff.
        for (std::size_t d = 0; d < n; ++d)
            if (r.x[d] < -1e-9 || r.x[d] > k[d] + 1e-9) return;
        // Re-check the residual independently of Newton's claim.
        if (numerics::norm_inf(sys.eval(r.x)) > opts.residual_tol) return;
        roots[i] = r.x;
    });

    EquilibriaResult out;
    out.starts = static_cast<int>(starts.size());

    std::vector<Vector> converged;
    for (auto& r : roots) {
        if (r) {
            converged.push_back(std::move(*r));
            ++out.converged;
        } else {
            ++out.dropped;
        }
    }

    // Dedup after canonicalizing by position, so the result does not depend
    // on grid enumeration order.
    std::sort(converged.begin(), converged.end());
    const double dedup = opts.dedup_rel * std::max(1e-300, *std::max_element(k.begin(), k.end()));
    std::vector<Vector> unique_roots;
    for (auto& x : converged) {
        bool dup = false;
        for (const auto& u : unique_roots) {
            if (numerics::dist_inf(x, u) <= dedup) {
                dup = true;
                break;
            }
        }
        if (!dup) unique_roots.push_back(std::move(x));
    }

    for (auto& x : unique_roots)
        out.equilibria.push_back(classify_equilibrium(sys, std::move(x), opts.margin));
    return out;
}

IndexReport index_sum(const graph::Network& net, const field::ParamBinding& binding,
                      const FindOptions& opts) {
    IndexReport rep;
    auto found = find_equilibria(net, binding, opts);
    rep.equilibria = std::move(found.equilibria);
    rep.expected = (net.gene_count() % 2 == 0) ? 1 : -1;
    for (const auto& eq : rep.equilibria) {
        if (eq.det_sign == 0) {
            ++rep.excluded_marginal;
            continue;
        }
        rep.index_sum += eq.det_sign;
    }
    rep.consistent = rep.excluded_marginal == 0 && rep.index_sum == rep.expected;
    return rep;
}

double PeriodicOrbit::amplitude_scale() const {
    double m = 0.0;
    for (double a : amplitude) m = std::max(m, a);
    return m;
}

Vector PeriodicOrbit::state_at(double t) const {
    if (states.size() < 2) throw std::runtime_error("PeriodicOrbit: too few samples");
    double u = std::fmod(t, period);
    if (u < 0.0) u += period;
    const double dt = period / static_cast<double>(states.size() - 1);
    std::size_t i = std::min(static_cast<std::size_t>(u / dt), states.size() - 2);
    const double s = (u - times[i]) / dt;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    Vector out(states[i].size());
    for (std::size_t d = 0; d < out.size(); ++d) {
        out[d] = h00 * states[i][d] + h10 * dt * derivs[i][d] + h01 * states[i + 1][d] +
                 h11 * dt * derivs[i + 1][d];
    }
    return out;
}

std::optional<PeriodicOrbit> detect_periodic(const numerics::Trajectory& traj,
                                             double transient_fraction,
                                             const DetectOptions& opts_in) {
    DetectOptions opts = opts_in;
    opts.transient_fraction = transient_fraction;
    if (traj.times.size() < 8) return std::nullopt;

    const double t_begin = traj.times.front();
    const double t_end = traj.times.back();
    const double t_tail = t_begin + opts.transient_fraction * (t_end - t_begin);
    std::size_t first = 0;
    while (first < traj.times.size() && traj.times[first] < t_tail) ++first;
    if (traj.times.size() - first < 8) return std::nullopt;

    const std::size_t n = traj.states.front().size();
    Vector lo(n, std::numeric_limits<double>::infinity());
    Vector hi(n, -std::numeric_limits<double>::infinity());
    double mean0 = 0.0;
    for (std::size_t i = first; i < traj.times.size(); ++i) {
        for (std::size_t d = 0; d < n; ++d) {
            lo[d] = std::min(lo[d], traj.states[i][d]);
            hi[d] = std::max(hi[d], traj.states[i][d]);
        }
        mean0 += traj.states[i][0];
    }
    mean0 /= static_cast<double>(traj.times.size() - first);

    Vector amplitude(n);
    double amp_scale = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        amplitude[d] = 0.5 * (hi[d] - lo[d]);
        amp_scale = std::max(amp_scale, amplitude[d]);
    }
    if (amp_scale < opts.amplitude_floor) return std::nullopt; // decayed to equilibrium

    // Upward crossings of x1 = mean(x1), refined on the local Hermite cubic.
    std::vector<double> crossings;
    for (std::size_t i = first; i + 1 < traj.times.size(); ++i) {
        const double a = traj.states[i][0] - mean0;
        const double b = traj.states[i + 1][0] - mean0;
        if (a < 0.0 && b >= 0.0) {
            const double h = traj.times[i + 1] - traj.times[i];
            double s = a / (a - b); // linear first guess in [0,1]
            const double y0 = traj.states[i][0], y1 = traj.states[i + 1][0];
            const double d0 = traj.derivs[i][0] * h, d1 = traj.derivs[i + 1][0] * h;
            for (int it = 0; it < 8; ++it) {
                const double s2 = s * s, s3 = s2 * s;
                const double val = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 +
                                   (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * d1 - mean0;
                const double der = (6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * d0 +
                                   (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * d1;
                if (der == 0.0) break;
                const double step = val / der;
                s -= step;
                s = std::clamp(s, 0.0, 1.0);
                if (std::abs(step) < 1e-14) break;
            }
            crossings.push_back(traj.times[i] + s * h);
        }
    }
    if (crossings.size() < 3) return std::nullopt;

    const double period = (crossings.back() - crossings.front()) /
                          static_cast<double>(crossings.size() - 1);
    if (!(period > 0.0)) return std::nullopt;

    // Anchor the extracted cycle at the last crossing that leaves one full
    // period of data, where the trajectory is most settled.
    double t0 = crossings.back();
    for (auto it = crossings.rbegin(); it != crossings.rend(); ++it) {
        if (*it + period <= t_end) {
            t0 = *it;
            break;
        }
    }
    if (t0 + period > t_end) return std::nullopt;

    const Vector x_start = traj.state_at(t0);
    const Vector x_close = traj.state_at(t0 + period);
    const double closure = numerics::dist_inf(x_start, x_close);
    if (closure > opts.closure_rel * amp_scale) return std::nullopt;

    PeriodicOrbit orbit;
    orbit.period = period;
    orbit.amplitude = std::move(amplitude);
    orbit.closure_residual = closure;
    const std::size_t m = opts.cycle_samples;
    orbit.times.resize(m + 1);
    orbit.states.resize(m + 1);
    orbit.derivs.resize(m + 1);
    // Interpolate the stored derivatives the same way as the states.
    numerics::Trajectory dtraj;
    dtraj.times = traj.times;
    dtraj.states = traj.derivs;
    dtraj.derivs.assign(traj.derivs.size(), Vector(n, 0.0));
    for (std::size_t i = 0; i <= m; ++i) {
        const double u = period * static_cast<double>(i) / static_cast<double>(m);
        orbit.times[i] = u;
        orbit.states[i] = traj.state_at(t0 + u);
        orbit.derivs[i] = dtraj.state_at(t0 + u);
    }
    return orbit;
}

numerics::Vector induced_equilibrium(const graph::Network& net,
                                     const field::ParamBinding& binding,
                                     const std::map<std::string, double>& core_values) {
    const field::FieldSystem sys(net, binding);
    const auto layers = graph::core_and_layers(net);
    const std::size_t n = net.gene_count();

    Vector x(n, 0.0);
    std::vector<bool> known(n, false);
    for (const auto& [id, value] : core_values) {
        const auto g = net.gene_index(id);
        if (!g) throw std::invalid_argument("induced_equilibrium: unknown gene '" + id + "'");
        x[*g] = value;
        known[*g] = true;
    }
    for (std::size_t g = 0; g < n; ++g) {
        const bool core_gene = layers.gene_layer[g] == 0;
        if (core_gene && !known[g])
            throw std::invalid_argument("induced_equilibrium: missing value for core gene '" +
                                        net.gene(g).id + "'");
        if (!core_gene && known[g])
            throw std::invalid_argument("induced_equilibrium: gene '" + net.gene(g).id +
                                        "' is not in the core");
    }

    // The given values must already zero the field on the core.
    for (std::size_t g = 0; g < n; ++g) {
        if (layers.gene_layer[g] != 0) continue;
        const double f = sys.production(g, x) - sys.degrade()[g] * x[g];
        if (std::abs(f) > 1e-10)
            throw std::invalid_argument(
                "induced_equilibrium: core values do not zero the core field (gene '" +
                net.gene(g).id + "' residual " + std::to_string(f) + ")");
    }

    // Layer by layer: production depends only on lower layers.
    for (int layer = 1; layer <= layers.max_layer; ++layer) {
        for (std::size_t g = 0; g < n; ++g) {
            if (layers.gene_layer[g] != layer) continue;
            x[g] = sys.production(g, x) / sys.degrade()[g];
        }
    }
    return x;
}

namespace {

// Adaptive Simpson on [a,b] with error spread over the interval width.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

double periodic_forcing_ic(const std::function<double(double)>& forcing, double degrade,
                           double period) {
    if (!(period > 0.0)) throw std::invalid_argument("periodic_forcing_ic: period must be positive");
    if (!(degrade > 0.0))
        throw std::invalid_argument("periodic_forcing_ic: degradation must be positive");
    // y(0) = int_0^T e^{b(t-T)} H(t) dt / (1 - e^{-bT}); the shifted
    // exponential keeps the integrand in [0,1] regardless of b*T.
    const double b = degrade, T = period;
    auto integrand = [&](double t) { return std::exp(b * (t - T)) * forcing(t); };
    const double integral = integrate_simpson(integrand, 0.0, T, 1e-12);
    return integral / (1.0 - std::exp(-b * T));
}

double induced_oscillation_ic(const graph::Network& net, const field::ParamBinding& binding,
                              const PeriodicOrbit& orbit,
                              std::span<const std::string> orbit_genes, const std::string& gene) {
    const auto g = net.gene_index(gene);
    if (!g) throw std::invalid_argument("induced_oscillation_ic: unknown gene '" + gene + "'");
    if (!(orbit.period > 0.0))
        throw std::invalid_argument("induced_oscillation_ic: orbit period missing or nonpositive");

    // Orbit coordinate index per network gene.
    std::map<std::size_t, std::size_t> column_of;
    for (std::size_t c = 0; c < orbit_genes.size(); ++c) {
        const auto idx = net.gene_index(orbit_genes[c]);
        if (!idx)
            throw std::invalid_argument("induced_oscillation_ic: orbit gene '" +
                                        std::string(orbit_genes[c]) + "' not in network");
        column_of[*idx] = c;
    }
    for (const auto& p : net.predecessors(graph::NodeRef{graph::NodeKind::gene, *g})) {
        if (p.kind == graph::NodeKind::gene && !column_of.count(p.index))
            throw std::invalid_argument("induced_oscillation_ic: predecessor '" + net.node_id(p) +
                                        "' of '" + gene + "' is not covered by the orbit");
    }

    const field::FieldSystem sys(net, binding);
    const double b = sys.degrade()[*g];

    auto forcing = [&](double t) {
        const Vector on_orbit = orbit.state_at(t);
        Vector x(net.gene_count(), 0.0);
        for (const auto& [gi, c] : column_of) x[gi] = on_orbit[c];
        return sys.production(*g, x);
    };
    return periodic_forcing_ic(forcing, b, orbit.period);
}

BasinResult basin_sample(const graph::Network& net, const field::ParamBinding& binding,
                         const BasinOptions& opts) {
    BasinResult out;
    FindOptions fopts = opts.find;
    fopts.grid_per_axis = std::max(fopts.grid_per_axis, opts.grid_per_axis);
    out.equilibria = find_equilibria(net, binding, fopts);

    const field::FieldSystem sys(net, binding);
    const Vector& k = sys.upper_bounds();
    double min_degrade = sys.degrade()[0];
    for (double d : sys.degrade()) min_degrade = std::min(min_degrade, d);
    const double time_cap = opts.time_cap_factor / min_degrade;
    const double chunk = time_cap / 16.0;

    const auto starts = interior_grid(k, opts.grid_per_axis, 0.0, 0);
    out.points.resize(starts.size());

    const auto rhs = sys.rhs();
    parallel_for(starts.size(), [&](std::size_t i) {
        BasinPoint& pt = out.points[i];
        pt.start = starts[i];

        Vector x = starts[i];
        double t = 0.0;
        while (t < time_cap) {
            numerics::Trajectory leg;
            try {
                leg = numerics::integrate(rhs, x, t, t + chunk, opts.integrate);
            } catch (const numerics::IntegrationError&) {
                return; // undecided
            }
            x = leg.back_state();
            t += chunk;
            for (std::size_t e = 0; e < out.equilibria.equilibria.size(); ++e) {
                if (numerics::dist_inf(x, out.equilibria.equilibria[e].x) <= opts.locate_tol) {
                    pt.label = BasinLabel::equilibrium;
                    pt.equilibrium_index = static_cast<int>(e);
                    return;
                }
            }
        }
        // No equilibrium reached by the cap: look for a closed orbit in a
        // fresh window from where the trajectory settled. The closure test
        // needs interpolation-grade sampling, so cap the step.
        try {
            auto iopts = opts.integrate;
            const double window_len = time_cap / 4.0;
            iopts.max_step = std::min(iopts.max_step, window_len / 2000.0);
            const auto window = numerics::integrate(rhs, x, t, t + window_len, iopts);
            if (detect_periodic(window, 0.2)) pt.label = BasinLabel::orbit;
        } catch (const numerics::IntegrationError&) {
        }
    });
    return out;
}

} // namespace genodyn::orbits
