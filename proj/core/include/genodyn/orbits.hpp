#pragma once

#include "genodyn/field.hpp"
#include "genodyn/numerics/eigen.hpp"
#include "genodyn/numerics/integrate.hpp"
#include "genodyn/numerics/newton.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace genodyn::orbits {

enum class Stability { stable, saddle, unstable, marginal };

const char* to_string(Stability s);

struct Equilibrium {
    numerics::Vector x;
    numerics::Spectrum spectrum;
    Stability stability = Stability::marginal;
    int det_sign = 0;     // sign of det J; 0 when an eigenvalue sits on the margin
    double residual = 0.0; // max norm of F, re-checked independently of Newton
};

/// Stable iff every real part < -margin; marginal iff some |Re| <= margin.
Stability classify_spectrum(const numerics::Spectrum& s, double margin = 1e-8);
int determinant_sign(const numerics::Spectrum& s, double margin = 1e-8);
Equilibrium classify_equilibrium(const field::FieldSystem& sys, numerics::Vector x,
                                 double margin = 1e-8);

struct FindOptions {
    int grid_per_axis = 8;
    double newton_tol = 1e-12;
    int newton_max_iterations = 60;
    double dedup_rel = 1e-6;   // of the largest expression bound
    double margin = 1e-8;      // stability margin for classification
    double residual_tol = 1e-10;
    double jitter = 0.0;       // grid jitter as a fraction of the cell, off by default
    std::uint64_t seed = 0;
};

struct EquilibriaResult {
    std::vector<Equilibrium> equilibria; // sorted by coordinates
    int starts = 0;
    int converged = 0;
    int dropped = 0; // non-converged or out-of-box starts
};

/// Multistart Newton from an interior grid over the expression box,
/// deduplicated and classified. Failed starts are dropped and counted.
EquilibriaResult find_equilibria(const graph::Network& net, const field::ParamBinding& binding,
                                 const FindOptions& opts = {});

struct IndexReport {
    std::vector<Equilibrium> equilibria;
    int index_sum = 0;
    int expected = 0; // (-1)^n
    bool consistent = false;
    int excluded_marginal = 0;
};

/// Sum of sign(det J) over located equilibria, compared against (-1)^n.
/// Marginal equilibria cannot be signed and are excluded with a count.
IndexReport index_sum(const graph::Network& net, const field::ParamBinding& binding,
                      const FindOptions& opts = {});

/// One full cycle of a periodic solution, resampled on a uniform grid
/// with derivatives retained for interpolation.
struct PeriodicOrbit {
    double period = 0.0;
    std::vector<double> times; // uniform on [0, period]
    std::vector<numerics::Vector> states;
    std::vector<numerics::Vector> derivs;
    numerics::Vector amplitude; // per coordinate, (max-min)/2
    double closure_residual = 0.0;

    double amplitude_scale() const;
    /// Periodic cubic-Hermite interpolation.
    numerics::Vector state_at(double t) const;
};

struct DetectOptions {
    double transient_fraction = 0.5;
    double amplitude_floor = 1e-6;  // below this the trajectory is "decayed"
    double closure_rel = 1e-6;      // of the amplitude scale
    std::size_t cycle_samples = 512;
};

/// Looks for a periodic solution in the tail of a trajectory via
/// successive same-direction crossings of the hyperplane x1 = mean(x1).
/// Returns nothing for decayed or non-closing tails.
std::optional<PeriodicOrbit> detect_periodic(const numerics::Trajectory& traj,
                                             double transient_fraction = 0.5,
                                             const DetectOptions& opts = {});

/// Extends an equilibrium of the core, given per-gene values, to the
/// whole network layer by layer (production over degradation). The result
/// zeroes the full field to within the residual of the core values.
numerics::Vector induced_equilibrium(const graph::Network& net,
                                     const field::ParamBinding& binding,
                                     const std::map<std::string, double>& core_values);

/// The initial value making the response of a linear-decay gene driven by
/// T-periodic forcing H(t) itself T-periodic:
///   y(0) = integral_0^T e^{b(t-T)} H(t) dt / (1 - e^{-bT}).
/// Computed with adaptive Simpson quadrature.
double periodic_forcing_ic(const std::function<double(double)>& forcing, double degrade,
                           double period);

/// y(0) for a first-layer gene driven by a core orbit; `orbit_genes` names
/// the gene behind each orbit coordinate.
double induced_oscillation_ic(const graph::Network& net, const field::ParamBinding& binding,
                              const PeriodicOrbit& orbit,
                              std::span<const std::string> orbit_genes, const std::string& gene);

enum class BasinLabel { equilibrium, orbit, undecided };

struct BasinPoint {
    numerics::Vector start;
    BasinLabel label = BasinLabel::undecided;
    int equilibrium_index = -1;
};

struct BasinOptions {
    int grid_per_axis = 8;
    double locate_tol = 1e-6;       // distance to an equilibrium that ends a run
    double time_cap_factor = 200.0; // cap = factor / min degrade
    FindOptions find;
    numerics::IntegrateOptions integrate;
};

struct BasinResult {
    EquilibriaResult equilibria;
    std::vector<BasinPoint> points;
};

/// Labels each interior grid start with the equilibrium its trajectory
/// reaches, "orbit" for periodic tails, or "undecided" at the time cap.
BasinResult basin_sample(const graph::Network& net, const field::ParamBinding& binding,
                         const BasinOptions& opts = {});

} // namespace genodyn::orbits
