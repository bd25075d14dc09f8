#pragma once

#include "genodyn/netgraph.hpp"
#include "genodyn/numerics/integrate.hpp"
#include "genodyn/numerics/matrix.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace genodyn::field {

class BindingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Values for every parameter a network references, including the
/// bifurcation parameter of a continuation run.
struct ParamBinding {
    std::map<std::string, double> values;

    static ParamBinding defaults(const graph::Network& net);
    ParamBinding with(const std::string& id, double v) const;
    double at(const std::string& id) const;
    bool has(const std::string& id) const { return values.count(id) != 0; }
};

/// One Hill-labeled edge with its parameters resolved to numbers.
struct ResolvedHill {
    netlang::EdgeKind kind;
    double beta; // production strength (activation) or ceiling (repression)
    double K;    // half-way concentration
    double exp;  // Hill exponent, >= 0
};

struct HillEval {
    double value;
    double derivative;
};

/// Activation: beta*x^p/(K^p + x^p). Repression: beta/(1 + (x/K)^q).
/// At exponent 0 both are the constant beta/2. Arguments below zero are
/// clamped to zero so integrator overshoot cannot produce complex powers.
HillEval hill_eval(const ResolvedHill& edge, double x);

/// Named time functions for input signals. All shipped networks use
/// constant signals; the hook exists for externally driven inputs.
using TimeFunctions = std::map<std::string, std::function<double(double)>>;

/// The network's right-hand side F and analytic Jacobian, with every
/// symbol resolved against a binding. Evaluation is pure and reentrant.
class FieldSystem {
public:
    FieldSystem(const graph::Network& net, const ParamBinding& binding,
                const TimeFunctions& funcs = {}, double time = 0.0);

    std::size_t dim() const { return degrade_.size(); }

    void eval(std::span<const double> x, std::span<double> f) const;
    numerics::Vector eval(const numerics::Vector& x) const;
    numerics::Matrix jacobian_at(std::span<const double> x) const;

    /// Aggregate production H_g of one gene at the given full state.
    double production(std::size_t gene, std::span<const double> x) const;

    const numerics::Vector& upper_bounds() const { return k_; }
    const numerics::Vector& degrade() const { return degrade_; }
    const graph::Network& network() const { return *net_; }

    /// Adapter for the ODE integrator (autonomous; ignores t).
    numerics::Rhs rhs() const;

private:
    struct Term {
        long source_gene; // -1 when the edge comes from an input
        double const_value; // precomputed Hill value for input-sourced edges
        ResolvedHill hill;
    };

    const graph::Network* net_;
    std::vector<std::vector<Term>> terms_; // per gene
    std::vector<netlang::Aggregation> agg_;
    numerics::Vector degrade_;
    numerics::Vector k_;
};

/// Boundary and feasibility report, one row per gene: production bounded
/// by degrade*k (box invariance from above), production strictly positive
/// (invariance at the zero faces), and the constant-production equilibrium
/// feasibility check where all exponents are zero.
struct FieldReport {
    struct GeneCheck {
        std::string gene;
        bool bounded_ok;
        bool positive_ok;
        bool feasible_applicable;
        bool feasible_ok;
        double production_sup;
        double production_inf;
    };
    std::vector<GeneCheck> genes;

    bool all_bounded() const;
    bool all_positive() const;
};

numerics::Vector eval_field(const graph::Network& net, const ParamBinding& binding,
                            const numerics::Vector& x);
numerics::Matrix jacobian(const graph::Network& net, const ParamBinding& binding,
                          const numerics::Vector& x);
FieldReport check_conditions(const graph::Network& net, const ParamBinding& binding);

} // namespace genodyn::field
