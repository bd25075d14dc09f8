#include "genodyn/field.hpp"

#include <cmath>
#include <limits>

namespace genodyn::field {

namespace {

double resolve(const netlang::ScalarOrRef& v, const ParamBinding& binding) {
    if (const double* d = std::get_if<double>(&v)) return *d;
    return binding.at(std::get<netlang::ParamRef>(v).id);
}

} // namespace

ParamBinding ParamBinding::defaults(const graph::Network& net) {
    ParamBinding b;
    for (const auto& p : net.params()) b.values[p.id] = p.default_value;
    return b;
}

ParamBinding ParamBinding::with(const std::string& id, double v) const {
    ParamBinding b = *this;
    b.values[id] = v;
    return b;
}

double ParamBinding::at(const std::string& id) const {
    const auto it = values.find(id);
    if (it == values.end()) throw BindingError("unbound parameter '" + id + "'");
    return it->second;
}

HillEval hill_eval(const ResolvedHill& edge, double x) {
    const double inf = std::numeric_limits<double>::infinity();
    if (x < 0.0) x = 0.0;
    const double p = edge.exp;
    if (p == 0.0) return {0.5 * edge.beta, 0.0};

    if (x == 0.0) {
        if (edge.kind == netlang::EdgeKind::activate) {
            if (p > 1.0) return {0.0, 0.0};
            if (p == 1.0) return {0.0, edge.beta / edge.K};
            return {0.0, inf};
        }
        if (p > 1.0) return {edge.beta, 0.0};
        if (p == 1.0) return {edge.beta, -edge.beta / edge.K};
        return {edge.beta, -inf};
    }

    const double u = std::pow(x / edge.K, p);
    if (edge.kind == netlang::EdgeKind::activate) {
        if (std::isinf(u)) return {edge.beta, 0.0};
        const double denom = 1.0 + u;
        const double value = edge.beta * u / denom;
        const double derivative = edge.beta * p * u / (x * denom * denom);
        return {value, derivative};
    }
    if (std::isinf(u)) return {0.0, 0.0};
    const double denom = 1.0 + u;
    const double value = edge.beta / denom;
    const double derivative = -edge.beta * p * u / (x * denom * denom);
    return {value, derivative};
}

FieldSystem::FieldSystem(const graph::Network& net, const ParamBinding& binding,
                         const TimeFunctions& funcs, double time)
    : net_(&net) {
    const std::size_t n = net.gene_count();
    terms_.resize(n);
    agg_.resize(n);
    degrade_.resize(n);
    k_.resize(n);

    // Input levels are fixed at field-assembly time; named signals are
    // sampled from the registry at `time`.
    numerics::Vector input_level(net.input_count(), 0.0);
    for (std::size_t i = 0; i < net.input_count(); ++i) {
        const auto& sig = net.input(i).signal;
        if (const double* v = std::get_if<double>(&sig)) {
            input_level[i] = *v;
        } else {
            const std::string& fn = std::get<std::string>(sig);
            const auto it = funcs.find(fn);
            if (it == funcs.end())
                throw BindingError("input '" + net.input(i).id + "' names unknown time function '" +
                                   fn + "'");
            input_level[i] = it->second(time);
        }
    }

    for (std::size_t g = 0; g < n; ++g) {
        agg_[g] = net.gene(g).agg;
        degrade_[g] = net.gene(g).degrade;
        k_[g] = net.gene(g).k_max;
        for (std::size_t ei : net.incoming(g)) {
            const auto& e = net.edges()[ei];
            ResolvedHill hill{e.kind, resolve(e.beta, binding), e.K, resolve(e.exp, binding)};
            if (hill.exp < 0.0)
                throw BindingError("edge into '" + net.gene(g).id +
                                   "' has negative exponent after binding");
            if (hill.beta <= 0.0)
                throw BindingError("edge into '" + net.gene(g).id +
                                   "' has non-positive beta after binding");
            Term t{-1, 0.0, hill};
            if (e.source.kind == graph::NodeKind::gene) {
                t.source_gene = static_cast<long>(e.source.index);
            } else {
                t.const_value = hill_eval(hill, input_level[e.source.index]).value;
            }
            terms_[g].push_back(t);
        }
    }
}

double FieldSystem::production(std::size_t gene, std::span<const double> x) const {
    const auto& terms = terms_[gene];
    if (agg_[gene] == netlang::Aggregation::sum) {
        double s = 0.0;
        for (const Term& t : terms)
            s += t.source_gene < 0 ? t.const_value
                                   : hill_eval(t.hill, x[static_cast<std::size_t>(t.source_gene)]).value;
        return s;
    }
    double p = 1.0;
    for (const Term& t : terms)
        p *= t.source_gene < 0 ? t.const_value
                               : hill_eval(t.hill, x[static_cast<std::size_t>(t.source_gene)]).value;
    return p;
}

void FieldSystem::eval(std::span<const double> x, std::span<double> f) const {
    for (std::size_t g = 0; g < dim(); ++g) f[g] = production(g, x) - degrade_[g] * x[g];
}

numerics::Vector FieldSystem::eval(const numerics::Vector& x) const {
    numerics::Vector f(dim());
    eval(x, f);
    return f;
}

numerics::Matrix FieldSystem::jacobian_at(std::span<const double> x) const {
    const std::size_t n = dim();
    numerics::Matrix j(n, n);
    for (std::size_t g = 0; g < n; ++g) {
        j(g, g) -= degrade_[g];
        const auto& terms = terms_[g];
        if (agg_[g] == netlang::Aggregation::sum) {
            for (const Term& t : terms) {
                if (t.source_gene < 0) continue;
                const auto s = static_cast<std::size_t>(t.source_gene);
                j(g, s) += hill_eval(t.hill, x[s]).derivative;
            }
        } else {
            // Product rule over the factors; values of input-sourced factors
            // are constants.
            std::vector<double> values(terms.size());
            for (std::size_t i = 0; i < terms.size(); ++i) {
                const Term& t = terms[i];
                values[i] = t.source_gene < 0
                                ? t.const_value
                                : hill_eval(t.hill, x[static_cast<std::size_t>(t.source_gene)]).value;
            }
            for (std::size_t i = 0; i < terms.size(); ++i) {
                const Term& t = terms[i];
                if (t.source_gene < 0) continue;
                const auto s = static_cast<std::size_t>(t.source_gene);
                double rest = 1.0;
                for (std::size_t k = 0; k < terms.size(); ++k)
                    if (k != i) rest *= values[k];
                j(g, s) += hill_eval(t.hill, x[s]).derivative * rest;
            }
        }
    }
    return j;
}

numerics::Rhs FieldSystem::rhs() const {
    return [self = *this](double, std::span<const double> x, std::span<double> dxdt) {
        self.eval(x, dxdt);
    };
}

bool FieldReport::all_bounded() const {
    for (const auto& g : genes)
        if (!g.bounded_ok) return false;
    return true;
}

bool FieldReport::all_positive() const {
    for (const auto& g : genes)
        if (!g.positive_ok) return false;
    return true;
}

numerics::Vector eval_field(const graph::Network& net, const ParamBinding& binding,
                            const numerics::Vector& x) {
    return FieldSystem(net, binding).eval(x);
}

numerics::Matrix jacobian(const graph::Network& net, const ParamBinding& binding,
                          const numerics::Vector& x) {
    return FieldSystem(net, binding).jacobian_at(x);
}

FieldReport check_conditions(const graph::Network& net, const ParamBinding& binding) {
    FieldReport report;

    numerics::Vector input_level(net.input_count(), 0.0);
    for (std::size_t i = 0; i < net.input_count(); ++i) {
        const auto& sig = net.input(i).signal;
        if (const double* v = std::get_if<double>(&sig)) {
            input_level[i] = *v;
        } else {
            throw BindingError("check_conditions: input '" + net.input(i).id +
                               "' uses a named time function; range checks need a constant");
        }
    }

    for (std::size_t g = 0; g < net.gene_count(); ++g) {
        FieldReport::GeneCheck check{net.gene(g).id, false, false, true, false, 0.0, 0.0};
        const bool product = net.gene(g).agg == netlang::Aggregation::product;
        double sup = product ? 1.0 : 0.0;
        double inf = product ? 1.0 : 0.0;
        bool all_exp_zero = true;

        for (std::size_t ei : net.incoming(g)) {
            const auto& e = net.edges()[ei];
            ResolvedHill hill{e.kind, 0.0, e.K, 0.0};
            hill.beta = std::holds_alternative<double>(e.beta)
                            ? std::get<double>(e.beta)
                            : binding.at(std::get<netlang::ParamRef>(e.beta).id);
            hill.exp = std::holds_alternative<double>(e.exp)
                           ? std::get<double>(e.exp)
                           : binding.at(std::get<netlang::ParamRef>(e.exp).id);
            if (hill.exp != 0.0) all_exp_zero = false;

            double edge_sup, edge_inf;
            if (e.source.kind == graph::NodeKind::input) {
                // The input level is pinned, so the term is a constant.
                edge_sup = edge_inf = hill_eval(hill, input_level[e.source.index]).value;
            } else if (hill.exp == 0.0) {
                edge_sup = edge_inf = 0.5 * hill.beta;
            } else if (e.kind == netlang::EdgeKind::activate) {
                edge_sup = hill.beta; // approached as x -> infinity
                edge_inf = 0.0;       // attained at x = 0
            } else {
                edge_sup = hill.beta; // attained at x = 0
                edge_inf = hill_eval(hill, net.gene(e.source.index).k_max).value;
            }
            if (product) {
                sup *= edge_sup;
                inf *= edge_inf;
            } else {
                sup += edge_sup;
                inf += edge_inf;
            }
        }

        check.production_sup = sup;
        check.production_inf = inf;
        check.bounded_ok = sup <= net.gene(g).degrade * net.gene(g).k_max;
        check.positive_ok = inf > 0.0;
        check.feasible_applicable = all_exp_zero;
        if (all_exp_zero) {
            const double eq = sup / net.gene(g).degrade; // sup == inf == the constant
            check.feasible_ok = eq < net.gene(g).k_max;
        }
        report.genes.push_back(check);
    }
    return report;
}

} // namespace genodyn::field
