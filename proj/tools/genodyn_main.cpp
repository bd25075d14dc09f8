// genodyn: command-line surface for the gene-network dynamics toolkit.
//
// Subcommands: parse, layers, simulate, equilibria, basins, induce,
// continue, classify, qwindow, spectrum. Artifacts are CSV or JSON with an
// embedded metadata block (tool version, config hash, tolerances); a given
// configuration always produces byte-identical output.
//
// Exit codes: 0 success, 1 computation error (JSON object on stderr),
// 2 usage or input error.

#include "genodyn/bifurc.hpp"
#include "genodyn/field.hpp"
#include "genodyn/netgraph.hpp"
#include "genodyn/netlang.hpp"
#include "genodyn/orbits.hpp"
#include "genodyn/parallel.hpp"
#include "genodyn/util.hpp"
#include "genodyn/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using genodyn::format_double;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string subcommand;
    std::string network_path;
    std::vector<std::string> overrides; // id=value
    std::string out;
    std::string format; // csv | json
    std::uint64_t seed = 0;
    double jitter = 0.0;
    double rtol = 1e-8;
    double atol = 1e-10;
    int grid = 8;
    // continuation / classification
    std::string param;
    double from = 0.0, to = 0.0;
    int steps = 200;
    bool post_check = true;
    // simulate
    double t0 = 0.0, t1 = 100.0;
    double sample_dt = 0.0;
    std::string x0_csv;
    // induce
    std::vector<std::string> core_values; // id=value
    // qwindow
    double qa = 0.0, qb = 0.0, qc = 0.0;
    // spectrum
    int n = 0;
    double q = 0.0;
    std::string alpha_csv;

    std::string canonical() const {
        std::ostringstream os;
        os << subcommand << "|net=" << network_path << "|out_fmt=" << format
           << "|seed=" << seed << "|jitter=" << format_double(jitter)
           << "|rtol=" << format_double(rtol) << "|atol=" << format_double(atol)
           << "|grid=" << grid << "|param=" << param << "|from=" << format_double(from)
           << "|to=" << format_double(to) << "|steps=" << steps
           << "|post=" << (post_check ? 1 : 0) << "|t0=" << format_double(t0)
           << "|t1=" << format_double(t1) << "|dt=" << format_double(sample_dt)
           << "|x0=" << x0_csv << "|abc=" << format_double(qa) << "," << format_double(qb)
           << "," << format_double(qc) << "|n=" << n << "|q=" << format_double(q)
           << "|alpha=" << alpha_csv;
        for (const auto& s : overrides) os << "|set=" << s;
        for (const auto& s : core_values) os << "|core=" << s;
        return os.str();
    }
    std::string hash() const { return genodyn::to_hex(genodyn::fnv1a(canonical())); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Temp file + rename, so readers never observe a half-written artifact.
void write_artifact(const std::string& out, const std::string& content) {
    if (out.empty()) {
        std::cout << content;
        return;
    }
    const fs::path target(out);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw ComputeError("cannot write '" + tmp.string() + "'");
        o << content;
    }
    fs::rename(tmp, target);
}

genodyn::graph::Network load_network(const RunConfig& cfg) {
    const std::string text = read_file(cfg.network_path);
    const auto parsed = genodyn::netlang::parse_network(text);
    if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) {
            std::cerr << cfg.network_path << ":" << d.pos.line << ":" << d.pos.column << ": "
                      << d.message << "\n";
        }
        throw UsageError("parse failed with " + std::to_string(parsed.diagnostics.size()) +
                         " diagnostic(s)");
    }
    auto validated = genodyn::graph::validate(*parsed.network);
    if (!validated.ok()) {
        for (const auto& v : validated.violations)
            std::cerr << cfg.network_path << ": " << v << "\n";
        throw UsageError("validation failed with " + std::to_string(validated.violations.size()) +
                         " violation(s)");
    }
    return std::move(*validated.network);
}

std::pair<std::string, double> split_assignment(const std::string& s, const char* what) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
        throw UsageError(std::string(what) + " must be id=value: '" + s + "'");
    const std::string id = s.substr(0, eq);
    try {
        std::size_t used = 0;
        const double v = std::stod(s.substr(eq + 1), &used);
        if (used != s.size() - eq - 1) throw std::invalid_argument("");
        return {id, v};
    } catch (const std::exception&) {
        throw UsageError(std::string(what) + " value is not a number: '" + s + "'");
    }
}

genodyn::field::ParamBinding make_binding(const genodyn::graph::Network& net,
                                          const RunConfig& cfg) {
    auto binding = genodyn::field::ParamBinding::defaults(net);
    for (const auto& s : cfg.overrides) {
        const auto [id, v] = split_assignment(s, "--set");
        if (!binding.has(id)) throw UsageError("unknown parameter override '" + id + "'");
        binding.values[id] = v;
    }
    return binding;
}

std::string csv_header(const RunConfig& cfg, const std::string& columns) {
    std::ostringstream os;
    os << "# genodyn " << genodyn::version << "\n";
    os << "# config " << cfg.hash() << "\n";
    os << "# rtol=" << format_double(cfg.rtol) << " atol=" << format_double(cfg.atol)
       << " seed=" << cfg.seed << "\n";
    os << columns << "\n";
    return os.str();
}

json json_meta(const RunConfig& cfg) {
    json meta;
    meta["tool"] = "genodyn";
    meta["version"] = genodyn::version;
    meta["config"] = cfg.hash();
    meta["rtol"] = cfg.rtol;
    meta["atol"] = cfg.atol;
    meta["seed"] = cfg.seed;
    return meta;
}

json spectrum_json(const genodyn::numerics::Spectrum& s) {
    json arr = json::array();
    for (const auto& z : s.eigenvalues) arr.push_back({z.real(), z.imag()});
    return arr;
}

std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_parse(const RunConfig& cfg) {
    const std::string text = read_file(cfg.network_path);
    const auto parsed = genodyn::netlang::parse_network(text);
    if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics)
            std::cerr << cfg.network_path << ":" << d.pos.line << ":" << d.pos.column << ": "
                      << d.message << "\n";
        return 2;
    }
    write_artifact(cfg.out, genodyn::netlang::format_network(*parsed.network));
    return 0;
}

int cmd_layers(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto layers = genodyn::graph::core_and_layers(net);
    json out;
    out["meta"] = json_meta(cfg);
    json core = json::array();
    for (const auto& n : layers.core) core.push_back(net.node_id(n));
    out["core"] = core;
    json lay;
    for (std::size_t g = 0; g < net.gene_count(); ++g)
        lay[net.gene(g).id] = layers.gene_layer[g];
    for (std::size_t i = 0; i < net.input_count(); ++i)
        lay[net.input(i).id] = layers.input_layer[i];
    out["layers"] = lay;
    out["max_layer"] = layers.max_layer;
    write_artifact(cfg.out, out.dump(2) + "\n");
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto binding = make_binding(net, cfg);
    const genodyn::field::FieldSystem sys(net, binding);

    genodyn::numerics::Vector x0(sys.dim());
    if (!cfg.x0_csv.empty()) {
        x0 = parse_csv_doubles(cfg.x0_csv);
        if (x0.size() != sys.dim())
            throw UsageError("--x0 needs " + std::to_string(sys.dim()) + " components");
    } else {
        for (std::size_t i = 0; i < sys.dim(); ++i) x0[i] = 0.5 * sys.upper_bounds()[i];
    }

    genodyn::numerics::IntegrateOptions iopts;
    iopts.rtol = cfg.rtol;
    iopts.atol = cfg.atol;
    iopts.sample_dt = cfg.sample_dt;
    const auto traj = genodyn::numerics::integrate(sys.rhs(), x0, cfg.t0, cfg.t1, iopts);

    std::ostringstream cols;
    cols << "t";
    for (std::size_t g = 0; g < net.gene_count(); ++g) cols << ",x_" << net.gene(g).id;
    std::ostringstream os;
    os << csv_header(cfg, cols.str());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_double(traj.times[i]);
        for (double v : traj.states[i]) os << "," << format_double(v);
        os << "\n";
    }
    write_artifact(cfg.out, os.str());
    return 0;
}

genodyn::orbits::FindOptions find_options(const RunConfig& cfg) {
    genodyn::orbits::FindOptions fopts;
    fopts.grid_per_axis = cfg.grid;
    fopts.jitter = cfg.jitter;
    fopts.seed = cfg.seed;
    return fopts;
}

int cmd_equilibria(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto binding = make_binding(net, cfg);
    const auto rep = genodyn::orbits::index_sum(net, binding, find_options(cfg));

    json out;
    out["meta"] = json_meta(cfg);
    json genes = json::array();
    for (std::size_t g = 0; g < net.gene_count(); ++g) genes.push_back(net.gene(g).id);
    out["genes"] = genes;
    json eqs = json::array();
    for (const auto& eq : rep.equilibria) {
        json e;
        e["x"] = eq.x;
        e["eigenvalues"] = spectrum_json(eq.spectrum);
        e["stability"] = genodyn::orbits::to_string(eq.stability);
        e["det_sign"] = eq.det_sign;
        e["residual"] = eq.residual;
        eqs.push_back(e);
    }
    out["equilibria"] = eqs;
    out["index_sum"] = rep.index_sum;
    out["index_expected"] = rep.expected;
    out["index_consistent"] = rep.consistent;
    out["excluded_marginal"] = rep.excluded_marginal;
    write_artifact(cfg.out, out.dump(2) + "\n");
    return 0;
}

int cmd_basins(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto binding = make_binding(net, cfg);
    genodyn::orbits::BasinOptions bopts;
    bopts.grid_per_axis = cfg.grid;
    bopts.find = find_options(cfg);
    bopts.integrate.rtol = cfg.rtol;
    bopts.integrate.atol = cfg.atol;
    const auto res = genodyn::orbits::basin_sample(net, binding, bopts);

    std::ostringstream cols;
    for (std::size_t g = 0; g < net.gene_count(); ++g) cols << "x_" << net.gene(g).id << ",";
    std::ostringstream os;
    os << csv_header(cfg, cols.str() + "label");
    for (const auto& pt : res.points) {
        for (double v : pt.start) os << format_double(v) << ",";
        switch (pt.label) {
            case genodyn::orbits::BasinLabel::equilibrium:
                os << "eq" << pt.equilibrium_index;
                break;
            case genodyn::orbits::BasinLabel::orbit: os << "orbit"; break;
            case genodyn::orbits::BasinLabel::undecided: os << "undecided"; break;
        }
        os << "\n";
    }
    write_artifact(cfg.out, os.str());
    return 0;
}

int cmd_induce(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto binding = make_binding(net, cfg);
    const auto layers = genodyn::graph::core_and_layers(net);

    std::vector<std::size_t> core_genes;
    for (std::size_t g = 0; g < net.gene_count(); ++g)
        if (layers.gene_layer[g] == 0) core_genes.push_back(g);

    std::vector<std::map<std::string, double>> cases;
    if (!cfg.core_values.empty()) {
        std::map<std::string, double> values;
        for (const auto& s : cfg.core_values) {
            const auto [id, v] = split_assignment(s, "--core");
            values[id] = v;
        }
        cases.push_back(std::move(values));
    } else if (core_genes.empty()) {
        cases.push_back({}); // pure feed-forward: layering alone determines everything
    } else {
        // Solve the core-restricted equations by multistart Newton; the core
        // is predecessor-closed, so non-core coordinates never enter.
        const genodyn::field::FieldSystem sys(net, binding);
        genodyn::numerics::Vector lo(core_genes.size(), 0.0), hi(core_genes.size());
        for (std::size_t i = 0; i < core_genes.size(); ++i)
            hi[i] = sys.upper_bounds()[core_genes[i]];

        auto expand = [&](const genodyn::numerics::Vector& u) {
            genodyn::numerics::Vector x(sys.dim(), 0.0);
            for (std::size_t i = 0; i < core_genes.size(); ++i) x[core_genes[i]] = u[i];
            return x;
        };
        auto f = [&](const genodyn::numerics::Vector& u) {
            const auto x = expand(u);
            genodyn::numerics::Vector out(core_genes.size());
            for (std::size_t i = 0; i < core_genes.size(); ++i) {
                const std::size_t g = core_genes[i];
                out[i] = sys.production(g, x) - sys.degrade()[g] * x[g];
            }
            return out;
        };
        auto jac = [&](const genodyn::numerics::Vector& u) {
            const auto x = expand(u);
            const auto full = sys.jacobian_at(x);
            genodyn::numerics::Matrix j(core_genes.size(), core_genes.size());
            for (std::size_t i = 0; i < core_genes.size(); ++i)
                for (std::size_t k = 0; k < core_genes.size(); ++k)
                    j(i, k) = full(core_genes[i], core_genes[k]);
            return j;
        };

        genodyn::numerics::NewtonOptions nopts;
        nopts.box = genodyn::numerics::Box{lo, hi};
        std::vector<genodyn::numerics::Vector> found;
        const int per_axis = cfg.grid;
        std::vector<int> idx(core_genes.size(), 0);
        std::size_t total = 1;
        for (std::size_t i = 0; i < core_genes.size(); ++i)
            total *= static_cast<std::size_t>(per_axis);
        for (std::size_t s = 0; s < total; ++s) {
            genodyn::numerics::Vector u(core_genes.size());
            for (std::size_t i = 0; i < core_genes.size(); ++i)
                u[i] = hi[i] * (idx[i] + 0.5) / per_axis;
            for (std::size_t i = 0; i < core_genes.size(); ++i) {
                if (++idx[i] < per_axis) break;
                idx[i] = 0;
            }
            const auto r = genodyn::numerics::newton(f, jac, u, nopts);
            if (!r.ok()) continue;
            bool dup = false;
            for (const auto& v : found)
                if (genodyn::numerics::dist_inf(r.x, v) < 1e-6) dup = true;
            if (!dup) found.push_back(r.x);
        }
        std::sort(found.begin(), found.end());
        for (const auto& u : found) {
            std::map<std::string, double> values;
            for (std::size_t i = 0; i < core_genes.size(); ++i)
                values[net.gene(core_genes[i]).id] = u[i];
            cases.push_back(std::move(values));
        }
        if (cases.empty()) throw ComputeError("induce: no core equilibrium found");
    }

    json out;
    out["meta"] = json_meta(cfg);
    json core_ids = json::array();
    for (std::size_t g : core_genes) core_ids.push_back(net.gene(g).id);
    out["core_genes"] = core_ids;
    json results = json::array();
    for (const auto& values : cases) {
        const auto x = genodyn::orbits::induced_equilibrium(net, binding, values);
        const auto residual =
            genodyn::numerics::norm_inf(genodyn::field::eval_field(net, binding, x));
        json item;
        item["core"] = values;
        json state;
        for (std::size_t g = 0; g < net.gene_count(); ++g) state[net.gene(g).id] = x[g];
        item["state"] = state;
        item["residual"] = residual;
        results.push_back(item);
    }
    out["induced"] = results;
    write_artifact(cfg.out, out.dump(2) + "\n");
    return 0;
}

int cmd_continue(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto binding = make_binding(net, cfg);
    genodyn::bifurc::ContinueOptions copts;
    copts.steps = cfg.steps;
    copts.start_search = find_options(cfg);
    const auto branch =
        genodyn::bifurc::continue_branch(net, binding, cfg.param, cfg.from, cfg.to, copts);

    std::ostringstream cols;
    cols << "mu";
    for (std::size_t g = 0; g < net.gene_count(); ++g) cols << ",x_" << net.gene(g).id;
    cols << ",re_lambda_max,det_j";
    std::ostringstream os;
    os << csv_header(cfg, cols.str());
    for (const auto& p : branch.points) {
        os << format_double(p.mu);
        for (double v : p.x) os << "," << format_double(v);
        os << "," << format_double(p.max_re) << "," << format_double(p.det_j) << "\n";
    }
    write_artifact(cfg.out, os.str());
    if (branch.stalled)
        throw ComputeError("continuation stalled at mu=" + format_double(branch.stall_mu) +
                           " (minimal step failed); partial branch written");
    return 0;
}

int cmd_classify(const RunConfig& cfg) {
    const auto net = load_network(cfg);
    const auto binding = make_binding(net, cfg);
    genodyn::bifurc::ContinueOptions copts;
    copts.steps = cfg.steps;
    copts.start_search = find_options(cfg);
    const auto branch =
        genodyn::bifurc::continue_branch(net, binding, cfg.param, cfg.from, cfg.to, copts);
    auto report = genodyn::bifurc::first_bifurcation(branch);
    if (cfg.post_check && report.kind != genodyn::bifurc::BifurcationKind::none) {
        genodyn::bifurc::PostCheckOptions popts;
        popts.integrate.rtol = cfg.rtol;
        popts.integrate.atol = cfg.atol;
        genodyn::bifurc::post_bifurcation_check(net, binding, report, popts);
    }

    json out;
    out["meta"] = json_meta(cfg);
    out["param"] = report.param;
    out["from"] = report.from;
    out["to"] = report.to;
    out["kind"] = genodyn::bifurc::to_string(report.kind);
    if (report.kind != genodyn::bifurc::BifurcationKind::none) {
        out["mu0"] = report.mu0;
        out["x0"] = report.x0;
        out["eigenvalues_at_mu0"] = spectrum_json(report.spectrum0);
        json crossing;
        crossing["det_j"] = report.crossing.det_j;
        if (report.kind == genodyn::bifurc::BifurcationKind::hopf)
            crossing["gamma"] = report.crossing.gamma;
        else
            crossing["real_eigenvalue"] = report.crossing.real_eigenvalue;
        out["crossing"] = crossing;
        if (report.q_at_mu0) out["q_at_mu0"] = *report.q_at_mu0;
        if (report.post_check.ran) {
            json pc;
            pc["ok"] = report.post_check.ok;
            pc["flagged"] = report.post_check.flagged;
            if (report.kind == genodyn::bifurc::BifurcationKind::pitchfork) {
                pc["equilibria_after"] = report.post_check.equilibria_after;
                pc["stable_after"] = report.post_check.stable_after;
            } else {
                pc["amplitude_exponent"] = report.post_check.amplitude_exponent;
            }
            pc["detail"] = report.post_check.detail;
            out["post_check"] = pc;
        }
    }
    if (branch.stalled) out["stalled_at"] = branch.stall_mu;
    write_artifact(cfg.out, out.dump(2) + "\n");
    return 0;
}

int cmd_qwindow(const RunConfig& cfg) {
    const auto w = genodyn::bifurc::q_window(cfg.qa, cfg.qb, cfg.qc);
    json out;
    out["meta"] = json_meta(cfg);
    out["a"] = w.a;
    out["b"] = w.b;
    out["c"] = w.c;
    out["q_hopf"] = w.q_hopf;
    out["q_pitch"] = w.q_pitch;
    out["gamma"] = w.gamma;
    write_artifact(cfg.out, out.dump(2) + "\n");
    return 0;
}

int cmd_spectrum(const RunConfig& cfg) {
    auto alphas = parse_csv_doubles(cfg.alpha_csv);
    if (alphas.empty()) throw UsageError("--alpha needs at least one value");
    std::size_t n = cfg.n > 0 ? static_cast<std::size_t>(cfg.n) : alphas.size();
    if (alphas.size() == 1) alphas.assign(n, alphas.front());
    if (alphas.size() != n)
        throw UsageError("--alpha needs 1 or n values (n=" + std::to_string(n) + ")");

    const auto s = genodyn::bifurc::cyclic_spectrum(alphas, cfg.q);
    std::ostringstream os;
    os << csv_header(cfg, "re,im");
    for (const auto& z : s.eigenvalues)
        os << format_double(z.real()) << "," << format_double(z.imag()) << "\n";
    write_artifact(cfg.out, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"gene-network dynamics: equilibria, orbits and first bifurcations"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("network", cfg.network_path, "network definition (.grn)")->required();
        sub->add_option("--out", cfg.out, "output path (default stdout)");
        sub->add_option("--set", cfg.overrides, "parameter override id=value (repeatable)");
        sub->add_option("--seed", cfg.seed, "seed for multistart jitter");
        sub->add_option("--jitter", cfg.jitter,
                        "multistart jitter fraction (default 0: pure grid)");
        sub->add_option("--rtol", cfg.rtol, "integrator relative tolerance");
        sub->add_option("--atol", cfg.atol, "integrator absolute tolerance");
        sub->add_option("--grid", cfg.grid, "multistart grid points per axis");
        sub->add_option("--format", cfg.format, "output format (fixed per subcommand)");
    };

    auto* p_parse = app.add_subcommand("parse", "parse a network and print its canonical form");
    p_parse->add_option("network", cfg.network_path)->required();
    p_parse->add_option("--out", cfg.out);

    auto* p_layers = app.add_subcommand("layers", "core and layer decomposition as JSON");
    add_common(p_layers);

    auto* p_sim = app.add_subcommand("simulate", "integrate the dynamics, CSV t,x...");
    add_common(p_sim);
    p_sim->add_option("--t0", cfg.t0, "start time");
    p_sim->add_option("--t1", cfg.t1, "end time");
    p_sim->add_option("--x0", cfg.x0_csv, "initial state v1,v2,... (default box center)");
    p_sim->add_option("--sample-dt", cfg.sample_dt, "uniform output grid step");

    auto* p_eq = app.add_subcommand("equilibria", "multistart equilibrium search as JSON");
    add_common(p_eq);

    auto* p_bas = app.add_subcommand("basins", "basin labels on a grid, CSV x...,label");
    add_common(p_bas);

    auto* p_ind = app.add_subcommand("induce", "extend core equilibria to all layers, JSON");
    add_common(p_ind);
    p_ind->add_option("--core", cfg.core_values, "core gene value id=value (repeatable)");

    auto* p_cont = app.add_subcommand("continue", "equilibrium branch over a parameter, CSV");
    add_common(p_cont);
    p_cont->add_option("--param", cfg.param, "parameter to continue in")->required();
    p_cont->add_option("--from", cfg.from, "start value")->required();
    p_cont->add_option("--to", cfg.to, "end value")->required();
    p_cont->add_option("--steps", cfg.steps, "nominal number of steps");

    auto* p_cls = app.add_subcommand("classify", "first bifurcation on a branch as JSON");
    add_common(p_cls);
    p_cls->add_option("--param", cfg.param, "parameter to continue in")->required();
    p_cls->add_option("--from", cfg.from, "start value")->required();
    p_cls->add_option("--to", cfg.to, "end value")->required();
    p_cls->add_option("--steps", cfg.steps, "nominal number of steps");
    bool no_post_check = false;
    p_cls->add_flag("--no-post-check", no_post_check,
                    "skip the empirical supercriticality check");

    auto* p_qw = app.add_subcommand("qwindow", "stability window of a 3-cycle's loop gain, JSON");
    p_qw->add_option("a", cfg.qa, "degradation rate a")->required();
    p_qw->add_option("b", cfg.qb, "degradation rate b")->required();
    p_qw->add_option("c", cfg.qc, "degradation rate c")->required();
    p_qw->add_option("--out", cfg.out);

    auto* p_spec =
        app.add_subcommand("spectrum", "roots of a cyclic characteristic equation, CSV");
    p_spec->add_option("--n", cfg.n, "cycle length (when --alpha is one value)");
    p_spec->add_option("--q", cfg.q, "loop gain")->required();
    p_spec->add_option("--alpha", cfg.alpha_csv, "degradation rates a or a1,a2,...")->required();
    p_spec->add_option("--out", cfg.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    cfg.post_check = !no_post_check;

    try {
        if (p_parse->parsed()) {
            cfg.subcommand = "parse";
            return cmd_parse(cfg);
        }
        if (p_layers->parsed()) {
            cfg.subcommand = "layers";
            return cmd_layers(cfg);
        }
        if (p_sim->parsed()) {
            cfg.subcommand = "simulate";
            return cmd_simulate(cfg);
        }
        if (p_eq->parsed()) {
            cfg.subcommand = "equilibria";
            return cmd_equilibria(cfg);
        }
        if (p_bas->parsed()) {
            cfg.subcommand = "basins";
            return cmd_basins(cfg);
        }
        if (p_ind->parsed()) {
            cfg.subcommand = "induce";
            return cmd_induce(cfg);
        }
        if (p_cont->parsed()) {
            cfg.subcommand = "continue";
            return cmd_continue(cfg);
        }
        if (p_cls->parsed()) {
            cfg.subcommand = "classify";
            return cmd_classify(cfg);
        }
        if (p_qw->parsed()) {
            cfg.subcommand = "qwindow";
            return cmd_qwindow(cfg);
        }
        if (p_spec->parsed()) {
            cfg.subcommand = "spectrum";
            return cmd_spectrum(cfg);
        }
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        err["subcommand"] = cfg.subcommand;
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
