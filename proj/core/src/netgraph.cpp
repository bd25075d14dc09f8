#include "genodyn/netgraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stack>
#include <stdexcept>

namespace genodyn::graph {

namespace {

// Iterative Tarjan SCC over flat node indices. Returns component id per node
// and, per component, its size; self_loop marks nodes with an edge to themselves.
struct SccResult {
    std::vector<std::size_t> comp;
    std::vector<std::size_t> comp_size;
};

SccResult tarjan(std::size_t n, const std::vector<std::vector<std::size_t>>& succ) {
    SccResult out;
    out.comp.assign(n, SIZE_MAX);
    std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t next_index = 0;

    struct Frame {
        std::size_t v;
        std::size_t child = 0;
    };

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != SIZE_MAX) continue;
        std::vector<Frame> frames{{root}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < succ[f.v].size()) {
                const std::size_t w = succ[f.v][f.child++];
                if (index[w] == SIZE_MAX) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    const std::size_t cid = out.comp_size.size();
                    std::size_t size = 0;
                    for (;;) {
                        const std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        out.comp[w] = cid;
                        ++size;
                        if (w == f.v) break;
                    }
                    out.comp_size.push_back(size);
                }
                const std::size_t v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return out;
}

} // namespace

struct NetworkBuilder {
    static ValidationResult build(const netlang::RawNetwork& raw) {
        ValidationResult res;
        Network net;
        net.raw_ = raw;
        netlang::canonical_sort(net.raw_);

        std::map<std::string, NodeRef> by_id;
        for (std::size_t i = 0; i < net.raw_.genes.size(); ++i)
            by_id[net.raw_.genes[i].id] = NodeRef{NodeKind::gene, i};
        for (std::size_t i = 0; i < net.raw_.inputs.size(); ++i)
            by_id[net.raw_.inputs[i].id] = NodeRef{NodeKind::input, i};

        const std::size_t n_nodes = net.node_count();
        net.incoming_.assign(net.gene_count(), {});
        net.preds_.assign(n_nodes, {});
        net.is_tf_.assign(net.gene_count(), false);

        std::vector<std::set<std::size_t>> pred_sets(n_nodes);
        bool edge_into_input = false;

        for (const auto& re : net.raw_.edges) {
            const auto src = by_id.find(re.source);
            const auto dst = by_id.find(re.target);
            if (src == by_id.end() || dst == by_id.end()) {
                res.violations.push_back("edge endpoint not declared: " + re.source + " -> " +
                                         re.target);
                continue;
            }
            if (dst->second.kind == NodeKind::input) {
                res.violations.push_back("input '" + re.target +
                                         "' has a predecessor (edge from '" + re.source + "')");
                edge_into_input = true;
                continue;
            }
            Network::Edge e{src->second, dst->second.index, re.kind, re.beta, re.K, re.exp};
            net.incoming_[e.target].push_back(net.edges_.size());
            pred_sets[net.flat(NodeRef{NodeKind::gene, e.target})].insert(net.flat(e.source));
            if (src->second.kind == NodeKind::gene) net.is_tf_[src->second.index] = true;
            net.edges_.push_back(std::move(e));
        }
        (void)edge_into_input;

        for (std::size_t f = 0; f < n_nodes; ++f) {
            for (std::size_t p : pred_sets[f]) net.preds_[f].push_back(net.unflat(p));
        }

        for (std::size_t g = 0; g < net.gene_count(); ++g) {
            if (net.incoming_[g].empty())
                res.violations.push_back("gene '" + net.gene(g).id + "' has no predecessor");
        }

        // Connectivity of the underlying undirected graph.
        if (n_nodes > 0) {
            std::vector<std::vector<std::size_t>> undirected(n_nodes);
            for (const auto& e : net.edges_) {
                const std::size_t a = net.flat(e.source);
                const std::size_t b = net.flat(NodeRef{NodeKind::gene, e.target});
                undirected[a].push_back(b);
                undirected[b].push_back(a);
            }
            std::vector<bool> seen(n_nodes, false);
            std::stack<std::size_t> work;
            work.push(0);
            seen[0] = true;
            std::size_t visited = 1;
            while (!work.empty()) {
                const std::size_t v = work.top();
                work.pop();
                for (std::size_t w : undirected[v]) {
                    if (!seen[w]) {
                        seen[w] = true;
                        ++visited;
                        work.push(w);
                    }
                }
            }
            if (visited != n_nodes) res.violations.push_back("graph is not connected");
        }

        if (!res.violations.empty()) return res;
        res.network = std::move(net);
        return res;
    }
};

std::vector<std::size_t> Network::tf_set() const {
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g < gene_count(); ++g)
        if (is_tf_[g]) out.push_back(g);
    return out;
}

std::optional<NodeRef> Network::find_node(const std::string& id) const {
    for (std::size_t i = 0; i < raw_.genes.size(); ++i)
        if (raw_.genes[i].id == id) return NodeRef{NodeKind::gene, i};
    for (std::size_t i = 0; i < raw_.inputs.size(); ++i)
        if (raw_.inputs[i].id == id) return NodeRef{NodeKind::input, i};
    return std::nullopt;
}

std::optional<std::size_t> Network::gene_index(const std::string& id) const {
    for (std::size_t i = 0; i < raw_.genes.size(); ++i)
        if (raw_.genes[i].id == id) return i;
    return std::nullopt;
}

ValidationResult validate(const netlang::RawNetwork& raw) {
    return NetworkBuilder::build(raw);
}

bool LayerDecomposition::in_core(NodeRef n) const {
    return std::find(core.begin(), core.end(), n) != core.end();
}

LayerDecomposition core_and_layers(const Network& net, CoreConvention convention) {
    const std::size_t n = net.node_count();
    std::vector<std::vector<std::size_t>> succ(n), pred(n);
    std::vector<bool> self_loop(n, false);
    for (const auto& e : net.edges()) {
        const std::size_t a = net.flat(e.source);
        const std::size_t b = net.flat(NodeRef{NodeKind::gene, e.target});
        succ[a].push_back(b);
        pred[b].push_back(a);
        if (a == b) self_loop[a] = true;
    }

    const SccResult scc = tarjan(n, succ);
    std::vector<bool> on_cycle(n, false);
    for (std::size_t v = 0; v < n; ++v)
        on_cycle[v] = self_loop[v] || scc.comp_size[scc.comp[v]] > 1;

    // Reachability from the cycle set along reversed (upstream) or forward
    // (downstream) edges.
    std::vector<bool> in_core(n, false);
    std::stack<std::size_t> work;
    for (std::size_t v = 0; v < n; ++v) {
        if (on_cycle[v]) {
            in_core[v] = true;
            work.push(v);
        }
    }
    const auto& step = (convention == CoreConvention::upstream_of_cycle) ? pred : succ;
    while (!work.empty()) {
        const std::size_t v = work.top();
        work.pop();
        for (std::size_t w : step[v]) {
            if (!in_core[w]) {
                in_core[w] = true;
                work.push(w);
            }
        }
    }

    LayerDecomposition out;
    out.gene_layer.assign(net.gene_count(), -1);
    out.input_layer.assign(net.input_count(), 0);

    std::vector<int> layer(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        const NodeRef ref = net.unflat(v);
        if (in_core[v] || ref.kind == NodeKind::input) layer[v] = 0;
    }

    // Longest-path layering over the remaining DAG: layer(v) = 1 + max layer
    // of its predecessors. Memoized DFS; validity guarantees termination.
    std::vector<std::size_t> order;
    std::vector<int> state(n, 0); // 0 unvisited, 1 in progress, 2 done
    for (std::size_t root = 0; root < n; ++root) {
        if (layer[root] >= 0 || state[root] == 2) continue;
        std::stack<std::size_t> dfs;
        dfs.push(root);
        while (!dfs.empty()) {
            const std::size_t v = dfs.top();
            if (layer[v] >= 0 || state[v] == 2) {
                dfs.pop();
                continue;
            }
            if (state[v] == 0) {
                state[v] = 1;
                for (std::size_t p : pred[v]) {
                    if (layer[p] < 0 && state[p] != 2) dfs.push(p);
                }
            } else {
                int best = 0;
                for (std::size_t p : pred[v]) best = std::max(best, layer[p]);
                layer[v] = best + 1;
                state[v] = 2;
                dfs.pop();
            }
        }
    }

    for (std::size_t v = 0; v < n; ++v) {
        const NodeRef ref = net.unflat(v);
        if (ref.kind == NodeKind::gene)
            out.gene_layer[ref.index] = layer[v];
        else
            out.input_layer[ref.index] = 0;
        out.max_layer = std::max(out.max_layer, layer[v]);
        if (in_core[v]) out.core.push_back(ref);
    }
    std::sort(out.core.begin(), out.core.end(), [&](NodeRef a, NodeRef b) {
        return net.node_id(a) < net.node_id(b);
    });
    return out;
}

ValidationResult silence(const Network& net, const std::string& gene_id) {
    if (!net.gene_index(gene_id))
        throw std::invalid_argument("silence: unknown gene id '" + gene_id + "'");

    netlang::RawNetwork reduced = net.raw();
    std::erase_if(reduced.genes,
                  [&](const netlang::RawGene& g) { return g.id == gene_id; });
    std::erase_if(reduced.edges, [&](const netlang::RawEdge& e) {
        return e.source == gene_id || e.target == gene_id;
    });
    return validate(reduced);
}

} // namespace genodyn::graph
