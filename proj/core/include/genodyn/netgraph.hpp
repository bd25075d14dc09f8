#pragma once

#include "genodyn/netlang.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace genodyn::graph {

enum class NodeKind { gene, input };

struct NodeRef {
    NodeKind kind = NodeKind::gene;
    std::size_t index = 0;
    bool operator==(const NodeRef&) const = default;
    auto operator<=>(const NodeRef&) const = default;
};

/// Validated network: an oriented graph over genes and inputs with
/// Hill-labeled edges. Immutable after construction; all operations on it
/// are pure, so concurrent reads are safe.
class Network {
public:
    struct Edge {
        NodeRef source;
        std::size_t target; // gene index
        netlang::EdgeKind kind;
        netlang::ScalarOrRef beta;
        double K;
        netlang::ScalarOrRef exp;
    };

    const std::string& name() const { return raw_.name; }
    std::size_t gene_count() const { return raw_.genes.size(); }
    std::size_t input_count() const { return raw_.inputs.size(); }
    std::size_t node_count() const { return gene_count() + input_count(); }

    const netlang::RawGene& gene(std::size_t i) const { return raw_.genes[i]; }
    const netlang::RawInput& input(std::size_t i) const { return raw_.inputs[i]; }
    const std::vector<netlang::RawParam>& params() const { return raw_.params; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Edge indices feeding a gene, in canonical edge order.
    std::span<const std::size_t> incoming(std::size_t gene_index) const {
        return incoming_[gene_index];
    }
    /// Unique predecessor nodes of any node.
    std::span<const NodeRef> predecessors(NodeRef n) const { return preds_[flat(n)]; }

    bool is_transcription_factor(std::size_t gene_index) const { return is_tf_[gene_index]; }
    /// Gene indices with an outgoing edge to a gene.
    std::vector<std::size_t> tf_set() const;

    const std::string& node_id(NodeRef n) const {
        return n.kind == NodeKind::gene ? raw_.genes[n.index].id : raw_.inputs[n.index].id;
    }
    std::optional<NodeRef> find_node(const std::string& id) const;
    std::optional<std::size_t> gene_index(const std::string& id) const;

    /// The canonical raw description this network was validated from.
    const netlang::RawNetwork& raw() const { return raw_; }

    std::size_t flat(NodeRef n) const {
        return n.kind == NodeKind::gene ? n.index : gene_count() + n.index;
    }
    NodeRef unflat(std::size_t i) const {
        return i < gene_count() ? NodeRef{NodeKind::gene, i}
                                : NodeRef{NodeKind::input, i - gene_count()};
    }

private:
    friend struct NetworkBuilder;
    netlang::RawNetwork raw_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> incoming_; // per gene
    std::vector<std::vector<NodeRef>> preds_;        // per flat node
    std::vector<bool> is_tf_;
};

struct ValidationResult {
    std::optional<Network> network;
    std::vector<std::string> violations;
    bool ok() const { return network.has_value(); }
};

/// Checks the graph hypotheses: inputs have no predecessor, every gene
/// has at least one, and the underlying undirected graph is connected.
/// All violated rules are reported, none silently repaired.
ValidationResult validate(const netlang::RawNetwork& raw);

/// Which nodes count as the core. The written definition ("nodes with a
/// path leading to a cycle") is ambiguous; the default reads it as a
/// directed path FROM the node TO some cycle, the alternative as
/// reachable from a cycle.
enum class CoreConvention { upstream_of_cycle, downstream_of_cycle };

struct LayerDecomposition {
    std::vector<NodeRef> core;    // sorted by node id
    std::vector<int> gene_layer;  // per gene index
    std::vector<int> input_layer; // per input index (always 0)
    int max_layer = 0;

    int layer(NodeRef n) const {
        return n.kind == NodeKind::gene ? gene_layer[n.index] : input_layer[n.index];
    }
    bool in_core(NodeRef n) const;
};

/// Core = nodes on a directed cycle plus nodes with a directed path to a
/// cycle (under the default convention). Layer 0 is core plus inputs;
/// layer k>0 holds nodes whose predecessors all lie below k with at least
/// one at k-1. Deterministic and independent of declaration order.
LayerDecomposition core_and_layers(const Network& net,
                                   CoreConvention convention = CoreConvention::upstream_of_cycle);

/// Structural gene silencing: removes the gene and all incident edges,
/// then re-validates. Throws std::invalid_argument for an unknown id;
/// structural violations of the reduced network are reported in the result.
ValidationResult silence(const Network& net, const std::string& gene_id);

} // namespace genodyn::graph
