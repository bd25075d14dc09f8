#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include "genodyn/netgraph.hpp"

#include <algorithm>

using namespace genodyn;
using graph::CoreConvention;
using graph::NodeKind;
using graph::NodeRef;

namespace {

std::vector<std::string> core_ids(const graph::Network& net, const graph::LayerDecomposition& d) {
    std::vector<std::string> out;
    for (const auto& n : d.core) out.push_back(net.node_id(n));
    return out;
}

bool has_violation(const graph::ValidationResult& r, const std::string& needle) {
    return std::any_of(r.violations.begin(), r.violations.end(), [&](const std::string& v) {
        return v.find(needle) != std::string::npos;
    });
}

} // namespace

TEST_CASE("toggle validates with T = {x, y}") {
    auto net = testutil::load("toggle.grn");
    CHECK(net.gene_count() == 2);
    auto tf = net.tf_set();
    REQUIRE(tf.size() == 2);
    CHECK(net.gene(tf[0]).id == "x");
    CHECK(net.gene(tf[1]).id == "y");
}

TEST_CASE("a self-repressing gene is its own predecessor and validates") {
    auto net = testutil::from_text(
        "network s\ngene g max=1 degrade=1\nedge g -> g repress(beta=1, K=1, exp=2)\n");
    auto preds = net.predecessors(NodeRef{NodeKind::gene, 0});
    REQUIRE(preds.size() == 1);
    CHECK(preds[0] == NodeRef{NodeKind::gene, 0});
}

TEST_CASE("two genes without edges violate predecessor and connectivity rules") {
    auto r = graph::validate(testutil::parse_ok("network n\ngene a max=1 degrade=1\ngene b max=1 degrade=1\n"));
    CHECK_FALSE(r.ok());
    CHECK(has_violation(r, "no predecessor"));
    CHECK(has_violation(r, "not connected"));
}

TEST_CASE("an edge into an input is rejected") {
    auto r = graph::validate(testutil::parse_ok(
        "network n\ninput u signal=1\ngene g max=1 degrade=1\n"
        "edge u -> g activate(beta=1, K=1, exp=1)\nedge g -> u activate(beta=1, K=1, exp=1)\n"));
    CHECK_FALSE(r.ok());
    CHECK(has_violation(r, "has a predecessor"));
}

TEST_CASE("repressilator plus downstream gene: core is the ring, w sits in layer 1") {
    auto net = testutil::load("repressilator_w.grn");
    auto d = graph::core_and_layers(net);
    CHECK(core_ids(net, d) == std::vector<std::string>{"x", "y", "z"});
    CHECK(d.gene_layer[*net.gene_index("w")] == 1);
    CHECK(d.max_layer == 1);
}

TEST_CASE("pure feed-forward chain: empty core, layers 0,1,2") {
    auto net = testutil::load("chain.grn");
    auto d = graph::core_and_layers(net);
    CHECK(d.core.empty());
    CHECK(d.input_layer[0] == 0);
    CHECK(d.gene_layer[*net.gene_index("g1")] == 1);
    CHECK(d.gene_layer[*net.gene_index("g2")] == 2);
    CHECK(d.max_layer == 2);
}

TEST_CASE("toggle: both genes lie on the 2-cycle, no higher layers") {
    auto net = testutil::load("toggle.grn");
    auto d = graph::core_and_layers(net);
    CHECK(core_ids(net, d) == std::vector<std::string>{"x", "y"});
    CHECK(d.max_layer == 0);
}

TEST_CASE("layer values satisfy the predecessor rule on shipped networks") {
    for (const char* name : {"toggle.grn", "repressilator_w.grn", "chain.grn", "twolayer.grn"}) {
        CAPTURE(name);
        auto net = testutil::load(name);
        auto d = graph::core_and_layers(net);
        for (std::size_t g = 0; g < net.gene_count(); ++g) {
            const int layer = d.gene_layer[g];
            if (layer == 0) continue;
            int max_pred = -1;
            for (const auto& p : net.predecessors(NodeRef{NodeKind::gene, g})) {
                CHECK(d.layer(p) < layer);
                max_pred = std::max(max_pred, d.layer(p));
            }
            CHECK(max_pred == layer - 1);
        }
    }
}

TEST_CASE("decomposition is independent of declaration order") {
    auto a = testutil::from_text(
        "network n\ngene x max=1 degrade=1\ngene y max=1 degrade=1\ngene w max=1 degrade=1\n"
        "edge x -> y repress(beta=1, K=1, exp=1)\nedge y -> x repress(beta=1, K=1, exp=1)\n"
        "edge x -> w repress(beta=1, K=1, exp=1)\n");
    auto b = testutil::from_text(
        "network n\ngene w max=1 degrade=1\ngene y max=1 degrade=1\ngene x max=1 degrade=1\n"
        "edge x -> w repress(beta=1, K=1, exp=1)\nedge y -> x repress(beta=1, K=1, exp=1)\n"
        "edge x -> y repress(beta=1, K=1, exp=1)\n");
    auto da = graph::core_and_layers(a);
    auto db = graph::core_and_layers(b);
    CHECK(core_ids(a, da) == core_ids(b, db));
    for (const char* id : {"x", "y", "w"})
        CHECK(da.gene_layer[*a.gene_index(id)] == db.gene_layer[*b.gene_index(id)]);
}

TEST_CASE("the two core conventions differ exactly on nodes downstream of a cycle") {
    // u feeds the 2-cycle {x,y}; w hangs downstream of it.
    auto net = testutil::from_text(
        "network n\ninput u signal=1\ngene x max=1 degrade=1\ngene y max=1 degrade=1\n"
        "gene w max=1 degrade=1\n"
        "edge u -> x activate(beta=1, K=1, exp=1)\n"
        "edge x -> y repress(beta=1, K=1, exp=1)\nedge y -> x repress(beta=1, K=1, exp=1)\n"
        "edge y -> w repress(beta=1, K=1, exp=1)\n");
    auto up = graph::core_and_layers(net, CoreConvention::upstream_of_cycle);
    auto down = graph::core_and_layers(net, CoreConvention::downstream_of_cycle);
    // upstream reading: the input is on a path to the cycle, w is not.
    CHECK(core_ids(net, up) == std::vector<std::string>{"u", "x", "y"});
    CHECK(up.gene_layer[*net.gene_index("w")] == 1);
    // downstream reading: w is reachable from the cycle, u is not.
    CHECK(core_ids(net, down) == std::vector<std::string>{"w", "x", "y"});
    CHECK(down.gene_layer[*net.gene_index("w")] == 0);
}

TEST_CASE("silencing the downstream gene of repressilator_w leaves the ring valid") {
    auto net = testutil::load("repressilator_w.grn");
    auto r = graph::silence(net, "w");
    REQUIRE(r.ok());
    CHECK(r.network->gene_count() == 3);
    CHECK(r.network->edges().size() == 3);
}

TEST_CASE("silencing one toggle gene strands the other") {
    auto net = testutil::load("toggle.grn");
    auto r = graph::silence(net, "x");
    CHECK_FALSE(r.ok());
    CHECK(has_violation(r, "no predecessor"));
}

TEST_CASE("silencing the middle of a two-layer stack drops max_layer") {
    auto net = testutil::load("twolayer.grn");
    auto before = graph::core_and_layers(net);
    CHECK(before.max_layer == 2);
    auto r = graph::silence(net, "v");
    REQUIRE(r.ok());
    auto after = graph::core_and_layers(*r.network);
    CHECK(after.max_layer == 1);
    CHECK(after.gene_layer[*r.network->gene_index("w")] == 1);
}

TEST_CASE("silencing an unknown gene throws") {
    auto net = testutil::load("toggle.grn");
    CHECK_THROWS_AS((void)graph::silence(net, "nope"), std::invalid_argument);
}

TEST_CASE("removing a non-core node never changes the core") {
    auto net = testutil::load("repressilator_w.grn");
    auto before = graph::core_and_layers(net);
    auto r = graph::silence(net, "w");
    REQUIRE(r.ok());
    auto after = graph::core_and_layers(*r.network);
    CHECK(core_ids(net, before) == core_ids(*r.network, after));
}
