#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace genodyn::netlang {

/// 1-based position inside a network-definition source.
struct SourcePos {
    int line = 0;
    int column = 0;
    bool operator==(const SourcePos&) const = default;
};

struct Diagnostic {
    SourcePos pos;
    std::string message;
};

/// Reference to a declared parameter, usable where an edge label accepts
/// either a literal or a symbol (exponents and production strengths).
struct ParamRef {
    std::string id;
    bool operator==(const ParamRef&) const = default;
};
using ScalarOrRef = std::variant<double, ParamRef>;

enum class EdgeKind { activate, repress };
enum class Aggregation { sum, product };

struct RawGene {
    std::string id;
    double k_max = 0.0;
    double degrade = 0.0;
    Aggregation agg = Aggregation::sum;
    bool operator==(const RawGene&) const = default;
};

/// Input signal: a constant level, or the name of a time function
/// resolved when the field is assembled.
struct RawInput {
    std::string id;
    std::variant<double, std::string> signal;
    bool operator==(const RawInput&) const = default;
};

struct RawParam {
    std::string id;
    double default_value = 0.0;
    std::optional<double> min;
    std::optional<double> max;
    bool operator==(const RawParam&) const = default;
};

struct RawEdge {
    std::string source;
    std::string target;
    EdgeKind kind = EdgeKind::repress;
    ScalarOrRef beta{0.0};
    double K = 0.0;
    ScalarOrRef exp{0.0};
    bool operator==(const RawEdge&) const = default;
};

/// Parsed network description. Declaration lists are kept canonically
/// sorted (genes/inputs/params by id, edges by source/target/label), so
/// structural equality is plain field equality and parse-format-parse is
/// idempotent.
struct RawNetwork {
    std::string name;
    std::vector<RawGene> genes;
    std::vector<RawInput> inputs;
    std::vector<RawParam> params;
    std::vector<RawEdge> edges;
    bool operator==(const RawNetwork&) const = default;
};

struct ParseResult {
    std::optional<RawNetwork> network;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return network.has_value(); }
};

/// Parses a `.grn` source. On any error returns no network and one
/// positioned diagnostic per problem; there are no partial results.
ParseResult parse_network(std::string_view source);

/// Canonical text: `network` line first, then genes, inputs, params and
/// edges, sorted, one per line, LF line endings, numbers in their
/// shortest exact form.
std::string format_network(const RawNetwork& net);

/// Sorts declarations into the canonical order used by parse/format.
void canonical_sort(RawNetwork& net);

} // namespace genodyn::netlang
