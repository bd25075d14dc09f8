#include "genodyn/netlang.hpp"

#include "genodyn/util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace genodyn::netlang {

namespace {

enum class TokKind { ident, number, equals, lparen, rparen, comma, arrow, end };

struct Token {
    TokKind kind;
    std::string text;
    double value = 0.0; // for numbers
    SourcePos pos;
};

class LineLexer {
public:
    LineLexer(std::string_view line, int line_no, std::vector<Diagnostic>& diags)
        : line_(line), line_no_(line_no), diags_(diags) {
        lex();
    }

    const std::vector<Token>& tokens() const { return toks_; }
    bool ok() const { return ok_; }

private:
    void fail(int col, std::string msg) {
        diags_.push_back({{line_no_, col}, std::move(msg)});
        ok_ = false;
    }

    void lex() {
        std::size_t i = 0;
        while (i < line_.size()) {
            const char c = line_[i];
            const int col = static_cast<int>(i) + 1;
            if (c == '#') break; // comment to end of line
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i + 1;
                while (j < line_.size() &&
                       (std::isalnum(static_cast<unsigned char>(line_[j])) || line_[j] == '_'))
                    ++j;
                toks_.push_back({TokKind::ident, std::string(line_.substr(i, j - i)), 0.0,
                                 {line_no_, col}});
                i = j;
                continue;
            }
            if (c == '-' && i + 1 < line_.size() && line_[i + 1] == '>') {
                toks_.push_back({TokKind::arrow, "->", 0.0, {line_no_, col}});
                i += 2;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
                std::size_t j = i;
                if (line_[j] == '+' || line_[j] == '-') ++j;
                std::size_t digits = j;
                while (j < line_.size() && std::isdigit(static_cast<unsigned char>(line_[j]))) ++j;
                if (j < line_.size() && line_[j] == '.') {
                    ++j;
                    while (j < line_.size() && std::isdigit(static_cast<unsigned char>(line_[j])))
                        ++j;
                }
                if (j == digits || (j == digits + 1 && line_[digits] == '.')) {
                    fail(col, "malformed number");
                    return;
                }
                if (j < line_.size() && (line_[j] == 'e' || line_[j] == 'E')) {
                    std::size_t k = j + 1;
                    if (k < line_.size() && (line_[k] == '+' || line_[k] == '-')) ++k;
                    std::size_t exp_digits = k;
                    while (k < line_.size() && std::isdigit(static_cast<unsigned char>(line_[k])))
                        ++k;
                    if (k == exp_digits) {
                        fail(col, "malformed number (empty exponent)");
                        return;
                    }
                    j = k;
                }
                double value = 0.0;
                const char* b = line_.data() + i;
                const char* e = line_.data() + j;
                auto [p, ec] = std::from_chars(b, e, value);
                if (ec != std::errc{} || p != e) {
                    fail(col, "malformed number");
                    return;
                }
                toks_.push_back({TokKind::number, std::string(line_.substr(i, j - i)), value,
                                 {line_no_, col}});
                i = j;
                continue;
            }
            if (c == '=') {
                toks_.push_back({TokKind::equals, "=", 0.0, {line_no_, col}});
                ++i;
                continue;
            }
            if (c == '(') {
                toks_.push_back({TokKind::lparen, "(", 0.0, {line_no_, col}});
                ++i;
                continue;
            }
            if (c == ')') {
                toks_.push_back({TokKind::rparen, ")", 0.0, {line_no_, col}});
                ++i;
                continue;
            }
            if (c == ',') {
                toks_.push_back({TokKind::comma, ",", 0.0, {line_no_, col}});
                ++i;
                continue;
            }
            fail(col, std::string("unexpected character '") + c + "'");
            return;
        }
        toks_.push_back({TokKind::end, "", 0.0, {line_no_, static_cast<int>(line_.size()) + 1}});
    }

    std::string_view line_;
    int line_no_;
    std::vector<Diagnostic>& diags_;
    std::vector<Token> toks_;
    bool ok_ = true;
};

// Cursor over one line of tokens.
class Cursor {
public:
    Cursor(const std::vector<Token>& toks, std::vector<Diagnostic>& diags)
        : toks_(toks), diags_(diags) {}

    const Token& peek() const { return toks_[i_]; }
    bool at_end() const { return toks_[i_].kind == TokKind::end; }

    bool error(std::string msg) {
        diags_.push_back({peek().pos, std::move(msg)});
        return false;
    }

    bool expect(TokKind k, const char* what) {
        if (peek().kind != k) return error(std::string("expected ") + what);
        ++i_;
        return true;
    }

    std::optional<std::string> expect_ident(const char* what) {
        if (peek().kind != TokKind::ident) {
            error(std::string("expected ") + what);
            return std::nullopt;
        }
        return toks_[i_++].text;
    }

    std::optional<double> expect_number(const char* what) {
        if (peek().kind != TokKind::number) {
            error(std::string("expected ") + what);
            return std::nullopt;
        }
        return toks_[i_++].value;
    }

    std::optional<ScalarOrRef> expect_scalar_or_ref(const char* what) {
        if (peek().kind == TokKind::number) return ScalarOrRef{toks_[i_++].value};
        if (peek().kind == TokKind::ident) return ScalarOrRef{ParamRef{toks_[i_++].text}};
        error(std::string("expected ") + what);
        return std::nullopt;
    }

private:
    const std::vector<Token>& toks_;
    std::vector<Diagnostic>& diags_;
    std::size_t i_ = 0;
};

struct Declared {
    SourcePos pos;
    enum class What { gene, input, param } what;
};

// key=value attribute list: returns map key -> (token index range handled inline).
struct AttrValue {
    std::variant<double, std::string> v; // number or identifier
    SourcePos pos;
    bool is_number() const { return std::holds_alternative<double>(v); }
    double num() const { return std::get<double>(v); }
    const std::string& ident() const { return std::get<std::string>(v); }
};

bool parse_attrs(Cursor& cur, std::map<std::string, AttrValue>& out) {
    while (!cur.at_end() && cur.peek().kind != TokKind::rparen) {
        if (cur.peek().kind == TokKind::comma) {
            cur.expect(TokKind::comma, "','");
            continue;
        }
        const Token key = cur.peek();
        auto id = cur.expect_ident("attribute name");
        if (!id) return false;
        if (!cur.expect(TokKind::equals, "'='")) return false;
        const Token& val = cur.peek();
        if (val.kind == TokKind::number) {
            if (!out.emplace(*id, AttrValue{val.value, key.pos}).second)
                return cur.error("duplicate attribute '" + *id + "'");
            cur.expect(TokKind::number, "value");
        } else if (val.kind == TokKind::ident) {
            if (!out.emplace(*id, AttrValue{val.text, key.pos}).second)
                return cur.error("duplicate attribute '" + *id + "'");
            cur.expect(TokKind::ident, "value");
        } else {
            return cur.error("expected attribute value");
        }
    }
    return true;
}

std::optional<double> require_number(std::map<std::string, AttrValue>& attrs,
                                     const std::string& key, SourcePos stmt_pos,
                                     std::vector<Diagnostic>& diags) {
    auto it = attrs.find(key);
    if (it == attrs.end()) {
        diags.push_back({stmt_pos, "missing attribute '" + key + "'"});
        return std::nullopt;
    }
    if (!it->second.is_number()) {
        diags.push_back({it->second.pos, "attribute '" + key + "' must be a number"});
        return std::nullopt;
    }
    return it->second.num();
}

std::string scalar_text(const ScalarOrRef& v) {
    if (const double* d = std::get_if<double>(&v)) return format_double(*d);
    return std::get<ParamRef>(v).id;
}

// Sort key making the edge order total even with parallel edges.
auto edge_key(const RawEdge& e) {
    const bool beta_ref = std::holds_alternative<ParamRef>(e.beta);
    const bool exp_ref = std::holds_alternative<ParamRef>(e.exp);
    return std::tuple(e.source, e.target, static_cast<int>(e.kind), beta_ref, scalar_text(e.beta),
                      e.K, exp_ref, scalar_text(e.exp));
}

} // namespace

void canonical_sort(RawNetwork& net) {
    std::sort(net.genes.begin(), net.genes.end(),
              [](const RawGene& a, const RawGene& b) { return a.id < b.id; });
    std::sort(net.inputs.begin(), net.inputs.end(),
              [](const RawInput& a, const RawInput& b) { return a.id < b.id; });
    std::sort(net.params.begin(), net.params.end(),
              [](const RawParam& a, const RawParam& b) { return a.id < b.id; });
    std::sort(net.edges.begin(), net.edges.end(),
              [](const RawEdge& a, const RawEdge& b) { return edge_key(a) < edge_key(b); });
}

ParseResult parse_network(std::string_view source) {
    ParseResult result;
    std::vector<Diagnostic>& diags = result.diagnostics;
    RawNetwork net;
    bool saw_network = false;

    std::map<std::string, Declared> declared;
    struct PendingEdge {
        RawEdge edge;
        SourcePos pos;
        SourcePos source_pos, target_pos;
    };
    std::vector<PendingEdge> pending_edges;
    std::vector<std::pair<std::string, SourcePos>> param_refs; // symbols used in edges

    auto declare = [&](const std::string& id, SourcePos pos, Declared::What what) {
        auto [it, fresh] = declared.emplace(id, Declared{pos, what});
        if (!fresh) {
            std::ostringstream os;
            os << "duplicate identifier '" << id << "' (first declared at line "
               << it->second.pos.line << ")";
            diags.push_back({pos, os.str()});
            return false;
        }
        return true;
    };

    int line_no = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t nl = source.find('\n', start);
        std::string_view line = source.substr(
            start, nl == std::string_view::npos ? source.size() - start : nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        start = (nl == std::string_view::npos) ? source.size() + 1 : nl + 1;

        LineLexer lexer(line, line_no, diags);
        if (!lexer.ok()) continue;
        Cursor cur(lexer.tokens(), diags);
        if (cur.at_end()) continue;

        const Token head = cur.peek();
        if (head.kind != TokKind::ident) {
            cur.error("expected a statement keyword");
            continue;
        }
        auto keyword = cur.expect_ident("keyword");

        if (*keyword == "network") {
            auto id = cur.expect_ident("network name");
            if (!id) continue;
            if (saw_network) {
                diags.push_back({head.pos, "duplicate 'network' declaration"});
                continue;
            }
            saw_network = true;
            net.name = *id;
        } else if (*keyword == "gene") {
            auto id = cur.expect_ident("gene identifier");
            if (!id) continue;
            std::map<std::string, AttrValue> attrs;
            if (!parse_attrs(cur, attrs)) continue;
            auto k = require_number(attrs, "max", head.pos, diags);
            auto a = require_number(attrs, "degrade", head.pos, diags);
            if (!k || !a) continue;
            RawGene g{*id, *k, *a, Aggregation::sum};
            if (auto it = attrs.find("agg"); it != attrs.end()) {
                if (it->second.is_number() ||
                    (it->second.ident() != "sum" && it->second.ident() != "product")) {
                    diags.push_back({it->second.pos, "agg must be 'sum' or 'product'"});
                    continue;
                }
                g.agg = it->second.ident() == "product" ? Aggregation::product : Aggregation::sum;
            }
            for (const auto& [key, val] : attrs) {
                if (key != "max" && key != "degrade" && key != "agg")
                    diags.push_back({val.pos, "unknown gene attribute '" + key + "'"});
            }
            if (g.k_max <= 0.0) diags.push_back({head.pos, "gene max must be positive"});
            if (g.degrade <= 0.0) diags.push_back({head.pos, "gene degrade must be positive"});
            if (declare(*id, head.pos, Declared::What::gene)) net.genes.push_back(std::move(g));
        } else if (*keyword == "input") {
            auto id = cur.expect_ident("input identifier");
            if (!id) continue;
            std::map<std::string, AttrValue> attrs;
            if (!parse_attrs(cur, attrs)) continue;
            auto it = attrs.find("signal");
            if (it == attrs.end()) {
                diags.push_back({head.pos, "missing attribute 'signal'"});
                continue;
            }
            RawInput in{*id, 0.0};
            if (it->second.is_number()) {
                if (it->second.num() < 0.0) {
                    diags.push_back({it->second.pos, "input signal must be nonnegative"});
                    continue;
                }
                in.signal = it->second.num();
            } else {
                in.signal = it->second.ident(); // named time function
            }
            for (const auto& [key, val] : attrs) {
                if (key != "signal")
                    diags.push_back({val.pos, "unknown input attribute '" + key + "'"});
            }
            if (declare(*id, head.pos, Declared::What::input)) net.inputs.push_back(std::move(in));
        } else if (*keyword == "param") {
            auto id = cur.expect_ident("parameter identifier");
            if (!id) continue;
            std::map<std::string, AttrValue> attrs;
            if (!parse_attrs(cur, attrs)) continue;
            auto dflt = require_number(attrs, "default", head.pos, diags);
            if (!dflt) continue;
            RawParam p{*id, *dflt, std::nullopt, std::nullopt};
            if (auto it = attrs.find("min"); it != attrs.end() && it->second.is_number())
                p.min = it->second.num();
            if (auto it = attrs.find("max"); it != attrs.end() && it->second.is_number())
                p.max = it->second.num();
            for (const auto& [key, val] : attrs) {
                if (key != "default" && key != "min" && key != "max")
                    diags.push_back({val.pos, "unknown param attribute '" + key + "'"});
            }
            if (p.min && p.max && *p.min > *p.max)
                diags.push_back({head.pos, "param range is empty (min > max)"});
            if ((p.min && *dflt < *p.min) || (p.max && *dflt > *p.max))
                diags.push_back({head.pos, "param default lies outside its range"});
            if (declare(*id, head.pos, Declared::What::param)) net.params.push_back(std::move(p));
        } else if (*keyword == "edge") {
            const Token src_tok = cur.peek();
            auto src = cur.expect_ident("edge source");
            if (!src) continue;
            if (!cur.expect(TokKind::arrow, "'->'")) continue;
            const Token dst_tok = cur.peek();
            auto dst = cur.expect_ident("edge target");
            if (!dst) continue;
            auto kind_id = cur.expect_ident("edge kind ('activate' or 'repress')");
            if (!kind_id) continue;
            EdgeKind kind;
            if (*kind_id == "activate") {
                kind = EdgeKind::activate;
            } else if (*kind_id == "repress") {
                kind = EdgeKind::repress;
            } else {
                diags.push_back({head.pos, "unknown edge kind '" + *kind_id + "'"});
                continue;
            }
            if (!cur.expect(TokKind::lparen, "'('")) continue;
            std::map<std::string, AttrValue> attrs;
            if (!parse_attrs(cur, attrs)) continue;
            if (!cur.expect(TokKind::rparen, "')'")) continue;

            RawEdge e;
            e.source = *src;
            e.target = *dst;
            e.kind = kind;
            bool bad = false;
            auto scalar_attr = [&](const char* key, ScalarOrRef& out_v) {
                auto it = attrs.find(key);
                if (it == attrs.end()) {
                    diags.push_back({head.pos, std::string("missing attribute '") + key + "'"});
                    bad = true;
                    return;
                }
                if (it->second.is_number()) {
                    out_v = it->second.num();
                } else {
                    out_v = ParamRef{it->second.ident()};
                    param_refs.emplace_back(it->second.ident(), it->second.pos);
                }
            };
            scalar_attr("beta", e.beta);
            auto kv = require_number(attrs, "K", head.pos, diags);
            scalar_attr("exp", e.exp);
            if (bad || !kv) continue;
            e.K = *kv;
            for (const auto& [key, val] : attrs) {
                if (key != "beta" && key != "K" && key != "exp")
                    diags.push_back({val.pos, "unknown edge attribute '" + key + "'"});
            }
            if (const double* b = std::get_if<double>(&e.beta); b && *b <= 0.0)
                diags.push_back({head.pos, "edge beta must be positive"});
            if (e.K <= 0.0) diags.push_back({head.pos, "edge K must be positive"});
            if (const double* x = std::get_if<double>(&e.exp); x && *x < 0.0)
                diags.push_back({head.pos, "edge exp must be nonnegative"});
            pending_edges.push_back({std::move(e), head.pos, src_tok.pos, dst_tok.pos});
        } else {
            diags.push_back({head.pos, "unknown keyword '" + *keyword + "'"});
        }
    }

    if (!saw_network && diags.empty())
        diags.push_back({{1, 1}, "missing 'network' declaration"});

    // Cross-declaration checks.
    for (auto& pe : pending_edges) {
        auto s = declared.find(pe.edge.source);
        if (s == declared.end() || s->second.what == Declared::What::param)
            diags.push_back({pe.source_pos,
                             "dangling edge endpoint '" + pe.edge.source + "'"});
        auto t = declared.find(pe.edge.target);
        if (t == declared.end() || t->second.what == Declared::What::param)
            diags.push_back({pe.target_pos,
                             "dangling edge endpoint '" + pe.edge.target + "'"});
        net.edges.push_back(std::move(pe.edge));
    }
    for (const auto& [id, pos] : param_refs) {
        auto it = declared.find(id);
        if (it == declared.end() || it->second.what != Declared::What::param)
            diags.push_back({pos, "unknown parameter '" + id + "'"});
    }

    if (!diags.empty()) return result;

    canonical_sort(net);
    result.network = std::move(net);
    return result;
}

std::string format_network(const RawNetwork& net) {
    RawNetwork n = net;
    canonical_sort(n);

    std::ostringstream os;
    os << "network " << n.name << "\n";
    for (const auto& g : n.genes) {
        os << "gene " << g.id << " max=" << format_double(g.k_max)
           << " degrade=" << format_double(g.degrade);
        if (g.agg == Aggregation::product) os << " agg=product";
        os << "\n";
    }
    for (const auto& in : n.inputs) {
        os << "input " << in.id << " signal=";
        if (const double* v = std::get_if<double>(&in.signal))
            os << format_double(*v);
        else
            os << std::get<std::string>(in.signal);
        os << "\n";
    }
    for (const auto& p : n.params) {
        os << "param " << p.id << " default=" << format_double(p.default_value);
        if (p.min) os << " min=" << format_double(*p.min);
        if (p.max) os << " max=" << format_double(*p.max);
        os << "\n";
    }
    for (const auto& e : n.edges) {
        os << "edge " << e.source << " -> " << e.target << " "
           << (e.kind == EdgeKind::activate ? "activate" : "repress")
           << "(beta=" << scalar_text(e.beta) << ", K=" << format_double(e.K)
           << ", exp=" << scalar_text(e.exp) << ")\n";
    }
    return os.str();
}

} // namespace genodyn::netlang
