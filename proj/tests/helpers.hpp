#pragma once

#include "genodyn/field.hpp"
#include "genodyn/netgraph.hpp"
#include "genodyn/netlang.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open ", path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string network_path(const std::string& name) {
    return std::string(GENODYN_NETWORKS_DIR) + "/" + name;
}

inline genodyn::netlang::RawNetwork parse_ok(const std::string& text) {
    auto r = genodyn::netlang::parse_network(text);
    for (const auto& d : r.diagnostics)
        MESSAGE("diagnostic ", d.pos.line, ":", d.pos.column, ": ", d.message);
    REQUIRE(r.ok());
    return *r.network;
}

inline genodyn::graph::Network load(const std::string& name) {
    auto raw = parse_ok(read_file(network_path(name)));
    auto v = genodyn::graph::validate(raw);
    for (const auto& s : v.violations) MESSAGE("violation: ", s);
    REQUIRE(v.ok());
    return std::move(*v.network);
}

inline genodyn::graph::Network from_text(const std::string& text) {
    auto v = genodyn::graph::validate(parse_ok(text));
    for (const auto& s : v.violations) MESSAGE("violation: ", s);
    REQUIRE(v.ok());
    return std::move(*v.network);
}

} // namespace testutil
