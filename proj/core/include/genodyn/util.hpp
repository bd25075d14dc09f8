#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace genodyn {

/// Shortest decimal form that parses back to the exact same double.
std::string format_double(double v);

// FNV-1a 64-bit, used for config hashes embedded in output artifacts.
std::uint64_t fnv1a(std::string_view s);
std::string to_hex(std::uint64_t v);

} // namespace genodyn
