#pragma once

namespace genodyn {

inline constexpr const char* version = "0.1.0";

} // namespace genodyn
