#pragma once

namespace transpec {

inline constexpr const char* kVersion = "0.1.0";

} // namespace transpec
