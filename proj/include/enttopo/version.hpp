#pragma once

namespace enttopo {

inline constexpr const char* kVersion = "0.1.0";

} // namespace enttopo
