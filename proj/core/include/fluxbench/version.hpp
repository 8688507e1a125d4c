#pragma once

namespace fluxbench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fluxbench
