#pragma once

namespace eigenmc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eigenmc
