#pragma once

namespace envxfer {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace envxfer
