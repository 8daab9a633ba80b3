#pragma once

namespace kakeya {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kakeya
