#pragma once

namespace billiards {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace billiards
