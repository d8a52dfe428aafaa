#pragma once

namespace stretchlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stretchlab
