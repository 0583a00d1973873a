#pragma once

#include <string_view>

namespace hydrobell {

inline constexpr std::string_view kToolName = "hydrobell";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace hydrobell
