#pragma once

#include <string_view>

namespace tdabands {

inline constexpr std::string_view kToolName = "tdabands";
inline constexpr std::string_view kToolVersion = "0.1.0";

} // namespace tdabands
