#pragma once

namespace clsel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace clsel
