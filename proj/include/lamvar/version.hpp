#pragma once

namespace lamvar {

inline constexpr const char* kToolName = "lamvar";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace lamvar
