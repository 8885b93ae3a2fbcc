#pragma once

namespace confadj {

inline constexpr const char* version_string = "0.1.0";

// Bumped whenever the JSON summary/report layout changes shape.
inline constexpr int schema_version = 1;

} // namespace confadj
