#pragma once

namespace satqkd {

inline constexpr const char* kToolName = "satqkd";
inline constexpr const char* kToolVersion = "0.1.0";

// Bumped whenever any emitted CSV header changes.
inline constexpr int kCsvSchemaVersion = 1;

}  // namespace satqkd
