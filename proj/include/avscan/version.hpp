#pragma once

namespace avscan {

inline constexpr char kToolVersion[] = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace avscan
