#pragma once

namespace tourmon {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tourmon
