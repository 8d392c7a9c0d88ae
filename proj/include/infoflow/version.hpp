#pragma once

namespace infoflow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace infoflow
