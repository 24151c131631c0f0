#pragma once

namespace rrdps {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rrdps
