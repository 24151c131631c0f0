#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rrdps {

/// Round-trip decimal rendering of a double (%.17g), locale-independent.
std::string format_double(double v);

/// 64-bit FNV-1a of a byte string, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace rrdps
