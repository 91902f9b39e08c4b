#pragma once

namespace sense {

inline constexpr const char* version = "0.1.0";

}  // namespace sense
