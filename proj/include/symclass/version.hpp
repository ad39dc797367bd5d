#pragma once

namespace symclass {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace symclass
