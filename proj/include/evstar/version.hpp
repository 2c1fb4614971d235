#pragma once

namespace evstar {

inline constexpr const char* kVersion = "evstar-0.1.0";

}  // namespace evstar
