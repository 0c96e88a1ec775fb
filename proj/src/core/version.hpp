#pragma once

namespace fredlab {
inline constexpr const char* kVersion = "0.1.0";
}
