#pragma once

namespace netlqr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace netlqr
