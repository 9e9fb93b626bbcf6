#pragma once

namespace ibdwaves {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ibdwaves
