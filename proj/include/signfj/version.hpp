#pragma once

namespace signfj {

inline constexpr const char* kVersion = "0.1.0";

} // namespace signfj
