#pragma once

namespace parid {

inline constexpr const char *kVersion = "0.1.0";

} // namespace parid
