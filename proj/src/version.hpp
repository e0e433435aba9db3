#pragma once

namespace ipdyn {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace ipdyn
