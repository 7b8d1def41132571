#pragma once

namespace cejulia {

inline constexpr const char* kVersion = "0.1.0";

}
