#pragma once

namespace radonkit {

inline constexpr const char* kVersion = "0.1.0";

}
