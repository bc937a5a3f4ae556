#pragma once

namespace ghostsim::cli {
inline constexpr const char* kToolVersion = "ghostsim 0.1.0";
}
