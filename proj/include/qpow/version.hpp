#pragma once

namespace qpow {

inline constexpr const char* version = "1.0.0";

}
