#pragma once

namespace wpk {

inline constexpr const char* version_string = "wavepacket 0.1.0";

}  // namespace wpk
