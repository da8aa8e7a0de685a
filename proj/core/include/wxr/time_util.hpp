#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace wxr {

using TimePoint = std::chrono::sys_seconds;

/// Model timestep shared by every backend.
inline constexpr std::chrono::hours kModelTimestep{6};

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_utc(TimePoint t);

/// Parses `YYYY-MM-DDTHH:MM:SSZ` (trailing Z optional) or `YYYY-MM-DD HH:MM`.
/// Throws wxr::Error(InvalidArgument) on malformed input.
TimePoint parse_utc(std::string_view text);

}  // namespace wxr
