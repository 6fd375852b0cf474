#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace procdrift {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts "YYYY-MM-DD[Thh:mm[:ss[.fff]]][Z|+hh:mm|-hh:mm]"; a space may replace 'T'.
// Values without an offset are taken as UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

// Always "YYYY-MM-DDThh:mm:ss.fffZ".
std::string format_iso8601(Timestamp ts);

// strptime-style pattern (%Y %m %d %H %M %S %y %b and literals) interpreted as UTC.
// The pattern "iso8601" delegates to parse_iso8601.
std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view pattern);

}  // namespace procdrift
