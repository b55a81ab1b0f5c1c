#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace gridscope {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// RFC 3339 date-time, e.g. "2016-01-01T00:00:00Z" or
// "2016-01-01T08:30:00.250+02:00". Sub-millisecond digits are truncated.
// Throws InputError.
Timestamp parse_rfc3339(std::string_view text);

// UTC, "Z" suffix; milliseconds shown only when nonzero.
std::string format_rfc3339(Timestamp t);

// Half-open [start, end).
struct TimeWindow {
  Timestamp start;
  Timestamp end;

  bool contains(Timestamp t) const { return start <= t && t < end; }
  bool overlaps(const TimeWindow& o) const { return start < o.end && o.start < end; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

}  // namespace gridscope
