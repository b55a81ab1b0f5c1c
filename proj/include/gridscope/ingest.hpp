#pragma once

// Topicized activity events and their aggregation into per-entity,
// per-window activity profiles.
//
// Event files are JSON lines
//   {"ts":"2016-01-01T00:00:00Z","entity":"u1","topic":"t1","weight":2}
// or CSV with header ts,entity,topic[,weight]. Weight defaults to 1.

#include "gridscope/time.hpp"
#include "gridscope/topic_grids.hpp"

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace gridscope::ingest {

struct ActivityEvent {
  Timestamp ts;
  std::string entity_id;
  std::string topic_id;
  double weight = 1.0;

  friend bool operator==(const ActivityEvent&, const ActivityEvent&) = default;
};

enum class ParseMode { Strict, Lenient };
enum class EventFormat { Auto, JsonLines, Csv };

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<ActivityEvent> events;
  std::vector<ParseIssue> issues;  // skipped lines (lenient mode)
};

// Strict mode throws InputError at the first malformed line.
ParseResult parse_events(std::istream& in, ParseMode mode = ParseMode::Strict, EventFormat format = EventFormat::Auto);
ParseResult read_events(const std::filesystem::path& path, ParseMode mode = ParseMode::Strict);

void write_events_jsonl(std::ostream& out, std::span<const ActivityEvent> events);

// `count` contiguous half-open windows of equal width starting at origin.
struct WindowSpec {
  Timestamp origin;
  std::chrono::milliseconds width{0};
  int count = 0;

  void validate() const;
  TimeWindow window(int index) const;
  std::vector<TimeWindow> windows() const;
  // Index of the window containing t, if any.
  std::optional<int> index_of(Timestamp t) const;

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct WindowedProfiles {
  WindowSpec spec;
  // entity -> one profile per window, in window order
  std::map<std::string, std::vector<topics::ActivityProfile>> by_entity;
  std::size_t dropped = 0;  // events outside the window range

  std::vector<std::string> entities() const;
  const topics::ActivityProfile& at(const std::string& entity, int window) const;
  double total_weight() const;
};

// Every entity present in `events` (after the filter) gets a profile for
// every window, empty where it had no activity.
WindowedProfiles window_profiles(std::span<const ActivityEvent> events, const WindowSpec& spec,
                                 const std::optional<std::set<std::string>>& entity_filter = std::nullopt);

// Sums weights of two aggregations over the same spec.
WindowedProfiles merge_profiles(const WindowedProfiles& a, const WindowedProfiles& b);

}  // namespace gridscope::ingest
