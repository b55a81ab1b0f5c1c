#pragma once

// Topic grids: behavioural activity and risk values laid out on a shared
// split-diffuse assignment, plus the curtain (1D x time) and shower
// (2D x time) stacks.

#include "gridscope/point_cloud.hpp"
#include "gridscope/split_diffuse.hpp"
#include "gridscope/time.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace gridscope::topics {

// Topic ids double as point ids in the topic embedding.
struct TopicInfo {
  std::string topic_id;
  std::vector<std::string> keywords;  // most relevant first
};

void validate_topics(std::span<const TopicInfo> topics);
std::vector<std::string> topic_universe(std::span<const TopicInfo> topics);

using TopicValues = std::map<std::string, double>;

struct ActivityProfile {
  std::string entity_id;
  TimeWindow window;
  TopicValues weights;
};

constexpr double kDefaultSmoothing = 0.5;

// q_t = (w_t + lambda) / (sum_u w_u + lambda * |T|) over the universe T.
// With lambda = 0 and no activity at all the limit lambda -> 0+ (uniform)
// is returned.
TopicValues normalize_profile(const TopicValues& weights, double lambda, std::span<const std::string> universe);

enum class RiskKind { Self, Peer };
const char* to_string(RiskKind kind);

struct RiskGrid {
  std::string entity_id;
  TimeWindow window;
  RiskKind kind = RiskKind::Self;
  TopicValues values;  // each in [0, 1)
  TopicValues current;
  TopicValues baseline;
  std::vector<std::string> warnings;
};

// Delta = max(0, c - b) / b squashed to Delta / (1 + Delta). A zero baseline
// with positive current share saturates just below 1.
double excess_risk(double current_share, double baseline_share);

// Baseline: the pooled (summed) history of the same entity.
RiskGrid self_risk(const ActivityProfile& current, std::span<const ActivityProfile> history,
                   std::span<const std::string> universe, double lambda = kDefaultSmoothing);

// Baseline: equal-weight mean of each peer's normalized distribution.
RiskGrid peer_risk(const ActivityProfile& current, std::span<const ActivityProfile> peers,
                   std::span<const std::string> universe, double lambda = kDefaultSmoothing);

struct GridCell {
  sd::Cell cell;
  std::string topic_id;
  std::vector<std::string> keywords;
  double value = 0.0;
  double share = 0.0;  // value / sum of values, 0 when the sum is 0

  const std::string& keyword() const { return keywords.front(); }
};

// Cells ordered by lattice position, axis 0 fastest.
struct TopicGrid {
  sd::GridShape shape;
  std::vector<GridCell> cells;
};

TopicGrid build_topic_grid(const sd::GridAssignment& assignment, std::span<const TopicInfo> topics,
                           const TopicValues& values);

enum class TimeAxis { Curtain, Shower };
const char* to_string(TimeAxis axis);

struct WindowValues {
  TimeWindow window;
  TopicValues values;
};

struct TimeStack {
  TimeAxis axis = TimeAxis::Curtain;
  sd::GridShape shape;                     // [k] for a curtain
  std::map<std::string, sd::Cell> placement;
  std::vector<TimeWindow> windows;         // strictly increasing
  std::vector<TopicValues> layers;         // one per window, every placed topic present
};

// Topics ranked along one axis by sd_1d over a 1D topic embedding.
TimeStack topic_curtain(std::span<const TopicInfo> topics, const PointCloud& embedding1d,
                        std::span<const WindowValues> series);

// One 2D layer per window, all sharing `assignment`.
TimeStack topic_shower(const sd::GridAssignment& assignment, std::span<const WindowValues> series);

}  // namespace gridscope::topics
