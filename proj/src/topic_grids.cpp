#include "gridscope/topic_grids.hpp"

#include "gridscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace gridscope::topics {

namespace {

constexpr const char* kModule = "topic_grids";

void check_known(const TopicValues& values, std::span<const std::string> universe, const std::string& what) {
  for (const auto& [topic, w] : values) {
    if (!std::binary_search(universe.begin(), universe.end(), topic)) {
      throw InputError(kModule, what + " references unknown topic '" + topic + "'");
    }
  }
}

void check_weights(const ActivityProfile& p, std::span<const std::string> universe) {
  check_known(p.weights, universe, "profile of '" + p.entity_id + "'");
  for (const auto& [topic, w] : p.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InputError(kModule, "profile of '" + p.entity_id + "' has invalid weight for '" + topic + "'");
    }
  }
}

void check_universe(std::span<const std::string> universe) {
  if (universe.empty()) throw InputError(kModule, "topic universe is empty");
  if (!std::is_sorted(universe.begin(), universe.end()) ||
      std::adjacent_find(universe.begin(), universe.end()) != universe.end()) {
    throw InputError(kModule, "topic universe must be sorted and unique");
  }
}

RiskGrid compare(const ActivityProfile& current, const TopicValues& baseline, std::span<const std::string> universe,
                 double lambda, RiskKind kind) {
  RiskGrid out;
  out.entity_id = current.entity_id;
  out.window = current.window;
  out.kind = kind;
  out.current = normalize_profile(current.weights, lambda, universe);
  out.baseline = baseline;
  for (const auto& topic : universe) out.values[topic] = excess_risk(out.current.at(topic), baseline.at(topic));
  return out;
}

void check_series(std::span<const WindowValues> series) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(series[i].window.start < series[i].window.end)) throw InputError(kModule, "time window with start >= end");
    if (i > 0 && !(series[i - 1].window.end <= series[i].window.start)) {
      throw InputError(kModule, "time windows must be strictly increasing and non-overlapping");
    }
  }
}

TopicValues fill_layer(const TopicValues& values, const std::map<std::string, sd::Cell>& placement) {
  TopicValues layer;
  for (const auto& [topic, cell] : placement) layer[topic] = 0.0;
  for (const auto& [topic, v] : values) {
    auto it = layer.find(topic);
    if (it == layer.end()) throw InputError(kModule, "time series references unknown topic '" + topic + "'");
    it->second = v;
  }
  return layer;
}

}  // namespace

void validate_topics(std::span<const TopicInfo> topics) {
  std::set<std::string> seen;
  for (const auto& t : topics) {
    if (t.topic_id.empty()) throw InputError(kModule, "topic with empty id");
    if (t.keywords.empty()) throw InputError(kModule, "topic '" + t.topic_id + "' has no keywords");
    if (!seen.insert(t.topic_id).second) throw InputError(kModule, "duplicate topic id '" + t.topic_id + "'");
  }
}

std::vector<std::string> topic_universe(std::span<const TopicInfo> topics) {
  validate_topics(topics);
  std::vector<std::string> ids;
  for (const auto& t : topics) ids.push_back(t.topic_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

TopicValues normalize_profile(const TopicValues& weights, double lambda, std::span<const std::string> universe) {
  check_universe(universe);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError(kModule, "smoothing must be a finite value >= 0");
  check_known(weights, universe, "weights");

  double total = 0.0;
  for (const auto& [topic, w] : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError(kModule, "weight for '" + topic + "' must be finite and >= 0");
    total += w;
  }
  const double k = static_cast<double>(universe.size());
  const double denom = total + lambda * k;

  TopicValues q;
  for (const auto& topic : universe) {
    auto it = weights.find(topic);
    const double w = it == weights.end() ? 0.0 : it->second;
    q[topic] = denom > 0.0 ? (w + lambda) / denom : 1.0 / k;
  }
  return q;
}

const char* to_string(RiskKind kind) { return kind == RiskKind::Self ? "self" : "peer"; }

double excess_risk(double current_share, double baseline_share) {
  constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  if (!(current_share > baseline_share)) return 0.0;
  if (baseline_share <= 0.0) return kBelowOne;
  const double delta = (current_share - baseline_share) / baseline_share;
  return std::min(delta / (1.0 + delta), kBelowOne);
}

RiskGrid self_risk(const ActivityProfile& current, std::span<const ActivityProfile> history,
                   std::span<const std::string> universe, double lambda) {
  check_universe(universe);
  check_weights(current, universe);
  TopicValues pooled;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& h = history[i];
    if (h.entity_id != current.entity_id) {
      throw InputError(kModule, "history profile belongs to '" + h.entity_id + "', not '" + current.entity_id + "'");
    }
    if (h.window.overlaps(current.window) || h.window.start >= current.window.start) {
      throw InputError(kModule, "history windows must precede and not overlap the current window");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (history[j].window.overlaps(h.window)) throw InputError(kModule, "history windows overlap each other");
    }
    check_weights(h, universe);
    for (const auto& [topic, w] : h.weights) pooled[topic] += w;
  }

  if (history.empty()) {
    RiskGrid out;
    out.entity_id = current.entity_id;
    out.window = current.window;
    out.kind = RiskKind::Self;
    out.current = normalize_profile(current.weights, lambda, universe);
    for (const auto& topic : universe) out.values[topic] = 0.0;
    out.warnings.push_back("no history for entity '" + current.entity_id + "'; self risk is zero");
    return out;
  }
  return compare(current, normalize_profile(pooled, lambda, universe), universe, lambda, RiskKind::Self);
}

RiskGrid peer_risk(const ActivityProfile& current, std::span<const ActivityProfile> peers,
                   std::span<const std::string> universe, double lambda) {
  check_universe(universe);
  check_weights(current, universe);
  if (peers.empty()) throw InputError(kModule, "peer set is empty");
  TopicValues baseline;
  for (const auto& topic : universe) baseline[topic] = 0.0;
  for (const auto& p : peers) {
    if (p.entity_id == current.entity_id) {
      throw InputError(kModule, "entity '" + current.entity_id + "' appears among its own peers");
    }
    check_weights(p, universe);
    for (const auto& [topic, q] : normalize_profile(p.weights, lambda, universe)) baseline[topic] += q;
  }
  for (auto& [topic, q] : baseline) q /= static_cast<double>(peers.size());
  return compare(current, baseline, universe, lambda, RiskKind::Peer);
}

TopicGrid build_topic_grid(const sd::GridAssignment& assignment, std::span<const TopicInfo> topics,
                           const TopicValues& values) {
  validate_topics(topics);
  if (topics.size() != assignment.cells.size()) {
    throw InputError(kModule, "assignment places " + std::to_string(assignment.cells.size()) + " ids but there are " +
                                  std::to_string(topics.size()) + " topics");
  }
  std::map<std::string, const TopicInfo*> by_id;
  for (const auto& t : topics) {
    if (!assignment.cells.contains(t.topic_id)) {
      throw InputError(kModule, "topic '" + t.topic_id + "' is not placed by the assignment");
    }
    by_id[t.topic_id] = &t;
  }
  double total = 0.0;
  for (const auto& [topic, v] : values) {
    if (!by_id.contains(topic)) throw InputError(kModule, "values reference unknown topic '" + topic + "'");
    total += v;
  }

  TopicGrid grid;
  grid.shape = assignment.shape;
  grid.cells.resize(assignment.cells.size());
  for (const auto& [topic, cell] : assignment.cells) {
    GridCell& gc = grid.cells.at(assignment.shape.linear_index(cell));
    gc.cell = cell;
    gc.topic_id = topic;
    gc.keywords = by_id.at(topic)->keywords;
    auto it = values.find(topic);
    gc.value = it == values.end() ? 0.0 : it->second;
    gc.share = total > 0.0 ? gc.value / total : 0.0;
  }
  return grid;
}

const char* to_string(TimeAxis axis) { return axis == TimeAxis::Curtain ? "curtain" : "shower"; }

TimeStack topic_curtain(std::span<const TopicInfo> topics, const PointCloud& embedding1d,
                        std::span<const WindowValues> series) {
  validate_topics(topics);
  if (topics.empty()) throw InputError(kModule, "curtain needs at least one topic");
  if (embedding1d.dims() != 1) throw InputError(kModule, "curtain embedding must be one-dimensional");
  check_series(series);

  std::vector<std::pair<std::string, double>> coords;
  for (const auto& t : topics) {
    auto i = embedding1d.index_of(t.topic_id);
    if (!i) throw InputError(kModule, "topic '" + t.topic_id + "' is missing from the 1D embedding");
    coords.emplace_back(t.topic_id, embedding1d[*i].coords[0]);
  }

  TimeStack stack;
  stack.axis = TimeAxis::Curtain;
  stack.shape = sd::GridShape({static_cast<int>(topics.size())});
  for (const auto& [topic, rank] : sd::sd_1d(coords)) stack.placement[topic] = sd::Cell{rank};
  for (const auto& w : series) {
    stack.windows.push_back(w.window);
    stack.layers.push_back(fill_layer(w.values, stack.placement));
  }
  return stack;
}

TimeStack topic_shower(const sd::GridAssignment& assignment, std::span<const WindowValues> series) {
  check_series(series);
  TimeStack stack;
  stack.axis = TimeAxis::Shower;
  stack.shape = assignment.shape;
  stack.placement = assignment.cells;
  for (const auto& w : series) {
    stack.windows.push_back(w.window);
    stack.layers.push_back(fill_layer(w.values, stack.placement));
  }
  return stack;
}

}  // namespace gridscope::topics
