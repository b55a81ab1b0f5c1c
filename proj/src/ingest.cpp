#include "gridscope/ingest.hpp"

#include "csv.hpp"
#include "gridscope/error.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>

namespace gridscope::ingest {

namespace {

constexpr const char* kModule = "ingest";

struct LineError {
  std::string message;
};

double checked_weight(double w) {
  if (!std::isfinite(w)) throw LineError{"weight must be finite"};
  if (w < 0.0) throw LineError{"weight must be >= 0"};
  return w;
}

Timestamp checked_ts(const std::string& text) {
  try {
    return parse_rfc3339(text);
  } catch (const InputError&) {
    throw LineError{"unparsable timestamp '" + text + "'"};
  }
}

ActivityEvent parse_json_line(const std::string& line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw LineError{"not valid JSON"};
  }
  if (!obj.is_object()) throw LineError{"expected a JSON object"};
  auto text_field = [&](const char* name) {
    auto it = obj.find(name);
    if (it == obj.end() || !it->is_string()) throw LineError{std::string("missing string field \"") + name + "\""};
    std::string v = it->get<std::string>();
    if (v.empty()) throw LineError{std::string("empty field \"") + name + "\""};
    return v;
  };
  ActivityEvent e;
  e.ts = checked_ts(text_field("ts"));
  e.entity_id = text_field("entity");
  e.topic_id = text_field("topic");
  if (auto it = obj.find("weight"); it != obj.end() && !it->is_null()) {
    if (!it->is_number()) throw LineError{"weight must be a number"};
    e.weight = checked_weight(it->get<double>());
  }
  return e;
}

struct CsvLayout {
  std::size_t ts = 0, entity = 1, topic = 2;
  std::optional<std::size_t> weight;
  std::size_t width = 3;
};

CsvLayout parse_csv_header(const std::string& line) {
  const auto fields = csv::split_line(line);
  CsvLayout layout;
  std::optional<std::size_t> ts, entity, topic;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "ts") ts = i;
    else if (fields[i] == "entity") entity = i;
    else if (fields[i] == "topic") topic = i;
    else if (fields[i] == "weight") layout.weight = i;
  }
  if (!ts || !entity || !topic) throw InputError(kModule, "CSV event header must contain ts,entity,topic[,weight]");
  layout.ts = *ts;
  layout.entity = *entity;
  layout.topic = *topic;
  layout.width = fields.size();
  return layout;
}

ActivityEvent parse_csv_line(const std::string& line, const CsvLayout& layout) {
  const auto fields = csv::split_line(line);
  if (fields.size() != layout.width) {
    throw LineError{"expected " + std::to_string(layout.width) + " fields, got " + std::to_string(fields.size())};
  }
  ActivityEvent e;
  e.ts = checked_ts(fields[layout.ts]);
  e.entity_id = fields[layout.entity];
  e.topic_id = fields[layout.topic];
  if (e.entity_id.empty() || e.topic_id.empty()) throw LineError{"empty entity or topic"};
  if (layout.weight && !fields[*layout.weight].empty()) {
    auto w = csv::parse_double(fields[*layout.weight]);
    if (!w) throw LineError{"cannot parse weight '" + fields[*layout.weight] + "'"};
    e.weight = checked_weight(*w);
  }
  return e;
}

}  // namespace

ParseResult parse_events(std::istream& in, ParseMode mode, EventFormat format) {
  if (!in) throw InputError(kModule, "event stream is unreadable");
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;

  if (!csv::next_record(in, line, line_no)) return result;
  if (format == EventFormat::Auto) {
    format = csv::trim(line).front() == '{' ? EventFormat::JsonLines : EventFormat::Csv;
  }
  std::optional<CsvLayout> layout;
  bool pending = true;
  if (format == EventFormat::Csv) {
    layout = parse_csv_header(line);
    pending = false;
  }

  while (pending || csv::next_record(in, line, line_no)) {
    pending = false;
    try {
      result.events.push_back(layout ? parse_csv_line(line, *layout) : parse_json_line(line));
    } catch (const LineError& err) {
      if (mode == ParseMode::Strict) {
        throw InputError(kModule, "line " + std::to_string(line_no) + ": " + err.message);
      }
      result.issues.push_back({line_no, err.message});
    }
  }
  if (in.bad()) throw InputError(kModule, "error while reading event stream");
  return result;
}

ParseResult read_events(const std::filesystem::path& path, ParseMode mode) {
  std::ifstream in(path);
  if (!in) throw InputError(kModule, "cannot open event file '" + path.string() + "'");
  const auto format = path.extension() == ".csv" ? EventFormat::Csv : EventFormat::Auto;
  return parse_events(in, mode, format);
}

void write_events_jsonl(std::ostream& out, std::span<const ActivityEvent> events) {
  for (const auto& e : events) {
    nlohmann::ordered_json obj;
    obj["ts"] = format_rfc3339(e.ts);
    obj["entity"] = e.entity_id;
    obj["topic"] = e.topic_id;
    obj["weight"] = e.weight;
    out << obj.dump() << '\n';
  }
}

void WindowSpec::validate() const {
  if (width.count() <= 0) throw InputError(kModule, "window width must be positive");
  if (count < 1) throw InputError(kModule, "window count must be at least 1");
}

TimeWindow WindowSpec::window(int index) const {
  if (index < 0 || index >= count) {
    throw NotFoundError(kModule, "window " + std::to_string(index) + " out of range [0, " + std::to_string(count) + ")");
  }
  const Timestamp start = origin + width * index;
  return TimeWindow{start, start + width};
}

std::vector<TimeWindow> WindowSpec::windows() const {
  std::vector<TimeWindow> out;
  for (int i = 0; i < count; ++i) out.push_back(window(i));
  return out;
}

std::optional<int> WindowSpec::index_of(Timestamp t) const {
  if (t < origin) return std::nullopt;
  const auto k = (t - origin) / width;
  if (k >= count) return std::nullopt;
  return static_cast<int>(k);
}

std::vector<std::string> WindowedProfiles::entities() const {
  std::vector<std::string> out;
  for (const auto& [e, _] : by_entity) out.push_back(e);
  return out;
}

const topics::ActivityProfile& WindowedProfiles::at(const std::string& entity, int window) const {
  auto it = by_entity.find(entity);
  if (it == by_entity.end()) throw NotFoundError(kModule, "unknown entity '" + entity + "'");
  if (window < 0 || window >= static_cast<int>(it->second.size())) {
    throw NotFoundError(kModule, "unknown window " + std::to_string(window));
  }
  return it->second[static_cast<std::size_t>(window)];
}

double WindowedProfiles::total_weight() const {
  double total = 0.0;
  for (const auto& [e, profiles] : by_entity)
    for (const auto& p : profiles)
      for (const auto& [t, w] : p.weights) total += w;
  return total;
}

WindowedProfiles window_profiles(std::span<const ActivityEvent> events, const WindowSpec& spec,
                                 const std::optional<std::set<std::string>>& entity_filter) {
  spec.validate();
  WindowedProfiles out;
  out.spec = spec;
  auto profiles_for = [&](const std::string& entity) -> std::vector<topics::ActivityProfile>& {
    auto [it, fresh] = out.by_entity.try_emplace(entity);
    if (fresh) {
      for (int i = 0; i < spec.count; ++i) it->second.push_back({entity, spec.window(i), {}});
    }
    return it->second;
  };
  for (const auto& e : events) {
    if (entity_filter && !entity_filter->contains(e.entity_id)) continue;
    auto& profiles = profiles_for(e.entity_id);
    auto index = spec.index_of(e.ts);
    if (!index) {
      ++out.dropped;
      continue;
    }
    profiles[static_cast<std::size_t>(*index)].weights[e.topic_id] += e.weight;
  }
  return out;
}

WindowedProfiles merge_profiles(const WindowedProfiles& a, const WindowedProfiles& b) {
  if (!(a.spec == b.spec)) throw InputError(kModule, "cannot merge profiles built with different window specs");
  WindowedProfiles out = a;
  out.dropped += b.dropped;
  for (const auto& [entity, profiles] : b.by_entity) {
    auto [it, fresh] = out.by_entity.try_emplace(entity, profiles);
    if (fresh) continue;
    for (std::size_t i = 0; i < profiles.size(); ++i)
      for (const auto& [topic, w] : profiles[i].weights) it->second[i].weights[topic] += w;
  }
  return out;
}

}  // namespace gridscope::ingest
