#include "gridscope/serialize.hpp"

#include "gridscope/error.hpp"

#include <fstream>
#include <map>

namespace gridscope::json {

namespace {

constexpr const char* kModule = "json";

void put_coords(Json& obj, const sd::Cell& cell) {
  static const char* const kAxes[] = {"x", "y", "z"};
  for (std::size_t a = 0; a < cell.size() && a < 3; ++a) obj[kAxes[a]] = cell[a];
}

}  // namespace

Json assignment(const sd::GridAssignment& a) {
  Json doc;
  doc["shape"] = a.shape.sides();
  Json cells = Json::object();
  for (const auto& [id, cell] : a.cells) cells[id] = cell;
  Json paths = Json::object();
  for (const auto& [id, path] : a.paths) paths[id] = path.str();
  doc["cells"] = std::move(cells);
  doc["paths"] = std::move(paths);
  return doc;
}

sd::GridAssignment parse_assignment(const nlohmann::json& doc) {
  try {
    sd::GridAssignment a;
    a.shape = sd::GridShape(doc.at("shape").get<std::vector<int>>());
    for (const auto& [id, cell] : doc.at("cells").items()) {
      auto c = cell.get<sd::Cell>();
      if (!a.shape.contains(c)) throw InputError(kModule, "cell of '" + id + "' lies outside the grid");
      a.cells.emplace(id, std::move(c));
    }
    if (doc.contains("paths")) {
      for (const auto& [id, path] : doc.at("paths").items()) {
        if (!a.cells.contains(id)) throw InputError(kModule, "path for unplaced id '" + id + "'");
        sd::SplitPath p(path.get<std::string>());
        if (sd::resolve_cell(p, a.shape) != a.cells.at(id)) {
          throw InputError(kModule, "path of '" + id + "' does not resolve to its cell");
        }
        a.paths.emplace(id, std::move(p));
      }
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("malformed assignment: ") + e.what());
  }
}

sd::GridAssignment read_assignment(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("malformed assignment JSON: ") + e.what());
  }
  return parse_assignment(doc);
}

Json layout_score(const metrics::LayoutScore& s) {
  Json doc;
  doc["overlap_pairs"] = s.overlap_pairs;
  doc["heterogeneity"] = s.heterogeneity;
  doc["topology_agreement"] = s.topology_agreement;
  doc["geometry_correlation"] = s.geometry_correlation ? Json(*s.geometry_correlation) : Json(nullptr);
  return doc;
}

Json window(const TimeWindow& w) {
  Json doc;
  doc["start"] = format_rfc3339(w.start);
  doc["end"] = format_rfc3339(w.end);
  return doc;
}

Json window(int index, const TimeWindow& w) {
  Json doc;
  doc["index"] = index;
  doc["start"] = format_rfc3339(w.start);
  doc["end"] = format_rfc3339(w.end);
  return doc;
}

Json grid_cells(const topics::TopicGrid& grid) {
  Json cells = Json::array();
  for (const auto& c : grid.cells) {
    Json obj;
    put_coords(obj, c.cell);
    obj["topic_id"] = c.topic_id;
    obj["keyword"] = c.keyword();
    obj["keywords"] = c.keywords;
    obj["value"] = c.value;
    obj["share"] = c.share;
    cells.push_back(std::move(obj));
  }
  return cells;
}

Json time_stack(const topics::TimeStack& stack, std::span<const topics::TopicInfo> topic_list) {
  std::map<std::string, const topics::TopicInfo*> by_id;
  for (const auto& t : topic_list) by_id[t.topic_id] = &t;

  std::vector<std::pair<std::size_t, std::string>> ordered;
  for (const auto& [topic, cell] : stack.placement) ordered.emplace_back(stack.shape.linear_index(cell), topic);
  std::sort(ordered.begin(), ordered.end());

  auto base_cell = [&](const std::string& topic) {
    Json obj;
    put_coords(obj, stack.placement.at(topic));
    obj["topic_id"] = topic;
    auto it = by_id.find(topic);
    obj["keyword"] = it == by_id.end() ? "" : it->second->keywords.front();
    return obj;
  };

  Json doc;
  doc["axis"] = topics::to_string(stack.axis);
  doc["shape"] = stack.shape.sides();
  Json windows = Json::array();
  for (std::size_t i = 0; i < stack.windows.size(); ++i) windows.push_back(window(static_cast<int>(i), stack.windows[i]));
  doc["windows"] = std::move(windows);
  Json placement = Json::array();
  for (const auto& [index, topic] : ordered) placement.push_back(base_cell(topic));
  doc["placement"] = std::move(placement);
  Json layers = Json::array();
  for (std::size_t i = 0; i < stack.layers.size(); ++i) {
    Json layer = window(static_cast<int>(i), stack.windows[i]);
    Json cells = Json::array();
    for (const auto& [index, topic] : ordered) {
      Json obj = base_cell(topic);
      obj["value"] = stack.layers[i].at(topic);
      cells.push_back(std::move(obj));
    }
    layer["cells"] = std::move(cells);
    layers.push_back(std::move(layer));
  }
  doc["layers"] = std::move(layers);
  return doc;
}

std::vector<topics::TopicInfo> parse_topics(const nlohmann::json& doc) {
  if (!doc.is_array()) throw InputError(kModule, "topic file must be a JSON array");
  std::vector<topics::TopicInfo> out;
  try {
    for (const auto& t : doc) {
      topics::TopicInfo info;
      info.topic_id = t.at("topic_id").get<std::string>();
      info.keywords = t.at("keywords").get<std::vector<std::string>>();
      out.push_back(std::move(info));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("malformed topic entry: ") + e.what());
  }
  topics::validate_topics(out);
  return out;
}

std::vector<topics::TopicInfo> read_topics(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("malformed topic JSON: ") + e.what());
  }
  return parse_topics(doc);
}

std::vector<topics::TopicInfo> import_topics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(kModule, "cannot open topic file '" + path.string() + "'");
  return read_topics(in);
}

Json topics_json(std::span<const topics::TopicInfo> topic_list) {
  Json arr = Json::array();
  for (const auto& t : topic_list) {
    Json obj;
    obj["topic_id"] = t.topic_id;
    obj["keywords"] = t.keywords;
    arr.push_back(std::move(obj));
  }
  return arr;
}

}  // namespace gridscope::json
