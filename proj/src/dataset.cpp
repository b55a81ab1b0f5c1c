#include "gridscope/dataset.hpp"

#include "gridscope/embedding_io.hpp"
#include "gridscope/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace gridscope::pipeline {

namespace {

constexpr const char* kModule = "pipeline";

topics::TopicValues zeros(const std::vector<std::string>& universe) {
  topics::TopicValues v;
  for (const auto& t : universe) v[t] = 0.0;
  return v;
}

void append_warnings(std::vector<std::string>& out, const std::vector<std::string>& more) {
  for (const auto& w : more)
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
}

}  // namespace

DatasetManifest read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError(kModule, "cannot open dataset manifest '" + file.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("malformed manifest: ") + e.what());
  }
  const auto base = file.parent_path();
  auto resolve = [&](const std::string& p) { std::filesystem::path q(p); return q.is_absolute() ? q : base / q; };

  DatasetManifest m;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "topics") m.topics = resolve(value.get<std::string>());
      else if (key == "events") m.events = resolve(value.get<std::string>());
      else if (key == "vectors" && !value.is_null()) m.vectors = resolve(value.get<std::string>());
      else if (key == "embedding" && !value.is_null()) m.embedding = resolve(value.get<std::string>());
      else if (key == "metric") m.metric = embed::parse_metric(value.get<std::string>());
      else if (key == "lambda") m.lambda = value.get<double>();
      else if (key == "history_windows" && !value.is_null()) m.history_windows = value.get<int>();
      else if (key == "shape" && !value.is_null()) {
        m.shape = value.is_string() ? sd::GridShape::parse(value.get<std::string>())
                                    : sd::GridShape(value.get<std::vector<int>>());
      } else if (key == "windows") {
        m.windows.origin = parse_rfc3339(value.at("origin").get<std::string>());
        m.windows.width = std::chrono::seconds{value.at("width_seconds").get<std::int64_t>()};
        m.windows.count = value.at("count").get<int>();
      } else if (key != "vectors" && key != "embedding" && key != "history_windows" && key != "shape") {
        throw InputError(kModule, "unknown manifest field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("bad manifest field: ") + e.what());
  }
  if (!doc.contains("windows")) throw InputError(kModule, "manifest needs a \"windows\" object");
  if (!m.vectors && !m.embedding) throw InputError(kModule, "manifest needs \"vectors\" or \"embedding\"");
  if (m.history_windows && *m.history_windows < 1) throw InputError(kModule, "history_windows must be >= 1");
  m.windows.validate();
  return m;
}

std::string manifest_json(const DatasetManifest& m) {
  json::Json doc;
  doc["topics"] = m.topics.generic_string();
  doc["events"] = m.events.generic_string();
  if (m.vectors) doc["vectors"] = m.vectors->generic_string();
  if (m.embedding) doc["embedding"] = m.embedding->generic_string();
  doc["metric"] = m.metric == embed::Metric::Euclidean ? "euclidean" : "cosine";
  doc["windows"] = {{"origin", format_rfc3339(m.windows.origin)},
                    {"width_seconds", std::chrono::duration_cast<std::chrono::seconds>(m.windows.width).count()},
                    {"count", m.windows.count}};
  doc["lambda"] = m.lambda;
  doc["history_windows"] = m.history_windows ? json::Json(*m.history_windows) : json::Json(nullptr);
  if (m.shape) doc["shape"] = m.shape->to_string();
  return doc.dump(2) + "\n";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics)
    if (name == to_string(m)) return m;
  throw InputError(kModule, "metric: unknown value '" + std::string(name) +
                                "' (expected current, historical, self_risk, peer or peer_risk)");
}

const char* to_string(Metric m) {
  switch (m) {
    case Metric::Current: return "current";
    case Metric::Historical: return "historical";
    case Metric::SelfRisk: return "self_risk";
    case Metric::Peer: return "peer";
    case Metric::PeerRisk: return "peer_risk";
  }
  return "?";
}

const topics::TopicValues& Bundle::values(Metric m) const {
  switch (m) {
    case Metric::Current: return current;
    case Metric::Historical: return historical;
    case Metric::SelfRisk: return self_risk.values;
    case Metric::Peer: return peer_activity;
    case Metric::PeerRisk: return peer_risk.values;
  }
  return current;
}

Dataset Dataset::build(DatasetInputs in) {
  Dataset ds;
  ds.universe_ = topics::topic_universe(in.topics);
  ds.topics_ = std::move(in.topics);
  if (ds.topics_.size() < 3) throw InputError(kModule, "need at least 3 topics to lay out a grid");
  ds.lambda_ = in.lambda;
  if (!(ds.lambda_ >= 0.0)) throw InputError(kModule, "lambda must be >= 0");
  ds.history_windows_ = in.history_windows;
  const std::set<std::string> known(ds.universe_.begin(), ds.universe_.end());

  auto check_ids = [&](std::vector<std::string> ids, const std::string& what) {
    std::sort(ids.begin(), ids.end());
    if (ids != ds.universe_) throw InputError(kModule, what + " ids do not match the topic ids");
  };

  embed::DistanceMatrix distances;
  if (in.vectors) {
    check_ids(in.vectors->ids, "vector");
    distances = embed::pairwise_distances(*in.vectors, in.metric);
    auto mds = embed::classical_mds(distances, 2);
    for (const auto& w : mds.warnings) ds.warnings_.push_back("mds: " + w);
    ds.embedding2d_ = std::move(mds.cloud);
  } else if (in.embedding) {
    if (in.embedding->dims() != 2) throw InputError(kModule, "topic embedding must be two-dimensional");
    check_ids(in.embedding->ids(), "embedding");
    ds.embedding2d_ = *in.embedding;
    distances = embed::pairwise_distances(ds.embedding2d_);
  } else {
    throw InputError(kModule, "either topic vectors or a 2D topic embedding is required");
  }
  auto mds1 = embed::classical_mds(distances, 1);
  for (const auto& w : mds1.warnings) ds.warnings_.push_back("mds (1D): " + w);
  ds.embedding1d_ = std::move(mds1.cloud);

  const sd::GridShape shape = in.shape ? *in.shape : sd::balanced_shape(ds.topics_.size(), 2);
  ds.assignment_ = sd::split_diffuse(ds.embedding2d_, shape);

  std::vector<std::pair<std::string, double>> coords;
  for (const auto& p : ds.embedding1d_.points()) coords.emplace_back(p.id, p.coords[0]);
  ds.curtain_ranks_ = sd::sd_1d(coords);

  for (const auto& e : in.events) {
    if (!known.contains(e.topic_id)) throw InputError(kModule, "event references unknown topic '" + e.topic_id + "'");
  }
  ds.profiles_ = ingest::window_profiles(in.events, in.windows);
  if (ds.profiles_.dropped > 0) {
    ds.warnings_.push_back(std::to_string(ds.profiles_.dropped) + " events fall outside the window range");
  }
  for (const auto& e : in.events) {
    auto w = ds.profiles_.spec.index_of(e.ts);
    if (!w) continue;
    auto& a = ds.activity_[{e.entity_id, e.topic_id, *w}];
    ++a.events;
    a.weight += e.weight;
  }
  return ds;
}

Dataset Dataset::load(const std::filesystem::path& path) {
  const auto manifest_path = std::filesystem::is_directory(path) ? path / kManifestName : path;
  return from_manifest(read_manifest(manifest_path));
}

Dataset Dataset::from_manifest(const DatasetManifest& m) {
  DatasetInputs in;
  in.topics = json::import_topics(m.topics);
  if (m.vectors) in.vectors = embed::import_vectors(*m.vectors);
  else in.embedding = embed::import_embedding(*m.embedding);
  in.metric = m.metric;
  in.events = ingest::read_events(m.events).events;
  in.windows = m.windows;
  in.lambda = m.lambda;
  in.history_windows = m.history_windows;
  in.shape = m.shape;
  return build(std::move(in));
}

const topics::TopicInfo& Dataset::topic(const std::string& id) const {
  for (const auto& t : topics_)
    if (t.topic_id == id) return t;
  throw NotFoundError(kModule, "unknown topic '" + id + "'");
}

int Dataset::curtain_rank(const std::string& topic) const {
  auto it = curtain_ranks_.find(topic);
  if (it == curtain_ranks_.end()) throw NotFoundError(kModule, "unknown topic '" + topic + "'");
  return it->second;
}

std::vector<int> Dataset::history_indices(int window) const {
  const int first = history_windows_ ? std::max(0, window - *history_windows_) : 0;
  std::vector<int> out;
  for (int w = first; w < window; ++w) out.push_back(w);
  return out;
}

topics::ActivityProfile Dataset::pooled(const std::string& entity, const std::vector<int>& windows) const {
  topics::ActivityProfile p;
  p.entity_id = entity;
  p.window = {profiles_.spec.window(windows.front()).start, profiles_.spec.window(windows.back()).end};
  for (int w : windows)
    for (const auto& [topic, weight] : profiles_.at(entity, w).weights) p.weights[topic] += weight;
  return p;
}

Bundle Dataset::bundle(const std::string& entity, int window) const {
  const topics::ActivityProfile& current = profiles_.at(entity, window);
  const std::vector<int> history = history_indices(window);

  Bundle b;
  b.entity = entity;
  b.window = window;
  b.current = zeros(universe_);
  for (const auto& [t, w] : current.weights) b.current[t] = w;

  std::vector<topics::ActivityProfile> own;
  for (int w : history) own.push_back(profiles_.at(entity, w));
  b.self_risk = topics::self_risk(current, own, universe_, lambda_);
  append_warnings(b.warnings, b.self_risk.warnings);

  b.historical = zeros(universe_);
  for (const auto& p : own)
    for (const auto& [t, w] : p.weights) b.historical[t] += w;

  std::vector<topics::ActivityProfile> peers;
  for (const auto& other : profiles_.entities()) {
    if (other == entity) continue;
    peers.push_back(history.empty() ? profiles_.at(other, window) : pooled(other, history));
  }
  if (peers.empty()) {
    b.peer_activity = zeros(universe_);
    b.peer_risk.entity_id = entity;
    b.peer_risk.window = current.window;
    b.peer_risk.kind = topics::RiskKind::Peer;
    b.peer_risk.values = zeros(universe_);
    b.peer_risk.warnings.push_back("no peers for entity '" + entity + "'; peer risk is zero");
  } else {
    if (history.empty()) {
      b.warnings.push_back("no history windows; peers are compared on the current window");
    }
    b.peer_risk = topics::peer_risk(current, peers, universe_, lambda_);
    b.peer_activity = b.peer_risk.baseline;
  }
  append_warnings(b.warnings, b.peer_risk.warnings);
  return b;
}

topics::TopicGrid Dataset::grid(const std::string& entity, int window, Metric m) const {
  return topics::build_topic_grid(assignment_, topics_, bundle(entity, window).values(m));
}

topics::TimeStack Dataset::timeline(const std::string& entity, Metric m, topics::TimeAxis axis) const {
  std::vector<topics::WindowValues> series;
  for (int w = 0; w < profiles_.spec.count; ++w) {
    series.push_back({profiles_.spec.window(w), bundle(entity, w).values(m)});
  }
  return axis == topics::TimeAxis::Curtain ? topics::topic_curtain(topics_, embedding1d_, series)
                                           : topics::topic_shower(assignment_, series);
}

TopicDetail Dataset::detail(const std::string& entity, int window, const std::string& topic_id) const {
  profiles_.at(entity, window);
  topic(topic_id);
  TopicDetail d;
  d.entity = entity;
  d.topic = topic_id;
  d.window = window;
  for (int w = 0; w < profiles_.spec.count; ++w) {
    auto it = activity_.find({entity, topic_id, w});
    d.per_window.push_back(it == activity_.end() ? WindowActivity{} : it->second);
  }
  d.selected = d.per_window[static_cast<std::size_t>(window)];
  return d;
}

json::Json panel_json(const Dataset& ds, const Bundle& b, Metric m) {
  const auto grid = topics::build_topic_grid(ds.assignment(), ds.topics(), b.values(m));
  json::Json doc;
  doc["metric"] = to_string(m);
  if (m == Metric::SelfRisk || m == Metric::PeerRisk) {
    const auto& risk = m == Metric::SelfRisk ? b.self_risk : b.peer_risk;
    doc["kind"] = topics::to_string(risk.kind);
    doc["warnings"] = risk.warnings;
  }
  doc["shape"] = grid.shape.sides();
  doc["cells"] = json::grid_cells(grid);
  return doc;
}

json::Json bundle_json(const Dataset& ds, const Bundle& b) {
  json::Json doc;
  doc["schema_version"] = json::kSchemaVersion;
  doc["entity"] = b.entity;
  doc["window"] = json::window(b.window, ds.windows().window(b.window));
  doc["assignment"] = json::assignment(ds.assignment());
  doc["current"] = panel_json(ds, b, Metric::Current);
  doc["historical"] = panel_json(ds, b, Metric::Historical);
  doc["self_risk"] = panel_json(ds, b, Metric::SelfRisk);
  doc["peer_activity"] = panel_json(ds, b, Metric::Peer);
  doc["peer_risk"] = panel_json(ds, b, Metric::PeerRisk);
  doc["warnings"] = b.warnings;
  return doc;
}

json::Json detail_json(const Dataset& ds, const TopicDetail& d) {
  json::Json doc;
  doc["schema_version"] = json::kSchemaVersion;
  doc["entity"] = d.entity;
  doc["topic_id"] = d.topic;
  doc["keywords"] = ds.topic(d.topic).keywords;
  doc["window"] = json::window(d.window, ds.windows().window(d.window));
  doc["events"] = d.selected.events;
  doc["weight"] = d.selected.weight;
  json::Json per = json::Json::array();
  for (std::size_t w = 0; w < d.per_window.size(); ++w) {
    json::Json row = json::window(static_cast<int>(w), ds.windows().window(static_cast<int>(w)));
    row["events"] = d.per_window[w].events;
    row["weight"] = d.per_window[w].weight;
    per.push_back(std::move(row));
  }
  doc["per_window"] = std::move(per);
  return doc;
}

}  // namespace gridscope::pipeline
