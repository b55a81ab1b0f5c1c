#include "gridscope/api.hpp"

#include "gridscope/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

namespace gridscope::service {

namespace {

constexpr const char* kModule = "service";

using json::Json;

// A request-level failure that knows its status and offending parameter.
struct ApiError {
  int status;
  std::string message;
  std::string parameter;
};

ApiResponse error_response(int status, const std::string& message, const std::string& parameter = {}) {
  Json err;
  err["status"] = status;
  err["message"] = message;
  if (!parameter.empty()) err["parameter"] = parameter;
  Json doc;
  doc["schema_version"] = json::kSchemaVersion;
  doc["error"] = std::move(err);
  return {status, doc.dump()};
}

ApiResponse ok(Json doc) {
  Json out;
  out["schema_version"] = json::kSchemaVersion;
  for (auto& [k, v] : doc.items()) {
    if (k != "schema_version") out[k] = v;
  }
  return {200, out.dump()};
}

class Query {
 public:
  Query(const QueryParams& params, std::initializer_list<const char*> allowed) {
    std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [k, v] : params) {
      if (!names.contains(k)) throw ApiError{400, "unknown query parameter '" + k + "'", k};
      if (!values_.emplace(k, v).second) throw ApiError{400, "query parameter '" + k + "' given more than once", k};
    }
  }

  const std::string& require(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end() || it->second.empty()) {
      throw ApiError{400, "missing required query parameter '" + name + "'", name};
    }
    return it->second;
  }

  int require_int(const std::string& name) const {
    const std::string& text = require(name);
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ApiError{400, "query parameter '" + name + "' must be an integer", name};
    }
    return v;
  }

 private:
  std::map<std::string, std::string> values_;
};

pipeline::Metric metric_param(const Query& q) {
  const std::string& name = q.require("metric");
  try {
    return pipeline::parse_metric(name);
  } catch (const InputError&) {
    throw ApiError{400, "query parameter 'metric' has unknown value '" + name +
                            "' (expected current, historical, self_risk, peer or peer_risk)",
                   "metric"};
  }
}

const std::string& entity_param(const pipeline::Dataset& ds, const Query& q) {
  const std::string& entity = q.require("entity");
  if (!ds.profiles().by_entity.contains(entity)) throw ApiError{404, "unknown entity '" + entity + "'", "entity"};
  return entity;
}

int window_param(const pipeline::Dataset& ds, const Query& q) {
  const int w = q.require_int("window");
  if (w < 0 || w >= ds.windows().count) throw ApiError{404, "unknown window " + std::to_string(w), "window"};
  return w;
}

Json topic_json(const pipeline::Dataset& ds, const topics::TopicInfo& t) {
  Json doc;
  doc["topic_id"] = t.topic_id;
  doc["keywords"] = t.keywords;
  doc["cell"] = ds.assignment().cells.at(t.topic_id);
  doc["rank"] = ds.curtain_rank(t.topic_id);
  return doc;
}

ApiResponse route(const pipeline::Dataset& ds, std::string_view path, const QueryParams& params) {
  if (path == "/api/entities") {
    Query q(params, {});
    return ok({{"entities", ds.entities()}});
  }
  if (path == "/api/windows") {
    Query q(params, {});
    Json windows = Json::array();
    for (int i = 0; i < ds.windows().count; ++i) windows.push_back(json::window(i, ds.windows().window(i)));
    return ok({{"windows", std::move(windows)}});
  }
  if (path == "/api/topics") {
    Query q(params, {});
    Json list = Json::array();
    for (const auto& t : ds.topics()) list.push_back(topic_json(ds, t));
    return ok({{"shape", ds.assignment().shape.sides()}, {"topics", std::move(list)}});
  }
  constexpr std::string_view kTopicPrefix = "/api/topics/";
  if (path.starts_with(kTopicPrefix)) {
    Query q(params, {});
    const std::string id(path.substr(kTopicPrefix.size()));
    for (const auto& t : ds.topics())
      if (t.topic_id == id) return ok(topic_json(ds, t));
    throw ApiError{404, "unknown topic '" + id + "'", ""};
  }
  if (path == "/api/grid") {
    Query q(params, {"entity", "window", "metric"});
    const auto metric = metric_param(q);
    const auto& entity = entity_param(ds, q);
    const int window = window_param(ds, q);
    const auto bundle = ds.bundle(entity, window);
    Json doc = pipeline::panel_json(ds, bundle, metric);
    Json out;
    out["entity"] = entity;
    out["window"] = json::window(window, ds.windows().window(window));
    for (auto& [k, v] : doc.items()) out[k] = v;
    if (!out.contains("warnings")) out["warnings"] = bundle.warnings;
    return ok(std::move(out));
  }
  if (path == "/api/bundle") {
    Query q(params, {"entity", "window"});
    const auto& entity = entity_param(ds, q);
    const int window = window_param(ds, q);
    return ok(pipeline::bundle_json(ds, ds.bundle(entity, window)));
  }
  if (path == "/api/detail") {
    Query q(params, {"entity", "window", "topic"});
    const auto& entity = entity_param(ds, q);
    const int window = window_param(ds, q);
    const std::string& topic = q.require("topic");
    if (!std::binary_search(ds.universe().begin(), ds.universe().end(), topic)) {
      throw ApiError{404, "unknown topic '" + topic + "'", "topic"};
    }
    return ok(pipeline::detail_json(ds, ds.detail(entity, window, topic)));
  }
  if (path == "/api/timeline") {
    Query q(params, {"entity", "metric", "format"});
    const auto metric = metric_param(q);
    const std::string& format = q.require("format");
    topics::TimeAxis axis;
    if (format == "curtain") axis = topics::TimeAxis::Curtain;
    else if (format == "shower") axis = topics::TimeAxis::Shower;
    else throw ApiError{400, "query parameter 'format' must be curtain or shower", "format"};
    const auto& entity = entity_param(ds, q);
    Json doc = json::time_stack(ds.timeline(entity, metric, axis), ds.topics());
    Json out;
    out["entity"] = entity;
    out["metric"] = pipeline::to_string(metric);
    for (auto& [k, v] : doc.items()) out[k] = v;
    return ok(std::move(out));
  }
  throw ApiError{404, "no such endpoint '" + std::string(path) + "'", ""};
}

}  // namespace

ApiResponse handle_api(const pipeline::Dataset& dataset, std::string_view path, const QueryParams& params) {
  try {
    return route(dataset, path, params);
  } catch (const ApiError& e) {
    return error_response(e.status, e.message, e.parameter);
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  } catch (const InputError& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, std::string("internal error: ") + e.what());
  }
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw InputError(kModule, "port must be in [0, 65535]");
  if (data_dir.empty()) throw InputError(kModule, "no data directory configured");
  if (!std::filesystem::is_directory(data_dir)) {
    throw InputError(kModule, "data directory '" + data_dir.string() + "' does not exist");
  }
  if (lambda && !(*lambda >= 0.0)) throw InputError(kModule, "lambda must be >= 0");
  if (windows) windows->validate();
}

ServiceConfig read_service_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError(kModule, "cannot open config '" + file.string() + "'");
  nlohmann::json doc;
  ServiceConfig c;
  try {
    in >> doc;
    for (const auto& [key, value] : doc.items()) {
      if (key == "bind") c.bind_address = value.get<std::string>();
      else if (key == "port") c.port = value.get<int>();
      else if (key == "data_dir") {
        std::filesystem::path p = value.get<std::string>();
        c.data_dir = p.is_absolute() ? p : file.parent_path() / p;
      } else if (key == "lambda") c.lambda = value.get<double>();
      else if (key == "windows") {
        ingest::WindowSpec w;
        w.origin = parse_rfc3339(value.at("origin").get<std::string>());
        w.width = std::chrono::seconds{value.at("width_seconds").get<std::int64_t>()};
        w.count = value.at("count").get<int>();
        c.windows = w;
      } else if (key == "cors") c.cors_origins = value.get<std::vector<std::string>>();
      else throw InputError(kModule, "unknown config field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("bad service config: ") + e.what());
  }
  return c;
}

pipeline::Dataset load_dataset(const ServiceConfig& config) {
  config.validate();
  auto manifest = pipeline::read_manifest(config.data_dir / pipeline::kManifestName);
  if (config.lambda) manifest.lambda = *config.lambda;
  if (config.windows) manifest.windows = *config.windows;
  return pipeline::Dataset::from_manifest(manifest);
}

}  // namespace gridscope::service
