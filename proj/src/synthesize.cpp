#include "gridscope/synthesize.hpp"

#include "gridscope/error.hpp"
#include "json.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace gridscope::synth {

namespace {

constexpr const char* kModule = "synthesize";

constexpr std::array<const char*, 32> kVocabulary = {
    "login",  "vpn",     "badge",   "printer",  "usb",      "email",   "ssh",    "database",
    "payroll", "source", "wiki",    "ticket",   "backup",   "firewall", "dns",   "proxy",
    "cloud",  "hr",      "finance", "deploy",   "admin",    "password", "export", "archive",
    "chat",   "calendar", "git",    "build",    "report",   "invoice", "contract", "sensor"};

int index_from(const std::string& name, char prefix, int limit) {
  if (name.size() < 2 || name[0] != prefix) return -1;
  int v = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return -1;
    v = v * 10 + (name[i] - '0');
    if (v >= limit) return -1;
  }
  if (name.size() > 2 && name[1] == '0') return -1;
  return v;
}

}  // namespace

std::string entity_name(int i) { return "u" + std::to_string(i); }
std::string topic_name(int i) { return "t" + std::to_string(i); }

void ScenarioConfig::validate() const {
  if (entities < 1) throw InputError(kModule, "need at least one entity");
  if (topics < 4) throw InputError(kModule, "need at least 4 topics");
  if (windows < 1) throw InputError(kModule, "need at least one window");
  if (window_seconds <= 0) throw InputError(kModule, "window_seconds must be positive");
  if (!(base_rate > 0.0) || !std::isfinite(base_rate)) throw InputError(kModule, "base_rate must be positive");
  if (vector_dims < 1) throw InputError(kModule, "vector_dims must be at least 1");
  if (clusters < 1 || clusters > topics) throw InputError(kModule, "clusters must be in [1, topics]");
  if (!(cluster_spread >= 0.0)) throw InputError(kModule, "cluster_spread must be >= 0");
  parse_rfc3339(origin);
  for (const auto& a : anomalies) {
    if (index_from(a.entity, 'u', entities) < 0) throw InputError(kModule, "anomaly references unknown entity '" + a.entity + "'");
    if (index_from(a.topic, 't', topics) < 0) throw InputError(kModule, "anomaly references unknown topic '" + a.topic + "'");
    if (a.window < 0 || a.window >= windows) {
      throw InputError(kModule, "anomaly references unknown window " + std::to_string(a.window));
    }
    if (!(a.multiplier >= 0.0) || !std::isfinite(a.multiplier)) throw InputError(kModule, "anomaly multiplier must be >= 0");
  }
}

ingest::WindowSpec ScenarioConfig::window_spec() const {
  return ingest::WindowSpec{parse_rfc3339(origin), std::chrono::seconds{window_seconds}, windows};
}

ScenarioConfig read_scenario(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("malformed scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError(kModule, "scenario must be a JSON object");
  ScenarioConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "entities") c.entities = value.get<int>();
      else if (key == "topics") c.topics = value.get<int>();
      else if (key == "windows") c.windows = value.get<int>();
      else if (key == "origin") c.origin = value.get<std::string>();
      else if (key == "window_seconds") c.window_seconds = value.get<std::int64_t>();
      else if (key == "base_rate") c.base_rate = value.get<double>();
      else if (key == "vector_dims") c.vector_dims = value.get<int>();
      else if (key == "clusters") c.clusters = value.get<int>();
      else if (key == "cluster_spread") c.cluster_spread = value.get<double>();
      else if (key == "anomalies") {
        for (const auto& a : value) {
          c.anomalies.push_back({a.at("entity").get<std::string>(), a.at("topic").get<std::string>(),
                                 a.at("window").get<int>(), a.at("multiplier").get<double>()});
        }
      } else {
        throw InputError(kModule, "unknown scenario field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(kModule, std::string("bad scenario field: ") + e.what());
  }
  c.validate();
  return c;
}

std::string scenario_json(const ScenarioConfig& c) {
  nlohmann::ordered_json doc;
  doc["entities"] = c.entities;
  doc["topics"] = c.topics;
  doc["windows"] = c.windows;
  doc["origin"] = c.origin;
  doc["window_seconds"] = c.window_seconds;
  doc["base_rate"] = c.base_rate;
  doc["vector_dims"] = c.vector_dims;
  doc["clusters"] = c.clusters;
  doc["cluster_spread"] = c.cluster_spread;
  doc["anomalies"] = nlohmann::ordered_json::array();
  for (const auto& a : c.anomalies) {
    doc["anomalies"].push_back(
        {{"entity", a.entity}, {"topic", a.topic}, {"window", a.window}, {"multiplier", a.multiplier}});
  }
  return doc.dump(2) + "\n";
}

SyntheticDataset synthesize(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SyntheticDataset out;
  out.config = config;

  // Topics and their vectors.
  const auto dims = static_cast<std::size_t>(config.vector_dims);
  std::vector<std::vector<double>> centres(static_cast<std::size_t>(config.clusters), std::vector<double>(dims));
  for (auto& c : centres)
    for (auto& v : c) v = normal(rng);
  const double scatter = config.cluster_spread * std::sqrt(2.0);
  std::uniform_int_distribution<std::size_t> pick_word(0, kVocabulary.size() - 1);
  std::vector<int> cluster_of(static_cast<std::size_t>(config.topics));
  for (int t = 0; t < config.topics; ++t) {
    const int cluster = t % config.clusters;
    cluster_of[static_cast<std::size_t>(t)] = cluster;
    std::vector<double> v(dims);
    for (std::size_t k = 0; k < dims; ++k) v[k] = centres[static_cast<std::size_t>(cluster)][k] + scatter * normal(rng);
    out.vectors.ids.push_back(topic_name(t));
    out.vectors.vectors.push_back(std::move(v));

    const std::string shared = kVocabulary[static_cast<std::size_t>(cluster) % kVocabulary.size()];
    const std::string first = kVocabulary[pick_word(rng)];
    const std::string second = kVocabulary[pick_word(rng)];
    std::vector<std::string> keywords = ((t / config.clusters) % 2 == 0)
                                            ? std::vector<std::string>{shared, first, second}
                                            : std::vector<std::string>{first, shared, second};
    out.topics.push_back({topic_name(t), std::move(keywords)});
  }

  // Per-entity rates.
  std::uniform_int_distribution<int> pick_cluster(0, config.clusters - 1);
  std::vector<std::vector<double>> rate(static_cast<std::size_t>(config.entities));
  for (int e = 0; e < config.entities; ++e) {
    const int favourite = pick_cluster(rng);
    auto& r = rate[static_cast<std::size_t>(e)];
    for (int t = 0; t < config.topics; ++t) {
      const double affinity = 0.5 + unit(rng);
      r.push_back(config.base_rate * affinity * (cluster_of[static_cast<std::size_t>(t)] == favourite ? 2.0 : 1.0));
    }
  }

  const auto spec = config.window_spec();
  const auto width_ms = spec.width.count();
  std::uniform_int_distribution<std::int64_t> offset(0, width_ms - 1);
  for (int e = 0; e < config.entities; ++e) {
    auto& expected = out.expected[entity_name(e)];
    for (int t = 0; t < config.topics; ++t) {
      auto& series = expected[topic_name(t)];
      for (int w = 0; w < config.windows; ++w) {
        double mean = rate[static_cast<std::size_t>(e)][static_cast<std::size_t>(t)];
        for (const auto& a : config.anomalies) {
          if (a.entity == entity_name(e) && a.topic == topic_name(t) && a.window == w) mean *= a.multiplier;
        }
        series.push_back(mean);
        const int count = mean > 0.0 ? std::poisson_distribution<int>(mean)(rng) : 0;
        const Timestamp start = spec.window(w).start;
        for (int k = 0; k < count; ++k) {
          out.events.push_back({start + std::chrono::milliseconds{offset(rng)}, entity_name(e), topic_name(t), 1.0});
        }
      }
    }
  }
  std::sort(out.events.begin(), out.events.end(), [](const auto& a, const auto& b) {
    return std::tie(a.ts, a.entity_id, a.topic_id) < std::tie(b.ts, b.entity_id, b.topic_id);
  });
  return out;
}

}  // namespace gridscope::synth
