#pragma once

// A loaded behavioural dataset: topics placed once on a shared split-diffuse
// grid, events aggregated into windowed profiles, and the five per-entity
// value panels (current, historical, self risk, peer activity, peer risk)
// computed on demand from that immutable state.
//
// On disk a dataset is a directory with a manifest, dataset.json:
//   {
//     "topics": "topics.json",          // [{"topic_id":..,"keywords":[..]}]
//     "events": "events.jsonl",         // JSON lines or .csv
//     "vectors": "vectors.csv",         // high-dim topic vectors, or
//     "embedding": "embedding.csv",     // a ready 2D topic embedding
//     "metric": "euclidean",            // distance for vectors
//     "windows": {"origin": "2016-01-01T00:00:00Z", "width_seconds": 86400, "count": 6},
//     "lambda": 0.5,
//     "history_windows": null,          // trailing windows; null = all prior
//     "shape": "4x4"                    // optional; default most-square
//   }

#include "gridscope/embedding.hpp"
#include "gridscope/ingest.hpp"
#include "gridscope/serialize.hpp"
#include "gridscope/split_diffuse.hpp"
#include "gridscope/topic_grids.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace gridscope::pipeline {

struct DatasetManifest {
  std::filesystem::path topics = "topics.json";
  std::filesystem::path events = "events.jsonl";
  std::optional<std::filesystem::path> vectors;
  std::optional<std::filesystem::path> embedding;
  embed::Metric metric = embed::Metric::Euclidean;
  ingest::WindowSpec windows;
  double lambda = topics::kDefaultSmoothing;
  std::optional<int> history_windows;
  std::optional<sd::GridShape> shape;
};

inline constexpr const char* kManifestName = "dataset.json";

// Relative paths are resolved against the manifest's directory.
DatasetManifest read_manifest(const std::filesystem::path& file);
std::string manifest_json(const DatasetManifest& m);

enum class Metric { Current, Historical, SelfRisk, Peer, PeerRisk };
Metric parse_metric(std::string_view name);
const char* to_string(Metric m);
inline constexpr Metric kAllMetrics[] = {Metric::Current, Metric::Historical, Metric::SelfRisk, Metric::Peer,
                                         Metric::PeerRisk};

struct Bundle {
  std::string entity;
  int window = 0;
  topics::TopicValues current;
  topics::TopicValues historical;
  topics::RiskGrid self_risk;
  topics::TopicValues peer_activity;
  topics::RiskGrid peer_risk;
  std::vector<std::string> warnings;

  const topics::TopicValues& values(Metric m) const;
};

struct WindowActivity {
  int events = 0;
  double weight = 0.0;
};

struct TopicDetail {
  std::string entity;
  std::string topic;
  int window = 0;
  WindowActivity selected;
  std::vector<WindowActivity> per_window;
};

struct DatasetInputs {
  std::vector<topics::TopicInfo> topics;
  std::optional<embed::HighDimVectors> vectors;
  std::optional<PointCloud> embedding;  // 2D
  embed::Metric metric = embed::Metric::Euclidean;
  std::vector<ingest::ActivityEvent> events;
  ingest::WindowSpec windows;
  double lambda = topics::kDefaultSmoothing;
  std::optional<int> history_windows;
  std::optional<sd::GridShape> shape;
};

class Dataset {
 public:
  static Dataset build(DatasetInputs inputs);
  // `path` is a dataset directory or a manifest file.
  static Dataset load(const std::filesystem::path& path);
  static Dataset from_manifest(const DatasetManifest& manifest);

  const std::vector<topics::TopicInfo>& topics() const noexcept { return topics_; }
  const std::vector<std::string>& universe() const noexcept { return universe_; }
  const topics::TopicInfo& topic(const std::string& id) const;
  const sd::GridAssignment& assignment() const noexcept { return assignment_; }
  const PointCloud& embedding2d() const noexcept { return embedding2d_; }
  const PointCloud& embedding1d() const noexcept { return embedding1d_; }
  int curtain_rank(const std::string& topic) const;
  const ingest::WindowSpec& windows() const noexcept { return profiles_.spec; }
  std::vector<std::string> entities() const { return profiles_.entities(); }
  const ingest::WindowedProfiles& profiles() const noexcept { return profiles_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // Throws NotFoundError for unknown entity or window.
  Bundle bundle(const std::string& entity, int window) const;
  topics::TopicGrid grid(const std::string& entity, int window, Metric m) const;
  topics::TimeStack timeline(const std::string& entity, Metric m, topics::TimeAxis axis) const;
  TopicDetail detail(const std::string& entity, int window, const std::string& topic) const;

 private:
  std::vector<int> history_indices(int window) const;
  topics::ActivityProfile pooled(const std::string& entity, const std::vector<int>& windows) const;

  std::vector<topics::TopicInfo> topics_;
  std::vector<std::string> universe_;
  PointCloud embedding2d_;
  PointCloud embedding1d_;
  sd::GridAssignment assignment_;
  std::map<std::string, int> curtain_ranks_;
  ingest::WindowedProfiles profiles_;
  std::map<std::tuple<std::string, std::string, int>, WindowActivity> activity_;
  double lambda_ = topics::kDefaultSmoothing;
  std::optional<int> history_windows_;
  std::vector<std::string> warnings_;
};

json::Json panel_json(const Dataset& ds, const Bundle& b, Metric m);
// The five panels sharing one assignment.
json::Json bundle_json(const Dataset& ds, const Bundle& b);
json::Json detail_json(const Dataset& ds, const TopicDetail& d);

}  // namespace gridscope::pipeline
