#pragma once

// Synthetic behavioural data with planted anomalies.
//
// Each entity has a Poisson event rate per topic, base_rate times an affinity
// in [0.5, 1.5) (doubled for the entity's favourite topic cluster). A planted
// anomaly multiplies the rate of one (entity, topic, window) triple. Topic
// vectors are drawn around a few cluster centres so MDS has structure.

#include "gridscope/embedding.hpp"
#include "gridscope/ingest.hpp"
#include "gridscope/topic_grids.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gridscope::synth {

struct PlantedAnomaly {
  std::string entity;
  std::string topic;
  int window = 0;
  double multiplier = 1.0;
};

struct ScenarioConfig {
  int entities = 8;
  int topics = 16;
  int windows = 6;
  std::string origin = "2016-01-01T00:00:00Z";
  std::int64_t window_seconds = 86400;
  double base_rate = 100.0;
  int vector_dims = 32;
  int clusters = 4;
  double cluster_spread = 0.35;  // topic scatter relative to centre spacing
  std::vector<PlantedAnomaly> anomalies;

  void validate() const;
  ingest::WindowSpec window_spec() const;
};

// Entity ids are u0..u{n-1}, topic ids t0..t{k-1}.
std::string entity_name(int i);
std::string topic_name(int i);

ScenarioConfig read_scenario(std::istream& in);
std::string scenario_json(const ScenarioConfig& config);

struct SyntheticDataset {
  ScenarioConfig config;
  std::vector<topics::TopicInfo> topics;
  embed::HighDimVectors vectors;
  std::vector<ingest::ActivityEvent> events;  // sorted by time, then entity, topic
  // Expected weight per (entity, topic, window) including anomalies.
  std::map<std::string, std::map<std::string, std::vector<double>>> expected;
};

// Deterministic for a fixed (config, seed).
SyntheticDataset synthesize(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace gridscope::synth
