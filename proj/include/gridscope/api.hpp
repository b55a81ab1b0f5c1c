#pragma once

// Read-only JSON API over a loaded dataset.
//
//   GET /api/entities
//   GET /api/windows
//   GET /api/topics                  all topics with cell and curtain rank
//   GET /api/topics/{id}
//   GET /api/grid?entity=&window=&metric=current|historical|self_risk|peer|peer_risk
//   GET /api/bundle?entity=&window=  all five panels
//   GET /api/detail?entity=&window=&topic=
//   GET /api/timeline?entity=&metric=&format=curtain|shower
//
// Every body carries "schema_version". Errors are
// {"schema_version":1,"error":{"status":400,"message":...,"parameter":...}}.

#include "gridscope/dataset.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridscope::service {

using QueryParams = std::vector<std::pair<std::string, std::string>>;

struct ApiResponse {
  int status = 200;
  std::string body;
};

// Pure: no state beyond the dataset, safe to call from many threads.
ApiResponse handle_api(const pipeline::Dataset& dataset, std::string_view path, const QueryParams& params);

struct ServiceConfig {
  std::string bind_address = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir;
  std::optional<double> lambda;                  // overrides the manifest
  std::optional<ingest::WindowSpec> windows;     // overrides the manifest
  std::vector<std::string> cors_origins;         // "*" allows any origin

  void validate() const;
};

// {"bind":"127.0.0.1","port":8080,"data_dir":"...","lambda":0.5,
//  "windows":{"origin":..,"width_seconds":..,"count":..},"cors":["http://localhost:5173"]}
ServiceConfig read_service_config(const std::filesystem::path& file);

pipeline::Dataset load_dataset(const ServiceConfig& config);

}  // namespace gridscope::service
