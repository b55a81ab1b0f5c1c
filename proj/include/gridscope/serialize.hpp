#pragma once

// JSON encodings shared by the CLI and the HTTP service. Field names are part
// of the UI contract; bump kSchemaVersion when changing them.

#include "gridscope/metrics.hpp"
#include "gridscope/split_diffuse.hpp"
#include "gridscope/time.hpp"
#include "gridscope/topic_grids.hpp"
#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace gridscope::json {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// {"shape":[...],"cells":{id:[x,y]},"paths":{id:"LR.."}}
Json assignment(const sd::GridAssignment& a);
sd::GridAssignment parse_assignment(const nlohmann::json& doc);
sd::GridAssignment read_assignment(std::istream& in);

Json layout_score(const metrics::LayoutScore& s);

Json window(const TimeWindow& w);
Json window(int index, const TimeWindow& w);

// {x[,y[,z]], topic_id, keyword, keywords, value, share}
Json grid_cells(const topics::TopicGrid& grid);

Json time_stack(const topics::TimeStack& stack, std::span<const topics::TopicInfo> topics);

std::vector<topics::TopicInfo> parse_topics(const nlohmann::json& doc);
std::vector<topics::TopicInfo> read_topics(std::istream& in);
std::vector<topics::TopicInfo> import_topics(const std::filesystem::path& path);
Json topics_json(std::span<const topics::TopicInfo> topics);

}  // namespace gridscope::json
