#include "doctest.h"

#include "gridscope/error.hpp"
#include "gridscope/ingest.hpp"
#include "gridscope/synthesize.hpp"
#include "gridscope/time.hpp"

#include <cmath>
#include <sstream>

using namespace gridscope;
using namespace gridscope::ingest;

namespace {

const std::string kFixtures = GRIDSCOPE_FIXTURES;

ParseResult parse(const std::string& text, ParseMode mode = ParseMode::Strict) {
  std::istringstream in(text);
  return parse_events(in, mode);
}

WindowSpec three_days() {
  return {parse_rfc3339("2016-01-01T00:00:00Z"), std::chrono::days{1}, 3};
}

ActivityEvent ev(const std::string& ts, const std::string& entity, const std::string& topic, double w = 1.0) {
  return {parse_rfc3339(ts), entity, topic, w};
}

}  // namespace

TEST_CASE("rfc3339 parsing and formatting") {
  const auto t = parse_rfc3339("2016-01-02T03:04:05Z");
  CHECK(format_rfc3339(t) == "2016-01-02T03:04:05Z");
  CHECK(parse_rfc3339("2016-01-02T05:04:05+02:00") == t);
  CHECK(parse_rfc3339("2016-01-01T22:04:05-05:00") == t);
  CHECK(format_rfc3339(parse_rfc3339("2016-01-02T03:04:05.25Z")) == "2016-01-02T03:04:05.250Z");
  CHECK(parse_rfc3339("2016-02-29T00:00:00Z") - parse_rfc3339("2016-02-28T00:00:00Z") == std::chrono::days{1});
  CHECK(parse_rfc3339("1970-01-01T00:00:00Z").time_since_epoch().count() == 0);
  for (const char* bad : {"2016-01-02", "2016-13-01T00:00:00Z", "2015-02-29T00:00:00Z", "2016-01-02T03:04:05",
                          "2016-01-02T25:00:00Z", "garbage", ""}) {
    CHECK_THROWS_AS(parse_rfc3339(bad), InputError);
  }
}

TEST_CASE("parse_events: defaults, order and formats") {
  auto r = parse(R"({"ts":"2016-01-01T00:00:00Z","entity":"u1","topic":"t1"})");
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].weight == 1.0);
  CHECK(r.events[0].entity_id == "u1");

  r = parse(
      "{\"ts\":\"2016-01-01T00:00:00Z\",\"entity\":\"u1\",\"topic\":\"t1\"}\n"
      "{\"ts\":\"2016-01-01T01:00:00Z\",\"entity\":\"u1\",\"topic\":\"t2\",\"weight\":2}\n"
      "{\"ts\":\"2016-01-01T00:30:00Z\",\"entity\":\"u1\",\"topic\":\"t1\"}\n");
  REQUIRE(r.events.size() == 3);
  CHECK(r.events[1].topic_id == "t2");
  CHECK(r.events[1].weight == 2.0);
  CHECK(r.events[2].ts == parse_rfc3339("2016-01-01T00:30:00Z"));

  const auto json = read_events(kFixtures + "/events10.jsonl");
  const auto csv = read_events(kFixtures + "/events10.csv");
  CHECK(json.events.size() == 10);
  CHECK(json.events == csv.events);
}

TEST_CASE("parse_events: strict errors carry line numbers") {
  const std::string text =
      "{\"ts\":\"2016-01-01T00:00:00Z\",\"entity\":\"u1\",\"topic\":\"t1\"}\n"
      "\n"
      "{\"ts\":\"2016-01-01T00:00:00Z\",\"entity\":\"u1\",\"topic\":\"t1\",\"weight\":-1}\n";
  try {
    parse(text);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("{\"ts\":\"yesterday\",\"entity\":\"u1\",\"topic\":\"t1\"}"), InputError);
  CHECK_THROWS_AS(parse("{\"ts\":\"2016-01-01T00:00:00Z\",\"topic\":\"t1\"}"), InputError);
  CHECK_THROWS_AS(parse("{\"ts\":\"2016-01-01T00:00:00Z\",\"entity\":\"u1\",\"topic\":\"t1\",\"weight\":\"x\"}"),
                  InputError);
  CHECK_THROWS_AS(parse("{not json"), InputError);
  CHECK_THROWS_AS(parse("ts,entity,topic\n2016-01-01T00:00:00Z,u1\n"), InputError);
  CHECK_THROWS_AS(parse("ts,entity,topic,weight\n2016-01-01T00:00:00Z,u1,t1,-2\n"), InputError);
}

TEST_CASE("parse_events: lenient mode skips and reports") {
  const std::string text =
      "ts,entity,topic,weight\n"
      "2016-01-01T00:00:00Z,u1,t1,1\n"
      "2016-01-01T00:00:00Z,u1,t1,-1\n"
      "not-a-time,u1,t1,1\n"
      "2016-01-01T00:00:00Z,u2,t2,3\n";
  const auto r = parse(text, ParseMode::Lenient);
  CHECK(r.events.size() == 2);
  REQUIRE(r.issues.size() == 2);
  CHECK(r.issues[0].line == 3);
  CHECK(r.issues[1].line == 4);
}

TEST_CASE("jsonl round trip") {
  const auto original = read_events(kFixtures + "/events10.jsonl").events;
  std::ostringstream out;
  write_events_jsonl(out, original);
  CHECK(parse(out.str()).events == original);
}

TEST_CASE("window spec") {
  const auto spec = three_days();
  CHECK(spec.windows().size() == 3);
  CHECK(spec.window(1).start == parse_rfc3339("2016-01-02T00:00:00Z"));
  CHECK(spec.window(0).end == spec.window(1).start);
  CHECK(spec.index_of(parse_rfc3339("2016-01-02T00:00:00Z")) == 1);
  CHECK(spec.index_of(parse_rfc3339("2016-01-01T23:59:59.999Z")) == 0);
  CHECK_FALSE(spec.index_of(parse_rfc3339("2016-01-04T00:00:00Z")).has_value());
  CHECK_FALSE(spec.index_of(parse_rfc3339("2015-12-31T23:59:59Z")).has_value());
  CHECK_THROWS_AS((WindowSpec{spec.origin, std::chrono::milliseconds{0}, 3}.validate()), InputError);
  CHECK_THROWS_AS((WindowSpec{spec.origin, spec.width, 0}.validate()), InputError);
}

TEST_CASE("window_profiles: summation and boundary") {
  const std::vector<ActivityEvent> two{ev("2016-01-01T01:00:00Z", "u1", "t1"), ev("2016-01-01T02:00:00Z", "u1", "t1")};
  const auto p = window_profiles(two, three_days());
  CHECK(p.at("u1", 0).weights == topics::TopicValues{{"t1", 2.0}});
  CHECK(p.at("u1", 1).weights.empty());
  CHECK(p.at("u1", 2).weights.empty());

  const std::vector<ActivityEvent> edge{ev("2016-01-02T00:00:00Z", "u1", "t1")};
  const auto q = window_profiles(edge, three_days());
  CHECK(q.at("u1", 0).weights.empty());
  CHECK(q.at("u1", 1).weights.at("t1") == 1.0);

  CHECK_THROWS_AS(q.at("nobody", 0), NotFoundError);
  CHECK_THROWS_AS(q.at("u1", 3), NotFoundError);
}

TEST_CASE("window_profiles: fixture matches hand aggregation") {
  const auto events = read_events(kFixtures + "/events10.jsonl").events;
  const auto p = window_profiles(events, three_days());
  using TV = topics::TopicValues;
  CHECK(p.at("u1", 0).weights == TV{{"t1", 3.0}});
  CHECK(p.at("u1", 1).weights == TV{{"t2", 0.5}});
  CHECK(p.at("u1", 2).weights == TV{{"t3", 4.0}});
  CHECK(p.at("u2", 0).weights == TV{{"t2", 1.0}});
  CHECK(p.at("u2", 1).weights == TV{{"t2", 1.0}, {"t3", 4.0}});
  CHECK(p.at("u2", 2).weights.empty());
  CHECK(p.dropped == 2);
  CHECK(p.total_weight() == 13.5);

  const auto only = window_profiles(events, three_days(), std::set<std::string>{"u2"});
  CHECK(only.entities() == std::vector<std::string>{"u2"});
  CHECK(only.total_weight() == 6.0);
}

TEST_CASE("aggregation is additive and conserves weight") {
  synth::ScenarioConfig config;
  config.entities = 5;
  config.base_rate = 3;
  config.windows = 4;
  const auto data = synth::synthesize(config, 9);
  // Offset and shorter than the generated range, so some events fall outside.
  WindowSpec spec{parse_rfc3339("2016-01-01T12:00:00Z"), std::chrono::hours{20}, 4};

  const std::span<const ActivityEvent> all(data.events);
  const auto half = all.size() / 3;
  const auto whole = window_profiles(all, spec);
  const auto merged = merge_profiles(window_profiles(all.first(half), spec), window_profiles(all.subspan(half), spec));
  CHECK(merged.dropped == whole.dropped);
  for (const auto& e : whole.entities())
    for (int w = 0; w < spec.count; ++w)
      for (const auto& [t, v] : whole.at(e, w).weights) CHECK(merged.at(e, w).weights.at(t) == doctest::Approx(v));

  double in_range = 0;
  std::size_t dropped = 0;
  for (const auto& e : data.events) {
    if (spec.index_of(e.ts)) in_range += e.weight;
    else ++dropped;
  }
  CHECK(whole.total_weight() == doctest::Approx(in_range).epsilon(1e-12));
  CHECK(whole.dropped == dropped);

  WindowSpec other = spec;
  other.count = 2;
  CHECK_THROWS_AS(merge_profiles(whole, window_profiles(all, other)), InputError);
}

TEST_CASE("synthesize: determinism and validation") {
  synth::ScenarioConfig config;
  config.anomalies.push_back({"u1", "t5", 3, 20});
  const auto a = synth::synthesize(config, 42);
  const auto b = synth::synthesize(config, 42);
  std::ostringstream ea, eb;
  write_events_jsonl(ea, a.events);
  write_events_jsonl(eb, b.events);
  CHECK(ea.str() == eb.str());
  CHECK(a.vectors.vectors == b.vectors.vectors);
  CHECK(synth::synthesize(config, 43).events != a.events);

  CHECK(a.topics.size() == 16);
  CHECK(a.vectors.size() == 16);
  CHECK(a.vectors.vectors[0].size() == 32);
  for (std::size_t i = 1; i < a.events.size(); ++i) CHECK(a.events[i - 1].ts <= a.events[i].ts);

  auto bad = config;
  bad.anomalies = {{"u99", "t1", 0, 2}};
  CHECK_THROWS_AS(synth::synthesize(bad, 1), InputError);
  bad.anomalies = {{"u1", "t99", 0, 2}};
  CHECK_THROWS_AS(synth::synthesize(bad, 1), InputError);
  bad.anomalies = {{"u1", "t1", 6, 2}};
  CHECK_THROWS_AS(synth::synthesize(bad, 1), InputError);

  std::istringstream round(synth::scenario_json(config));
  const auto back = synth::read_scenario(round);
  CHECK(back.anomalies.size() == 1);
  CHECK(back.anomalies[0].multiplier == 20);
  std::istringstream unknown(R"({"entities":3,"colour":"blue"})");
  CHECK_THROWS_AS(synth::read_scenario(unknown), InputError);
}

TEST_CASE("synthesize: planted triple carries the multiplied rate") {
  synth::ScenarioConfig config;
  config.anomalies.push_back({"u1", "t5", 3, 20});
  const auto data = synth::synthesize(config, 7);
  const auto& expected = data.expected.at("u1").at("t5");
  CHECK(expected[3] == doctest::Approx(20 * expected[2]));

  // Observed totals stay within a few Poisson standard deviations.
  const auto profiles = window_profiles(data.events, config.window_spec());
  double total_expected = 0;
  for (const auto& [e, by_topic] : data.expected)
    for (const auto& [t, series] : by_topic)
      for (double v : series) total_expected += v;
  CHECK(std::abs(profiles.total_weight() - total_expected) <= 5 * std::sqrt(total_expected));
  const double planted = profiles.at("u1", 3).weights.at("t5");
  CHECK(std::abs(planted - expected[3]) <= 5 * std::sqrt(expected[3]));
}

namespace {

// Self risk of `entity` at `window` against all earlier windows.
topics::RiskGrid risk_at(const WindowedProfiles& p, const std::vector<std::string>& universe,
                         const std::string& entity, int window) {
  const auto& series = p.by_entity.at(entity);
  const std::span<const topics::ActivityProfile> history(series.data(), static_cast<std::size_t>(window));
  return topics::self_risk(series[static_cast<std::size_t>(window)], history, universe);
}

}  // namespace

TEST_CASE("synthesize: no planted anomaly keeps self risk low") {
  synth::ScenarioConfig config;
  std::size_t cells = 0, low = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto data = synth::synthesize(config, seed);
    const auto universe = topics::topic_universe(data.topics);
    const auto p = window_profiles(data.events, config.window_spec());
    for (const auto& e : p.entities())
      for (int w = 1; w < config.windows; ++w)
        for (const auto& [_, v] : risk_at(p, universe, e, w).values) {
          ++cells;
          low += v < 0.2;
        }
  }
  CHECK(static_cast<double>(low) >= 0.95 * static_cast<double>(cells));
}

TEST_CASE("synthesize: planted anomaly tops the self risk grid") {
  synth::ScenarioConfig config;
  config.anomalies.push_back({"u1", "t5", 3, 20});
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto data = synth::synthesize(config, seed);
    const auto p = window_profiles(data.events, config.window_spec());
    const auto r = risk_at(p, topics::topic_universe(data.topics), "u1", 3);
    const auto top = std::max_element(r.values.begin(), r.values.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    hits += top->first == "t5";
  }
  CHECK(hits >= 19);
}
