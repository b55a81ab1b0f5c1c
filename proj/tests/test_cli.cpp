#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Doc = nlohmann::json;

namespace {

const std::string kCli = GRIDSCOPE_CLI;
const fs::path kFixtures = GRIDSCOPE_FIXTURES;

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "gridscope_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + kCli + " " + args + " 2>" + err.string();
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

std::string fx(const std::string& name) { return (kFixtures / name).string(); }

}  // namespace

TEST_CASE("layout") {
  auto r = run("layout --in " + fx("pts64.csv") + " --shape 8x8");
  REQUIRE(r.status == 0);
  const auto doc = Doc::parse(r.out);
  CHECK(doc["shape"] == Doc::array({8, 8}));
  CHECK(doc["cells"].size() == 64);
  CHECK(doc["paths"].size() == 64);

  r = run("layout --in " + fx("pts63.csv") + " --shape 8x8");
  CHECK(r.status == 1);
  CHECK(r.err.find("size mismatch") != std::string::npos);
  CHECK(r.out.empty());

  r = run("layout --in " + fx("pts64_3d.csv") + " --shape 4x4x4");
  REQUIRE(r.status == 0);
  const auto d3 = Doc::parse(r.out);
  CHECK(d3["shape"] == Doc::array({4, 4, 4}));
  CHECK(d3["cells"]["q000"].size() == 3);

  CHECK(run("layout --in " + fx("missing.csv") + " --shape 8x8").status == 1);
  CHECK(run("layout --in " + fx("pts64.csv") + " --shape 8by8").status == 1);
  CHECK(run("layout --shape 8x8").status == 1);
}

TEST_CASE("mds") {
  auto r = run("mds --distances " + fx("distances8.csv"));
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("id,x,y\n", 0) == 0);
  r = run("mds --vectors " + fx("dataset/vectors.csv") + " --dims 1 --format json");
  REQUIRE(r.status == 0);
  const auto doc = Doc::parse(r.out);
  CHECK(doc["dims"] == 1);
  CHECK(doc["points"].size() == 16);
  CHECK(run("mds --dims 2").status == 1);
  CHECK(run("mds --distances " + fx("distances8.csv") + " --dims 7").status == 1);
}

TEST_CASE("metrics") {
  const auto asg = scratch() / "asg.json";
  REQUIRE(run("layout --in " + fx("pts64.csv") + " --shape 8x8 --out " + asg.string()).status == 0);
  auto r = run("metrics --embedding " + fx("pts64.csv") + " --assignment " + asg.string() + " --format json");
  REQUIRE(r.status == 0);
  const auto doc = Doc::parse(r.out);
  CHECK(doc["grid"]["overlap_pairs"] == 0);
  CHECK(doc["grid"]["heterogeneity"] == 0.0);
  CHECK(doc["grid"]["topology_agreement"].get<double>() > 0.5);

  r = run("metrics --embedding " + fx("pts64.csv") + " --assignment " + asg.string());
  REQUIRE(r.status == 0);
  CHECK(r.out.find("heterogeneity") != std::string::npos);
  CHECK(r.out.find("\ngrid ") != std::string::npos);
}

TEST_CASE("pipeline") {
  auto r = run("pipeline --data " + fx("dataset") + " --entity u1 --window 3");
  REQUIRE(r.status == 0);
  const auto doc = Doc::parse(r.out);
  for (const char* k : {"assignment", "current", "historical", "self_risk", "peer_activity", "peer_risk"})
    CHECK(doc.contains(k));
  std::string top;
  double best = -1;
  for (const auto& c : doc["self_risk"]["cells"])
    if (c["value"].get<double>() > best) best = c["value"], top = c["topic_id"];
  CHECK(top == "t5");

  // Same result via the environment and via explicit inputs.
  const auto env = run("pipeline --entity u1 --window 3", "GRIDSCOPE_DATA_DIR=" + fx("dataset"));
  CHECK(env.status == 0);
  CHECK(env.out == r.out);
  const auto flags = run("pipeline --events " + fx("dataset/events.jsonl") + " --topics " + fx("dataset/topics.json") +
                         " --vectors " + fx("dataset/vectors.csv") +
                         " --origin 2016-03-01T00:00:00Z --width-seconds 86400 --windows 4 --entity u1 --window 3");
  CHECK(flags.status == 0);
  CHECK(flags.out == r.out);

  const auto other = Doc::parse(run("pipeline --data " + fx("dataset") + " --entity u2 --window 3").out);
  CHECK(other["assignment"] == doc["assignment"]);

  r = run("pipeline --data " + fx("dataset") + " --entity u0 --window 0");
  REQUIRE(r.status == 0);
  CHECK_FALSE(Doc::parse(r.out)["self_risk"]["warnings"].empty());

  CHECK(run("pipeline --data " + fx("dataset") + " --entity nobody --window 3").status == 1);
  CHECK(run("pipeline --data " + fx("dataset") + " --entity u1 --window 9").status == 1);
  CHECK(run("pipeline --entity u1 --window 3").status == 1);
}

TEST_CASE("simulate") {
  const auto a = scratch() / "sim_a", b = scratch() / "sim_b";
  REQUIRE(run("simulate --scenario " + fx("scenario_small.json") + " --seed 5 --out " + a.string()).status == 0);
  REQUIRE(run("simulate --scenario " + fx("scenario_small.json") + " --seed 5 --out " + b.string()).status == 0);
  for (const char* f : {"topics.json", "vectors.csv", "events.jsonl", "dataset.json", "scenario.json"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
    // The checked-in fixture came from the same command.
    CHECK(slurp(a / f) == slurp(kFixtures / "dataset" / f));
  }
  const auto bad = scratch() / "bad.json";
  std::ofstream(bad) << R"({"entities": 2, "anomalies": [{"entity": "u7", "topic": "t1", "window": 0, "multiplier": 3}]})";
  CHECK(run("simulate --scenario " + bad.string() + " --out " + (scratch() / "sim_bad").string()).status == 1);
}

TEST_CASE("serve rejects a bad configuration") {
  CHECK(run("serve --data " + fx("no_such_dir") + " --port 0").status == 1);
  CHECK(run("serve --data " + fx("dataset") + " --port 99999").status == 1);
}

TEST_CASE("help and exit codes") {
  CHECK(run("--help").status == 0);
  for (const char* sub : {"layout", "mds", "metrics", "pipeline", "simulate", "serve"}) {
    const auto r = run(std::string(sub) + " --help");
    CHECK(r.status == 0);
    CHECK(r.out.find("--") != std::string::npos);
  }
  CHECK(run("").status == 1);
  CHECK(run("layout --in x --bogus-flag").status == 1);
}

TEST_CASE("every subcommand is byte-deterministic") {
  const auto asg = scratch() / "det_asg.json";
  REQUIRE(run("layout --in " + fx("pts64.csv") + " --out " + asg.string()).status == 0);
  const std::string commands[] = {
      "layout --in " + fx("pts64.csv") + " --shape 8x8",
      "layout --in " + fx("pts64_3d.csv"),
      "mds --distances " + fx("distances8.csv"),
      "mds --vectors " + fx("dataset/vectors.csv") + " --metric cosine --format json",
      "metrics --embedding " + fx("pts64.csv") + " --assignment " + asg.string(),
      "pipeline --data " + fx("dataset") + " --entity u3 --window 2",
  };
  for (const auto& c : commands) {
    const auto first = run(c);
    const auto second = run(c);
    CHECK(first.status == 0);
    CHECK(first.out == second.out);
    CHECK_FALSE(first.out.empty());
  }
}
