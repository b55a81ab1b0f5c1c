// gridscope command line: layout, mds, metrics, pipeline, simulate, serve.
//
// Exit codes: 0 success, 1 bad input or flags, 2 internal error.

#include "gridscope/api.hpp"
#include "gridscope/dataset.hpp"
#include "gridscope/embedding.hpp"
#include "gridscope/embedding_io.hpp"
#include "gridscope/error.hpp"
#include "gridscope/metrics.hpp"
#include "gridscope/serialize.hpp"
#include "gridscope/server.hpp"
#include "gridscope/split_diffuse.hpp"
#include "gridscope/synthesize.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace gridscope;

namespace {

// Writes to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cli", "cannot write '" + path + "'");
  out << text;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cli", "cannot write '" + path.string() + "'");
  out << text;
}

std::string default_data_dir() {
  const char* env = std::getenv("GRIDSCOPE_DATA_DIR");
  return env ? env : "";
}

// --- layout ---------------------------------------------------------------

struct LayoutArgs {
  std::string in;
  std::string shape;
  std::string out;
};

void run_layout(const LayoutArgs& a) {
  const auto cloud = embed::import_embedding(a.in);
  const auto shape = a.shape.empty() ? sd::balanced_shape(cloud.size(), cloud.dims()) : sd::GridShape::parse(a.shape);
  const auto asg = sd::split_diffuse(cloud, shape);
  emit(a.out, json::assignment(asg).dump(2) + "\n");
}

// --- mds ------------------------------------------------------------------

struct MdsArgs {
  std::string distances;
  std::string vectors;
  std::string metric = "euclidean";
  int dims = 2;
  std::string format = "csv";
  std::string out;
};

void run_mds(const MdsArgs& a) {
  const auto d = a.vectors.empty() ? embed::import_distance_matrix(a.distances)
                                   : embed::pairwise_distances(embed::import_vectors(a.vectors),
                                                               embed::parse_metric(a.metric));
  const auto result = embed::classical_mds(d, a.dims);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (a.format == "json") {
    emit(a.out, result.cloud.size() ? embed::embedding_json(result.cloud) + "\n" : "");
  } else {
    std::ostringstream s;
    embed::write_embedding_csv(s, result.cloud);
    emit(a.out, s.str());
  }
}

// --- metrics --------------------------------------------------------------

struct MetricsArgs {
  std::string embedding;
  std::string assignment;
  double radius = 0.0;
  std::string format = "both";
  std::string out;
};

std::string fixed(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << v;
  return s.str();
}

void run_metrics(const MetricsArgs& a) {
  const auto cloud = embed::import_embedding(a.embedding);
  std::ifstream in(a.assignment);
  if (!in) throw InputError("cli", "cannot open assignment '" + a.assignment + "'");
  const auto asg = json::read_assignment(in);

  const auto input = metrics::score_cloud(cloud, a.radius, asg.shape.sides());
  const auto grid = metrics::score_layout(cloud, asg);

  std::string text;
  if (a.format == "json" || a.format == "both") {
    json::Json doc;
    doc["schema_version"] = json::kSchemaVersion;
    doc["radius"] = a.radius;
    doc["input"] = json::layout_score(input);
    doc["grid"] = json::layout_score(grid);
    text += doc.dump(2) + "\n";
  }
  if (a.format == "table" || a.format == "both") {
    auto corr = [](const metrics::LayoutScore& s) {
      return s.geometry_correlation ? fixed(*s.geometry_correlation) : std::string("n/a");
    };
    std::ostringstream t;
    t << std::left << std::setw(8) << "layout" << std::right << std::setw(10) << "overlaps" << std::setw(15)
      << "heterogeneity" << std::setw(11) << "topology" << std::setw(11) << "geometry"
      << "\n";
    for (const auto& [name, s] : {std::pair{"input", &input}, std::pair{"grid", &grid}}) {
      t << std::left << std::setw(8) << name << std::right << std::setw(10) << s->overlap_pairs << std::setw(15)
        << fixed(s->heterogeneity) << std::setw(11) << fixed(s->topology_agreement) << std::setw(11) << corr(*s)
        << "\n";
    }
    if (!text.empty()) text += "\n";
    text += t.str();
  }
  emit(a.out, text);
}

// --- pipeline -------------------------------------------------------------

struct PipelineArgs {
  std::string config;
  std::string data;
  std::string events, topics, vectors, embedding, metric, shape;
  std::string origin;
  std::int64_t width_seconds = 0;
  int count = 0;
  std::optional<double> lambda;
  std::optional<int> history;
  std::string entity;
  int window = 0;
  std::string out;
};

pipeline::DatasetManifest pipeline_manifest(const PipelineArgs& a) {
  std::string dir = a.data;
  std::optional<service::ServiceConfig> config;
  if (!a.config.empty()) {
    config = service::read_service_config(a.config);
    if (dir.empty()) dir = config->data_dir.string();
  }
  if (dir.empty() && a.events.empty()) dir = default_data_dir();

  pipeline::DatasetManifest m;
  if (!dir.empty()) {
    m = pipeline::read_manifest(fs::path(dir) / pipeline::kManifestName);
    if (config && config->lambda) m.lambda = *config->lambda;
    if (config && config->windows) m.windows = *config->windows;
  } else {
    if (a.topics.empty()) throw InputError("cli", "--topics is required without a data directory");
    if (a.vectors.empty() && a.embedding.empty()) {
      throw InputError("cli", "--vectors or --embedding is required without a data directory");
    }
    if (a.origin.empty() || a.width_seconds <= 0 || a.count <= 0) {
      throw InputError("cli", "--origin, --width-seconds and --windows are required without a data directory");
    }
  }
  if (!a.events.empty()) m.events = a.events;
  if (!a.topics.empty()) m.topics = a.topics;
  if (!a.vectors.empty()) m.vectors = a.vectors, m.embedding.reset();
  if (!a.embedding.empty()) m.embedding = a.embedding, m.vectors.reset();
  if (!a.metric.empty()) m.metric = embed::parse_metric(a.metric);
  if (!a.shape.empty()) m.shape = sd::GridShape::parse(a.shape);
  if (!a.origin.empty()) m.windows.origin = parse_rfc3339(a.origin);
  if (a.width_seconds > 0) m.windows.width = std::chrono::seconds{a.width_seconds};
  if (a.count > 0) m.windows.count = a.count;
  if (a.lambda) m.lambda = *a.lambda;
  if (a.history) m.history_windows = *a.history;
  m.windows.validate();
  return m;
}

void run_pipeline(const PipelineArgs& a) {
  const auto ds = pipeline::Dataset::from_manifest(pipeline_manifest(a));
  for (const auto& w : ds.warnings()) std::cerr << "warning: " << w << "\n";
  emit(a.out, pipeline::bundle_json(ds, ds.bundle(a.entity, a.window)).dump(2) + "\n");
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::uint64_t seed = 1;
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  synth::ScenarioConfig config;
  if (!a.scenario.empty()) {
    std::ifstream in(a.scenario);
    if (!in) throw InputError("cli", "cannot open scenario '" + a.scenario + "'");
    config = synth::read_scenario(in);
  }
  const auto data = synth::synthesize(config, a.seed);

  const fs::path dir = a.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cli", "cannot create '" + dir.string() + "': " + ec.message());

  write_file(dir / "topics.json", json::topics_json(data.topics).dump(2) + "\n");
  std::ostringstream vectors;
  embed::write_vectors_csv(vectors, data.vectors);
  write_file(dir / "vectors.csv", vectors.str());
  std::ostringstream events;
  ingest::write_events_jsonl(events, data.events);
  write_file(dir / "events.jsonl", events.str());
  write_file(dir / "scenario.json", synth::scenario_json(config));

  pipeline::DatasetManifest m;
  m.topics = "topics.json";
  m.events = "events.jsonl";
  m.vectors = "vectors.csv";
  m.windows = config.window_spec();
  write_file(dir / pipeline::kManifestName, pipeline::manifest_json(m));

  std::cout << "wrote " << data.topics.size() << " topics, " << config.entities << " entities, "
            << data.events.size() << " events to " << dir.string() << "\n";
}

// --- serve ----------------------------------------------------------------

struct ServeArgs {
  std::string config;
  std::string data;
  std::string bind;
  int port = -1;
  std::vector<std::string> cors;
};

int run_serve(const ServeArgs& a) {
  service::ServiceConfig c;
  if (!a.config.empty()) c = service::read_service_config(a.config);
  if (!a.data.empty()) c.data_dir = a.data;
  if (c.data_dir.empty()) c.data_dir = default_data_dir();
  if (!a.bind.empty()) c.bind_address = a.bind;
  if (a.port >= 0) c.port = a.port;
  if (!a.cors.empty()) c.cors_origins = a.cors;
  return service::serve(c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridscope: topic grid layouts and behavioural risk views"};
  app.require_subcommand(1);

  LayoutArgs layout;
  auto* cmd = app.add_subcommand("layout", "Place an embedding on a grid with split-diffuse");
  cmd->add_option("--in", layout.in, "Embedding file (CSV id,x[,y[,z]] or JSON)")->required();
  cmd->add_option("--shape", layout.shape, "Grid shape such as 8x8 or 4x4x4 (default: most square)");
  cmd->add_option("-o,--out", layout.out, "Output file (default stdout)");
  cmd->callback([&] { run_layout(layout); });

  MdsArgs mds;
  cmd = app.add_subcommand("mds", "Classical MDS from a distance matrix or high-dimensional vectors");
  auto* dist = cmd->add_option("--distances", mds.distances, "Distance matrix CSV");
  auto* vec = cmd->add_option("--vectors", mds.vectors, "Vectors CSV (id,f0,f1,...)");
  dist->excludes(vec);
  cmd->add_option("--metric", mds.metric, "Distance for --vectors")
      ->check(CLI::IsMember({"euclidean", "cosine"}))
      ->capture_default_str();
  cmd->add_option("--dims", mds.dims, "Target dimensions")->check(CLI::Range(1, 3))->capture_default_str();
  cmd->add_option("--format", mds.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("-o,--out", mds.out, "Output file (default stdout)");
  cmd->callback([&] {
    if (mds.distances.empty() && mds.vectors.empty()) throw CLI::ValidationError("one of --distances or --vectors is required");
    run_mds(mds);
  });

  MetricsArgs met;
  cmd = app.add_subcommand("metrics", "Score an embedding and its grid assignment");
  cmd->add_option("--embedding", met.embedding, "Original embedding file")->required();
  cmd->add_option("--assignment", met.assignment, "Assignment JSON from `layout`")->required();
  cmd->add_option("--radius", met.radius, "Overlap radius for the input embedding")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--format", met.format, "json, table or both")
      ->check(CLI::IsMember({"json", "table", "both"}))
      ->capture_default_str();
  cmd->add_option("-o,--out", met.out, "Output file (default stdout)");
  cmd->callback([&] { run_metrics(met); });

  PipelineArgs pipe;
  cmd = app.add_subcommand("pipeline", "Compute the five value grids for one entity and window");
  cmd->add_option("--config", pipe.config, "Service config JSON (data_dir, lambda, windows)");
  cmd->add_option("--data", pipe.data, "Dataset directory with dataset.json (default $GRIDSCOPE_DATA_DIR)");
  cmd->add_option("--events", pipe.events, "Events file (JSON lines or CSV)");
  cmd->add_option("--topics", pipe.topics, "Topics JSON");
  cmd->add_option("--vectors", pipe.vectors, "Topic vectors CSV");
  cmd->add_option("--embedding", pipe.embedding, "Ready 2D topic embedding");
  cmd->add_option("--metric", pipe.metric, "Distance for --vectors")->check(CLI::IsMember({"euclidean", "cosine"}));
  cmd->add_option("--shape", pipe.shape, "Grid shape (default: most square)");
  cmd->add_option("--origin", pipe.origin, "First window start, RFC 3339");
  cmd->add_option("--width-seconds", pipe.width_seconds, "Window width in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--windows", pipe.count, "Number of windows")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", pipe.lambda, "Additive smoothing")->check(CLI::NonNegativeNumber);
  cmd->add_option("--history", pipe.history, "Trailing history windows (default all prior)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--entity", pipe.entity, "Entity id")->required();
  cmd->add_option("--window", pipe.window, "Window index")->required();
  cmd->add_option("-o,--out", pipe.out, "Output file (default stdout)");
  cmd->callback([&] { run_pipeline(pipe); });

  SimulateArgs sim;
  cmd = app.add_subcommand("simulate", "Write a synthetic dataset directory with planted anomalies");
  cmd->add_option("--scenario", sim.scenario, "Scenario JSON (default built-in)");
  cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", sim.out, "Output directory")->required();
  cmd->callback([&] { run_simulate(sim); });

  ServeArgs srv;
  int serve_status = 0;
  cmd = app.add_subcommand("serve", "Serve the JSON API over a dataset directory");
  cmd->add_option("--config", srv.config, "Service config JSON");
  cmd->add_option("--data", srv.data, "Dataset directory (default $GRIDSCOPE_DATA_DIR)");
  cmd->add_option("--bind", srv.bind, "Bind address (default 127.0.0.1)");
  cmd->add_option("--port", srv.port, "Port, 0 for ephemeral (default 8080)")->check(CLI::Range(0, 65535));
  cmd->add_option("--cors", srv.cors, "Allowed CORS origins; * for any");
  cmd->callback([&] { serve_status = run_serve(srv); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return serve_status;
}
