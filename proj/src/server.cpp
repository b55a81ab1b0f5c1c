#include "gridscope/server.hpp"

#include "gridscope/error.hpp"

#include "httplib.h"

#include <algorithm>
#include <csignal>
#include <iostream>

namespace gridscope::service {

struct Server::Impl {
  std::shared_ptr<const pipeline::Dataset> dataset;
  ServiceConfig config;
  httplib::Server http;

  std::string allowed_origin(const httplib::Request& req) const {
    const auto origin = req.get_header_value("Origin");
    if (origin.empty()) return {};
    for (const auto& o : config.cors_origins) {
      if (o == "*") return "*";
      if (o == origin) return origin;
    }
    return {};
  }

  void add_cors(const httplib::Request& req, httplib::Response& res) const {
    const auto origin = allowed_origin(req);
    if (origin.empty()) return;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    if (origin != "*") res.set_header("Vary", "Origin");
  }

  void setup() {
    http.Get(R"(/api/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      QueryParams params;
      for (const auto& [k, v] : req.params) params.emplace_back(k, v);
      // multimap iteration is sorted by key; keep duplicates for rejection
      const auto reply = handle_api(*dataset, req.path, params);
      res.status = reply.status;
      res.set_content(reply.body, "application/json");
      add_cors(req, res);
    });
    http.Options(R"(/api/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      res.status = 204;
      add_cors(req, res);
    });
    // Anything else, including non-GET methods on /api routes.
    http.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      const bool method_ok = req.method == "GET" || req.method == "OPTIONS";
      const int status = method_ok ? 404 : 405;
      res.status = status;
      json::Json doc;
      doc["schema_version"] = json::kSchemaVersion;
      doc["error"] = {{"status", status}, {"message", method_ok ? "not found" : "method not allowed"}};
      res.set_content(doc.dump(), "application/json");
      add_cors(req, res);
    });
  }
};

Server::Server(std::shared_ptr<const pipeline::Dataset> dataset, ServiceConfig config)
    : impl_(std::make_unique<Impl>()) {
  impl_->dataset = std::move(dataset);
  impl_->config = std::move(config);
  impl_->setup();
}

Server::~Server() { stop(); }

int Server::bind() {
  const auto& c = impl_->config;
  int port = c.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(c.bind_address);
  } else if (!impl_->http.bind_to_port(c.bind_address, port)) {
    port = -1;
  }
  if (port < 0) {
    throw InputError("service", "cannot bind " + c.bind_address + ":" + std::to_string(c.port));
  }
  return port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

namespace {
Server* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int serve(const ServiceConfig& config) {
  auto dataset = std::make_shared<const pipeline::Dataset>(load_dataset(config));
  Server server(dataset, config);
  const int port = server.bind();
  std::cerr << "gridscope: serving " << dataset->topics().size() << " topics, " << dataset->entities().size()
            << " entities on http://" << config.bind_address << ":" << port << "\n";
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace gridscope::service
