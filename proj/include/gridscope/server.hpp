#pragma once

#include "gridscope/api.hpp"

#include <memory>

namespace gridscope::service {

// HTTP front end for handle_api. The dataset is shared read-only between
// worker threads.
class Server {
 public:
  Server(std::shared_ptr<const pipeline::Dataset> dataset, ServiceConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Returns the bound port (an ephemeral one when config.port is 0).
  int bind();
  // Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Loads the dataset, binds and serves until the process is stopped.
int serve(const ServiceConfig& config);

}  // namespace gridscope::service
