// Copyright 2026 The GridSteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>
#include <string>

#include "gridsteer/portal.hpp"

namespace gridsteer::portal {

struct HttpOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks an ephemeral port
  std::string static_dir;  // served at / when non-empty
};

// Routes:
//   POST /api/login
//   GET  /api/experiments
//   GET  /api/resources
//   GET  /api/experiments/{exp}/qos          PUT  same
//   POST /api/experiments/{exp}/control
//   GET  /api/experiments/{exp}/status
//   GET  /api/experiments/{exp}/jobs?offset&limit&state
//   GET  /api/experiments/{exp}/jobs/{job}
//   POST /api/experiments/{exp}/jobs/{job}/restart
//   POST /api/experiments/{exp}/restart-failed
// Every route but login wants the X-Session-Token header.
class HttpServer {
 public:
  HttpServer(PortalService& portal, HttpOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and serves on a background thread. Throws std::runtime_error when
  // the address cannot be bound.
  void start();
  // Blocks the caller until stop() is called from elsewhere.
  void wait();
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gridsteer::portal
