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

// gmond: the web portal.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "gridsteer/portal_http.hpp"

using namespace gridsteer;

int main(int argc, char** argv) {
  CLI::App app{"web portal for monitoring and steering broker experiments"};
  std::string grb = "127.0.0.1:" + std::to_string(wire::kDefaultPort);
  std::string listen = "127.0.0.1:8080";
  std::string static_dir;
  long timeout_ms = 5000;

  app.add_option("--grb", grb, "default broker address host:port")->envname("GRIDSTEER_GRB");
  app.add_option("--listen", listen, "HTTP listen address host:port")->envname("GRIDSTEER_PORTAL_LISTEN");
  app.add_option("--static", static_dir, "directory served at /")
      ->check(CLI::ExistingDirectory)
      ->envname("GRIDSTEER_STATIC");
  app.add_option("--timeout-ms", timeout_ms, "broker call timeout")
      ->check(CLI::Range(1L, 600'000L))
      ->envname("GRIDSTEER_TIMEOUT_MS");
  CLI11_PARSE(app, argc, argv);

  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  try {
    const auto address = wire::parse_address(listen);
    portal::PortalService::Options options;
    options.default_broker = grb;
    options.transports = portal::pooled_transports(std::chrono::milliseconds(timeout_ms));
    portal::PortalService service(options);
    portal::HttpServer http(service, {address.host, address.port, static_dir});
    http.start();
    std::cerr << "gmond: serving on http://" << address.host << ":" << http.port() << "\n";
    int sig = 0;
    sigwait(&set, &sig);
    http.stop();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "gmond: " << e.what() << "\n";
  }
  return 1;
}
