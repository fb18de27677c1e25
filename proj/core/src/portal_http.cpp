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

#include "gridsteer/portal_http.hpp"

#include <stdexcept>
#include <thread>

#include <httplib.h>

namespace gridsteer::portal {
namespace {

constexpr const char* kTokenHeader = "X-Session-Token";
constexpr const char* kJsonType = "application/json";

void send(httplib::Response& res, const Reply& reply) {
  res.status = reply.status;
  res.set_content(reply.body.dump(), kJsonType);
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
  send(res, {status, Json{{"error", {{"code", status}, {"kind", kind}, {"message", message}}}}});
}

std::string token(const httplib::Request& req) { return req.get_header_value(kTokenHeader); }

PortalService::Query query(const httplib::Request& req) {
  PortalService::Query q;
  for (const auto& [k, v] : req.params) q.emplace(k, v);
  return q;
}

// Empty bodies count as {}.
std::optional<Json> body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return Json::object();
  Json j = Json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    send_error(res, 400, "BadRequest", "request body must be a JSON object");
    return std::nullopt;
  }
  return j;
}

}  // namespace

struct HttpServer::Impl {
  PortalService& portal;
  HttpOptions options;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  Impl(PortalService& p, HttpOptions o) : portal(p), options(std::move(o)) { routes(); }

  void routes() {
    const std::string exp = R"(/api/experiments/([^/]+))";
    auto& s = server;
    auto& p = portal;

    s.Post("/api/login", [&p](const httplib::Request& req, httplib::Response& res) {
      if (auto b = body(req, res)) send(res, p.login(*b));
    });
    s.Get("/api/experiments", [&p](const httplib::Request& req, httplib::Response& res) {
      send(res, p.experiments(token(req)));
    });
    s.Get("/api/resources", [&p](const httplib::Request& req, httplib::Response& res) {
      send(res, p.resources_page(token(req)));
    });
    s.Get(exp + "/qos", [&p](const httplib::Request& req, httplib::Response& res) {
      send(res, p.qos_get(token(req), req.matches[1]));
    });
    s.Put(exp + "/qos", [&p](const httplib::Request& req, httplib::Response& res) {
      if (auto b = body(req, res)) send(res, p.qos_set(token(req), req.matches[1], *b));
    });
    s.Post(exp + "/control", [&p](const httplib::Request& req, httplib::Response& res) {
      if (auto b = body(req, res)) send(res, p.control(token(req), req.matches[1], *b));
    });
    s.Get(exp + "/status", [&p](const httplib::Request& req, httplib::Response& res) {
      send(res, p.status_page(token(req), req.matches[1]));
    });
    s.Get(exp + "/jobs", [&p](const httplib::Request& req, httplib::Response& res) {
      send(res, p.jobs_page(token(req), req.matches[1], query(req)));
    });
    s.Get(exp + R"(/jobs/([^/]+))", [&p](const httplib::Request& req, httplib::Response& res) {
      send(res, p.job_detail(token(req), req.matches[1], req.matches[2]));
    });
    s.Post(exp + R"(/jobs/([^/]+)/restart)", [&p](const httplib::Request& req, httplib::Response& res) {
      send(res, p.restart_job(token(req), req.matches[1], req.matches[2]));
    });
    s.Post(exp + "/restart-failed", [&p](const httplib::Request& req, httplib::Response& res) {
      send(res, p.restart_failed(token(req), req.matches[1]));
    });

    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (req.path.rfind("/api/", 0) == 0) {
        send_error(res, res.status, res.status == 404 ? "NotFound" : "BadRequest",
                   "no route for " + req.method + " " + req.path);
      }
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "unknown error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      send_error(res, 500, "Internal", what);
    });

    if (!options.static_dir.empty() && !s.set_mount_point("/", options.static_dir)) {
      throw std::runtime_error("static directory not found: " + options.static_dir);
    }
  }
};

HttpServer::HttpServer(PortalService& portal, HttpOptions options)
    : impl_(std::make_unique<Impl>(portal, std::move(options))) {}

HttpServer::~HttpServer() { stop(); }

void HttpServer::start() {
  auto& i = *impl_;
  if (i.options.port == 0) {
    i.port = i.server.bind_to_any_port(i.options.host);
  } else {
    i.port = i.server.bind_to_port(i.options.host, i.options.port) ? i.options.port : -1;
  }
  if (i.port <= 0) {
    throw std::runtime_error("cannot bind " + i.options.host + ":" + std::to_string(i.options.port));
  }
  i.thread = std::thread([&i] { i.server.listen_after_bind(); });
  i.server.wait_until_ready();
}

void HttpServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable() && impl_->thread.get_id() != std::this_thread::get_id()) {
    impl_->thread.join();
  }
}

int HttpServer::port() const { return impl_->port; }

}  // namespace gridsteer::portal
