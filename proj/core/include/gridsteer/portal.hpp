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

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridsteer/client.hpp"
#include "gridsteer/model.hpp"
#include "gridsteer/wire.hpp"

namespace gridsteer::portal {

using Json = nlohmann::json;

// One request/response exchange with a broker. Throws wire::TransportError
// (or a subclass) when no answer arrives.
class BrokerTransport {
 public:
  virtual ~BrokerTransport() = default;
  virtual wire::Response call(const wire::Request& req) = 0;
};

// Reuses idle connections; a connection is owned by one request at a time.
class PooledTransport : public BrokerTransport {
 public:
  PooledTransport(wire::Address address, std::chrono::milliseconds timeout);
  wire::Response call(const wire::Request& req) override;

 private:
  wire::Address address_;
  std::chrono::milliseconds timeout_;
  std::mutex mu_;
  std::vector<std::unique_ptr<wire::Client>> idle_;
};

using TransportFactory = std::function<std::shared_ptr<BrokerTransport>(const std::string& address)>;
TransportFactory pooled_transports(std::chrono::milliseconds timeout);

struct Session {
  std::string token;
  int tz_offset_min = 0;
  std::string broker;
  Timestamp created_at{};
  std::chrono::steady_clock::time_point last_seen{};
  std::shared_ptr<BrokerTransport> transport;
};

inline constexpr std::chrono::hours kSessionIdleLimit{24};
inline constexpr std::size_t kDefaultPageLimit = 50;

// Token -> session, with idle expiry. Thread-safe.
class SessionStore {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;
  explicit SessionStore(Clock clock = std::chrono::steady_clock::now);

  // Returns the new token (32 hex digits from a CSPRNG-seeded generator).
  std::string create(Session session);
  // Refreshes last_seen. nullopt for unknown or expired tokens.
  std::optional<Session> touch(const std::string& token);
  std::size_t size() const;

 private:
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, Session> sessions_;
};

struct Reply {
  int status = 200;
  Json body;
};

// {"utc": "...Z", "local": "...+HH:MM"}
Json timestamp_json(Timestamp t, int tz_offset_min);

// The portal's function modules, one per page. Each validates its input,
// makes at most one broker call and wraps the answer as
// {"data": ..., "tz_offset_min": N}. Errors are {"error": {"code", "kind",
// "message"}} with the matching HTTP status: 401 bad session, 502 transport
// failure, broker codes passed through.
class PortalService {
 public:
  struct Options {
    std::string default_broker = "127.0.0.1:9000";
    TransportFactory transports;
    SessionStore::Clock clock = std::chrono::steady_clock::now;
    std::function<Timestamp()> wall_clock;  // for Session::created_at
  };
  explicit PortalService(Options options);

  using Query = std::map<std::string, std::string>;

  Reply login(const Json& body);
  Reply experiments(const std::string& token);
  Reply qos_get(const std::string& token, const std::string& exp);
  Reply qos_set(const std::string& token, const std::string& exp, const Json& body);
  Reply control(const std::string& token, const std::string& exp, const Json& body);
  Reply jobs_page(const std::string& token, const std::string& exp, const Query& query);
  Reply job_detail(const std::string& token, const std::string& exp, const std::string& job);
  Reply restart_job(const std::string& token, const std::string& exp, const std::string& job);
  Reply restart_failed(const std::string& token, const std::string& exp);
  Reply status_page(const std::string& token, const std::string& exp);
  Reply resources_page(const std::string& token);

  SessionStore& sessions() { return sessions_; }

 private:
  template <typename F>
  Reply with_session(const std::string& token, F&& body);

  Options options_;
  SessionStore sessions_;
  std::mutex transports_mu_;
  std::map<std::string, std::shared_ptr<BrokerTransport>> transports_;
};

// Walks a reply body and checks every {"utc", "local"} pair agrees.
bool timestamps_consistent(const Json& body);

}  // namespace gridsteer::portal
