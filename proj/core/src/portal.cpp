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

#include "gridsteer/portal.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include "gridsteer/errors.hpp"
#include "gridsteer/protocol.hpp"

namespace gridsteer::portal {
namespace {

// A reply other than 200, raised from inside a handler.
struct Failure {
  int status;
  std::string kind;
  std::string message;
};

Reply failure_reply(const Failure& f) {
  return {f.status, Json{{"error", {{"code", f.status}, {"kind", f.kind}, {"message", f.message}}}}};
}

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Failure{422, "ValidationError", field + ": " + message};
}

std::string broker_kind(int code) {
  switch (code) {
    case 400: return "BadRequest";
    case 404: return "NotFound";
    case 409: return "Conflict";
    case 422: return "ValidationError";
    default: return "Internal";
  }
}

std::string offset_suffix(int offset_min) {
  const int a = offset_min < 0 ? -offset_min : offset_min;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", offset_min < 0 ? '-' : '+', a / 60, a % 60);
  return buf;
}

// Experiment ids are checked locally so malformed ones never reach the broker.
std::string check_experiment(const std::string& exp) {
  if (!parse_experiment_id(exp)) throw Failure{404, "NotFound", "no such experiment: " + exp};
  return exp;
}

std::string check_job(const std::string& job) {
  if (!parse_job_id(job)) throw Failure{404, "NotFound", "no such job: " + job};
  return job;
}

std::vector<wire::Record> call_ok(const Session& s, wire::Request req) {
  const wire::Response resp = s.transport->call(req);
  if (const auto* err = std::get_if<wire::Err>(&resp)) {
    throw Failure{err->code, broker_kind(err->code), err->message};
  }
  return std::get<wire::Ok>(resp).records;
}

const wire::Record& single(const std::vector<wire::Record>& rs) {
  if (rs.size() != 1) throw wire::MalformedResponse("expected exactly one record");
  return rs[0];
}

Json null_or(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json node_json(const std::optional<NodeId>& n) { return n ? Json(n->value) : Json(nullptr); }

Json job_json(const Job& j) {
  return {{"id", j.id.value},
          {"name", j.name},
          {"state", to_string(j.state)},
          {"node", node_json(j.assigned_node)},
          {"execution_time_s", null_or(j.execution_time)},
          {"cost", j.cost_incurred.to_string()},
          {"remarks", j.remarks}};
}

Json qos_json(const QoSParams& q, int tz) {
  return {{"deadline", timestamp_json(q.deadline, tz)},
          {"budget", q.budget.to_string()},
          {"optimization", to_string(q.optimization)}};
}

Timestamp parse_deadline(const Json& v, int tz) {
  if (!v.is_string()) invalid("deadline", "expected an ISO-8601 string");
  const std::string text = v.get<std::string>();
  if (auto t = parse_iso8601(text)) return *t;
  // No zone given: the user's local time.
  if (auto t = parse_iso8601(text + offset_suffix(tz))) return *t;
  if (auto t = parse_iso8601(text + ":00" + offset_suffix(tz))) return *t;
  invalid("deadline", "not an ISO-8601 instant: '" + text + "'");
}

Money parse_budget(const Json& v) {
  std::optional<Money> m;
  if (v.is_number()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && std::fabs(d) < 1e15) m = Money::from_double(d);
  } else if (v.is_string()) {
    m = Money::parse(v.get<std::string>());
  }
  if (!m) invalid("budget", "expected a G$ amount with at most two decimals");
  if (*m < Money{}) invalid("budget", "must be >= 0");
  return *m;
}

std::size_t parse_count(const PortalService::Query& q, const std::string& key, std::size_t fallback) {
  auto it = q.find(key);
  if (it == q.end() || it->second.empty()) return fallback;
  std::size_t v = 0;
  const auto& s = it->second;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) invalid(key, "expected a non-negative integer");
  return v;
}

const Json& field(const Json& body, const char* name) {
  if (!body.is_object() || !body.contains(name)) invalid(name, "missing");
  return body.at(name);
}

}  // namespace

Json timestamp_json(Timestamp t, int tz_offset_min) {
  return {{"utc", format_utc(t)}, {"local", localize(t, tz_offset_min)}};
}

bool timestamps_consistent(const Json& body) {
  if (body.is_object()) {
    if (body.size() == 2 && body.contains("utc") && body.contains("local") &&
        body["utc"].is_string() && body["local"].is_string()) {
      const auto utc = parse_iso8601(body["utc"].get<std::string>());
      try {
        return utc && delocalize(body["local"].get<std::string>()) == *utc;
      } catch (const ParseError&) {
        return false;
      }
    }
    for (const auto& [k, v] : body.items()) {
      if (!timestamps_consistent(v)) return false;
    }
  } else if (body.is_array()) {
    for (const auto& v : body) {
      if (!timestamps_consistent(v)) return false;
    }
  }
  return true;
}

PooledTransport::PooledTransport(wire::Address address, std::chrono::milliseconds timeout)
    : address_(std::move(address)), timeout_(timeout) {}

wire::Response PooledTransport::call(const wire::Request& req) {
  std::unique_ptr<wire::Client> client;
  {
    std::lock_guard lock(mu_);
    if (!idle_.empty()) {
      client = std::move(idle_.back());
      idle_.pop_back();
    }
  }
  if (!client) client = std::make_unique<wire::Client>(address_, timeout_);
  wire::Response resp = client->call(req);  // a throwing client is dropped
  std::lock_guard lock(mu_);
  idle_.push_back(std::move(client));
  return resp;
}

TransportFactory pooled_transports(std::chrono::milliseconds timeout) {
  return [timeout](const std::string& address) -> std::shared_ptr<BrokerTransport> {
    return std::make_shared<PooledTransport>(wire::parse_address(address), timeout);
  };
}

SessionStore::SessionStore(Clock clock) : clock_(std::move(clock)) {}

std::string SessionStore::create(Session session) {
  static thread_local std::random_device rd;
  std::lock_guard lock(mu_);
  std::string token;
  do {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x", rd(), rd(), rd(), rd());
    token = buf;
  } while (sessions_.contains(token));
  session.token = token;
  session.last_seen = clock_();
  sessions_.emplace(token, std::move(session));
  return token;
}

std::optional<Session> SessionStore::touch(const std::string& token) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) return std::nullopt;
  const auto now = clock_();
  if (now - it->second.last_seen > kSessionIdleLimit) {
    sessions_.erase(it);
    return std::nullopt;
  }
  it->second.last_seen = now;
  return it->second;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

PortalService::PortalService(Options options)
    : options_(std::move(options)), sessions_(options_.clock) {
  if (!options_.transports) options_.transports = pooled_transports(std::chrono::seconds(5));
  if (!options_.wall_clock) {
    options_.wall_clock = [] {
      return std::chrono::time_point_cast<Millis>(std::chrono::system_clock::now());
    };
  }
}

template <typename F>
Reply PortalService::with_session(const std::string& token, F&& body) {
  const auto session = sessions_.touch(token);
  if (!session) return failure_reply({401, "Unauthorized", "unknown or expired session"});
  try {
    Json data = body(*session);
    return {200, Json{{"data", std::move(data)}, {"tz_offset_min", session->tz_offset_min}}};
  } catch (const Failure& f) {
    return failure_reply(f);
  } catch (const wire::Timeout& e) {
    return failure_reply({502, "Timeout", e.what()});
  } catch (const wire::ConnectionRefused& e) {
    return failure_reply({502, "ConnectionRefused", e.what()});
  } catch (const wire::MalformedResponse& e) {
    return failure_reply({502, "MalformedResponse", e.what()});
  } catch (const wire::TransportError& e) {
    return failure_reply({502, "TransportError", e.what()});
  }
}

Reply PortalService::login(const Json& body) {
  try {
    const Json& tz = field(body, "tz_offset_min");
    if (!tz.is_number_integer()) invalid("tz_offset_min", "expected an integer");
    const auto offset = tz.get<std::int64_t>();
    if (offset < kMinOffsetMinutes || offset > kMaxOffsetMinutes) {
      throw Failure{422, "OffsetOutOfRange", "tz_offset_min must be within [-720, 840]"};
    }
    std::string broker = options_.default_broker;
    if (body.contains("broker") && !body["broker"].is_null()) {
      if (!body["broker"].is_string()) invalid("broker", "expected host:port");
      if (!body["broker"].get<std::string>().empty()) broker = body["broker"].get<std::string>();
    }
    try {
      wire::parse_address(broker);
    } catch (const std::invalid_argument& e) {
      invalid("broker", e.what());
    }

    std::shared_ptr<BrokerTransport> transport;
    {
      std::lock_guard lock(transports_mu_);
      auto& slot = transports_[broker];
      if (!slot) slot = options_.transports(broker);
      transport = slot;
    }
    std::string version;
    try {
      const auto resp = transport->call({"HELLO", {}});
      const auto* ok = std::get_if<wire::Ok>(&resp);
      if (ok == nullptr || ok->records.size() != 1 || ok->records[0].empty()) {
        throw Failure{502, "BrokerUnreachable", "broker at " + broker + " did not answer HELLO"};
      }
      version = ok->records[0][0];
    } catch (const wire::TransportError& e) {
      throw Failure{502, "BrokerUnreachable", e.what()};
    }

    Session s;
    s.tz_offset_min = static_cast<int>(offset);
    s.broker = broker;
    s.created_at = options_.wall_clock();
    s.transport = transport;
    const Timestamp created = s.created_at;
    const std::string token = sessions_.create(std::move(s));
    return {200, Json{{"data",
                       {{"token", token},
                        {"broker", broker},
                        {"protocol", version},
                        {"created_at", timestamp_json(created, static_cast<int>(offset))}}},
                      {"tz_offset_min", offset}}};
  } catch (const Failure& f) {
    return failure_reply(f);
  }
}

Reply PortalService::experiments(const std::string& token) {
  return with_session(token, [&](const Session& s) {
    Json out = Json::array();
    for (const auto& r : call_ok(s, {"EXP-LIST", {}})) {
      const auto e = protocol::parse_experiment_record(r);
      out.push_back({{"id", to_string(e.id)},
                     {"name", e.name},
                     {"state", to_string(e.state)},
                     {"job_count", e.job_count}});
    }
    return out;
  });
}

Reply PortalService::qos_get(const std::string& token, const std::string& exp) {
  return with_session(token, [&](const Session& s) {
    const auto q = protocol::parse_qos_record(single(call_ok(s, {"QOS-GET", {check_experiment(exp)}})));
    return qos_json(q, s.tz_offset_min);
  });
}

Reply PortalService::qos_set(const std::string& token, const std::string& exp, const Json& body) {
  return with_session(token, [&](const Session& s) {
    check_experiment(exp);
    QoSParams q;
    q.deadline = parse_deadline(field(body, "deadline"), s.tz_offset_min);
    q.budget = parse_budget(field(body, "budget"));
    const Json& mode = field(body, "optimization");
    const auto m = mode.is_string() ? parse_optimization(mode.get<std::string>()) : std::nullopt;
    if (!m) invalid("optimization", "expected time or cost");
    q.optimization = *m;
    wire::Request req{"QOS-SET", protocol::qos_record(q)};
    req.args.insert(req.args.begin(), exp);
    const auto rs = call_ok(s, req);
    const auto f = protocol::parse_feasibility_record(single(rs));
    return Json{{"qos", qos_json(q, s.tz_offset_min)},
                {"feasibility",
                 {{"verdict", to_string(f.verdict)},
                  {"time_ok", f.time_ok},
                  {"budget_ok", f.budget_ok},
                  {"est_completion", timestamp_json(f.est_completion, s.tz_offset_min)},
                  {"est_cost", f.est_cost.to_string()},
                  {"message", f.message}}}};
  });
}

Reply PortalService::control(const std::string& token, const std::string& exp, const Json& body) {
  return with_session(token, [&](const Session& s) {
    check_experiment(exp);
    const Json& a = field(body, "action");
    const auto action = a.is_string() ? parse_experiment_action(a.get<std::string>()) : std::nullopt;
    if (!action) invalid("action", "expected start, stop or shutdown");
    const char* verb = *action == ExperimentAction::kStart  ? "EXP-START"
                       : *action == ExperimentAction::kStop ? "EXP-STOP"
                                                            : "EXP-SHUTDOWN";
    const auto rs = call_ok(s, {verb, {exp}});
    const auto& r = single(rs);
    const auto state = r.size() == 1 ? parse_experiment_state(r[0]) : std::nullopt;
    if (!state) throw wire::MalformedResponse("bad experiment state");
    return Json{{"state", to_string(*state)}};
  });
}

Reply PortalService::jobs_page(const std::string& token, const std::string& exp, const Query& query) {
  return with_session(token, [&](const Session& s) {
    check_experiment(exp);
    const std::size_t offset = parse_count(query, "offset", 0);
    const std::size_t limit = parse_count(query, "limit", kDefaultPageLimit);
    if (limit < 1 || limit > kMaxPageLimit) invalid("limit", "must be in [1, 500]");
    std::string state;
    if (auto it = query.find("state"); it != query.end() && !it->second.empty()) {
      const auto st = parse_job_state(it->second);
      if (!st) invalid("state", "expected Ready, Running, Completed or Failed");
      state = std::string(to_string(*st));
    }
    wire::Request req{"JOB-LIST", {exp, std::to_string(offset), std::to_string(limit)}};
    if (!state.empty()) req.args.push_back(state);
    const auto page = protocol::parse_job_page(call_ok(s, req));
    Json jobs = Json::array();
    for (const auto& j : page.jobs) jobs.push_back(job_json(j));
    return Json{{"total", page.total},
                {"offset", offset},
                {"limit", limit},
                {"state", state.empty() ? Json(nullptr) : Json(state)},
                {"jobs", std::move(jobs)}};
  });
}

Reply PortalService::job_detail(const std::string& token, const std::string& exp, const std::string& job) {
  return with_session(token, [&](const Session& s) {
    const auto info =
        protocol::parse_job_info(call_ok(s, {"JOB-INFO", {check_experiment(exp), check_job(job)}}));
    Json j = job_json(info.job);
    j["attempts"] = info.job.attempts;
    j["est_cpu_s"] = info.job.est_cpu_s;
    Json events = Json::array();
    for (const auto& e : info.history) {
      events.push_back({{"kind", to_string(e.kind)},
                        {"at", timestamp_json(e.at, s.tz_offset_min)},
                        {"node", node_json(e.node)},
                        {"cpu_seconds", null_or(e.cpu_seconds)}});
    }
    const bool restartable =
        info.job.state == JobState::kFailed || info.job.state == JobState::kRunning;
    return Json{{"job", std::move(j)}, {"events", std::move(events)}, {"restart_allowed", restartable}};
  });
}

Reply PortalService::restart_job(const std::string& token, const std::string& exp, const std::string& job) {
  return with_session(token, [&](const Session& s) {
    const auto j = protocol::parse_job_record(
        single(call_ok(s, {"JOB-RESTART", {check_experiment(exp), check_job(job)}})));
    return Json{{"job", job_json(j)}};
  });
}

Reply PortalService::restart_failed(const std::string& token, const std::string& exp) {
  return with_session(token, [&](const Session& s) {
    const auto rs = call_ok(s, {"JOB-RESTART-FAILED", {check_experiment(exp)}});
    const auto& r = single(rs);
    std::size_t n = 0;
    const auto [end, ec] = std::from_chars(r.at(0).data(), r.at(0).data() + r.at(0).size(), n);
    if (r.size() != 1 || ec != std::errc{} || end != r.at(0).data() + r.at(0).size()) {
      throw wire::MalformedResponse("bad restart count");
    }
    return Json{{"restarted", n}};
  });
}

Reply PortalService::status_page(const std::string& token, const std::string& exp) {
  return with_session(token, [&](const Session& s) {
    const auto st = protocol::parse_status_records(call_ok(s, {"EXP-STATUS", {check_experiment(exp)}}));
    const int tz = s.tz_offset_min;
    Json counts = Json::object();
    for (auto state : kAllJobStates) counts[std::string(to_string(state))] = st.count(state);
    Json nodes = Json::array();
    for (const auto& n : st.node_rows) {
      nodes.push_back({{"id", n.id.value},
                       {"server_name", n.server_name},
                       {"status", to_string(n.status)},
                       {"assigned", n.assigned_count},
                       {"completed", n.completed_count}});
    }
    return Json{
        {"experiment", to_string(st.id)},
        {"state", to_string(st.state)},
        {"progress",
         {{"now", timestamp_json(st.now, tz)},
          {"deadline", timestamp_json(st.deadline, tz)},
          {"time_remaining_s", to_seconds(st.time_remaining)},
          {"budget", st.budget.to_string()},
          {"budget_spent", st.budget_spent.to_string()},
          {"budget_remaining", (st.budget - st.budget_spent).to_string()}}},
        {"jobs",
         {{"counts", std::move(counts)},
          {"total", st.total()},
          {"restart_failed_available", st.count(JobState::kFailed) > 0}}},
        {"nodes", std::move(nodes)}};
  });
}

Reply PortalService::resources_page(const std::string& token) {
  return with_session(token, [&](const Session& s) {
    Json out = Json::array();
    for (const auto& r : call_ok(s, {"RES-LIST", {}})) {
      const auto n = protocol::parse_resource_record(r);
      out.push_back({{"id", n.id.value},
                     {"server_name", n.server_name},
                     {"hostname", n.hostname},
                     {"rate", n.rate},
                     {"speed", n.speed},
                     {"capacity", n.capacity},
                     {"status", to_string(n.status)},
                     {"remarks", n.remarks},
                     {"assigned", n.assigned_count},
                     {"completed", n.completed_count}});
    }
    return out;
  });
}

}  // namespace gridsteer::portal
