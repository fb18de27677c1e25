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

#include "gridsteer/protocol.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "gridsteer/errors.hpp"

namespace gridsteer::protocol {
namespace {

using wire::MalformedResponse;
using wire::Record;

std::string opt_node(const std::optional<NodeId>& n) { return n ? to_string(*n) : ""; }
std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }
std::string boolean(bool b) { return b ? "true" : "false"; }

void need(const Record& r, std::size_t n, std::string_view what) {
  if (r.size() != n) {
    throw MalformedResponse(std::string(what) + " record has " + std::to_string(r.size()) +
                            " fields, expected " + std::to_string(n));
  }
}

[[noreturn]] void bad(std::string_view what, std::string_view field) {
  throw MalformedResponse("bad " + std::string(field) + " in " + std::string(what) + " record");
}

template <typename T>
T must(std::optional<T> v, std::string_view what, std::string_view field) {
  if (!v) bad(what, field);
  return *v;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

template <typename T>
std::optional<T> to_unsigned(std::string_view s) {
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  return std::nullopt;
}

std::optional<NodeId> opt_node_field(std::string_view s, std::string_view what) {
  if (s.empty()) return std::nullopt;
  return must(parse_node_id(s), what, "node");
}

std::optional<double> opt_number_field(std::string_view s, std::string_view what,
                                       std::string_view field) {
  if (s.empty()) return std::nullopt;
  return must(to_double(s), what, field);
}

// Request argument parsing: failures are the caller's fault.
ExperimentId arg_experiment(const std::string& s) {
  const auto id = parse_experiment_id(s);
  if (!id) throw NotFound("no such experiment: " + s);
  return *id;
}

JobId arg_job(const std::string& s) {
  const auto id = parse_job_id(s);
  if (!id) throw NotFound("no such job: " + s);
  return *id;
}

QoSParams arg_qos(const std::string& deadline, const std::string& budget, const std::string& mode) {
  QoSParams q;
  const auto d = parse_iso8601(deadline);
  if (!d) throw ValidationError("deadline", "not an ISO-8601 instant: '" + deadline + "'");
  const auto b = Money::parse(budget);
  if (!b) throw ValidationError("budget", "not a G$ amount: '" + budget + "'");
  const auto m = parse_optimization(mode);
  if (!m) throw ValidationError("optimization", "expected time or cost, got '" + mode + "'");
  q.deadline = *d;
  q.budget = *b;
  q.optimization = *m;
  return q;
}

std::size_t arg_size(const std::string& s, const char* field) {
  const auto v = to_unsigned<std::size_t>(s);
  if (!v) throw ValidationError(field, "expected a non-negative integer, got '" + s + "'");
  return *v;
}

void arity(const wire::Request& req, std::size_t min, std::size_t max) {
  if (req.args.size() < min || req.args.size() > max) {
    const std::string expect =
        min == max ? std::to_string(min) : std::to_string(min) + ".." + std::to_string(max);
    throw BadRequest(req.verb + " expects " + expect + " argument(s), got " +
                     std::to_string(req.args.size()));
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

Record experiment_record(const ExperimentSummary& e) {
  return {to_string(e.id), e.name, std::string(to_string(e.state)), std::to_string(e.job_count)};
}

ExperimentSummary parse_experiment_record(const Record& r) {
  constexpr std::string_view w = "experiment";
  need(r, 4, w);
  return {must(parse_experiment_id(r[0]), w, "id"), r[1],
          must(parse_experiment_state(r[2]), w, "state"),
          must(to_unsigned<std::size_t>(r[3]), w, "job_count")};
}

Record qos_record(const QoSParams& q) {
  return {format_utc(q.deadline), q.budget.to_string(), std::string(to_string(q.optimization))};
}

QoSParams parse_qos_record(const Record& r) {
  constexpr std::string_view w = "qos";
  need(r, 3, w);
  return {must(parse_iso8601(r[0]), w, "deadline"), must(Money::parse(r[1]), w, "budget"),
          must(parse_optimization(r[2]), w, "optimization")};
}

Record feasibility_record(const econosched::FeasibilityReport& f) {
  return {std::string(to_string(f.verdict)), boolean(f.time_ok), boolean(f.budget_ok),
          format_utc(f.est_completion), f.est_cost.to_string(), f.message};
}

econosched::FeasibilityReport parse_feasibility_record(const Record& r) {
  constexpr std::string_view w = "feasibility";
  need(r, 6, w);
  econosched::FeasibilityReport f;
  if (r[0] == "Feasible") {
    f.verdict = econosched::Verdict::kFeasible;
  } else if (r[0] == "Marginal") {
    f.verdict = econosched::Verdict::kMarginal;
  } else if (r[0] == "Infeasible") {
    f.verdict = econosched::Verdict::kInfeasible;
  } else {
    bad(w, "verdict");
  }
  f.time_ok = must(to_bool(r[1]), w, "time_ok");
  f.budget_ok = must(to_bool(r[2]), w, "budget_ok");
  f.est_completion = must(parse_iso8601(r[3]), w, "est_completion");
  f.est_cost = must(Money::parse(r[4]), w, "est_cost");
  f.message = r[5];
  return f;
}

std::vector<Record> status_records(const ExperimentStatus& s) {
  std::vector<Record> out;
  out.push_back({"progress", to_string(s.id), std::string(to_string(s.state)), format_utc(s.now),
                 format_utc(s.deadline), s.budget.to_string(), s.budget_spent.to_string(),
                 format_number(to_seconds(s.time_remaining))});
  Record counts{"counts"};
  for (auto st : kAllJobStates) counts.push_back(std::to_string(s.count(st)));
  out.push_back(std::move(counts));
  for (const auto& n : s.node_rows) {
    out.push_back({"node", to_string(n.id), n.server_name, std::string(to_string(n.status)),
                   std::to_string(n.assigned_count), std::to_string(n.completed_count)});
  }
  return out;
}

ExperimentStatus parse_status_records(const std::vector<Record>& rs) {
  constexpr std::string_view w = "status";
  if (rs.size() < 2 || rs[0].empty() || rs[0][0] != "progress" || rs[1].empty() ||
      rs[1][0] != "counts") {
    throw MalformedResponse("status answer must start with progress and counts records");
  }
  ExperimentStatus s;
  const Record& p = rs[0];
  need(p, 8, "progress");
  s.id = must(parse_experiment_id(p[1]), w, "id");
  s.state = must(parse_experiment_state(p[2]), w, "state");
  s.now = must(parse_iso8601(p[3]), w, "now");
  s.deadline = must(parse_iso8601(p[4]), w, "deadline");
  s.budget = must(Money::parse(p[5]), w, "budget");
  s.budget_spent = must(Money::parse(p[6]), w, "budget_spent");
  s.time_remaining = Millis{std::llround(must(to_double(p[7]), w, "time_remaining_s") * 1000.0)};
  need(rs[1], 5, "counts");
  for (std::size_t i = 0; i < 4; ++i) {
    s.counts[i] = must(to_unsigned<std::size_t>(rs[1][i + 1]), w, "counts");
  }
  for (std::size_t i = 2; i < rs.size(); ++i) {
    const Record& n = rs[i];
    need(n, 6, "node");
    if (n[0] != "node") bad(w, "node tag");
    s.node_rows.push_back({must(parse_node_id(n[1]), w, "node id"), n[2],
                           must(to_unsigned<std::uint64_t>(n[4]), w, "assigned"),
                           must(to_unsigned<std::uint64_t>(n[5]), w, "completed"),
                           must(parse_node_status(n[3]), w, "node status")});
  }
  return s;
}

Record job_record(const Job& j) {
  return {to_string(j.id),          j.name, std::string(to_string(j.state)), opt_node(j.assigned_node),
          opt_number(j.execution_time), j.cost_incurred.to_string(), j.remarks};
}

Record job_detail_record(const Job& j) {
  Record r = job_record(j);
  r.push_back(std::to_string(j.attempts));
  r.push_back(format_number(j.est_cpu_s));
  return r;
}

Job parse_job_record(const Record& r) {
  constexpr std::string_view w = "job";
  if (r.size() != 7 && r.size() != 9) need(r, 7, w);
  Job j;
  j.id = must(parse_job_id(r[0]), w, "id");
  j.name = r[1];
  j.state = must(parse_job_state(r[2]), w, "state");
  j.assigned_node = opt_node_field(r[3], w);
  j.execution_time = opt_number_field(r[4], w, "exec_time_s");
  j.cost_incurred = must(Money::parse(r[5]), w, "cost");
  j.remarks = r[6];
  if (r.size() == 9) {
    j.attempts = must(to_unsigned<std::uint32_t>(r[7]), w, "attempts");
    j.est_cpu_s = must(to_double(r[8]), w, "est_cpu_s");
  }
  return j;
}

Record event_record(const JobEvent& e) {
  return {"event", std::string(to_string(e.kind)), format_utc(e.at), opt_node(e.node),
          opt_number(e.cpu_seconds)};
}

JobEvent parse_event_record(const Record& r) {
  constexpr std::string_view w = "event";
  need(r, 5, w);
  if (r[0] != "event") bad(w, "tag");
  JobEvent e;
  bool known = false;
  for (auto k : kAllJobEventKinds) {
    if (to_string(k) == r[1]) {
      e.kind = k;
      known = true;
    }
  }
  if (!known) bad(w, "kind");
  e.at = must(parse_iso8601(r[2]), w, "at");
  e.node = opt_node_field(r[3], w);
  e.cpu_seconds = opt_number_field(r[4], w, "cpu_seconds");
  return e;
}

Record resource_record(const GridNode& n) {
  return {to_string(n.id),
          n.server_name,
          n.hostname,
          format_number(n.rate),
          format_number(n.speed),
          std::to_string(n.capacity),
          std::string(to_string(n.status)),
          n.remarks,
          std::to_string(n.assigned_count),
          std::to_string(n.completed_count)};
}

GridNode parse_resource_record(const Record& r) {
  constexpr std::string_view w = "resource";
  need(r, 10, w);
  GridNode n;
  n.id = must(parse_node_id(r[0]), w, "id");
  n.server_name = r[1];
  n.hostname = r[2];
  n.rate = must(to_double(r[3]), w, "rate");
  n.speed = must(to_double(r[4]), w, "speed");
  n.capacity = must(to_unsigned<std::uint32_t>(r[5]), w, "capacity");
  n.status = must(parse_node_status(r[6]), w, "status");
  n.remarks = r[7];
  n.assigned_count = must(to_unsigned<std::uint64_t>(r[8]), w, "assigned");
  n.completed_count = must(to_unsigned<std::uint64_t>(r[9]), w, "completed");
  return n;
}

JobPage parse_job_page(const std::vector<Record>& rs) {
  if (rs.empty() || rs[0].size() != 2 || rs[0][0] != "total") {
    throw MalformedResponse("job page must start with a total record");
  }
  JobPage page;
  page.total = must(to_unsigned<std::size_t>(rs[0][1]), "total", "count");
  for (std::size_t i = 1; i < rs.size(); ++i) page.jobs.push_back(parse_job_record(rs[i]));
  return page;
}

JobInfo parse_job_info(const std::vector<Record>& rs) {
  if (rs.empty()) throw MalformedResponse("job info answer is empty");
  JobInfo info;
  info.job = parse_job_record(rs[0]);
  for (std::size_t i = 1; i < rs.size(); ++i) info.history.push_back(parse_event_record(rs[i]));
  return info;
}

wire::Response Handler::handle(const wire::Request& req) {
  try {
    return dispatch(req);
  } catch (const Error& e) {
    return wire::Err{static_cast<int>(e.code()), e.what()};
  } catch (const std::exception& e) {
    return wire::Err{500, std::string("internal error: ") + e.what()};
  }
}

wire::Ok Handler::dispatch(const wire::Request& req) {
  const std::string& v = req.verb;
  const auto& a = req.args;
  wire::Ok ok;
  auto& out = ok.records;

  if (v == "HELLO") {
    arity(req, 0, 1);
    out.push_back({std::string(wire::kProtocolVersion)});
  } else if (v == "EXP-LIST") {
    arity(req, 0, 0);
    for (const auto& e : broker_.list_experiments()) out.push_back(experiment_record(e));
  } else if (v == "EXP-CREATE") {
    if (a.size() < 4) arity(req, 4, 4);
    ExperimentSpec spec{a[0], {}, arg_qos(a[1], a[2], a[3])};
    for (std::size_t i = 4; i < a.size(); ++i) {
      const auto colon = a[i].rfind(':');
      const auto est = colon == std::string::npos ? std::nullopt : to_double(std::string_view(a[i]).substr(colon + 1));
      if (!est) throw ValidationError("jobs", "expected name:est_cpu_s, got '" + a[i] + "'");
      spec.jobs.push_back({a[i].substr(0, colon), *est});
    }
    out.push_back({to_string(broker_.create_experiment(spec))});
  } else if (v == "QOS-GET") {
    arity(req, 1, 1);
    out.push_back(qos_record(broker_.get_qos(arg_experiment(a[0]))));
  } else if (v == "QOS-SET") {
    arity(req, 4, 4);
    const auto id = arg_experiment(a[0]);
    out.push_back(feasibility_record(broker_.set_qos(id, arg_qos(a[1], a[2], a[3]))));
  } else if (v == "EXP-START" || v == "EXP-STOP" || v == "EXP-SHUTDOWN") {
    arity(req, 1, 1);
    const auto action = v == "EXP-START"  ? ExperimentAction::kStart
                        : v == "EXP-STOP" ? ExperimentAction::kStop
                                          : ExperimentAction::kShutdown;
    out.push_back({std::string(to_string(broker_.control(arg_experiment(a[0]), action)))});
  } else if (v == "EXP-STATUS") {
    arity(req, 1, 1);
    out = status_records(broker_.experiment_status(arg_experiment(a[0])));
  } else if (v == "JOB-LIST") {
    arity(req, 3, 4);
    const auto id = arg_experiment(a[0]);
    std::optional<JobState> filter;
    if (a.size() == 4 && !a[3].empty()) {
      filter = parse_job_state(a[3]);
      if (!filter) throw ValidationError("state", "unknown job state '" + a[3] + "'");
    }
    const auto page = broker_.list_jobs(id, arg_size(a[1], "offset"), arg_size(a[2], "limit"), filter);
    out.reserve(page.jobs.size() + 1);
    out.push_back({"total", std::to_string(page.total)});
    for (const auto& j : page.jobs) out.push_back(job_record(j));
  } else if (v == "JOB-INFO") {
    arity(req, 2, 2);
    const auto info = broker_.job_info(arg_experiment(a[0]), arg_job(a[1]));
    out.push_back(job_detail_record(info.job));
    for (const auto& e : info.history) out.push_back(event_record(e));
  } else if (v == "JOB-RESTART") {
    arity(req, 2, 2);
    out.push_back(job_record(broker_.restart_job(arg_experiment(a[0]), arg_job(a[1]))));
  } else if (v == "JOB-RESTART-FAILED") {
    arity(req, 1, 1);
    out.push_back({std::to_string(broker_.restart_failed(arg_experiment(a[0])))});
  } else if (v == "RES-LIST") {
    arity(req, 0, 0);
    for (const auto& n : broker_.list_resources()) out.push_back(resource_record(n));
  } else {
    throw BadRequest("unknown verb " + v);
  }
  return ok;
}

}  // namespace gridsteer::protocol
