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

#include "gridsteer/broker.hpp"

#include <algorithm>
#include <cmath>

#include "gridsteer/errors.hpp"

namespace gridsteer {

using econosched::DeferReason;
using nodesim::JobKey;

Broker::Broker(std::vector<nodesim::NodeConfig> nodes, std::uint64_t seed, Timestamp start)
    : sim_(nodes, seed, start), clock_(start) {
  for (const auto& cfg : sim_.configs()) nodes_.push_back(cfg.node);
}

Broker::Record& Broker::record(ExperimentId id) {
  auto it = experiments_.find(id);
  if (it == experiments_.end()) throw NotFound("no such experiment: " + to_string(id));
  return it->second;
}

const Broker::Record& Broker::record(ExperimentId id) const {
  return const_cast<Broker*>(this)->record(id);
}

const Experiment& Broker::experiment(ExperimentId id) const { return record(id).exp; }

GridNode& Broker::node(NodeId id) {
  for (auto& n : nodes_) {
    if (n.id == id) return n;
  }
  throw NotFound("unknown node " + to_string(id));
}

void Broker::note(std::string text) { log_.emplace_back(clock_, std::move(text)); }

namespace {

void validate_qos(const QoSParams& qos) {
  if (qos.budget < Money{}) throw ValidationError("budget", "must be >= 0");
}

}  // namespace

ExperimentId Broker::create_experiment(const ExperimentSpec& spec) {
  if (spec.jobs.empty()) throw ValidationError("jobs", "an experiment needs at least one job");
  for (const auto& j : spec.jobs) {
    if (!(j.est_cpu_s > 0.0) || !std::isfinite(j.est_cpu_s)) {
      throw ValidationError("est_cpu_s", "must be > 0 (job '" + j.name + "')");
    }
  }
  validate_qos(spec.qos);

  Record rec;
  rec.exp.id = ExperimentId{next_experiment_++};
  rec.exp.name = spec.name;
  rec.exp.qos = spec.qos;
  rec.exp.jobs.reserve(spec.jobs.size());
  for (std::size_t i = 0; i < spec.jobs.size(); ++i) {
    Job job;
    job.id = JobId{static_cast<std::uint32_t>(i + 1)};
    job.name = spec.jobs[i].name;
    job.est_cpu_s = spec.jobs[i].est_cpu_s;
    rec.exp.jobs.push_back(std::move(job));
  }
  rec.history.resize(spec.jobs.size());
  const ExperimentId id = rec.exp.id;
  experiments_.emplace(id, std::move(rec));
  note("create " + to_string(id) + " with " + std::to_string(spec.jobs.size()) + " jobs");
  return id;
}

econosched::FeasibilityReport Broker::set_qos(ExperimentId id, const QoSParams& qos) {
  Record& rec = record(id);
  if (rec.exp.state == ExperimentState::kShutdown) {
    throw InvalidState(to_string(id) + " is shut down");
  }
  validate_qos(qos);
  rec.exp.qos = qos;
  note("qos " + to_string(id) + " deadline=" + format_utc(qos.deadline) +
       " budget=" + qos.budget.to_string() + " mode=" + std::string(to_string(qos.optimization)));
  return feasibility(id);
}

QoSParams Broker::get_qos(ExperimentId id) const { return record(id).exp.qos; }

econosched::FeasibilityReport Broker::feasibility(ExperimentId id) const {
  const auto l = loads();
  return econosched::check_feasibility(record(id).exp, l, clock_);
}

void Broker::apply(Record& rec, JobId job, const JobEvent& event, std::optional<NodeTerms> terms) {
  rec.exp.apply(job, event, terms);
  rec.history[job.value - 1].push_back(event);
}

ExperimentState Broker::control(ExperimentId id, ExperimentAction action) {
  Record& rec = record(id);
  // Validate first so a refused action leaves the simulator untouched.
  Experiment next = apply_experiment_transition(rec.exp, action, clock_);

  if (action != ExperimentAction::kStart) {
    const auto kind =
        action == ExperimentAction::kStop ? JobEventKind::kAbortRequeue : JobEventKind::kFail;
    for (const auto& job : rec.exp.jobs) {
      if (job.state != JobState::kRunning) continue;
      const JobKey key{id, job.id};
      sim_.cancel(key);
      in_flight_.erase(key);
      rec.history[job.id.value - 1].push_back(
          JobEvent{kind, clock_, kind == JobEventKind::kFail ? job.assigned_node : std::nullopt, {}});
    }
  }
  rec.exp = std::move(next);
  note(std::string(to_string(action)) + " " + to_string(id));
  if (action == ExperimentAction::kStart) tick(clock_);
  return rec.exp.state;
}

void Broker::consume(const nodesim::SimEvent& e) {
  switch (e.kind) {
    case nodesim::SimEventKind::kNodeDown:
      node(e.node).status = NodeStatus::kDown;
      return;
    case nodesim::SimEventKind::kNodeUp:
      node(e.node).status = NodeStatus::kUp;
      return;
    case nodesim::SimEventKind::kJobDone:
    case nodesim::SimEventKind::kJobFailed:
      break;
  }
  const JobKey key = *e.job;
  in_flight_.erase(key);
  Record& rec = record(key.experiment);
  GridNode& n = node(e.node);
  if (e.kind == nodesim::SimEventKind::kJobDone) {
    apply(rec, key.job, JobEvent{JobEventKind::kComplete, e.at, e.node, e.cpu_seconds},
          NodeTerms{n.rate, n.speed});
    ++n.completed_count;
  } else {
    apply(rec, key.job, JobEvent{JobEventKind::kFail, e.at, e.node, {}});
    rec.exp.find_job(key.job)->remarks =
        e.reason == "NodeDown" ? "node " + n.server_name + " went down" : "failed on " + n.server_name;
  }
}

std::vector<econosched::NodeLoad> Broker::loads() const {
  std::vector<econosched::NodeLoad> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back({n, std::vector<Timestamp>(n.capacity, clock_)});
  for (const auto& [key, f] : in_flight_) {
    for (auto& load : out) {
      if (load.node.id != f.node) continue;
      auto slot = std::min_element(load.slot_free_at.begin(), load.slot_free_at.end());
      *slot = std::max(f.est_finish, clock_);
      break;
    }
  }
  return out;
}

std::size_t Broker::schedule(Record& rec) {
  Experiment& exp = rec.exp;
  std::vector<const Job*> ready;
  for (const auto& j : exp.jobs) {
    if (j.state == JobState::kReady) ready.push_back(&j);
  }
  if (ready.empty()) return 0;

  Money committed = exp.budget_spent;
  Timestamp busy_until = clock_;
  for (const auto& [key, f] : in_flight_) {
    if (key.experiment != exp.id) continue;
    committed += f.est_cost;
    busy_until = std::max(busy_until, f.est_finish);
  }
  const Money remaining = std::max(Money{}, exp.qos.budget - committed);
  const auto l = loads();
  const auto plan = econosched::plan_dispatch(std::span<const Job* const>(ready), l, exp.qos,
                                              remaining, clock_, busy_until);

  std::size_t dispatched = 0;
  for (const auto& a : plan.assignments) {
    Job* job = exp.find_job(a.job);
    if (!sim_.dispatch(exp.id, *job, a.node, clock_)) continue;
    GridNode& n = node(a.node);
    apply(rec, a.job, JobEvent{JobEventKind::kDispatch, clock_, a.node, {}});
    job->remarks.clear();
    ++n.assigned_count;
    in_flight_[JobKey{exp.id, a.job}] =
        InFlight{a.node, clock_ + econosched::duration_on(job->est_cpu_s, n.speed),
                 econosched::estimate_cost(job->est_cpu_s, n)};
    ++dispatched;
  }
  for (const auto& d : plan.deferred) {
    Job* job = exp.find_job(d.job);
    std::string_view remark;
    switch (d.reason) {
      case DeferReason::kBudgetGuard: remark = "budget exhausted"; break;
      case DeferReason::kDeadlineGuard: remark = "deadline cannot be met"; break;
      case DeferReason::kAllNodesDown: remark = "waiting for nodes to come back up"; break;
      case DeferReason::kNoCapacity: continue;
    }
    if (job->remarks != remark) job->remarks = remark;
  }
  return dispatched;
}

std::size_t Broker::tick(Timestamp now) {
  now = std::max(now, clock_);
  for (const auto& e : sim_.advance(now)) consume(e);
  clock_ = now;
  std::size_t dispatched = 0;
  for (auto& [id, rec] : experiments_) {
    if (rec.exp.state == ExperimentState::kRunning) dispatched += schedule(rec);
  }
  return dispatched;
}

JobPage Broker::list_jobs(ExperimentId id, std::size_t offset, std::size_t limit,
                          std::optional<JobState> filter) const {
  const Record& rec = record(id);
  if (limit < 1 || limit > kMaxPageLimit) {
    throw ValidationError("limit", "must be in [1, " + std::to_string(kMaxPageLimit) + "]");
  }
  JobPage page;
  for (const auto& j : rec.exp.jobs) {
    if (filter && j.state != *filter) continue;
    if (page.total >= offset && page.jobs.size() < limit) page.jobs.push_back(j);
    ++page.total;
  }
  return page;
}

JobInfo Broker::job_info(ExperimentId id, JobId job) const {
  const Record& rec = record(id);
  const Job* j = rec.exp.find_job(job);
  if (j == nullptr) throw NotFound("no such job: " + to_string(job));
  return {*j, rec.history[job.value - 1]};
}

Job Broker::restart_job(ExperimentId id, JobId job) {
  Record& rec = record(id);
  const Job* j = rec.exp.find_job(job);
  if (j == nullptr) throw NotFound("no such job: " + to_string(job));
  if (j->state == JobState::kRunning) {
    apply(rec, job, JobEvent{JobEventKind::kAbortRequeue, clock_, {}, {}});
    const JobKey key{id, job};
    sim_.cancel(key);
    in_flight_.erase(key);
  } else {
    apply(rec, job, JobEvent{JobEventKind::kRestart, clock_, {}, {}});
  }
  note("restart " + to_string(id) + "/" + to_string(job));
  return *rec.exp.find_job(job);
}

std::size_t Broker::restart_failed(ExperimentId id) {
  Record& rec = record(id);
  std::size_t count = 0;
  for (const auto& j : rec.exp.jobs) {
    if (j.state != JobState::kFailed) continue;
    apply(rec, j.id, JobEvent{JobEventKind::kRestart, clock_, {}, {}});
    ++count;
  }
  note("restart-failed " + to_string(id) + " count=" + std::to_string(count));
  return count;
}

std::vector<GridNode> Broker::list_resources() const { return nodes_; }

ExperimentStatus Broker::experiment_status(ExperimentId id) const {
  return aggregate_status(record(id).exp, nodes_, clock_);
}

std::vector<ExperimentSummary> Broker::list_experiments() const {
  std::vector<ExperimentSummary> out;
  for (const auto& [id, rec] : experiments_) {
    out.push_back({id, rec.exp.name, rec.exp.state, rec.exp.jobs.size()});
  }
  return out;
}

bool Broker::can_progress() const {
  if (!in_flight_.empty()) return true;
  if (!sim_.next_event_time()) return false;
  // Only a node coming back up can unblock Ready work.
  for (const auto& [id, rec] : experiments_) {
    if (rec.exp.state != ExperimentState::kRunning) continue;
    for (const auto& j : rec.exp.jobs) {
      if (j.state == JobState::kReady) return true;
    }
  }
  return false;
}

std::size_t Broker::advance(Timestamp until) {
  std::size_t dispatches = 0;
  while (const auto next = sim_.next_event_time()) {
    if (*next > until) break;
    dispatches += tick(std::max(*next, clock_));
  }
  if (until > clock_) dispatches += tick(until);
  return dispatches;
}

RunSummary Broker::run_to_completion(std::optional<Timestamp> limit) {
  RunSummary summary;
  summary.dispatches += tick(clock_);
  ++summary.ticks;
  while (can_progress()) {
    const auto next = sim_.next_event_time();
    if (!next) break;
    if (limit && *next > *limit) {
      summary.dispatches += tick(*limit);
      ++summary.ticks;
      break;
    }
    summary.dispatches += tick(*next);
    ++summary.ticks;
  }
  summary.finished_at = clock_;
  return summary;
}

}  // namespace gridsteer
