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

#include "gridsteer/model.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_map>

#include "gridsteer/errors.hpp"

namespace gridsteer {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

[[noreturn]] void reject(JobState state, JobEventKind kind) {
  throw InvalidTransition("job cannot take " + std::string(to_string(kind)) + " in state " +
                          std::string(to_string(state)));
}

}  // namespace

Money charge_for(double cpu_seconds, NodeTerms terms) {
  return Money::from_double(cpu_seconds / terms.speed * terms.rate);
}

Job apply_job_transition(Job job, const JobEvent& event, std::optional<NodeTerms> terms) {
  switch (event.kind) {
    case JobEventKind::kDispatch:
      if (job.state != JobState::kReady) reject(job.state, event.kind);
      if (!event.node) throw std::invalid_argument("Dispatch event without a node");
      job.state = JobState::kRunning;
      job.attempts += 1;
      job.assigned_node = event.node;
      job.dispatched_at = event.at;
      job.execution_time.reset();
      break;
    case JobEventKind::kComplete:
      if (job.state != JobState::kRunning) reject(job.state, event.kind);
      if (!event.cpu_seconds || *event.cpu_seconds <= 0.0) {
        throw std::invalid_argument("Complete event needs positive cpu_seconds");
      }
      if (!terms) throw std::invalid_argument("Complete event needs node terms");
      job.state = JobState::kCompleted;
      job.execution_time = *event.cpu_seconds / terms->speed;
      job.cost_incurred += charge_for(*event.cpu_seconds, *terms);
      job.dispatched_at.reset();
      break;
    case JobEventKind::kFail:
      if (job.state != JobState::kRunning) reject(job.state, event.kind);
      job.state = JobState::kFailed;
      job.dispatched_at.reset();
      break;
    case JobEventKind::kRestart:
      if (job.state != JobState::kFailed) reject(job.state, event.kind);
      job.state = JobState::kReady;
      break;
    case JobEventKind::kAbortRequeue:
      if (job.state != JobState::kRunning) reject(job.state, event.kind);
      job.state = JobState::kReady;
      job.assigned_node.reset();
      job.dispatched_at.reset();
      break;
  }
  return job;
}

Job* Experiment::find_job(JobId id) {
  auto it = std::lower_bound(jobs.begin(), jobs.end(), id,
                             [](const Job& j, JobId v) { return j.id < v; });
  return it != jobs.end() && it->id == id ? &*it : nullptr;
}

const Job* Experiment::find_job(JobId id) const {
  return const_cast<Experiment*>(this)->find_job(id);
}

Money Experiment::ledger_sum() const {
  Money sum;
  for (const auto& j : jobs) sum += j.cost_incurred;
  return sum;
}

const Job& Experiment::apply(JobId id, const JobEvent& event, std::optional<NodeTerms> terms) {
  Job* job = find_job(id);
  if (job == nullptr) throw NotFound("no such job: " + to_string(id));
  const Money before = job->cost_incurred;
  *job = apply_job_transition(std::move(*job), event, terms);
  budget_spent += job->cost_incurred - before;
  return *job;
}

Experiment apply_experiment_transition(Experiment exp, ExperimentAction action, Timestamp now) {
  const auto refuse = [&] {
    throw InvalidTransition("experiment cannot " + std::string(to_string(action)) +
                            " in state " + std::string(to_string(exp.state)));
  };
  if (exp.state == ExperimentState::kShutdown) refuse();
  switch (action) {
    case ExperimentAction::kStart:
      if (exp.state == ExperimentState::kRunning) refuse();
      if (!exp.started_at) exp.started_at = now;
      exp.state = ExperimentState::kRunning;
      break;
    case ExperimentAction::kStop:
      if (exp.state != ExperimentState::kRunning) refuse();
      for (auto& job : exp.jobs) {
        if (job.state == JobState::kRunning) {
          exp.apply(job.id, JobEvent{JobEventKind::kAbortRequeue, now, {}, {}});
        }
      }
      exp.state = ExperimentState::kStopped;
      break;
    case ExperimentAction::kShutdown:
      for (auto& job : exp.jobs) {
        if (job.state == JobState::kRunning) {
          exp.apply(job.id, JobEvent{JobEventKind::kFail, now, job.assigned_node, {}});
          job.remarks = "shutdown";
        }
      }
      exp.state = ExperimentState::kShutdown;
      break;
  }
  return exp;
}

ExperimentStatus aggregate_status(const Experiment& exp, std::span<const GridNode> nodes,
                                  Timestamp now) {
  ExperimentStatus st;
  st.id = exp.id;
  st.state = exp.state;
  st.now = now;
  st.deadline = exp.qos.deadline;
  st.budget = exp.qos.budget;
  st.budget_spent = exp.budget_spent;
  st.time_remaining = exp.qos.deadline - now;
  for (const auto& job : exp.jobs) ++st.counts[static_cast<std::size_t>(job.state)];
  st.node_rows.reserve(nodes.size());
  for (const auto& n : nodes) {
    st.node_rows.push_back({n.id, n.server_name, n.assigned_count, n.completed_count, n.status});
  }
  return st;
}

std::string_view to_string(Optimization o) {
  return o == Optimization::kTimeMin ? "time" : "cost";
}

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::kReady: return "Ready";
    case JobState::kRunning: return "Running";
    case JobState::kCompleted: return "Completed";
    case JobState::kFailed: return "Failed";
  }
  return "?";
}

std::string_view to_string(JobEventKind k) {
  switch (k) {
    case JobEventKind::kDispatch: return "Dispatch";
    case JobEventKind::kComplete: return "Complete";
    case JobEventKind::kFail: return "Fail";
    case JobEventKind::kRestart: return "Restart";
    case JobEventKind::kAbortRequeue: return "AbortRequeue";
  }
  return "?";
}

std::string_view to_string(NodeStatus s) { return s == NodeStatus::kUp ? "Up" : "Down"; }

std::string_view to_string(ExperimentState s) {
  switch (s) {
    case ExperimentState::kConfigured: return "Configured";
    case ExperimentState::kRunning: return "Running";
    case ExperimentState::kStopped: return "Stopped";
    case ExperimentState::kShutdown: return "Shutdown";
  }
  return "?";
}

std::string_view to_string(ExperimentAction a) {
  switch (a) {
    case ExperimentAction::kStart: return "start";
    case ExperimentAction::kStop: return "stop";
    case ExperimentAction::kShutdown: return "shutdown";
  }
  return "?";
}

std::optional<Optimization> parse_optimization(std::string_view text) {
  if (iequals(text, "time") || iequals(text, "timemin")) return Optimization::kTimeMin;
  if (iequals(text, "cost") || iequals(text, "costmin")) return Optimization::kCostMin;
  return std::nullopt;
}

std::optional<JobState> parse_job_state(std::string_view text) {
  for (auto s : kAllJobStates) {
    if (iequals(text, to_string(s))) return s;
  }
  return std::nullopt;
}

std::optional<ExperimentAction> parse_experiment_action(std::string_view text) {
  for (auto a : {ExperimentAction::kStart, ExperimentAction::kStop, ExperimentAction::kShutdown}) {
    if (iequals(text, to_string(a))) return a;
  }
  return std::nullopt;
}

std::optional<ExperimentState> parse_experiment_state(std::string_view text) {
  for (auto s : {ExperimentState::kConfigured, ExperimentState::kRunning,
                 ExperimentState::kStopped, ExperimentState::kShutdown}) {
    if (iequals(text, to_string(s))) return s;
  }
  return std::nullopt;
}

std::optional<NodeStatus> parse_node_status(std::string_view text) {
  if (iequals(text, "Up")) return NodeStatus::kUp;
  if (iequals(text, "Down")) return NodeStatus::kDown;
  return std::nullopt;
}

}  // namespace gridsteer
