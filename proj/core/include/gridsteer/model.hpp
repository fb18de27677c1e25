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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridsteer/ids.hpp"
#include "gridsteer/money.hpp"
#include "gridsteer/time.hpp"

namespace gridsteer {

enum class Optimization { kTimeMin, kCostMin };

// Deadline, budget and optimisation preference steering one experiment.
struct QoSParams {
  Timestamp deadline{};
  Money budget{};
  Optimization optimization = Optimization::kTimeMin;

  friend bool operator==(const QoSParams&, const QoSParams&) = default;
};

enum class JobState { kReady, kRunning, kCompleted, kFailed };
inline constexpr std::array<JobState, 4> kAllJobStates = {
    JobState::kReady, JobState::kRunning, JobState::kCompleted, JobState::kFailed};

enum class JobEventKind { kDispatch, kComplete, kFail, kRestart, kAbortRequeue };
inline constexpr std::array<JobEventKind, 5> kAllJobEventKinds = {
    JobEventKind::kDispatch, JobEventKind::kComplete, JobEventKind::kFail,
    JobEventKind::kRestart, JobEventKind::kAbortRequeue};

struct JobEvent {
  JobEventKind kind = JobEventKind::kDispatch;
  Timestamp at{};
  std::optional<NodeId> node;
  // Normalised CPU-seconds (speed-1.0 equivalent). Complete only.
  std::optional<double> cpu_seconds;

  friend bool operator==(const JobEvent&, const JobEvent&) = default;
};

struct Job {
  JobId id;
  std::string name;
  JobState state = JobState::kReady;
  std::string remarks;
  std::optional<NodeId> assigned_node;
  // Wall seconds spent on the node by the completed attempt.
  std::optional<double> execution_time;
  Money cost_incurred;
  double est_cpu_s = 0.0;
  std::uint32_t attempts = 0;
  // Start of the current attempt; present while Running.
  std::optional<Timestamp> dispatched_at;

  friend bool operator==(const Job&, const Job&) = default;
};

enum class NodeStatus { kUp, kDown };

struct GridNode {
  NodeId id;
  std::string server_name;
  std::string hostname;
  double rate = 0.0;   // G$ per second of node time
  double speed = 1.0;  // est_cpu_s / speed = wall seconds on this node
  std::uint32_t capacity = 1;
  NodeStatus status = NodeStatus::kUp;
  std::string remarks;
  std::uint64_t assigned_count = 0;
  std::uint64_t completed_count = 0;

  friend bool operator==(const GridNode&, const GridNode&) = default;
};

// The pricing terms a completed attempt is charged under.
struct NodeTerms {
  double rate = 0.0;
  double speed = 1.0;
};

enum class ExperimentState { kConfigured, kRunning, kStopped, kShutdown };
enum class ExperimentAction { kStart, kStop, kShutdown };

struct Experiment {
  ExperimentId id;
  std::string name;
  QoSParams qos;
  std::vector<Job> jobs;  // ascending id
  ExperimentState state = ExperimentState::kConfigured;
  std::optional<Timestamp> started_at;
  Money budget_spent;

  Job* find_job(JobId id);
  const Job* find_job(JobId id) const;
  // Sum of per-job cost_incurred; equals budget_spent whenever the ledger is
  // maintained through apply().
  Money ledger_sum() const;
  // Applies one job transition and keeps budget_spent in step.
  const Job& apply(JobId job, const JobEvent& event, std::optional<NodeTerms> terms = {});
};

struct NodeRow {
  NodeId id;
  std::string server_name;
  std::uint64_t assigned_count = 0;
  std::uint64_t completed_count = 0;
  NodeStatus status = NodeStatus::kUp;

  friend bool operator==(const NodeRow&, const NodeRow&) = default;
};

struct ExperimentStatus {
  ExperimentId id;
  ExperimentState state = ExperimentState::kConfigured;
  Timestamp now{};
  Timestamp deadline{};
  Money budget;
  Money budget_spent;
  Millis time_remaining{0};  // deadline - now, negative once past
  std::array<std::size_t, 4> counts{};  // indexed by JobState
  std::vector<NodeRow> node_rows;

  std::size_t count(JobState s) const { return counts[static_cast<std::size_t>(s)]; }
  std::size_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }

  friend bool operator==(const ExperimentStatus&, const ExperimentStatus&) = default;
};

// Charge for an attempt that consumed cpu_seconds (normalised) on a node.
Money charge_for(double cpu_seconds, NodeTerms terms);

// The job lifecycle machine:
//   Ready   --Dispatch-->     Running
//   Running --Complete-->     Completed
//   Running --Fail-->         Failed
//   Failed  --Restart-->      Ready
//   Running --AbortRequeue--> Ready
// Anything else throws InvalidTransition. Complete requires terms.
Job apply_job_transition(Job job, const JobEvent& event, std::optional<NodeTerms> terms = {});

// Configured/Stopped --Start--> Running; Running --Stop--> Stopped;
// any live state --Shutdown--> Shutdown. Stop requeues running jobs; Shutdown
// fails them with remarks "shutdown".
Experiment apply_experiment_transition(Experiment exp, ExperimentAction action, Timestamp now);

ExperimentStatus aggregate_status(const Experiment& exp, std::span<const GridNode> nodes,
                                  Timestamp now);

std::string_view to_string(Optimization o);
std::string_view to_string(JobState s);
std::string_view to_string(JobEventKind k);
std::string_view to_string(NodeStatus s);
std::string_view to_string(ExperimentState s);
std::string_view to_string(ExperimentAction a);

// Wire tokens: "time"/"cost", "Ready"..., "start"/"stop"/"shutdown". Parsing is
// case-insensitive.
std::optional<Optimization> parse_optimization(std::string_view text);
std::optional<JobState> parse_job_state(std::string_view text);
std::optional<ExperimentAction> parse_experiment_action(std::string_view text);
std::optional<ExperimentState> parse_experiment_state(std::string_view text);
std::optional<NodeStatus> parse_node_status(std::string_view text);

}  // namespace gridsteer
