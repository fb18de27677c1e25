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

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridsteer/model.hpp"

namespace gridsteer::econosched {

// A node as the planner sees it: static terms plus the instant each capacity
// slot becomes free. Slots free at or before `now` are idle.
struct NodeLoad {
  GridNode node;
  std::vector<Timestamp> slot_free_at;  // size == node.capacity
};

enum class DeferReason { kBudgetGuard, kDeadlineGuard, kNoCapacity, kAllNodesDown };
std::string_view to_string(DeferReason r);

struct Assignment {
  JobId job;
  NodeId node;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Deferral {
  JobId job;
  DeferReason reason;
  friend bool operator==(const Deferral&, const Deferral&) = default;
};

struct DispatchPlan {
  std::vector<Assignment> assignments;  // only onto slots idle at planning time
  std::vector<Deferral> deferred;
  friend bool operator==(const DispatchPlan&, const DispatchPlan&) = default;
};

enum class Verdict { kFeasible, kMarginal, kInfeasible };
std::string_view to_string(Verdict v);

struct FeasibilityReport {
  bool time_ok = false;
  bool budget_ok = false;
  Timestamp est_completion{};
  Money est_cost;
  Verdict verdict = Verdict::kInfeasible;
  std::string message;
};

struct Projection {
  Timestamp completion{};
  Money cost;
};

// Thrown by fast_forward when some jobs can never be placed. `partial` holds
// the projection for the work that can run.
class Stuck : public std::runtime_error {
 public:
  Stuck(std::vector<Deferral> jobs, Projection partial);
  const std::vector<Deferral>& jobs() const { return jobs_; }
  const Projection& partial() const { return partial_; }

 private:
  std::vector<Deferral> jobs_;
  Projection partial_;
};

// Wall seconds for est_cpu_s on the node.
double estimate_duration(double est_cpu_s, const GridNode& node);
// Duration as scheduled by the simulator: rounded to the millisecond.
Millis duration_on(double est_cpu_s, double speed);
// (est_cpu_s / speed) * rate, rounded half-up to the cent.
Money estimate_cost(double est_cpu_s, const GridNode& node);

// Plans one scheduling round. TimeMin: earliest-completion-time greedy in job
// id order. CostMin: minimum-cost deadline-feasible placement (exact search on
// small ready sets, cheapest-feasible cascade otherwise). Jobs placed behind a
// busy slot are deferred with NoCapacity; the budget guard counts them as
// planned spend. TimeMin also switches to an exact search on small ready sets
// when it finds a strictly shorter makespan than the greedy.
//
// `committed_until` is the latest estimated finish of the experiment's jobs
// already running. The exact searches score a placement's makespan as no
// less than it, so a cheaper placement that does not delay the experiment
// wins the tie.
DispatchPlan plan_dispatch(std::span<const Job> ready_jobs, std::span<const NodeLoad> nodes,
                           const QoSParams& qos, Money budget_remaining, Timestamp now,
                           Timestamp committed_until = Timestamp::min());
// Same, without copying jobs.
DispatchPlan plan_dispatch(std::span<const Job* const> ready_jobs, std::span<const NodeLoad> nodes,
                           const QoSParams& qos, Money budget_remaining, Timestamp now,
                           Timestamp committed_until = Timestamp::min());

// Builds planner loads from node records and the running jobs of one
// experiment: each running job occupies one slot until its estimated finish.
std::vector<NodeLoad> loads_from_jobs(std::span<const GridNode> nodes, std::span<const Job> jobs,
                                      Timestamp now);

// Zero-failure, exact-estimate replay of the plan_dispatch policy from `now`
// with unlimited budget. Includes cost already incurred. Throws Stuck.
Projection fast_forward(std::span<const Job> jobs, std::span<const NodeLoad> nodes,
                        const QoSParams& qos, Timestamp now);
Projection fast_forward(std::span<const Job> jobs, std::span<const GridNode> nodes,
                        const QoSParams& qos, Timestamp now);

FeasibilityReport check_feasibility(const Experiment& exp, std::span<const NodeLoad> nodes,
                                    Timestamp now);
FeasibilityReport check_feasibility(const Experiment& exp, std::span<const GridNode> nodes,
                                    Timestamp now);

// Tuning for the exact CostMin search. Above these sizes the cascade is used.
inline constexpr std::size_t kExactMaxJobs = 8;
inline constexpr std::size_t kExactMaxSlots = 16;
inline constexpr std::size_t kExactMaxExpansions = 200'000;

}  // namespace gridsteer::econosched
