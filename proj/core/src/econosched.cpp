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

#include "gridsteer/econosched.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <unordered_map>

namespace gridsteer::econosched {
namespace {

struct Slot {
  std::size_t node = 0;  // index into the load span
  std::size_t index = 0;
  Timestamp free_at{};
};

struct Candidate {
  std::size_t slot = 0;
  Timestamp ect{};
  Money cost;
};

std::vector<Slot> up_slots(std::span<const NodeLoad> nodes) {
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) order[n] = n;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return nodes[a].node.id < nodes[b].node.id; });
  std::vector<Slot> slots;
  for (std::size_t n : order) {
    if (nodes[n].node.status != NodeStatus::kUp) continue;
    for (std::size_t i = 0; i < nodes[n].slot_free_at.size(); ++i) {
      slots.push_back({n, i, nodes[n].slot_free_at[i]});
    }
  }
  return slots;
}

// Estimated duration and cost per node for each distinct est_cpu_s seen in
// one planning pass. Ready sets are large but usually share a handful of
// estimates.
class CostCache {
 public:
  struct Row {
    std::vector<Millis> duration;  // indexed by position in the load span
    std::vector<Money> cost;
  };

  explicit CostCache(std::span<const NodeLoad> nodes) : nodes_(nodes) {}
  const Row& row(double est) {
    if (last_ != nullptr && last_est_ == est) return *last_;
    auto [it, fresh] = table_.try_emplace(est);
    if (fresh) {
      for (const auto& n : nodes_) {
        it->second.duration.push_back(duration_on(est, n.node.speed));
        it->second.cost.push_back(estimate_cost(est, n.node));
      }
    }
    last_est_ = est;
    last_ = &it->second;
    return it->second;
  }

 private:
  std::span<const NodeLoad> nodes_;
  std::unordered_map<double, Row> table_;
  double last_est_ = 0.0;
  const Row* last_ = nullptr;
};

// Slots grouped by node with each node's earliest-free slot (lowest slot
// index on ties). refresh() must follow every change to a slot's free_at.
class NodeGroups {
 public:
  explicit NodeGroups(const std::vector<Slot>& slots) {
    group_of_.resize(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (i == 0 || slots[i].node != slots[i - 1].node) {
        begin_.push_back(i);
        end_.push_back(i);
        best_.push_back(i);
      }
      group_of_[i] = begin_.size() - 1;
      end_.back() = i + 1;
    }
    for (std::size_t g = 0; g < begin_.size(); ++g) recompute(slots, g);
  }
  std::size_t size() const { return best_.size(); }
  std::size_t best(std::size_t group) const { return best_[group]; }
  void refresh(const std::vector<Slot>& slots, std::size_t slot) { recompute(slots, group_of_[slot]); }

 private:
  void recompute(const std::vector<Slot>& slots, std::size_t g) {
    std::size_t best = begin_[g];
    for (std::size_t i = begin_[g]; i < end_[g]; ++i) {
      if (slots[i].free_at < slots[best].free_at) best = i;
    }
    best_[g] = best;
  }

  std::vector<std::size_t> begin_, end_, best_, group_of_;
};

// One candidate per node: its earliest-free slot, in slot order.
void node_candidates(const Job& job, const std::vector<Slot>& slots, const NodeGroups& groups,
                     Timestamp now, CostCache& costs, std::vector<Candidate>& out) {
  out.clear();
  const CostCache::Row& row = costs.row(job.est_cpu_s);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t best = groups.best(g);
    const std::size_t node = slots[best].node;
    const Timestamp start = std::max(slots[best].free_at, now);
    out.push_back({best, start + row.duration[node], row.cost[node]});
  }
}

struct Placement {
  const Job* job = nullptr;
  std::size_t slot = 0;
  Money cost;
};

// Outcome of a planning pass before the budget guard: per job either a slot
// (with the slot's idle state decided in queue order) or a deferral.
struct RawPlan {
  std::vector<Placement> placed;  // job id order
  std::vector<Deferral> deferred;
};

void emit(const RawPlan& raw, const std::vector<Slot>& initial_slots,
          std::span<const NodeLoad> nodes, Money budget_remaining, Timestamp now,
          DispatchPlan& plan) {
  // A slot idle at `now` takes the first (lowest id) job queued on it; later
  // jobs on the same slot wait. The budget guard runs in job id order and
  // counts queued jobs as planned spend.
  std::vector<bool> slot_taken(initial_slots.size(), false);
  Money planned;
  for (const auto& p : raw.placed) {
    if (p.cost > budget_remaining - planned) {
      plan.deferred.push_back({p.job->id, DeferReason::kBudgetGuard});
      continue;
    }
    planned += p.cost;
    const bool idle = initial_slots[p.slot].free_at <= now && !slot_taken[p.slot];
    if (idle) {
      slot_taken[p.slot] = true;
      plan.assignments.push_back({p.job->id, nodes[initial_slots[p.slot].node].node.id});
    } else {
      plan.deferred.push_back({p.job->id, DeferReason::kNoCapacity});
    }
  }
  plan.deferred.insert(plan.deferred.end(), raw.deferred.begin(), raw.deferred.end());
  std::sort(plan.deferred.begin(), plan.deferred.end(),
            [](const Deferral& a, const Deferral& b) { return a.job < b.job; });
}

DispatchPlan plan_ect(const std::vector<const Job*>& jobs, std::span<const NodeLoad> nodes,
                      Money budget_remaining, Timestamp now) {
  DispatchPlan plan;
  std::vector<Slot> slots = up_slots(nodes);
  std::vector<Candidate> cands;
  CostCache costs(nodes);
  NodeGroups groups(slots);
  Money planned;
  for (const Job* job : jobs) {
    if (slots.empty()) {
      plan.deferred.push_back({job->id, DeferReason::kAllNodesDown});
      continue;
    }
    node_candidates(*job, slots, groups, now, costs, cands);
    const Candidate* best = &cands.front();
    for (const auto& c : cands) {
      if (std::tie(c.ect, c.cost) < std::tie(best->ect, best->cost)) best = &c;
    }
    if (best->cost > budget_remaining - planned) {
      plan.deferred.push_back({job->id, DeferReason::kBudgetGuard});
      continue;
    }
    planned += best->cost;
    Slot& slot = slots[best->slot];
    if (slot.free_at <= now) {
      plan.assignments.push_back({job->id, nodes[slot.node].node.id});
    } else {
      plan.deferred.push_back({job->id, DeferReason::kNoCapacity});
    }
    slot.free_at = best->ect;
    groups.refresh(slots, best->slot);
  }
  return plan;
}

// Cheapest-feasible cascade: each job (id order) takes the cheapest node whose
// earliest slot still finishes by the deadline; ties by ECT then node id.
RawPlan cascade(const std::vector<const Job*>& jobs, std::span<const NodeLoad> nodes,
                std::vector<Slot> slots, Timestamp deadline, Timestamp now) {
  RawPlan raw;
  std::vector<Candidate> cands;
  CostCache costs(nodes);
  NodeGroups groups(slots);
  for (const Job* job : jobs) {
    if (slots.empty()) {
      raw.deferred.push_back({job->id, DeferReason::kAllNodesDown});
      continue;
    }
    node_candidates(*job, slots, groups, now, costs, cands);
    const Candidate* best = nullptr;
    for (const auto& c : cands) {
      if (c.ect > deadline) continue;
      if (best == nullptr || std::tie(c.cost, c.ect) < std::tie(best->cost, best->ect)) best = &c;
    }
    if (best == nullptr) {
      raw.deferred.push_back({job->id, DeferReason::kDeadlineGuard});
      continue;
    }
    raw.placed.push_back({job, best->slot, best->cost});
    slots[best->slot].free_at = best->ect;
    groups.refresh(slots, best->slot);
  }
  return raw;
}

enum class Objective { kCost, kMakespan };

// Branch and bound over job -> slot placements. kCost minimises (cost,
// makespan) subject to every slot finishing by the deadline; kMakespan
// minimises (makespan, cost). A seed is only replaced by a strictly better
// placement.
class ExactSearch {
 public:
  // `floor` is the completion already committed by the experiment's running
  // jobs; no placement's makespan is scored below it.
  ExactSearch(Objective objective, const std::vector<const Job*>& jobs,
              std::span<const NodeLoad> nodes, const std::vector<Slot>& slots, Timestamp deadline,
              Timestamp now, Timestamp floor)
      : objective_(objective), jobs_(jobs), deadline_(deadline), floor_(std::max(floor, now)) {
    for (const auto& s : slots) load_.push_back(std::max(s.free_at, now));
    slot_node_.reserve(slots.size());
    for (const auto& s : slots) slot_node_.push_back(s.node);

    // Larger jobs first prunes earlier.
    order_.resize(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return jobs[a]->est_cpu_s > jobs[b]->est_cpu_s;
    });

    dur_.assign(jobs.size(), std::vector<Millis>(nodes.size()));
    cost_.assign(jobs.size(), std::vector<std::int64_t>(nodes.size()));
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        dur_[j][n] = duration_on(jobs[j]->est_cpu_s, nodes[n].node.speed);
        cost_[j][n] = estimate_cost(jobs[j]->est_cpu_s, nodes[n].node).cents();
      }
    }
    suffix_min_.assign(jobs.size() + 1, 0);
    for (std::size_t k = jobs.size(); k-- > 0;) {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (const auto& s : slots) best = std::min(best, cost_[order_[k]][s.node]);
      suffix_min_[k] = suffix_min_[k + 1] + best;
    }
    current_.assign(jobs.size(), 0);
  }

  void seed(const RawPlan& plan) {
    if (!plan.deferred.empty()) return;
    std::vector<Timestamp> load = load_;
    std::int64_t cost = 0;
    Timestamp makespan = floor_;
    std::vector<std::size_t> assign(jobs_.size());
    for (const auto& p : plan.placed) {
      const auto j = static_cast<std::size_t>(
          std::find(jobs_.begin(), jobs_.end(), p.job) - jobs_.begin());
      assign[j] = p.slot;
      load[p.slot] += dur_[j][slot_node_[p.slot]];
      cost += cost_[j][slot_node_[p.slot]];
      makespan = std::max(makespan, load[p.slot]);
    }
    best_cost_ = cost;
    best_makespan_ = makespan;
    best_ = assign;
  }

  // True when the search found a placement other than the seed.
  bool run() {
    search(0, 0, floor_);
    return improved_;
  }

  RawPlan result() const {
    RawPlan raw;
    for (std::size_t j = 0; j < jobs_.size(); ++j) {
      const std::size_t s = (*best_)[j];
      raw.placed.push_back({jobs_[j], s, Money::from_cents(cost_[j][slot_node_[s]])});
    }
    return raw;
  }

 private:
  bool better(std::int64_t cost, Timestamp makespan) const {
    if (!best_) return true;
    if (objective_ == Objective::kCost) {
      return std::tie(cost, makespan) < std::tie(best_cost_, best_makespan_);
    }
    return std::tie(makespan, cost) < std::tie(best_makespan_, best_cost_);
  }

  void search(std::size_t depth, std::int64_t cost, Timestamp makespan) {
    if (++expansions_ > kExactMaxExpansions) return;
    if (depth == order_.size()) {
      if (better(cost, makespan)) {
        best_cost_ = cost;
        best_makespan_ = makespan;
        best_ = current_;
        improved_ = true;
      }
      return;
    }
    // Cost and makespan bounds are both monotone along a branch.
    if (best_ && !better(cost + suffix_min_[depth], makespan)) return;
    const std::size_t j = order_[depth];
    // Equal-load slots of one node are interchangeable, so only the first of
    // them is tried.
    std::vector<std::size_t> cands;
    for (std::size_t s = 0; s < load_.size(); ++s) {
      bool duplicate = false;
      for (std::size_t prev : cands) {
        if (slot_node_[prev] == slot_node_[s] && load_[prev] == load_[s]) duplicate = true;
      }
      if (!duplicate) cands.push_back(s);
    }
    if (objective_ == Objective::kCost) {
      std::stable_sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
        return cost_[j][slot_node_[a]] < cost_[j][slot_node_[b]];
      });
    } else {
      std::stable_sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
        return load_[a] + dur_[j][slot_node_[a]] < load_[b] + dur_[j][slot_node_[b]];
      });
    }
    for (std::size_t s : cands) {
      const std::size_t n = slot_node_[s];
      const Timestamp finish = load_[s] + dur_[j][n];
      if (objective_ == Objective::kCost && finish > deadline_) continue;
      const Timestamp saved = load_[s];
      load_[s] = finish;
      current_[j] = s;
      search(depth + 1, cost + cost_[j][n], std::max(makespan, finish));
      load_[s] = saved;
    }
  }

  Objective objective_;
  const std::vector<const Job*>& jobs_;
  Timestamp deadline_;
  Timestamp floor_;
  std::vector<Timestamp> load_;
  std::vector<std::size_t> slot_node_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<Millis>> dur_;
  std::vector<std::vector<std::int64_t>> cost_;
  std::vector<std::int64_t> suffix_min_;
  std::vector<std::size_t> current_;
  std::optional<std::vector<std::size_t>> best_;
  std::int64_t best_cost_ = 0;
  Timestamp best_makespan_{};
  bool improved_ = false;
  std::size_t expansions_ = 0;
};

bool exact_applies(std::size_t jobs, std::size_t slots) {
  return slots > 0 && jobs > 0 && jobs <= kExactMaxJobs && slots <= kExactMaxSlots;
}

// ECT greedy without the budget guard, as a seed for the exact search.
RawPlan greedy_ect(const std::vector<const Job*>& jobs, std::span<const NodeLoad> nodes,
                   std::vector<Slot> slots, Timestamp now) {
  RawPlan raw;
  std::vector<Candidate> cands;
  CostCache costs(nodes);
  NodeGroups groups(slots);
  for (const Job* job : jobs) {
    node_candidates(*job, slots, groups, now, costs, cands);
    const Candidate* best = &cands.front();
    for (const auto& c : cands) {
      if (std::tie(c.ect, c.cost) < std::tie(best->ect, best->cost)) best = &c;
    }
    raw.placed.push_back({job, best->slot, best->cost});
    slots[best->slot].free_at = best->ect;
    groups.refresh(slots, best->slot);
  }
  return raw;
}

// ECT greedy, replaced on small ready sets by a placement with a strictly
// shorter makespan (or equal makespan and lower cost) when one exists.
DispatchPlan plan_time_min(const std::vector<const Job*>& jobs, std::span<const NodeLoad> nodes,
                           Money budget_remaining, Timestamp now, Timestamp committed_until) {
  const std::vector<Slot> slots = up_slots(nodes);
  if (exact_applies(jobs.size(), slots.size())) {
    ExactSearch search(Objective::kMakespan, jobs, nodes, slots, Timestamp::max(), now,
                       committed_until);
    search.seed(greedy_ect(jobs, nodes, slots, now));
    if (search.run()) {
      DispatchPlan plan;
      emit(search.result(), slots, nodes, budget_remaining, now, plan);
      return plan;
    }
  }
  return plan_ect(jobs, nodes, budget_remaining, now);
}

DispatchPlan plan_cost_min(const std::vector<const Job*>& jobs, std::span<const NodeLoad> nodes,
                           const QoSParams& qos, Money budget_remaining, Timestamp now,
                           Timestamp committed_until) {
  const std::vector<Slot> slots = up_slots(nodes);
  RawPlan raw = cascade(jobs, nodes, slots, qos.deadline, now);
  if (exact_applies(jobs.size(), slots.size())) {
    ExactSearch search(Objective::kCost, jobs, nodes, slots, qos.deadline, now, committed_until);
    search.seed(raw);
    if (search.run()) raw = search.result();
  }
  DispatchPlan plan;
  emit(raw, slots, nodes, budget_remaining, now, plan);
  return plan;
}

const Job* find(std::span<const Job> jobs, JobId id) {
  for (const auto& j : jobs) {
    if (j.id == id) return &j;
  }
  return nullptr;
}

}  // namespace

Stuck::Stuck(std::vector<Deferral> jobs, Projection partial)
    : std::runtime_error("jobs can never be placed"),
      jobs_(std::move(jobs)),
      partial_(partial) {}

std::string_view to_string(DeferReason r) {
  switch (r) {
    case DeferReason::kBudgetGuard: return "BudgetGuard";
    case DeferReason::kDeadlineGuard: return "DeadlineGuard";
    case DeferReason::kNoCapacity: return "NoCapacity";
    case DeferReason::kAllNodesDown: return "AllNodesDown";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kFeasible: return "Feasible";
    case Verdict::kMarginal: return "Marginal";
    case Verdict::kInfeasible: return "Infeasible";
  }
  return "?";
}

double estimate_duration(double est_cpu_s, const GridNode& node) { return est_cpu_s / node.speed; }

Millis duration_on(double est_cpu_s, double speed) {
  return Millis{std::llround(est_cpu_s / speed * 1000.0)};
}

Money estimate_cost(double est_cpu_s, const GridNode& node) {
  return Money::from_double(estimate_duration(est_cpu_s, node) * node.rate);
}

DispatchPlan plan_dispatch(std::span<const Job> ready_jobs, std::span<const NodeLoad> nodes,
                           const QoSParams& qos, Money budget_remaining, Timestamp now,
                           Timestamp committed_until) {
  std::vector<const Job*> ptrs;
  ptrs.reserve(ready_jobs.size());
  for (const auto& j : ready_jobs) ptrs.push_back(&j);
  return plan_dispatch(std::span<const Job* const>(ptrs), nodes, qos, budget_remaining, now,
                       committed_until);
}

DispatchPlan plan_dispatch(std::span<const Job* const> ready_jobs, std::span<const NodeLoad> nodes,
                           const QoSParams& qos, Money budget_remaining, Timestamp now,
                           Timestamp committed_until) {
  std::vector<const Job*> jobs(ready_jobs.begin(), ready_jobs.end());
  if (!std::is_sorted(jobs.begin(), jobs.end(),
                      [](const Job* a, const Job* b) { return a->id < b->id; })) {
    std::sort(jobs.begin(), jobs.end(), [](const Job* a, const Job* b) { return a->id < b->id; });
  }
  if (qos.optimization == Optimization::kTimeMin) {
    return plan_time_min(jobs, nodes, budget_remaining, now, committed_until);
  }
  return plan_cost_min(jobs, nodes, qos, budget_remaining, now, committed_until);
}

std::vector<NodeLoad> loads_from_jobs(std::span<const GridNode> nodes, std::span<const Job> jobs,
                                      Timestamp now) {
  std::vector<NodeLoad> loads;
  loads.reserve(nodes.size());
  for (const auto& n : nodes) {
    loads.push_back({n, std::vector<Timestamp>(n.capacity, now)});
  }
  for (const auto& job : jobs) {
    if (job.state != JobState::kRunning || !job.assigned_node || !job.dispatched_at) continue;
    for (auto& load : loads) {
      if (load.node.id != *job.assigned_node) continue;
      const Timestamp finish =
          std::max(*job.dispatched_at + duration_on(job.est_cpu_s, load.node.speed), now);
      auto slot = std::min_element(load.slot_free_at.begin(), load.slot_free_at.end());
      if (slot != load.slot_free_at.end()) *slot = std::max(*slot, finish);
      break;
    }
  }
  return loads;
}

Projection fast_forward(std::span<const Job> jobs, std::span<const NodeLoad> nodes,
                        const QoSParams& qos, Timestamp now) {
  std::vector<NodeLoad> loads(nodes.begin(), nodes.end());
  Projection proj{now, Money{}};
  std::vector<Job> ready;
  for (const auto& job : jobs) {
    proj.cost += job.cost_incurred;
    if (job.state == JobState::kReady) ready.push_back(job);
    if (job.state != JobState::kRunning || !job.assigned_node) continue;
    for (const auto& load : loads) {
      if (load.node.id != *job.assigned_node) continue;
      proj.cost += estimate_cost(job.est_cpu_s, load.node);
      const Timestamp start = job.dispatched_at.value_or(now);
      proj.completion =
          std::max(proj.completion, std::max(start + duration_on(job.est_cpu_s, load.node.speed), now));
    }
  }

  Timestamp t = now;
  while (!ready.empty()) {
    const DispatchPlan plan = plan_dispatch(ready, loads, qos, Money::max(), t, proj.completion);
    for (const auto& a : plan.assignments) {
      const Job* job = find(ready, a.job);
      for (auto& load : loads) {
        if (load.node.id != a.node) continue;
        auto slot = std::min_element(load.slot_free_at.begin(), load.slot_free_at.end());
        *slot = t + duration_on(job->est_cpu_s, load.node.speed);
        proj.completion = std::max(proj.completion, *slot);
        proj.cost += estimate_cost(job->est_cpu_s, load.node);
        break;
      }
    }
    std::erase_if(ready, [&](const Job& j) {
      return std::any_of(plan.assignments.begin(), plan.assignments.end(),
                         [&](const Assignment& a) { return a.job == j.id; });
    });
    if (ready.empty()) break;

    std::optional<Timestamp> next;
    for (const auto& load : loads) {
      if (load.node.status != NodeStatus::kUp) continue;
      for (Timestamp f : load.slot_free_at) {
        if (f > t && (!next || f < *next)) next = f;
      }
    }
    if (!next) throw Stuck(plan.deferred, proj);
    t = *next;
  }
  return proj;
}

Projection fast_forward(std::span<const Job> jobs, std::span<const GridNode> nodes,
                        const QoSParams& qos, Timestamp now) {
  const auto loads = loads_from_jobs(nodes, jobs, now);
  return fast_forward(jobs, std::span<const NodeLoad>(loads), qos, now);
}

FeasibilityReport check_feasibility(const Experiment& exp, std::span<const NodeLoad> nodes,
                                    Timestamp now) {
  FeasibilityReport r;
  const QoSParams& qos = exp.qos;
  std::string stuck_reason;
  try {
    const Projection p = fast_forward(exp.jobs, nodes, qos, now);
    r.est_completion = p.completion;
    r.est_cost = p.cost;
    r.time_ok = p.completion <= qos.deadline;
  } catch (const Stuck& s) {
    r.est_completion = s.partial().completion;
    r.est_cost = s.partial().cost;
    r.time_ok = false;
    const bool deadline = std::any_of(s.jobs().begin(), s.jobs().end(), [](const Deferral& d) {
      return d.reason == DeferReason::kDeadlineGuard;
    });
    stuck_reason = deadline ? std::to_string(s.jobs().size()) +
                                  " job(s) cannot finish by the deadline on any node"
                            : "no usable nodes";
  }
  r.budget_ok = r.est_cost <= qos.budget;

  const std::string completion = format_utc(r.est_completion);
  const std::string cost = r.est_cost.to_string() + " G$";
  if (!r.time_ok || !r.budget_ok) {
    r.verdict = Verdict::kInfeasible;
    std::string msg;
    if (!stuck_reason.empty()) {
      msg = stuck_reason;
    } else if (!r.time_ok) {
      msg = "deadline: projected completion " + completion + " is after " + format_utc(qos.deadline);
    }
    if (!r.budget_ok) {
      if (!msg.empty()) msg += "; ";
      msg += "budget: projected cost " + cost + " exceeds " + qos.budget.to_string() + " G$";
    }
    r.message = std::move(msg);
    return r;
  }

  const auto used = (r.est_completion - now).count();
  const auto headroom = (qos.deadline - now).count();
  const bool tight_time = 10 * used > 9 * headroom;
  const bool tight_budget = 10 * r.est_cost.cents() > 9 * qos.budget.cents();
  if (tight_time || tight_budget) {
    r.verdict = Verdict::kMarginal;
    std::string msg = "marginal:";
    if (tight_time) msg += " projected completion " + completion + " uses over 90% of the time to the deadline";
    if (tight_time && tight_budget) msg += ";";
    if (tight_budget) msg += " projected cost " + cost + " uses over 90% of the budget";
    r.message = std::move(msg);
  } else {
    r.verdict = Verdict::kFeasible;
    r.message = "feasible: projected completion " + completion + ", projected cost " + cost;
  }
  return r;
}

FeasibilityReport check_feasibility(const Experiment& exp, std::span<const GridNode> nodes,
                                    Timestamp now) {
  const auto loads = loads_from_jobs(nodes, exp.jobs, now);
  return check_feasibility(exp, std::span<const NodeLoad>(loads), now);
}

}  // namespace gridsteer::econosched
