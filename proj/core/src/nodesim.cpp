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

#include "gridsteer/nodesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gridsteer/econosched.hpp"
#include "gridsteer/errors.hpp"

namespace gridsteer::nodesim {

std::vector<Outage> normalize_outages(std::vector<Outage> outages) {
  std::sort(outages.begin(), outages.end(),
            [](const Outage& a, const Outage& b) { return a.start < b.start; });
  std::vector<Outage> merged;
  for (const auto& o : outages) {
    if (!merged.empty() && o.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, o.end);
    } else {
      merged.push_back(o);
    }
  }
  return merged;
}

void validate(const NodeConfig& c) {
  const GridNode& n = c.node;
  if (!(n.rate >= 0.0) || !std::isfinite(n.rate)) throw ValidationError("rate", "must be >= 0");
  if (!(n.speed > 0.0) || !std::isfinite(n.speed)) throw ValidationError("speed", "must be > 0");
  if (n.capacity < 1) throw ValidationError("capacity", "must be >= 1");
  if (!(c.fail_prob >= 0.0 && c.fail_prob <= 1.0)) {
    throw ValidationError("fail_prob", "must be in [0, 1]");
  }
  if (!(c.jitter >= 0.0 && c.jitter <= 0.5)) throw ValidationError("jitter", "must be in [0, 0.5]");
  for (const auto& o : c.outages) {
    if (!(o.start < o.end)) throw ValidationError("outages", "start must precede end");
  }
}

std::string to_string(const JobKey& key) {
  return gridsteer::to_string(key.experiment) + "/" + gridsteer::to_string(key.job);
}

std::string_view to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::kNodeDown: return "NodeDown";
    case SimEventKind::kNodeUp: return "NodeUp";
    case SimEventKind::kJobFailed: return "JobFailed";
    case SimEventKind::kJobDone: return "JobDone";
  }
  return "?";
}

NodeSim::NodeSim(std::vector<NodeConfig> configs, std::uint64_t seed, Timestamp start)
    : configs_(std::move(configs)), rng_(seed), clock_(start) {
  status_.assign(configs_.size(), NodeStatus::kUp);
  busy_.assign(configs_.size(), 0);
  for (std::size_t i = 0; i < configs_.size(); ++i) {
    auto& cfg = configs_[i];
    validate(cfg);
    if (!index_.emplace(cfg.node.id, i).second) {
      throw ValidationError("nodes", "duplicate node id " + gridsteer::to_string(cfg.node.id));
    }
    cfg.outages = normalize_outages(std::move(cfg.outages));
    for (const auto& o : cfg.outages) {
      // An outage already under way at `start` applies immediately.
      if (o.start <= start && start < o.end) status_[i] = NodeStatus::kDown;
      if (o.start > start) queue_.insert({o.start, SimEventKind::kNodeDown, {}, seq_++, cfg.node.id});
      if (o.end > start) queue_.insert({o.end, SimEventKind::kNodeUp, {}, seq_++, cfg.node.id});
    }
    cfg.node.status = status_[i];
  }
}

std::size_t NodeSim::index_of(NodeId node) const {
  auto it = index_.find(node);
  if (it == index_.end()) throw NotFound("unknown node " + gridsteer::to_string(node));
  return it->second;
}

NodeStatus NodeSim::status(NodeId node) const { return status_[index_of(node)]; }
std::size_t NodeSim::in_flight_on(NodeId node) const { return busy_[index_of(node)]; }
const NodeConfig& NodeSim::config(NodeId node) const { return configs_[index_of(node)]; }

std::optional<Timestamp> NodeSim::next_event_time() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.begin()->at;
}

bool NodeSim::dispatch(ExperimentId experiment, const Job& job, NodeId node, Timestamp now) {
  const std::size_t i = index_of(node);
  if (now < clock_) throw std::logic_error("dispatch before the simulator clock");
  const JobKey key{experiment, job.id};
  if (in_flight_.contains(key)) throw std::logic_error("job already in flight: " + to_string(key));
  const NodeConfig& cfg = configs_[i];
  if (status_[i] != NodeStatus::kUp || busy_[i] >= cfg.node.capacity) return false;

  const double fail_draw = rng_.next_double();
  const double jitter_draw = rng_.next_double();
  const double factor = 1.0 + cfg.jitter * (2.0 * jitter_draw - 1.0);
  const Millis duration =
      std::max(Millis{1}, econosched::duration_on(job.est_cpu_s * factor, cfg.node.speed));

  Entry e{now + duration, SimEventKind::kJobDone, key, seq_++, node};
  e.cpu_seconds = job.est_cpu_s * factor;
  if (fail_draw < cfg.fail_prob) {
    e.at = now + duration / 2;
    e.kind = SimEventKind::kJobFailed;
    e.cpu_seconds = 0.0;
    e.reason = "failed";
  }
  in_flight_[key] = queue_.insert(std::move(e)).first;
  ++busy_[i];
  log(now, "Dispatch", key, node, "-");
  return true;
}

bool NodeSim::cancel(const JobKey& key) {
  auto it = in_flight_.find(key);
  if (it == in_flight_.end()) return false;
  --busy_[index_of(it->second->node)];
  log(clock_, "Cancel", key, it->second->node, "-");
  queue_.erase(it->second);
  in_flight_.erase(it);
  return true;
}

std::vector<SimEvent> NodeSim::advance(Timestamp until) {
  if (until < clock_) throw std::logic_error("advance into the past");
  std::vector<SimEvent> out;
  while (!queue_.empty() && queue_.begin()->at <= until) {
    Entry e = *queue_.begin();
    queue_.erase(queue_.begin());
    const std::size_t i = index_of(e.node);
    clock_ = e.at;
    switch (e.kind) {
      case SimEventKind::kNodeDown: {
        status_[i] = NodeStatus::kDown;
        configs_[i].node.status = NodeStatus::kDown;
        out.push_back({e.at, e.kind, e.node, std::nullopt, 0.0, {}});
        log(e.at, "NodeDown", std::nullopt, e.node, "-");
        // In-flight work on the node fails at the outage start.
        for (auto& [key, pending] : in_flight_) {
          if (pending->node != e.node) continue;
          Entry f{e.at, SimEventKind::kJobFailed, key, seq_++, e.node};
          f.reason = "NodeDown";
          queue_.erase(pending);
          pending = queue_.insert(std::move(f)).first;
        }
        break;
      }
      case SimEventKind::kNodeUp:
        status_[i] = NodeStatus::kUp;
        configs_[i].node.status = NodeStatus::kUp;
        out.push_back({e.at, e.kind, e.node, std::nullopt, 0.0, {}});
        log(e.at, "NodeUp", std::nullopt, e.node, "-");
        break;
      case SimEventKind::kJobFailed:
      case SimEventKind::kJobDone: {
        in_flight_.erase(e.job);
        --busy_[i];
        if (e.kind == SimEventKind::kJobDone) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.3f", e.cpu_seconds);
          log(e.at, "JobDone", e.job, e.node, buf);
        } else {
          log(e.at, "JobFailed", e.job, e.node, e.reason);
        }
        out.push_back({e.at, e.kind, e.node, e.job, e.cpu_seconds, std::move(e.reason)});
        break;
      }
    }
  }
  clock_ = until;
  return out;
}

void NodeSim::log(Timestamp at, std::string_view kind, const std::optional<JobKey>& job,
                  NodeId node, const std::string& extra) {
  if (log_ == nullptr) return;
  *log_ << format_utc(at) << '\t' << kind << '\t' << (job ? to_string(*job) : "-") << '\t'
        << gridsteer::to_string(node) << '\t' << extra << '\n';
}

}  // namespace gridsteer::nodesim
