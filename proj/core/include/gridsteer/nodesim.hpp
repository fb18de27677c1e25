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

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridsteer/model.hpp"

namespace gridsteer::nodesim {

struct Outage {
  Timestamp start{};
  Timestamp end{};  // exclusive; start < end
  friend bool operator==(const Outage&, const Outage&) = default;
};

struct NodeConfig {
  GridNode node;
  double fail_prob = 0.0;  // per attempt, [0, 1]
  double jitter = 0.0;     // duration factor drawn from [1 - jitter, 1 + jitter], jitter <= 0.5
  std::vector<Outage> outages;
};

// Sorts and merges overlapping or touching intervals.
std::vector<Outage> normalize_outages(std::vector<Outage> outages);

// Throws ValidationError naming the offending field.
void validate(const NodeConfig& config);

// 64-bit linear congruential generator (Knuth's MMIX constants):
//   state = state * 6364136223846793005 + 1442695040888963407
// next_double() returns the top 53 bits of the new state scaled to [0, 1).
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Identifies one job across experiments.
struct JobKey {
  ExperimentId experiment;
  JobId job;
  friend auto operator<=>(const JobKey&, const JobKey&) = default;
};
std::string to_string(const JobKey& key);

// Declaration order is the tie-break rank at equal timestamps.
enum class SimEventKind { kNodeDown, kNodeUp, kJobFailed, kJobDone };
std::string_view to_string(SimEventKind k);

struct SimEvent {
  Timestamp at{};
  SimEventKind kind = SimEventKind::kJobDone;
  NodeId node;
  std::optional<JobKey> job;
  double cpu_seconds = 0.0;  // JobDone
  std::string reason;        // JobFailed: "failed" or "NodeDown"
  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

// Deterministic simulated grid nodes. Single owner; not thread-safe.
class NodeSim {
 public:
  NodeSim(std::vector<NodeConfig> configs, std::uint64_t seed, Timestamp start);

  // Starts `job` on `node` at `now` (>= clock) if the node is Up with a free
  // slot. Each accepted dispatch draws two numbers: the failure draw, then
  // the jitter draw. Throws NotFound for an unknown node.
  bool dispatch(ExperimentId experiment, const Job& job, NodeId node, Timestamp now);

  // Drops the pending outcome of an in-flight job. Returns false if the job
  // is not in flight.
  bool cancel(const JobKey& key);

  // Emits every event with at <= until in (at, kind, job) order and moves the
  // clock to `until`.
  std::vector<SimEvent> advance(Timestamp until);

  Timestamp clock() const { return clock_; }
  std::optional<Timestamp> next_event_time() const;
  bool has_in_flight() const { return !in_flight_.empty(); }
  std::size_t in_flight_on(NodeId node) const;
  NodeStatus status(NodeId node) const;
  const NodeConfig& config(NodeId node) const;
  const std::vector<NodeConfig>& configs() const { return configs_; }

  // Newline-delimited records "<iso8601>\t<kind>\t<job>\t<node>\t<extra>".
  void set_event_log(std::ostream* sink) { log_ = sink; }

 private:
  struct Entry {
    Timestamp at{};
    SimEventKind kind{};
    JobKey job{};
    std::uint64_t seq = 0;
    NodeId node;
    double cpu_seconds = 0.0;
    std::string reason;

    friend bool operator<(const Entry& a, const Entry& b) {
      return std::tie(a.at, a.kind, a.job, a.seq) < std::tie(b.at, b.kind, b.job, b.seq);
    }
  };
  using Queue = std::set<Entry>;

  std::size_t index_of(NodeId node) const;
  void log(Timestamp at, std::string_view kind, const std::optional<JobKey>& job, NodeId node,
           const std::string& extra);

  std::vector<NodeConfig> configs_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<NodeStatus> status_;
  std::vector<std::size_t> busy_;
  Lcg64 rng_;
  Timestamp clock_;
  Queue queue_;
  std::map<JobKey, Queue::iterator> in_flight_;
  std::uint64_t seq_ = 0;
  std::ostream* log_ = nullptr;
};

}  // namespace gridsteer::nodesim
