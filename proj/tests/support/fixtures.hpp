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

#include <string>
#include <vector>

#include "gridsteer/broker.hpp"
#include "gridsteer/model.hpp"
#include "gridsteer/nodesim.hpp"

namespace gridsteer::testing {

inline Timestamp t0() { return *parse_iso8601("2002-11-18T00:00:00Z"); }
inline Timestamp at(std::int64_t seconds) { return t0() + seconds_to_millis(seconds); }
inline Money gd(std::int64_t whole) { return Money::from_cents(whole * 100); }

inline GridNode make_node(std::uint32_t id, std::string name, double rate, double speed,
                          std::uint32_t capacity = 1) {
  GridNode n;
  n.id = NodeId{id};
  n.server_name = std::move(name);
  n.hostname = n.server_name + ".grid.example.org";
  n.rate = rate;
  n.speed = speed;
  n.capacity = capacity;
  return n;
}

inline Job make_job(std::uint32_t id, double est) {
  Job j;
  j.id = JobId{id};
  j.name = "j" + std::to_string(id);
  j.est_cpu_s = est;
  return j;
}

inline std::vector<Job> make_jobs(std::size_t n, double est) {
  std::vector<Job> jobs;
  for (std::size_t i = 1; i <= n; ++i) jobs.push_back(make_job(static_cast<std::uint32_t>(i), est));
  return jobs;
}

// Scenario S1: A(rate 1, speed 1), B(rate 3, speed 2), four 100 cpu-s jobs.
inline std::vector<GridNode> s1_nodes() {
  return {make_node(1, "A", 1.0, 1.0), make_node(2, "B", 3.0, 2.0)};
}
// Scenario S2: one node A(rate 0.5, speed 1), ten 60 cpu-s jobs.
inline std::vector<GridNode> s2_nodes() { return {make_node(1, "A", 0.5, 1.0)}; }

inline QoSParams qos(std::int64_t deadline_s, std::int64_t budget, Optimization mode) {
  return QoSParams{at(deadline_s), gd(budget), mode};
}

inline std::vector<nodesim::NodeConfig> configs(const std::vector<GridNode>& nodes,
                                                double fail_prob = 0.0, double jitter = 0.0) {
  std::vector<nodesim::NodeConfig> out;
  for (const auto& n : nodes) out.push_back({n, fail_prob, jitter, {}});
  return out;
}

inline ExperimentSpec spec(const std::string& name, std::size_t jobs, double est, QoSParams q) {
  ExperimentSpec s{name, {}, q};
  for (std::size_t i = 1; i <= jobs; ++i) s.jobs.push_back({"j" + std::to_string(i), est});
  return s;
}

}  // namespace gridsteer::testing
