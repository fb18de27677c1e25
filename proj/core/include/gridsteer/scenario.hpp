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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridsteer/broker.hpp"
#include "gridsteer/nodesim.hpp"
#include "gridsteer/service.hpp"

namespace gridsteer {

// A scenario file is one JSON document:
//
//   {
//     "seed": 42,
//     "clock": {"mode": "virtual", "start": "2002-11-18T09:00:00Z", "speed": 1.0},
//     "nodes": [
//       {"id": 1, "server_name": "A", "hostname": "a.grid", "rate": 1.0,
//        "speed": 1.0, "capacity": 1, "fail_prob": 0.0, "jitter": 0.0,
//        "outages": [{"start": "T+100", "end": "T+160"}]}
//     ],
//     "experiment": {
//       "name": "s1",
//       "qos": {"deadline": "T+400", "budget": "1000.00", "optimization": "time"},
//       "jobs": [{"name": "j", "est_cpu_s": 100, "count": 4}]
//     }
//   }
//
// "experiments" (an array) may replace "experiment". Timestamps are ISO-8601
// instants or "T+<seconds>" after clock.start. A job with a count expands to
// name1..nameN. Node ids default to position + 1; only seed, clock, node id,
// hostname and the per-node simulator knobs are optional. Unknown keys are
// rejected.
struct Scenario {
  std::vector<ExperimentSpec> experiments;
  std::vector<nodesim::NodeConfig> nodes;
  ClockConfig clock;
  std::uint64_t seed = 0;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// path is the offending field, e.g. "nodes[0].speed".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);

// Builds the broker and creates the scenario's experiments (ids exp1..).
Broker make_broker(const Scenario& scenario);

}  // namespace gridsteer
