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

#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gridsteer/broker.hpp"
#include "support/fixtures.hpp"

namespace gridsteer::acceptance {

struct Result {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Result()> run;
};

Result s1_exactness();
Result small_instance_oracle();
Result feasibility_soundness();
Result budget_safety();
Result fsm_and_restart();
Result protocol_round_trip();
Result protocol_fuzz();
Result protocol_end_to_end();
Result scalability();
Result timezone_identity();
Result determinism();

// Accumulates "label=value" pairs for a detail line.
class Detail {
 public:
  template <typename T>
  Detail& add(const std::string& label, const T& value) {
    if (out_.tellp() > 0) out_ << ' ';
    out_ << label << '=' << value;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// A small random grid: 1-4 nodes, 1-12 jobs.
struct RandomScenario {
  std::vector<nodesim::NodeConfig> nodes;
  ExperimentSpec spec;
};

inline RandomScenario random_scenario(std::mt19937_64& rng, double max_jitter, double max_fail) {
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static constexpr double kRates[] = {0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
  static constexpr double kSpeeds[] = {0.5, 1.0, 1.5, 2.0, 4.0};

  RandomScenario s;
  const int n = pick(1, 4);
  for (int i = 1; i <= n; ++i) {
    nodesim::NodeConfig c;
    c.node = testing::make_node(static_cast<std::uint32_t>(i), "n" + std::to_string(i), kRates[pick(0, 5)],
                                kSpeeds[pick(0, 4)], static_cast<std::uint32_t>(pick(1, 3)));
    c.jitter = max_jitter > 0 ? uniform(0, max_jitter) : 0.0;
    c.fail_prob = max_fail > 0 ? uniform(0, max_fail) : 0.0;
    s.nodes.push_back(c);
  }
  const int jobs = pick(1, 12);
  s.spec.name = "rand";
  for (int j = 1; j <= jobs; ++j) s.spec.jobs.push_back({"j" + std::to_string(j), double(pick(1, 40) * 5)});

  // Scale deadline and budget around what one average node would need.
  double work = 0;
  for (const auto& j : s.spec.jobs) work += j.est_cpu_s;
  const double horizon = work / (n * 1.5) * uniform(0.3, 2.5);
  s.spec.qos.deadline = testing::at(0) + Millis(std::llround(horizon * 1000) + 1000);
  s.spec.qos.budget = Money::from_double(work * uniform(0.2, 2.0));
  s.spec.qos.optimization = pick(0, 1) ? Optimization::kTimeMin : Optimization::kCostMin;
  return s;
}

}  // namespace gridsteer::acceptance
