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

#include <cstdio>
#include <cstdlib>

#include "acceptance.hpp"
#include "gridsteer/econosched.hpp"
#include "gridsteer/scenario.hpp"
#include "oracle/enumerate.hpp"

namespace gridsteer::acceptance {
namespace {

using econosched::fast_forward;
using econosched::Stuck;
using testing::at;

constexpr double kS1LimitSeconds = 5.0;
constexpr double kOracleLimitSeconds = 60.0;

struct Finish {
  Timestamp at{};
  Money spent;
  bool all_completed = false;
};

Finish run_broker(Broker& b) {
  for (const auto& e : b.list_experiments()) b.control(e.id, ExperimentAction::kStart);
  const auto run = b.run_to_completion();
  const auto st = b.experiment_status(ExperimentId{1});
  return {run.finished_at, st.budget_spent, st.count(JobState::kCompleted) == st.total()};
}

std::vector<oracle::Node> oracle_nodes(const std::vector<GridNode>& nodes) {
  std::vector<oracle::Node> out;
  for (const auto& n : nodes) out.push_back({n.rate, n.speed, static_cast<int>(n.capacity)});
  return out;
}

}  // namespace

Result s1_exactness() {
  const auto start = std::chrono::steady_clock::now();
  const std::string dir = GRIDSTEER_SCENARIO_DIR;
  Broker time_b = make_broker(load_scenario(dir + "/s1.json"));
  Broker cost_b = make_broker(load_scenario(dir + "/s1-cost.json"));
  const Timestamp t0 = time_b.clock();
  const Finish tm = run_broker(time_b);
  const Finish cm = run_broker(cost_b);

  // The reference values come from exhaustive enumeration of all 2^4 placements.
  const auto all = oracle::enumerate({100, 100, 100, 100}, oracle_nodes(testing::s1_nodes()));
  const auto opt_makespan = oracle::optimal_makespan(all);
  const auto opt_cost = oracle::min_feasible_cost(all, 400'000);
  const double secs = seconds_since(start);

  Detail d;
  d.add("time.end", "T0+" + std::to_string((tm.at - t0).count() / 1000) + "s")
      .add("time.spent", tm.spent.to_string())
      .add("cost.end", "T0+" + std::to_string((cm.at - t0).count() / 1000) + "s")
      .add("cost.spent", cm.spent.to_string())
      .add("oracle.makespan_ms", opt_makespan)
      .add("oracle.min_cost", opt_cost ? Money::from_cents(*opt_cost).to_string() : "none");
  const bool pass = tm.all_completed && cm.all_completed && tm.at == t0 + Millis(150'000) &&
                    tm.spent == Money::from_cents(55'000) && cm.at == t0 + Millis(400'000) &&
                    cm.spent == Money::from_cents(40'000) && opt_makespan == 150'000 && opt_cost == 40'000 &&
                    secs < kS1LimitSeconds;
  return {pass, d.str()};
}

Result small_instance_oracle() {
  const auto start = std::chrono::steady_clock::now();
  static constexpr double kEst[] = {30, 60, 100};
  static constexpr double kRate[] = {0.5, 1.0, 3.0};
  static constexpr double kSpeed[] = {0.5, 1.0, 2.0, 4.0};
  constexpr int kGrid = 12;

  long instances = 0, cost_runs = 0, cost_assigned = 0, cost_mismatch = 0, time_violations = 0;
  long replay_checked = 0, replay_mismatch = 0;
  double worst_ratio = 0;
  std::string first_problem;

  for (int nj = 1; nj <= 6; ++nj) {
    int job_combos = 1;
    for (int i = 0; i < nj; ++i) job_combos *= 3;
    for (int jc = 0; jc < job_combos; ++jc) {
      std::vector<Job> jobs;
      std::vector<double> ests;
      for (int i = 0, x = jc; i < nj; ++i, x /= 3) {
        jobs.push_back(testing::make_job(static_cast<std::uint32_t>(i + 1), kEst[x % 3]));
        ests.push_back(kEst[x % 3]);
      }
      for (int nn = 1; nn <= 3; ++nn) {
        int node_combos = 1;
        for (int i = 0; i < nn; ++i) node_combos *= kGrid;
        for (int nc = 0; nc < node_combos; ++nc) {
          // Node multisets only: grid indices non-decreasing.
          std::vector<GridNode> nodes;
          bool canonical = true;
          for (int i = 0, y = nc, prev = -1; i < nn; ++i, y /= kGrid) {
            const int g = y % kGrid;
            if (g < prev) {
              canonical = false;
              break;
            }
            prev = g;
            nodes.push_back(testing::make_node(static_cast<std::uint32_t>(i + 1), "n", kRate[g / 4], kSpeed[g % 4]));
          }
          if (!canonical) continue;
          ++instances;
          const auto all = oracle::enumerate(ests, oracle_nodes(nodes));
          const auto opt = oracle::optimal_makespan(all);

          const auto tp = fast_forward(jobs, nodes, testing::qos(1'000'000, 1'000'000, Optimization::kTimeMin), at(0));
          const auto mk = (tp.completion - at(0)).count();
          worst_ratio = std::max(worst_ratio, double(mk) / double(opt));
          if (2 * mk > 3 * opt) {
            ++time_violations;
            if (first_problem.empty()) first_problem = "TimeMin bound, instance " + std::to_string(instances);
          }

          for (const std::int64_t deadline_ms : {opt, opt * 5 / 4, opt * 2}) {
            QoSParams q{at(0) + Millis(deadline_ms), Money::from_cents(100'000'000), Optimization::kCostMin};
            ++cost_runs;
            const auto best = oracle::min_feasible_cost(all, deadline_ms);
            try {
              const auto cp = fast_forward(jobs, nodes, q, at(0));
              ++cost_assigned;
              if (!best || cp.cost.cents() != *best) {
                ++cost_mismatch;
                if (first_problem.empty()) first_problem = "CostMin cost, instance " + std::to_string(instances);
              }
            } catch (const Stuck&) {
            }
          }

          // Every 997th instance is replayed through the broker and simulator.
          if (instances % 997 == 0) {
            ++replay_checked;
            Broker b(testing::configs(nodes), 1, at(0));
            ExperimentSpec spec{"oracle", {}, testing::qos(1'000'000, 1'000'000, Optimization::kTimeMin)};
            for (const auto& j : jobs) spec.jobs.push_back({j.name, j.est_cpu_s});
            b.create_experiment(spec);
            const Finish f = run_broker(b);
            if (f.at != tp.completion || f.spent != tp.cost) {
              ++replay_mismatch;
              if (std::getenv("GRIDSTEER_DEBUG")) {
                std::fprintf(stderr, "replay mismatch: jobs");
                for (auto e : ests) std::fprintf(stderr, " %g", e);
                std::fprintf(stderr, " nodes");
                for (auto& n : nodes) std::fprintf(stderr, " (%g,%g)", n.rate, n.speed);
                std::fprintf(stderr, " ff=(%lld,%s) broker=(%lld,%s)\n", (long long)(tp.completion - at(0)).count(),
                             tp.cost.to_string().c_str(), (long long)(f.at - at(0)).count(), f.spent.to_string().c_str());
              }
            }
          }
        }
      }
    }
  }
  const double secs = seconds_since(start);
  Detail d;
  d.add("instances", instances)
      .add("timemin.violations", time_violations)
      .add("timemin.worst_ratio", worst_ratio)
      .add("costmin.runs", cost_runs)
      .add("costmin.assigned", cost_assigned)
      .add("costmin.mismatches", cost_mismatch)
      .add("replays", replay_checked)
      .add("replay.mismatches", replay_mismatch);
  if (!first_problem.empty()) d.add("first", first_problem);
  return {time_violations == 0 && cost_mismatch == 0 && replay_mismatch == 0 && secs < kOracleLimitSeconds, d.str()};
}

}  // namespace gridsteer::acceptance
