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

#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gridsteer/errors.hpp"
#include "gridsteer/nodesim.hpp"
#include "support/fixtures.hpp"

namespace gridsteer::nodesim {
namespace {

using testing::at;
using testing::make_job;
using testing::make_node;

constexpr ExperimentId kExp{1};

NodeSim single(double speed, double fail_prob, double jitter, std::vector<Outage> outages = {},
               std::uint32_t capacity = 1) {
  return NodeSim({{make_node(1, "A", 1.0, speed, capacity), fail_prob, jitter, std::move(outages)}},
                 7, at(0));
}

TEST(Lcg64, FollowsTheDocumentedRecurrence) {
  Lcg64 rng(0);
  EXPECT_EQ(rng.next_u64(), 1442695040888963407ULL);
  EXPECT_EQ(rng.next_u64(), 1442695040888963407ULL * 6364136223846793005ULL + 1442695040888963407ULL);
  Lcg64 unit(42);
  for (int i = 0; i < 10000; ++i) {
    const double d = unit.next_double();
    ASSERT_GE(d, 0.0);
    ASSERT_LT(d, 1.0);
  }
}

TEST(Dispatch, CompletesAfterEstimateOverSpeed) {
  auto sim = single(2.0, 0.0, 0.0);
  ASSERT_TRUE(sim.dispatch(kExp, make_job(1, 100), NodeId{1}, at(0)));
  EXPECT_EQ(sim.next_event_time(), at(50));
  const auto events = sim.advance(at(50));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, SimEventKind::kJobDone);
  EXPECT_EQ(events[0].at, at(50));
  EXPECT_DOUBLE_EQ(events[0].cpu_seconds, 100.0);
  EXPECT_EQ(events[0].job, (JobKey{kExp, JobId{1}}));
}

TEST(Dispatch, DownNodeRejects) {
  auto sim = single(1.0, 0.0, 0.0, {{at(0), at(100)}});
  EXPECT_EQ(sim.status(NodeId{1}), NodeStatus::kDown);
  EXPECT_FALSE(sim.dispatch(kExp, make_job(1, 100), NodeId{1}, at(0)));
  EXPECT_FALSE(sim.has_in_flight());
}

TEST(Dispatch, CertainFailureLandsHalfway) {
  auto sim = single(1.0, 1.0, 0.0);
  ASSERT_TRUE(sim.dispatch(kExp, make_job(1, 100), NodeId{1}, at(0)));
  const auto events = sim.advance(at(1000));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, SimEventKind::kJobFailed);
  EXPECT_EQ(events[0].at, at(50));
  EXPECT_EQ(events[0].reason, "failed");
}

TEST(Dispatch, FullNodeRejectsAndUnknownNodeThrows) {
  auto sim = single(1.0, 0.0, 0.0);
  ASSERT_TRUE(sim.dispatch(kExp, make_job(1, 100), NodeId{1}, at(0)));
  EXPECT_FALSE(sim.dispatch(kExp, make_job(2, 100), NodeId{1}, at(0)));
  EXPECT_THROW(sim.dispatch(kExp, make_job(3, 100), NodeId{9}, at(0)), NotFound);
}

TEST(Dispatch, JitterStaysWithinBounds) {
  auto sim = NodeSim({{make_node(1, "A", 1.0, 1.0, 1000), 0.0, 0.5, {}}}, 3, at(0));
  for (std::uint32_t j = 1; j <= 1000; ++j) ASSERT_TRUE(sim.dispatch(kExp, make_job(j, 100), NodeId{1}, at(0)));
  for (const auto& e : sim.advance(at(1000))) {
    ASSERT_GE(e.at, at(50));
    ASSERT_LE(e.at, at(150));
    ASSERT_NEAR(e.cpu_seconds, (e.at - at(0)).count() / 1000.0, 1e-3);
  }
}

TEST(Advance, EmptyQueueYieldsNothing) {
  auto sim = single(1.0, 0.0, 0.0);
  EXPECT_TRUE(sim.advance(at(100)).empty());
  EXPECT_EQ(sim.clock(), at(100));
}

TEST(Advance, IncludesEventsExactlyAtTheBoundary) {
  auto sim = single(2.0, 0.0, 0.0);
  sim.dispatch(kExp, make_job(1, 100), NodeId{1}, at(0));
  EXPECT_TRUE(sim.advance(at(49)).empty());
  EXPECT_EQ(sim.advance(at(50)).size(), 1u);
}

TEST(Advance, OutageFailsRunningJobAtItsStart) {
  auto sim = single(1.0, 0.0, 0.0, {{at(10), at(20)}});
  ASSERT_TRUE(sim.dispatch(kExp, make_job(1, 30), NodeId{1}, at(0)));
  const auto events = sim.advance(at(100));
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[0].kind, SimEventKind::kNodeDown);
  EXPECT_EQ(events[0].at, at(10));
  EXPECT_EQ(events[1].kind, SimEventKind::kJobFailed);
  EXPECT_EQ(events[1].at, at(10));
  EXPECT_EQ(events[1].reason, "NodeDown");
  EXPECT_EQ(events[2].kind, SimEventKind::kNodeUp);
  EXPECT_EQ(events[2].at, at(20));
  EXPECT_EQ(sim.status(NodeId{1}), NodeStatus::kUp);
}

TEST(Advance, EqualTimestampsFollowKindRankThenJob) {
  auto sim = NodeSim({{make_node(1, "A", 1.0, 1.0, 4), 0.0, 0.0, {{at(100), at(200)}}},
                      {make_node(2, "B", 1.0, 1.0, 4), 0.0, 0.0, {}}},
                     1, at(0));
  sim.dispatch(kExp, make_job(3, 100), NodeId{2}, at(0));
  sim.dispatch(kExp, make_job(2, 100), NodeId{2}, at(0));
  sim.dispatch(kExp, make_job(1, 300), NodeId{1}, at(0));
  const auto events = sim.advance(at(100));
  ASSERT_EQ(events.size(), 4u);
  EXPECT_EQ(events[0].kind, SimEventKind::kNodeDown);
  EXPECT_EQ(events[1].kind, SimEventKind::kJobFailed);
  EXPECT_EQ(events[2].job->job, JobId{2});
  EXPECT_EQ(events[3].job->job, JobId{3});
}

TEST(Outages, NormalizationMergesOverlaps) {
  const auto merged = normalize_outages({{at(30), at(40)}, {at(0), at(10)}, {at(5), at(20)}, {at(20), at(25)}});
  const std::vector<Outage> expect = {{at(0), at(25)}, {at(30), at(40)}};
  EXPECT_EQ(merged, expect);
}

TEST(Validation, RejectsOutOfRangeParameters) {
  NodeConfig c{make_node(1, "A", 1.0, 1.0), 0.0, 0.0, {}};
  EXPECT_NO_THROW(validate(c));
  auto bad = c;
  bad.fail_prob = 1.5;
  EXPECT_THROW(validate(bad), ValidationError);
  bad = c;
  bad.jitter = 0.6;
  EXPECT_THROW(validate(bad), ValidationError);
  bad = c;
  bad.node.speed = 0.0;
  EXPECT_THROW(validate(bad), ValidationError);
  bad = c;
  bad.node.capacity = 0;
  EXPECT_THROW(validate(bad), ValidationError);
  bad = c;
  bad.outages = {{at(5), at(5)}};
  EXPECT_THROW(validate(bad), ValidationError);
}

TEST(Cancel, DropsPendingOutcome) {
  auto sim = single(1.0, 0.0, 0.0);
  sim.dispatch(kExp, make_job(1, 100), NodeId{1}, at(0));
  EXPECT_TRUE(sim.cancel({kExp, JobId{1}}));
  EXPECT_FALSE(sim.cancel({kExp, JobId{1}}));
  EXPECT_EQ(sim.in_flight_on(NodeId{1}), 0u);
  EXPECT_TRUE(sim.advance(at(1000)).empty());
}

// Random workload driver shared by the property tests. Dispatches greedily
// at every event time and returns the serialized log.
struct Trace {
  std::string log;
  std::vector<SimEvent> events;
  std::size_t accepted = 0;
  std::map<std::string, int> capacity;  // by node id
};

Trace drive(std::uint64_t seed) {
  std::mt19937_64 shape(seed);
  std::vector<NodeConfig> configs;
  const auto n_nodes = 1 + shape() % 5;
  for (std::uint32_t n = 1; n <= n_nodes; ++n) {
    NodeConfig c{make_node(n, "N" + std::to_string(n), 1.0, 0.5 + (shape() % 4) * 0.5,
                           static_cast<std::uint32_t>(1 + shape() % 3)),
                 (shape() % 4) * 0.2, (shape() % 3) * 0.25, {}};
    if (shape() % 2) {
      const auto s = static_cast<std::int64_t>(shape() % 400);
      c.outages.push_back({at(s), at(s + 1 + static_cast<std::int64_t>(shape() % 200))});
    }
    configs.push_back(c);
  }
  NodeSim sim(configs, seed, at(0));
  std::ostringstream log;
  sim.set_event_log(&log);
  Trace t;
  for (const auto& c : configs) t.capacity[to_string(c.node.id)] = static_cast<int>(c.node.capacity);
  std::uint32_t next_job = 1;
  Timestamp now = at(0);
  for (int step = 0; step < 200; ++step) {
    for (const auto& c : configs) {
      while (next_job <= 300 && sim.dispatch(kExp, make_job(next_job, 10 + shape() % 90), c.node.id, now)) {
        ++next_job;
        ++t.accepted;
      }
    }
    const auto next = sim.next_event_time();
    if (!next) break;
    now = *next;
    auto events = sim.advance(now);
    t.events.insert(t.events.end(), events.begin(), events.end());
  }
  auto rest = sim.advance(at(1'000'000));
  t.events.insert(t.events.end(), rest.begin(), rest.end());
  t.log = log.str();
  return t;
}

TEST(Properties, IdenticalInputsGiveIdenticalLogs) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Trace a = drive(seed);
    const Trace b = drive(seed);
    EXPECT_EQ(a.log, b.log);
    EXPECT_EQ(a.events, b.events);
    EXPECT_FALSE(a.log.empty());
  }
}

TEST(Properties, EveryDispatchResolvesExactlyOnce) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Trace t = drive(seed);
    std::map<JobKey, int> outcomes;
    for (const auto& e : t.events) {
      if (e.job) ++outcomes[*e.job];
    }
    EXPECT_EQ(outcomes.size(), t.accepted);
    for (const auto& [key, n] : outcomes) EXPECT_EQ(n, 1) << to_string(key);
  }
}

TEST(Properties, TimestampsAreMonotone) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Trace t = drive(seed);
    for (std::size_t i = 1; i < t.events.size(); ++i) ASSERT_LE(t.events[i - 1].at, t.events[i].at);
  }
}

// Replays the serialized log and checks per-node occupancy.
TEST(Properties, CapacityHoldsInTheLog) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Trace t = drive(seed);
    std::map<std::string, int> busy;
    std::istringstream in(t.log);
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::istringstream fields(line);
      for (std::string x; std::getline(fields, x, '\t');) f.push_back(x);
      ASSERT_EQ(f.size(), 5u) << line;
      if (f[1] == "Dispatch") ++busy[f[3]];
      if (f[1] == "JobDone" || f[1] == "JobFailed" || f[1] == "Cancel") --busy[f[3]];
      ASSERT_GE(busy[f[3]], 0);
      ASSERT_LE(busy[f[3]], t.capacity.at(f[3])) << line;
    }
  }
}

}  // namespace
}  // namespace gridsteer::nodesim
