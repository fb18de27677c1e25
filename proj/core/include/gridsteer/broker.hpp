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
#include <string>
#include <vector>

#include "gridsteer/econosched.hpp"
#include "gridsteer/model.hpp"
#include "gridsteer/nodesim.hpp"

namespace gridsteer {

struct JobSpec {
  std::string name;
  double est_cpu_s = 0.0;
};

struct ExperimentSpec {
  std::string name;
  std::vector<JobSpec> jobs;
  QoSParams qos;
};

struct JobInfo {
  Job job;
  std::vector<JobEvent> history;
};

struct JobPage {
  std::size_t total = 0;
  std::vector<Job> jobs;
};

struct ExperimentSummary {
  ExperimentId id;
  std::string name;
  ExperimentState state = ExperimentState::kConfigured;
  std::size_t job_count = 0;
};

struct RunSummary {
  Timestamp finished_at{};
  std::size_t ticks = 0;
  std::size_t dispatches = 0;
};

inline constexpr std::size_t kMaxPageLimit = 500;

// The grid resource broker: owns experiments and node records, runs the
// scheduling loop against the simulator. Single-threaded; BrokerService
// serialises access to it.
class Broker {
 public:
  Broker(std::vector<nodesim::NodeConfig> nodes, std::uint64_t seed, Timestamp start);

  ExperimentId create_experiment(const ExperimentSpec& spec);
  econosched::FeasibilityReport set_qos(ExperimentId id, const QoSParams& qos);
  QoSParams get_qos(ExperimentId id) const;
  // Start runs a scheduling tick at the current clock.
  ExperimentState control(ExperimentId id, ExperimentAction action);

  // Consumes simulator events up to `now`, then plans and dispatches Ready
  // jobs of every Running experiment. Returns the number of dispatches.
  std::size_t tick(Timestamp now);

  // Ticks at every simulator event time up to `until`, then at `until`, so
  // the outcome does not depend on how coarsely the caller advances time.
  std::size_t advance(Timestamp until);

  JobPage list_jobs(ExperimentId id, std::size_t offset, std::size_t limit,
                    std::optional<JobState> filter) const;
  JobInfo job_info(ExperimentId id, JobId job) const;
  Job restart_job(ExperimentId id, JobId job);
  std::size_t restart_failed(ExperimentId id);
  std::vector<GridNode> list_resources() const;
  ExperimentStatus experiment_status(ExperimentId id) const;
  std::vector<ExperimentSummary> list_experiments() const;
  econosched::FeasibilityReport feasibility(ExperimentId id) const;

  // Drives the clock from event to event until nothing can progress: no job
  // in flight and no pending event that could unblock a Ready job. Stops early
  // at `limit` when given.
  RunSummary run_to_completion(std::optional<Timestamp> limit = std::nullopt);

  Timestamp clock() const { return clock_; }
  std::optional<Timestamp> next_event_time() const { return sim_.next_event_time(); }
  const Experiment& experiment(ExperimentId id) const;
  const std::vector<std::pair<Timestamp, std::string>>& event_log() const { return log_; }
  void set_event_log(std::ostream* sink) { sim_.set_event_log(sink); }

 private:
  struct Record {
    Experiment exp;
    std::vector<std::vector<JobEvent>> history;  // index = job id - 1
  };
  struct InFlight {
    NodeId node;
    Timestamp est_finish{};
    Money est_cost;
  };

  Record& record(ExperimentId id);
  const Record& record(ExperimentId id) const;
  GridNode& node(NodeId id);
  void apply(Record& rec, JobId job, const JobEvent& event, std::optional<NodeTerms> terms = {});
  void consume(const nodesim::SimEvent& event);
  std::size_t schedule(Record& rec);
  std::vector<econosched::NodeLoad> loads() const;
  bool can_progress() const;
  void note(std::string text);

  std::vector<GridNode> nodes_;
  nodesim::NodeSim sim_;
  Timestamp clock_;
  std::map<ExperimentId, Record> experiments_;
  std::map<nodesim::JobKey, InFlight> in_flight_;
  std::uint32_t next_experiment_ = 1;
  std::vector<std::pair<Timestamp, std::string>> log_;
};

}  // namespace gridsteer
