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

#include <array>
#include <string_view>
#include <vector>

#include "gridsteer/broker.hpp"
#include "gridsteer/econosched.hpp"
#include "gridsteer/model.hpp"
#include "gridsteer/wire.hpp"

// Verb table and record layouts of the broker protocol.
//
//   HELLO                                   -> [version]
//   EXP-LIST                                -> experiment*
//   EXP-CREATE name deadline budget mode job:est...  -> [exp]
//   QOS-GET exp                             -> [deadline, budget, mode]
//   QOS-SET exp deadline budget mode        -> feasibility
//   EXP-START|EXP-STOP|EXP-SHUTDOWN exp     -> [state]
//   EXP-STATUS exp                          -> progress, counts, node*
//   JOB-LIST exp offset limit [state]       -> ["total", n], job*
//   JOB-INFO exp job                        -> job_detail, event*
//   JOB-RESTART exp job                     -> job
//   JOB-RESTART-FAILED exp                  -> [count]
//   RES-LIST                                -> resource*
//
//   experiment  = id name state job_count
//   feasibility = verdict time_ok budget_ok est_completion est_cost message
//   progress    = "progress" exp state now deadline budget budget_spent time_remaining_s
//   counts      = "counts" ready running completed failed
//   node        = "node" id server_name status assigned completed
//   job         = id name state node exec_time_s cost remarks
//   job_detail  = job attempts est_cpu_s
//   event       = "event" kind at node cpu_seconds
//   resource    = id server_name hostname rate speed capacity status remarks assigned completed
//
// Experiment ids are "exp<N>", job and node ids decimal, timestamps UTC
// ISO-8601 with 'Z', money with two decimals, booleans "true"/"false".
// Absent optional values are empty fields.
namespace gridsteer::protocol {

inline constexpr std::array<std::string_view, 14> kVerbs = {
    "HELLO",      "EXP-LIST",  "EXP-CREATE",  "QOS-GET",     "QOS-SET",
    "EXP-START",  "EXP-STOP",  "EXP-SHUTDOWN", "EXP-STATUS", "JOB-LIST",
    "JOB-INFO",   "JOB-RESTART", "JOB-RESTART-FAILED", "RES-LIST"};

// Encoders (broker side).
wire::Record experiment_record(const ExperimentSummary& e);
wire::Record qos_record(const QoSParams& q);
wire::Record feasibility_record(const econosched::FeasibilityReport& r);
std::vector<wire::Record> status_records(const ExperimentStatus& s);
wire::Record job_record(const Job& j);
wire::Record job_detail_record(const Job& j);
wire::Record event_record(const JobEvent& e);
wire::Record resource_record(const GridNode& n);

// Decoders (client side). Throw wire::MalformedResponse naming the record.
ExperimentSummary parse_experiment_record(const wire::Record& r);
QoSParams parse_qos_record(const wire::Record& r);
econosched::FeasibilityReport parse_feasibility_record(const wire::Record& r);
ExperimentStatus parse_status_records(const std::vector<wire::Record>& rs);
// Accepts both the job and the job_detail layout.
Job parse_job_record(const wire::Record& r);
JobEvent parse_event_record(const wire::Record& r);
GridNode parse_resource_record(const wire::Record& r);
JobPage parse_job_page(const std::vector<wire::Record>& rs);
JobInfo parse_job_info(const std::vector<wire::Record>& rs);

std::string format_number(double v);

// Maps one request to one broker operation. Broker errors become Err answers
// with their status code; anything unexpected becomes 500.
class Handler {
 public:
  explicit Handler(Broker& broker) : broker_(broker) {}
  wire::Response handle(const wire::Request& req);

 private:
  wire::Ok dispatch(const wire::Request& req);
  Broker& broker_;
};

}  // namespace gridsteer::protocol
