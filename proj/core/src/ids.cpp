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

#include "gridsteer/ids.hpp"

#include <charconv>

namespace gridsteer {
namespace {

std::optional<std::uint32_t> parse_u32(std::string_view text) {
  if (text.empty() || text.size() > 10) return std::nullopt;
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string to_string(JobId id) { return std::to_string(id.value); }
std::string to_string(NodeId id) { return std::to_string(id.value); }
std::string to_string(ExperimentId id) { return "exp" + std::to_string(id.value); }

std::optional<JobId> parse_job_id(std::string_view text) {
  if (auto v = parse_u32(text)) return JobId{*v};
  return std::nullopt;
}

std::optional<NodeId> parse_node_id(std::string_view text) {
  if (auto v = parse_u32(text)) return NodeId{*v};
  return std::nullopt;
}

std::optional<ExperimentId> parse_experiment_id(std::string_view text) {
  if (!text.starts_with("exp")) return std::nullopt;
  if (auto v = parse_u32(text.substr(3))) return ExperimentId{*v};
  return std::nullopt;
}

}  // namespace gridsteer
