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

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace gridsteer {

// Opaque integer identifier. The tag keeps job, node and experiment ids from
// being mixed up; ordering is numeric so "ascending id" is well defined.
template <typename Tag>
struct StrongId {
  std::uint32_t value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
};

struct JobTag {};
struct NodeTag {};
struct ExperimentTag {};

using JobId = StrongId<JobTag>;
using NodeId = StrongId<NodeTag>;
using ExperimentId = StrongId<ExperimentTag>;

// Wire spellings: jobs and nodes are plain decimal, experiments are "exp<N>".
std::string to_string(JobId id);
std::string to_string(NodeId id);
std::string to_string(ExperimentId id);

std::optional<JobId> parse_job_id(std::string_view text);
std::optional<NodeId> parse_node_id(std::string_view text);
std::optional<ExperimentId> parse_experiment_id(std::string_view text);

}  // namespace gridsteer

template <typename Tag>
struct std::hash<gridsteer::StrongId<Tag>> {
  std::size_t operator()(gridsteer::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
