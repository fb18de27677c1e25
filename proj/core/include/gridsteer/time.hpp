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
#include <optional>
#include <string>
#include <string_view>

namespace gridsteer {

using Millis = std::chrono::milliseconds;
// UTC instant with millisecond resolution. Wire and log forms are ISO-8601.
using Timestamp = std::chrono::sys_time<Millis>;

inline constexpr int kMinOffsetMinutes = -720;
inline constexpr int kMaxOffsetMinutes = 840;

constexpr Timestamp from_unix_ms(std::int64_t ms) { return Timestamp{Millis{ms}}; }
constexpr std::int64_t to_unix_ms(Timestamp t) { return t.time_since_epoch().count(); }
constexpr Millis seconds_to_millis(std::int64_t s) { return Millis{s * 1000}; }
inline double to_seconds(Millis d) { return static_cast<double>(d.count()) / 1000.0; }

// "2002-11-18T02:00:00Z"; a ".mmm" fraction is appended only when non-zero.
std::string format_utc(Timestamp t);

// Shifts t by offset_min and renders it with a "+HH:MM"/"-HH:MM" suffix.
// Throws std::out_of_range when the offset is outside [-720, +840].
std::string localize(Timestamp t, int offset_min);

// Parses any ISO-8601 instant this library emits: a trailing 'Z' or a
// numeric "+HH:MM" offset, optional ".fff" fraction. Returns the UTC instant.
std::optional<Timestamp> parse_iso8601(std::string_view text);

// Inverse of localize(). Throws ParseError on malformed input.
Timestamp delocalize(std::string_view local);

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d);

}  // namespace gridsteer
