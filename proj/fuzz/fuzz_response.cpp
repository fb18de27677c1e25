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

// Response parser, the streaming reader and the typed decoders.

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <string_view>

#include "gridsteer/protocol.hpp"
#include "gridsteer/wire.hpp"

using namespace gridsteer;

namespace {

template <typename F>
void tolerate(F fn) {
  try {
    fn();
  } catch (const wire::MalformedResponse&) {
  }
}

}  // namespace

extern "C" int LLVMFuzzerTestOneInput(const std::uint8_t* data, std::size_t size) {
  if (size == 0) return 0;
  // The first byte picks the chunk size for the streaming reader.
  const std::size_t chunk = 1 + data[0] % 32;
  const std::string_view bytes(reinterpret_cast<const char*>(data) + 1, size - 1);

  std::optional<wire::Response> whole;
  tolerate([&] { whole = wire::parse_response(bytes); });
  if (whole && wire::parse_response(wire::encode_response(*whole)) != *whole) std::abort();

  wire::ResponseReader reader;
  std::size_t used = 0;
  try {
    while (used < bytes.size() && !reader.done()) {
      const auto piece = bytes.substr(used, chunk);
      const std::size_t took = reader.feed(piece);
      used += took;
      if (took < piece.size()) break;
    }
  } catch (const wire::MalformedResponse&) {
    return 0;
  }
  if (!reader.done()) return 0;
  const wire::Response streamed = reader.take();
  if (wire::parse_response(bytes.substr(0, used)) != streamed) std::abort();
  if (const auto* ok = std::get_if<wire::Ok>(&streamed)) {
    tolerate([&] { protocol::parse_status_records(ok->records); });
    tolerate([&] { protocol::parse_job_page(ok->records); });
    tolerate([&] { protocol::parse_job_info(ok->records); });
    for (const auto& r : ok->records) {
      tolerate([&] { protocol::parse_experiment_record(r); });
      tolerate([&] { protocol::parse_qos_record(r); });
      tolerate([&] { protocol::parse_feasibility_record(r); });
      tolerate([&] { protocol::parse_job_record(r); });
      tolerate([&] { protocol::parse_event_record(r); });
      tolerate([&] { protocol::parse_resource_record(r); });
    }
  }
  return 0;
}
