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

// Request line parser and the broker-side handler behind it.

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <string_view>

#include "gridsteer/broker.hpp"
#include "gridsteer/protocol.hpp"
#include "gridsteer/wire.hpp"

using namespace gridsteer;

namespace {

Broker& broker() {
  static Broker b = [] {
    GridNode a{NodeId{1}, "A", "a.grid", 1.0, 1.0, 2, NodeStatus::kUp, "", 0, 0};
    GridNode c{NodeId{2}, "B", "b.grid", 3.0, 2.0, 1, NodeStatus::kUp, "", 0, 0};
    Broker broker({{a, 0.3, 0.1, {}}, {c, 0.0, 0.0, {}}}, 1, *parse_iso8601("2002-11-18T00:00:00Z"));
    ExperimentSpec spec{"fz", {{"a", 40}, {"b", 60}, {"c", 90}}, {}};
    spec.qos = {*parse_iso8601("2002-11-18T01:00:00Z"), Money::from_cents(100'000), Optimization::kCostMin};
    broker.create_experiment(spec);
    broker.control(ExperimentId{1}, ExperimentAction::kStart);
    return broker;
  }();
  return b;
}

}  // namespace

extern "C" int LLVMFuzzerTestOneInput(const std::uint8_t* data, std::size_t size) {
  const std::string_view bytes(reinterpret_cast<const char*>(data), size);
  wire::Request req;
  try {
    req = wire::parse_request(bytes);
  } catch (const wire::MalformedLine&) {
    return 0;
  }
  if (wire::parse_request(wire::encode_request(req)) != req) std::abort();
  if (req.verb == "EXP-CREATE") return 0;
  const wire::Response resp = protocol::Handler(broker()).handle(req);
  if (const auto* err = std::get_if<wire::Err>(&resp); err && !wire::is_known_code(err->code)) std::abort();
  if (wire::parse_response(wire::encode_response(resp)) != resp) std::abort();
  return 0;
}
