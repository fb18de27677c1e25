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

#include "gridsteer/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gridsteer/errors.hpp"

namespace gridsteer {
namespace {

using Json = nlohmann::json;

constexpr const char* kDefaultStart = "2002-11-18T00:00:00Z";

// Looks up keys of one JSON object and rejects the ones nobody asked for.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw SchemaError(where(), "expected an object");
  }

  const Json* optional(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }
  const Json& required(const std::string& key) {
    const Json* v = optional(key);
    if (v == nullptr) throw SchemaError(at(key), "required");
    return *v;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw SchemaError(at(k), "unknown field");
    }
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "(root)" : path_; }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

std::uint64_t unsigned_int(const Json& v, const std::string& path, std::uint64_t max) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw SchemaError(path, "expected a non-negative integer");
  }
  const auto n = v.get<std::uint64_t>();
  if (n > max) throw SchemaError(path, "must be <= " + std::to_string(max));
  return n;
}

Timestamp instant(const Json& v, const std::string& path, Timestamp origin) {
  const std::string s = text(v, path);
  if (s.rfind("T+", 0) == 0) {
    double secs = 0;
    const char* b = s.data() + 2;
    const char* e = s.data() + s.size();
    const auto [end, ec] = std::from_chars(b, e, secs);
    if (b == e || ec != std::errc{} || end != e || !(secs >= 0) || secs > 1e12) {
      throw SchemaError(path, "bad relative time '" + s + "'");
    }
    return origin + Millis(std::llround(secs * 1000.0));
  }
  if (auto t = parse_iso8601(s)) return *t;
  throw SchemaError(path, "expected ISO-8601 or T+<seconds>, got '" + s + "'");
}

ClockConfig parse_clock(const Json* j) {
  ClockConfig c;
  c.start = *parse_iso8601(kDefaultStart);
  if (j == nullptr) return c;
  Fields f(*j, "clock");
  if (const Json* m = f.optional("mode")) {
    const std::string mode = text(*m, "clock.mode");
    if (mode == "virtual") {
      c.mode = ClockMode::kVirtual;
    } else if (mode == "real") {
      c.mode = ClockMode::kReal;
    } else {
      throw SchemaError("clock.mode", "expected virtual or real");
    }
  }
  if (const Json* s = f.optional("start")) {
    const auto t = parse_iso8601(text(*s, "clock.start"));
    if (!t) throw SchemaError("clock.start", "expected an ISO-8601 instant");
    c.start = *t;
  }
  if (const Json* s = f.optional("speed")) {
    c.speed = number(*s, "clock.speed");
    if (!(c.speed >= 0) || !std::isfinite(c.speed)) throw SchemaError("clock.speed", "must be >= 0");
  }
  f.finish();
  return c;
}

nodesim::NodeConfig parse_node(const Json& j, const std::string& path, std::size_t pos, Timestamp origin) {
  Fields f(j, path);
  nodesim::NodeConfig c;
  GridNode& n = c.node;
  n.id = NodeId{static_cast<std::uint32_t>(pos + 1)};
  if (const Json* v = f.optional("id")) {
    n.id = NodeId{static_cast<std::uint32_t>(unsigned_int(*v, f.at("id"), UINT32_MAX))};
    if (n.id.value == 0) throw SchemaError(f.at("id"), "must be >= 1");
  }
  n.server_name = text(f.required("server_name"), f.at("server_name"));
  n.hostname = n.server_name;
  if (const Json* v = f.optional("hostname")) n.hostname = text(*v, f.at("hostname"));
  n.rate = number(f.required("rate"), f.at("rate"));
  n.speed = number(f.required("speed"), f.at("speed"));
  n.capacity = static_cast<std::uint32_t>(unsigned_int(f.required("capacity"), f.at("capacity"), 1u << 20));
  if (const Json* v = f.optional("fail_prob")) c.fail_prob = number(*v, f.at("fail_prob"));
  if (const Json* v = f.optional("jitter")) c.jitter = number(*v, f.at("jitter"));
  if (const Json* v = f.optional("outages")) {
    const std::string opath = f.at("outages");
    if (!v->is_array()) throw SchemaError(opath, "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      Fields o((*v)[i], index(opath, i));
      nodesim::Outage out;
      out.start = instant(o.required("start"), o.at("start"), origin);
      out.end = instant(o.required("end"), o.at("end"), origin);
      o.finish();
      c.outages.push_back(out);
    }
  }
  f.finish();
  try {
    nodesim::validate(c);
  } catch (const ValidationError& e) {
    throw SchemaError(f.at(e.field()), e.what());
  }
  return c;
}

QoSParams parse_qos(const Json& j, const std::string& path, Timestamp origin) {
  Fields f(j, path);
  QoSParams q;
  q.deadline = instant(f.required("deadline"), f.at("deadline"), origin);
  const Json& b = f.required("budget");
  std::optional<Money> budget;
  if (b.is_string()) {
    budget = Money::parse(b.get<std::string>());
  } else if (b.is_number() && std::isfinite(b.get<double>()) && std::fabs(b.get<double>()) < 1e15) {
    budget = Money::from_double(b.get<double>());
  }
  if (!budget || *budget < Money{}) throw SchemaError(f.at("budget"), "expected a G$ amount >= 0");
  q.budget = *budget;
  const auto mode = parse_optimization(text(f.required("optimization"), f.at("optimization")));
  if (!mode) throw SchemaError(f.at("optimization"), "expected time or cost");
  q.optimization = *mode;
  f.finish();
  return q;
}

ExperimentSpec parse_experiment(const Json& j, const std::string& path, Timestamp origin) {
  Fields f(j, path);
  ExperimentSpec spec;
  spec.name = text(f.required("name"), f.at("name"));
  spec.qos = parse_qos(f.required("qos"), f.at("qos"), origin);
  const Json& jobs = f.required("jobs");
  const std::string jpath = f.at("jobs");
  if (!jobs.is_array() || jobs.empty()) throw SchemaError(jpath, "expected a non-empty array");
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    Fields jf(jobs[i], index(jpath, i));
    const std::string name = text(jf.required("name"), jf.at("name"));
    const double est = number(jf.required("est_cpu_s"), jf.at("est_cpu_s"));
    if (!(est > 0) || !std::isfinite(est)) throw SchemaError(jf.at("est_cpu_s"), "must be > 0");
    if (const Json* c = jf.optional("count")) {
      const auto count = unsigned_int(*c, jf.at("count"), 10'000'000);
      if (count == 0) throw SchemaError(jf.at("count"), "must be >= 1");
      for (std::uint64_t k = 1; k <= count; ++k) spec.jobs.push_back({name + std::to_string(k), est});
    } else {
      spec.jobs.push_back({name, est});
    }
    jf.finish();
  }
  f.finish();
  return spec;
}

}  // namespace

Scenario parse_scenario(const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(source);
  } catch (const Json::parse_error& e) {
    // Turn the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, source.size());
    const auto line = 1 + std::count(source.begin(), source.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw SchemaError("(root)", "invalid JSON near line " + std::to_string(line) + ": " + e.what());
  }

  Fields f(doc, "");
  Scenario s;
  if (const Json* v = f.optional("seed")) {
    s.seed = unsigned_int(*v, "seed", std::numeric_limits<std::uint64_t>::max());
  }
  s.clock = parse_clock(f.optional("clock"));

  const Json& nodes = f.required("nodes");
  if (!nodes.is_array() || nodes.empty()) throw SchemaError("nodes", "expected a non-empty array");
  std::set<std::uint32_t> ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    s.nodes.push_back(parse_node(nodes[i], index("nodes", i), i, s.clock.start));
    if (!ids.insert(s.nodes.back().node.id.value).second) {
      throw SchemaError(index("nodes", i) + ".id", "duplicate node id");
    }
  }

  const Json* one = f.optional("experiment");
  const Json* many = f.optional("experiments");
  if ((one == nullptr) == (many == nullptr)) {
    throw SchemaError("experiment", "exactly one of experiment or experiments is required");
  }
  if (one != nullptr) {
    s.experiments.push_back(parse_experiment(*one, "experiment", s.clock.start));
  } else {
    if (!many->is_array() || many->empty()) throw SchemaError("experiments", "expected a non-empty array");
    for (std::size_t i = 0; i < many->size(); ++i) {
      s.experiments.push_back(parse_experiment((*many)[i], index("experiments", i), s.clock.start));
    }
  }
  f.finish();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading scenario file: " + path);
  return parse_scenario(buf.str());
}

Broker make_broker(const Scenario& scenario) {
  Broker broker(scenario.nodes, scenario.seed, scenario.clock.start);
  for (const auto& spec : scenario.experiments) broker.create_experiment(spec);
  return broker;
}

}  // namespace gridsteer
