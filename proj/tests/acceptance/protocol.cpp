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

#include <algorithm>
#include <cstdlib>
#include <set>
#include <string_view>

#include "acceptance.hpp"
#include "gridsteer/errors.hpp"
#include "gridsteer/protocol.hpp"
#include "support/e2e.hpp"
#include "support/wire_gen.hpp"

namespace gridsteer::acceptance {
namespace {

constexpr int kRoundTripCases = 10'000;

// One hour of single-core fuzzing. GRIDSTEER_FUZZ_SECONDS shortens it for
// local runs; the detail line reports the budget actually used.
constexpr double kFuzzSeconds = 3600.0;
constexpr double kHangSeconds = 1.0;
constexpr std::size_t kMaxCorpus = 4096;

// Feeds `bytes` to every parser and decoder. Returns a description of the
// failure, or an empty string. Documented exceptions are expected outcomes.
class Harness {
 public:
  Harness() : broker_(testing::configs(testing::s1_nodes(), 0.3, 0.1), 5, testing::at(0)), handler_(broker_) {
    broker_.create_experiment(testing::spec("fz", 6, 40, testing::qos(600, 1000, Optimization::kCostMin)));
    broker_.control(ExperimentId{1}, ExperimentAction::kStart);
  }

  std::string run(std::string_view bytes, std::uint64_t split_seed) {
    try {
      request(bytes);
      response(bytes, split_seed);
      lines(bytes, split_seed);
    } catch (const std::exception& e) {
      return std::string("unexpected exception: ") + e.what();
    }
    return failure_;
  }

  // A coarse summary of what the last input exercised: which parsers
  // accepted it, the verb and answer code, and which decoders succeeded.
  const std::string& signature() const { return signature_; }
  std::uint64_t err500() const { return err500_; }
  std::uint64_t parsed_requests() const { return parsed_requests_; }
  std::uint64_t parsed_responses() const { return parsed_responses_; }

 private:
  void fail(std::string what) {
    if (failure_.empty()) failure_ = std::move(what);
  }

  void request(std::string_view bytes) {
    failure_.clear();
    signature_.clear();
    wire::Request req;
    try {
      req = wire::parse_request(bytes);
    } catch (const wire::MalformedLine&) {
      return;
    }
    ++parsed_requests_;
    const bool known = std::find(protocol::kVerbs.begin(), protocol::kVerbs.end(), req.verb) != protocol::kVerbs.end();
    signature_ += "Q" + (known ? req.verb : "?") + "/" + std::to_string(std::min<std::size_t>(req.args.size(), 6));
    if (wire::parse_request(wire::encode_request(req)) != req) fail("request does not re-encode");
    // Keep the broker small: creating experiments grows state without bound.
    if (req.verb == "EXP-CREATE") return;
    const wire::Response resp = handler_.handle(req);
    if (const auto* err = std::get_if<wire::Err>(&resp)) {
      signature_ += "/" + std::to_string(err->code);
      if (!wire::is_known_code(err->code)) fail("handler returned unknown code");
      if (err->code == 500) ++err500_;
    }
    if (wire::parse_response(wire::encode_response(resp)) != resp) fail("handler answer does not round-trip");
  }

  void response(std::string_view bytes, std::uint64_t split_seed) {
    std::optional<wire::Response> whole;
    try {
      whole = wire::parse_response(bytes);
      ++parsed_responses_;
      signature_ += std::holds_alternative<wire::Ok>(*whole) ? "R+" : "R-";
    } catch (const wire::MalformedResponse&) {
    }
    if (whole && wire::parse_response(wire::encode_response(*whole)) != *whole) fail("response does not re-encode");

    // The stream reader must agree with the one-shot parser on the prefix it
    // consumed, however the bytes are chunked.
    std::mt19937_64 rng(split_seed);
    wire::ResponseReader reader;
    std::size_t used = 0;
    try {
      while (used < bytes.size() && !reader.done()) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
        const auto chunk = bytes.substr(used, n);
        const std::size_t took = reader.feed(chunk);
        used += took;
        if (took < chunk.size() && !reader.done()) fail("reader stopped early without a result");
        if (took < chunk.size()) break;
      }
    } catch (const wire::MalformedResponse&) {
      if (whole && bytes.size() == used) fail("reader rejected what the parser accepted");
      return;
    }
    if (reader.done()) {
      const wire::Response streamed = reader.take();
      try {
        if (wire::parse_response(bytes.substr(0, used)) != streamed) fail("reader and parser disagree");
      } catch (const wire::MalformedResponse&) {
        fail("parser rejected the reader's prefix");
      }
      decode(streamed);
    } else if (whole) {
      fail("reader did not finish a complete response");
    }
  }

  // Typed decoders may reject a record; they must not do anything else.
  void decode(const wire::Response& resp) {
    const auto* ok = std::get_if<wire::Ok>(&resp);
    if (!ok) return;
    auto guarded = [this](auto&& fn) {
      try {
        fn();
        signature_ += '1';
      } catch (const wire::MalformedResponse&) {
        signature_ += '0';
      }
    };
    guarded([&] { protocol::parse_status_records(ok->records); });
    guarded([&] { protocol::parse_job_page(ok->records); });
    guarded([&] { protocol::parse_job_info(ok->records); });
    signature_ += "#" + std::to_string(std::min<std::size_t>(ok->records.size(), 8));
    for (const auto& r : ok->records) {
      guarded([&] { protocol::parse_experiment_record(r); });
      guarded([&] { protocol::parse_qos_record(r); });
      guarded([&] { protocol::parse_feasibility_record(r); });
      guarded([&] { protocol::parse_job_record(r); });
      guarded([&] { protocol::parse_event_record(r); });
      guarded([&] { protocol::parse_resource_record(r); });
    }
  }

  void lines(std::string_view bytes, std::uint64_t split_seed) {
    std::mt19937_64 rng(split_seed ^ 0x9e3779b97f4a7c15ULL);
    wire::LineReader reader;
    std::string joined;
    std::size_t pos = 0;
    try {
      while (pos < bytes.size()) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
        reader.feed(bytes.substr(pos, n));
        pos += n;
        while (auto line = reader.next()) joined += *line + '\n';
      }
    } catch (const wire::MalformedLine&) {
      return;
    }
    const auto last_lf = bytes.rfind('\n');
    const auto complete = last_lf == std::string_view::npos ? std::string_view{} : bytes.substr(0, last_lf + 1);
    if (joined != complete) fail("line reader lost or altered bytes");
  }

  Broker broker_;
  protocol::Handler handler_;
  std::string failure_;
  std::string signature_;
  std::uint64_t err500_ = 0;
  std::uint64_t parsed_requests_ = 0;
  std::uint64_t parsed_responses_ = 0;
};

std::vector<std::string> seed_corpus() {
  const std::vector<wire::Request> requests = {
      {"HELLO", {}},
      {"EXP-LIST", {}},
      {"EXP-CREATE", {"sweep", "a:10", "b:20.5"}},
      {"QOS-GET", {"exp1"}},
      {"QOS-SET", {"exp1", "2002-11-18T00:10:00Z", "500.00", "time"}},
      {"QOS-SET", {"exp1", "2002-11-18T11:10:00+11:00", "12", "cost"}},
      {"EXP-START", {"exp1"}},
      {"EXP-STOP", {"exp1"}},
      {"EXP-SHUTDOWN", {"exp2"}},
      {"EXP-STATUS", {"exp1"}},
      {"JOB-LIST", {"exp1", "0", "50"}},
      {"JOB-LIST", {"exp1", "2", "3", "Failed"}},
      {"JOB-INFO", {"exp1", "3"}},
      {"JOB-RESTART", {"exp1", "2"}},
      {"JOB-RESTART-FAILED", {"exp1"}},
      {"RES-LIST", {}},
  };
  Broker b(testing::configs(testing::s1_nodes(), 0.5, 0.1), 3, testing::at(0));
  b.create_experiment(testing::spec("seed", 5, 60, testing::qos(400, 1000, Optimization::kTimeMin)));
  b.control(ExperimentId{1}, ExperimentAction::kStart);
  b.advance(testing::at(90));
  protocol::Handler h(b);
  std::vector<std::string> corpus;
  for (const auto& r : requests) {
    corpus.push_back(wire::encode_request(r));
    corpus.push_back(wire::encode_response(h.handle(r)));
  }
  corpus.push_back("OK\t0\n");
  corpus.push_back("ERR\t404\tno such job\n");
  corpus.push_back("OK\t2\na\tb\nc\n");
  return corpus;
}

class Mutator {
 public:
  explicit Mutator(std::uint64_t seed) : rng_(seed) {}

  std::string mutate(const std::string& base, const std::vector<std::string>& corpus) {
    std::string s = base;
    const int rounds = pick(1, 4);
    for (int i = 0; i < rounds; ++i) {
      switch (pick(0, 7)) {
        case 0:
          if (!s.empty()) s[at(s)] ^= static_cast<char>(1 << pick(0, 7));
          break;
        case 1:
          s.insert(s.begin() + static_cast<std::ptrdiff_t>(pick(0, static_cast<int>(s.size()))),
                   static_cast<char>(pick(0, 255)));
          break;
        case 2:
          if (!s.empty()) {
            const std::size_t p = at(s);
            s.erase(p, static_cast<std::size_t>(pick(1, 8)));
          }
          break;
        case 3:
          if (!s.empty()) {
            const std::size_t p = at(s);
            const std::string piece = s.substr(p, static_cast<std::size_t>(pick(1, 16)));
            s.insert(at(s), piece);
          }
          break;
        case 4: {
          static constexpr std::string_view kTokens[] = {
              "\t", "\n", "\r", "OK", "ERR", "0", "-1", "999999999999", "4294967296", "1e308", "nan",
              "\xff", "\xc3", "2002-02-30T00:00:00Z", "Failed", "cost", "T+", ":", "."};
          const auto& t = kTokens[pick(0, std::size(kTokens) - 1)];
          s.insert(s.empty() ? 0 : at(s), t);
          break;
        }
        case 5: {
          const std::string& other = corpus[static_cast<std::size_t>(pick(0, static_cast<int>(corpus.size()) - 1))];
          s = s.substr(0, s.empty() ? 0 : at(s)) + other.substr(other.empty() ? 0 : at(other));
          break;
        }
        case 6:
          if (s.size() > 1) s.resize(at(s));
          break;
        default: {
          // Replace a digit run with a random number.
          const auto p = s.find_first_of("0123456789", s.empty() ? 0 : at(s));
          if (p != std::string::npos) {
            const auto e = s.find_first_not_of("0123456789", p);
            s.replace(p, e == std::string::npos ? std::string::npos : e - p, std::to_string(rng_() >> pick(0, 63)));
          }
        }
      }
    }
    if (s.size() > wire::kMaxLineBytes + 64) s.resize(wire::kMaxLineBytes + 64);
    return s;
  }

  std::uint64_t next() { return rng_(); }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::size_t at(const std::string& s) { return static_cast<std::size_t>(pick(0, static_cast<int>(s.size()) - 1)); }
  std::mt19937_64 rng_;
};

}  // namespace

Result protocol_round_trip() {
  testing::WireGen gen(20021118);
  int failures = 0;
  for (int i = 0; i < kRoundTripCases; ++i) {
    const wire::Request req = gen.request();
    if (wire::parse_request(wire::encode_request(req)) != testing::sanitized(req)) ++failures;
    const wire::Response resp = gen.response();
    if (wire::parse_response(wire::encode_response(resp)) != testing::sanitized(resp)) ++failures;
  }
  Detail d;
  d.add("cases", kRoundTripCases).add("failures", failures);
  return {failures == 0, d.str()};
}

Result protocol_fuzz() {
  const char* env = std::getenv("GRIDSTEER_FUZZ_SECONDS");
  const double wall_budget = env && std::atof(env) > 0 ? std::atof(env) : kFuzzSeconds;
  const auto start = std::chrono::steady_clock::now();

  Harness harness;
  Mutator mut(0xC0FFEE);
  std::vector<std::string> corpus = seed_corpus();
  std::uint64_t execs = 0, crashes = 0, hangs = 0, stalls = 0;
  std::string first_crash;
  std::set<std::string> seen;
  double slowest = 0.0;

  auto done = [&] { return (execs & 255) == 0 && seconds_since(start) >= wall_budget; };
  while (!done()) {
    const std::string& base = corpus[mut.next() % corpus.size()];
    const std::string input = mut.mutate(base, corpus);
    const auto t = std::chrono::steady_clock::now();
    const std::uint64_t split = mut.next();
    const std::string failure = harness.run(input, split);
    double took = seconds_since(t);
    ++execs;
    if (took > kHangSeconds) {
      // Time it again: a slow input is a hang only if it stays slow. A one-off
      // pause (the process descheduled or stopped) is counted as a stall.
      const auto again = std::chrono::steady_clock::now();
      harness.run(input, split);
      const double retook = seconds_since(again);
      if (retook > kHangSeconds) {
        ++hangs;
      } else {
        ++stalls;
        took = retook;
      }
    }
    slowest = std::max(slowest, took);
    if (!failure.empty()) {
      if (crashes++ == 0) first_crash = failure;
      continue;
    }
    // Keep inputs that reach a behaviour not seen before.
    if (corpus.size() < kMaxCorpus && seen.insert(harness.signature()).second) corpus.push_back(input);
  }

  Detail d;
  d.add("execs", execs)
      .add("budget_s", wall_budget)
      .add("rate_per_s", static_cast<std::uint64_t>(static_cast<double>(execs) / seconds_since(start)))
      .add("corpus", corpus.size())
      .add("parsed.requests", harness.parsed_requests())
      .add("parsed.responses", harness.parsed_responses())
      .add("handler.500s", harness.err500())
      .add("slowest_ms", static_cast<int>(slowest * 1000))
      .add("crashes", crashes)
      .add("hangs", hangs)
      .add("stalls", stalls);
  if (!first_crash.empty()) d.add("first", "'" + first_crash + "'");
  return {crashes == 0 && hangs == 0, d.str()};
}

Result protocol_end_to_end() {
  const testing::E2eReport r = testing::run_e2e();
  Detail d;
  d.add("verbs_ok", r.verbs_ok.size())
      .add("verbs", protocol::kVerbs.size())
      .add("http_requests", r.http_requests)
      .add("broker_calls", r.broker_calls)
      .add("failures", r.failures.size());
  if (!r.failures.empty()) d.add("first", "'" + r.failures.front() + "'");
  bool all_verbs = true;
  for (const auto v : protocol::kVerbs) all_verbs = all_verbs && r.verbs_ok.contains(std::string(v));
  return {r.failures.empty() && all_verbs, d.str()};
}

}  // namespace gridsteer::acceptance
