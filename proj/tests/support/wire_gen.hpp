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

#include <random>
#include <string>

#include "gridsteer/wire.hpp"

// Random protocol values for property tests and the acceptance run.
namespace gridsteer::testing {

class WireGen {
 public:
  explicit WireGen(std::uint64_t seed) : rng_(seed) {}

  std::string verb() {
    std::string v(1, upper());
    const auto n = pick(1, 31);
    for (std::size_t i = 0; i < n; ++i) v += pick(0, 6) == 0 ? '-' : upper();
    return v;
  }

  // Arbitrary bytes, including separators and broken UTF-8.
  std::string raw_field() {
    std::string s;
    const auto n = pick(0, 24);
    for (std::size_t i = 0; i < n; ++i) {
      switch (pick(0, 9)) {
        case 0: s += '\t'; break;
        case 1: s += '\n'; break;
        case 2: s += '\r'; break;
        case 3: s += static_cast<char>(pick(0x80, 0xff)); break;
        case 4: s += "\xc3\xa9"; break;          // e-acute
        case 5: s += "\xe6\x97\xa5"; break;      // CJK
        case 6: s += "\xf0\x9f\x8c\x8f"; break;  // globe
        default: s += static_cast<char>(pick(0x20, 0x7e));
      }
    }
    return s;
  }

  wire::Request request() {
    wire::Request r{verb(), {}};
    const auto n = pick(0, 8);
    for (std::size_t i = 0; i < n; ++i) r.args.push_back(raw_field());
    return r;
  }

  wire::Response response() {
    if (pick(0, 3) == 0) {
      static constexpr int kCodes[] = {400, 404, 409, 422, 500};
      return wire::Err{kCodes[pick(0, 4)], raw_field()};
    }
    wire::Ok ok;
    const auto n = pick(0, 12);
    for (std::size_t i = 0; i < n; ++i) {
      wire::Record rec;
      const auto m = pick(1, 10);
      for (std::size_t k = 0; k < m; ++k) rec.push_back(raw_field());
      ok.records.push_back(std::move(rec));
    }
    return ok;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  char upper() { return static_cast<char>('A' + pick(0, 25)); }

  std::mt19937_64 rng_;
};

// What a value looks like after a trip through the encoder.
inline wire::Request sanitized(wire::Request r) {
  for (auto& a : r.args) a = wire::sanitize(a);
  return r;
}

inline wire::Response sanitized(wire::Response r) {
  if (auto* err = std::get_if<wire::Err>(&r)) {
    err->message = wire::sanitize(err->message);
  } else {
    for (auto& rec : std::get<wire::Ok>(r).records) {
      for (auto& f : rec) f = wire::sanitize(f);
    }
  }
  return r;
}

}  // namespace gridsteer::testing
