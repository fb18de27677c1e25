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

#include "gridsteer/money.hpp"

#include <cmath>
#include <cstdlib>

namespace gridsteer {

Money Money::from_double(double gdollars) {
  // The epsilon absorbs representation error in products such as 0.1 * 3 so
  // that exact half-cents round up as decimal arithmetic would.
  const double scaled = gdollars * 100.0;
  const double rounded = std::floor(scaled + 0.5 + 1e-7);
  return Money(static_cast<std::int64_t>(rounded));
}

std::optional<Money> Money::parse(std::string_view text) {
  if (text.empty() || text.size() > 20) return std::nullopt;
  bool negative = false;
  if (text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || frac.size() > 2) return std::nullopt;
  if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
  std::int64_t cents = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') return std::nullopt;
    cents = cents * 10 + (c - '0');
    if (cents > INT64_MAX / 1000) return std::nullopt;
  }
  cents *= 100;
  if (!frac.empty()) {
    for (char c : frac) {
      if (c < '0' || c > '9') return std::nullopt;
    }
    cents += (frac[0] - '0') * 10;
    if (frac.size() == 2) cents += frac[1] - '0';
  }
  return Money(negative ? -cents : cents);
}

std::string Money::to_string() const {
  const std::int64_t mag = cents_ < 0 ? -cents_ : cents_;
  std::string out = cents_ < 0 ? "-" : "";
  out += std::to_string(mag / 100);
  out += '.';
  const auto frac = mag % 100;
  out += static_cast<char>('0' + frac / 10);
  out += static_cast<char>('0' + frac % 10);
  return out;
}

}  // namespace gridsteer
