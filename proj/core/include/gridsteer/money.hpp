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
#include <optional>
#include <string>
#include <string_view>

namespace gridsteer {

// Grid-dollar amount in fixed point (hundredths of a G$). All charges are
// rounded half-up to the cent when converted from a real-valued product.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money from_cents(std::int64_t cents) { return Money(cents); }
  // Rounds half-up to the nearest cent.
  static Money from_double(double gdollars);
  // Accepts "12", "12.5", "12.50"; at most two fractional digits, optional
  // leading '-'. Returns nullopt on anything else.
  static std::optional<Money> parse(std::string_view text);
  static constexpr Money max() { return Money(INT64_MAX / 4); }

  constexpr std::int64_t cents() const { return cents_; }
  double to_double() const { return static_cast<double>(cents_) / 100.0; }
  // Always two fractional digits: "550.00", "-0.05".
  std::string to_string() const;

  constexpr Money& operator+=(Money o) {
    cents_ += o.cents_;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    cents_ -= o.cents_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return Money(a.cents_ + b.cents_); }
  friend constexpr Money operator-(Money a, Money b) { return Money(a.cents_ - b.cents_); }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(std::int64_t cents) : cents_(cents) {}
  std::int64_t cents_ = 0;
};

}  // namespace gridsteer
