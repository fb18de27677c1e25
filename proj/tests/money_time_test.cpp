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

#include <ctime>

#include <gtest/gtest.h>

#include "gridsteer/errors.hpp"
#include "gridsteer/money.hpp"
#include "gridsteer/time.hpp"

namespace gridsteer {
namespace {

// Offset-arithmetic oracle built on libc: shift the epoch seconds, break them
// down with gmtime_r, print with strftime.
std::string libc_localize(std::int64_t unix_s, int offset_min) {
  const std::time_t shifted = static_cast<std::time_t>(unix_s + offset_min * 60);
  std::tm tm{};
  gmtime_r(&shifted, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  const int mag = std::abs(offset_min);
  char suffix[8];
  std::snprintf(suffix, sizeof suffix, "%c%02d:%02d", offset_min < 0 ? '-' : '+', mag / 60,
                mag % 60);
  return std::string(buf) + suffix;
}

TEST(Money, ParsesAndFormatsTwoDigits) {
  EXPECT_EQ(Money::parse("500.00")->cents(), 50000);
  EXPECT_EQ(Money::parse("12.5")->cents(), 1250);
  EXPECT_EQ(Money::parse("7")->cents(), 700);
  EXPECT_EQ(Money::parse("-5")->cents(), -500);
  EXPECT_EQ(Money::from_cents(55000).to_string(), "550.00");
  EXPECT_EQ(Money::from_cents(-5).to_string(), "-0.05");
  EXPECT_EQ(Money::from_cents(0).to_string(), "0.00");
}

TEST(Money, RejectsMalformedAmounts) {
  for (const char* bad : {"", "1.234", "abc", ".5", "5.", "1,00", "--1", "1e3", " 1"}) {
    EXPECT_FALSE(Money::parse(bad).has_value()) << bad;
  }
}

TEST(Money, RoundsHalfUpAtTheCent) {
  EXPECT_EQ(Money::from_double(0.005).cents(), 1);
  EXPECT_EQ(Money::from_double(1.004999).cents(), 100);
  EXPECT_EQ(Money::from_double(0.1 * 3).cents(), 30);
  EXPECT_EQ(Money::from_double(150.0).cents(), 15000);
  EXPECT_EQ(Money::from_double(2.675).cents(), 268);
}

TEST(Time, FormatsAndParsesUtc) {
  const auto t = parse_iso8601("2002-11-22T00:00:00Z");
  ASSERT_TRUE(t);
  EXPECT_EQ(format_utc(*t), "2002-11-22T00:00:00Z");
  EXPECT_EQ(to_unix_ms(*t), 1037923200000LL);
  const auto frac = parse_iso8601("2002-11-22T00:00:00.25Z");
  ASSERT_TRUE(frac);
  EXPECT_EQ(format_utc(*frac), "2002-11-22T00:00:00.250Z");
  EXPECT_EQ(format_utc(from_unix_ms(-1)), "1969-12-31T23:59:59.999Z");
}

TEST(Time, RejectsMalformedInstants) {
  for (const char* bad :
       {"2002-02-30T00:00:00Z", "2002-11-18 02:00:00Z", "2002-11-18T24:00:00Z",
        "2002-11-18T02:00:00", "2002-11-18T02:00:00+1100", "2002-11-18T02:00:00.Z",
        "2002-11-18T02:00:00Zjunk", "2002-13-01T00:00:00Z", ""}) {
    EXPECT_FALSE(parse_iso8601(bad).has_value()) << bad;
  }
  EXPECT_THROW(delocalize("yesterday"), ParseError);
}

TEST(Time, LocalizeWorkedExamples) {
  const Timestamp t = *parse_iso8601("2002-11-18T02:00:00Z");
  EXPECT_EQ(localize(t, 660), "2002-11-18T13:00:00+11:00");
  EXPECT_EQ(localize(t, 0), "2002-11-18T02:00:00+00:00");
  EXPECT_EQ(localize(t, -300), "2002-11-17T21:00:00-05:00");
  EXPECT_EQ(localize(t, 660), libc_localize(to_unix_ms(t) / 1000, 660));
  EXPECT_EQ(localize(t, -300), libc_localize(to_unix_ms(t) / 1000, -300));
}

TEST(Time, LocalizeRejectsOffsetsOutsideRealZones) {
  const Timestamp t = *parse_iso8601("2002-11-18T02:00:00Z");
  EXPECT_THROW(localize(t, 900), std::out_of_range);
  EXPECT_THROW(localize(t, -721), std::out_of_range);
  EXPECT_NO_THROW(localize(t, 840));
  EXPECT_NO_THROW(localize(t, -720));
}

TEST(Time, LocalizeMatchesLibcAcrossDateBoundaries) {
  // Instants straddling month, year and leap-day rollovers.
  for (const char* base : {"2002-12-31T23:30:00Z", "2004-02-29T00:10:00Z", "2000-03-01T12:00:00Z",
                           "1999-12-31T11:59:00Z"}) {
    const Timestamp t = *parse_iso8601(base);
    for (int off = kMinOffsetMinutes; off <= kMaxOffsetMinutes; off += 7) {
      const std::string local = localize(t, off);
      EXPECT_EQ(local, libc_localize(to_unix_ms(t) / 1000, off));
      EXPECT_EQ(delocalize(local), t);
    }
  }
}

TEST(Time, CivilDayNumbersAgreeWithTimegm) {
  for (int y : {1900, 1970, 2000, 2002, 2100}) {
    for (unsigned m = 1; m <= 12; ++m) {
      std::tm tm{};
      tm.tm_year = y - 1900;
      tm.tm_mon = static_cast<int>(m) - 1;
      tm.tm_mday = 1;
      EXPECT_EQ(days_from_civil(y, m, 1) * 86400, static_cast<std::int64_t>(timegm(&tm)));
    }
  }
}

}  // namespace
}  // namespace gridsteer
