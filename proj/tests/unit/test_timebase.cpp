/*
 * Copyright 2026 The ovsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "ovsim/error.hpp"
#include "ovsim/timebase.hpp"

#include <boost/rational.hpp>
#include <gtest/gtest.h>

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace ovsim {
namespace {

TEST(Rational, KeepsReducedFractions) {
  const Rational r = rational(1, 15);
  EXPECT_EQ(r.num(), 1);
  EXPECT_EQ(r.den(), 15);
}

TEST(Rational, ReducesByGcd) {
  const Rational r = rational(4, 200);
  EXPECT_EQ(r.num(), 1);
  EXPECT_EQ(r.den(), 50);
}

TEST(Rational, RejectsZeroDenominator) { EXPECT_THROW(rational(1, 0), Error); }

TEST(Rational, SignLivesInNumerator) {
  const Rational r = rational(3, -6);
  EXPECT_EQ(r.num(), -1);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(rational(0, -7), Rational(0));
  EXPECT_EQ(rational(0, -7).den(), 1);
}

TEST(Rational, DivisionByZeroThrows) { EXPECT_THROW(Rational(1) / Rational(0), Error); }

TEST(Rational, OverflowIsAnError) {
  const Rational big(std::numeric_limits<std::int64_t>::max() / 2);
  EXPECT_THROW(big * Rational(3), OverflowError);
  EXPECT_THROW(big + big + big, OverflowError);
  // Huge coprime denominators overflow too.
  EXPECT_THROW(rational(1, 999999937) * rational(1, 999999929) * rational(1, 999999893), OverflowError);
}

TEST(Rational, FloorCeilAndMod) {
  EXPECT_EQ(rational(7, 2).floor(), 3);
  EXPECT_EQ(rational(7, 2).ceil(), 4);
  EXPECT_EQ(rational(-7, 2).floor(), -4);
  EXPECT_EQ(rational(-7, 2).ceil(), -3);
  EXPECT_EQ(mod(rational(1, 5), rational(1, 15)), Rational(0));
  EXPECT_EQ(mod(rational(1, 5), rational(2, 15)), rational(1, 15));
}

TEST(Rational, StringForms) {
  EXPECT_EQ(rational(1, 25).to_string(), "0.04");
  EXPECT_EQ(rational(-1, 5000).to_string(), "-0.0002");
  EXPECT_EQ(rational(1, 15).to_string(), "1/15");
  EXPECT_EQ(Rational(12).to_string(), "12");
  EXPECT_EQ(rational(1, 15).to_decimal_string(), "");
  EXPECT_EQ(Rational::parse("1/15"), rational(1, 15));
  EXPECT_EQ(Rational::parse("0.2"), rational(1, 5));
  EXPECT_EQ(Rational::parse("2.5/3"), rational(5, 6));
  EXPECT_EQ(Rational::parse("-12"), Rational(-12));
  EXPECT_THROW(Rational::parse("abc"), Error);
  EXPECT_THROW(Rational::parse("1/"), Error);
  EXPECT_THROW(Rational::parse(""), Error);
}

// Boost.Rational is an independent exact implementation; arithmetic must agree.
TEST(RationalProperty, AgreesWithBoostRational) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<std::int64_t> num(-100000, 100000);
  std::uniform_int_distribution<std::int64_t> den(1, 100000);
  for (int i = 0; i < 5000; ++i) {
    const std::int64_t an = num(rng), ad = den(rng), bn = num(rng), bd = den(rng);
    const Rational a(an, ad), b(bn, bd);
    const boost::rational<std::int64_t> ba(an, ad), bb(bn, bd);
    const Rational sum = a + b;
    const Rational diff = a - b;
    ASSERT_EQ(sum.num(), (ba + bb).numerator());
    ASSERT_EQ(sum.den(), (ba + bb).denominator());
    ASSERT_EQ(diff.num(), (ba - bb).numerator());
    ASSERT_EQ(diff.den(), (ba - bb).denominator());
    ASSERT_EQ(a < b, ba < bb);
    ASSERT_EQ(a == b, ba == bb);
    // Canonical after closure.
    ASSERT_GT(sum.den(), 0);
    ASSERT_EQ(std::gcd(sum.num() < 0 ? -sum.num() : sum.num(), sum.den()), sum.num() == 0 ? sum.den() : 1);
  }
}

TEST(RationalProperty, FloatConversionIsMonotone) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> num(-1000000, 1000000);
  std::uniform_int_distribution<std::int64_t> den(1, 1000000);
  for (int i = 0; i < 5000; ++i) {
    Rational a(num(rng), den(rng)), b(num(rng), den(rng));
    if (b < a) std::swap(a, b);
    if (a < b) {
      ASSERT_LE(a.to_double(), b.to_double());
    }
  }
}

TEST(Hyperperiod, TwentyFifteenTenHertz) {
  const std::vector<TimeSpan> p{rational(1, 20), rational(1, 15), rational(1, 10)};
  EXPECT_EQ(hyperperiod(p), rational(1, 5));
}

TEST(Hyperperiod, SingleElement) {
  const std::vector<TimeSpan> p{rational(1, 10)};
  EXPECT_EQ(hyperperiod(p), rational(1, 10));
}

TEST(Hyperperiod, MultipleRelationship) {
  const std::vector<TimeSpan> p{rational(1, 20), rational(1, 10)};
  EXPECT_EQ(hyperperiod(p), rational(1, 10));
}

TEST(Hyperperiod, RejectsEmptyAndNonPositive) {
  EXPECT_THROW(hyperperiod({}), Error);
  const std::vector<TimeSpan> zero{rational(1, 10), Rational(0)};
  EXPECT_THROW(hyperperiod(zero), Error);
  const std::vector<TimeSpan> neg{rational(-1, 10)};
  EXPECT_THROW(hyperperiod(neg), Error);
}

// Every period divides the result, and no smaller multiple of min(P) works.
TEST(HyperperiodProperty, ExactAndMinimal) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> small(1, 12);
  std::uniform_int_distribution<std::int64_t> count(1, 4);
  for (int i = 0; i < 300; ++i) {
    std::vector<TimeSpan> periods;
    const std::int64_t n = count(rng);
    for (std::int64_t k = 0; k < n; ++k) periods.emplace_back(small(rng), small(rng));
    const TimeSpan h = hyperperiod(periods);
    for (const TimeSpan& p : periods) ASSERT_EQ(mod(h, p), Rational(0)) << h.to_string() << " vs " << p.to_string();
    const TimeSpan lo = *std::min_element(periods.begin(), periods.end());
    for (std::int64_t k = 1; lo * Rational(k) < h; ++k) {
      bool all = true;
      for (const TimeSpan& p : periods) all = all && mod(lo * Rational(k), p).is_zero();
      ASSERT_FALSE(all) << "smaller common multiple " << (lo * Rational(k)).to_string();
    }
  }
}

TEST(Duration, ParsesUnits) {
  EXPECT_EQ(parse_duration("20ms"), rational(1, 50));
  EXPECT_EQ(parse_duration("0.2ms"), rational(1, 5000));
  EXPECT_EQ(parse_duration("1/15s"), rational(1, 15));
  EXPECT_EQ(parse_duration("500us"), rational(1, 2000));
  EXPECT_EQ(parse_duration("3ns"), rational(3, 1000000000));
  EXPECT_EQ(parse_duration("-1ms"), rational(-1, 1000));
}

TEST(Duration, RejectsBareNumbersAndJunk) {
  EXPECT_THROW(parse_duration("20"), Error);
  EXPECT_THROW(parse_duration("ms"), Error);
  EXPECT_THROW(parse_duration("twelve ms"), Error);
  EXPECT_THROW(parse_duration("20 min"), Error);
}

TEST(Duration, FormatsDecimalOrFraction) {
  EXPECT_EQ(format_duration(rational(1, 50)), "20ms");
  EXPECT_EQ(format_duration(rational(1, 5000)), "0.2ms");
  EXPECT_EQ(format_duration(rational(1, 15)), "1/15s");
  EXPECT_EQ(format_duration(Rational(0)), "0ms");
  for (const char* s : {"20ms", "0.2ms", "1/15s", "0ms", "1.234ms"})
    EXPECT_EQ(format_duration(parse_duration(s)), s);
}

}  // namespace
}  // namespace ovsim
