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

/**
 * @file timebase.hpp
 * @brief Exact rational time.
 *
 * Every instant and duration handled by the simulator is a reduced fraction of
 * seconds. A 15 Hz period (1/15 s) has no finite decimal tick, so release
 * times, hyperperiods and busy ratios are all carried exactly and only turned
 * into floating point when a report is printed.
 *
 * Arithmetic is done on 64-bit numerators/denominators with 128-bit
 * intermediates. A result that does not fit in 64 bits throws OverflowError;
 * nothing wraps.
 */

#pragma once

#include "ovsim/error.hpp"

#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>

namespace ovsim {

class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t whole) : num_(whole), den_(1) {}  // NOLINT(implicit)

  /// Throws Error on a zero denominator.
  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error("rational: zero denominator");
    *this = reduce(num, den);
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  constexpr bool is_zero() const { return num_ == 0; }
  constexpr bool is_positive() const { return num_ > 0; }
  constexpr bool is_negative() const { return num_ < 0; }
  constexpr bool is_integer() const { return den_ == 1; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator-() const {
    if (num_ == INT64_MIN) throw OverflowError("rational negate");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return reduce(Wide{a.num_} + b.num_, a.den_);
    const Wide n = Wide{a.num_} * b.den_ + Wide{b.num_} * a.den_;
    return reduce(n, Wide{a.den_} * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    // Cross-reduce first so intermediates stay small.
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const Wide n = Wide{a.num_ / (g1 ? g1 : 1)} * (b.num_ / (g2 ? g2 : 1));
    const Wide d = Wide{a.den_ / (g2 ? g2 : 1)} * (b.den_ / (g1 ? g1 : 1));
    return reduce(n, d);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error("rational: division by zero");
    Rational inv;
    inv.num_ = b.num_ < 0 ? -b.den_ : b.den_;
    inv.den_ = b.num_ < 0 ? -b.num_ : b.num_;
    return a * inv;
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return Wide{a.num_} * b.den_ <=> Wide{b.num_} * a.den_;
  }

  /// Largest integer not greater than the value.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  /// Exact modulus with the sign of the divisor, i.e. a - floor(a/b)*b.
  friend Rational mod(const Rational& a, const Rational& b) { return a - b * (a / b).floor(); }

  /// "1/15", "3", "-7/2".
  std::string to_fraction_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Finite decimal expansion when the denominator has only 2 and 5 as prime
  /// factors ("0.04", "12", "-0.0002"); empty otherwise.
  std::string to_decimal_string() const;

  /// Decimal when exact, fraction otherwise.
  std::string to_string() const {
    std::string d = to_decimal_string();
    return d.empty() ? to_fraction_string() : d;
  }

  /// Parses "12", "-0.25", "1/15", "2.5/3". Throws Error on malformed input.
  static Rational parse(std::string_view text);

 private:
  using Wide = __int128;

  static Rational reduce(Wide n, Wide d) {
    if (d == 0) throw Error("rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const Wide g = gcd_wide(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX) throw OverflowError("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static Wide gcd_wide(Wide a, Wide b) {
    while (b != 0) {
      const Wide t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Instants and durations share one representation; spans are validated as
/// non-negative where they enter the system.
using TimeStamp = Rational;
using TimeSpan = Rational;

/// Canonical value num/den; throws on den == 0.
inline Rational rational(std::int64_t num, std::int64_t den) { return Rational(num, den); }

inline TimeSpan milliseconds(std::int64_t ms) { return Rational(ms, 1000); }
inline TimeSpan microseconds(std::int64_t us) { return Rational(us, 1000000); }

inline std::string Rational::to_decimal_string() const {
  std::int64_t d = den_;
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return {};
  const int digits = twos > fives ? twos : fives;
  // Scale to num * 10^digits / den, which is an integer.
  Wide scaled = num_;
  for (int i = 0; i < digits; ++i) scaled *= 10;
  scaled /= den_;
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string body;
  do {
    body.insert(body.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
    scaled /= 10;
  } while (scaled != 0);
  if (digits > 0) {
    while (static_cast<int>(body.size()) <= digits) body.insert(body.begin(), '0');
    body.insert(body.end() - digits, '.');
  }
  return negative ? "-" + body : body;
}

namespace detail {

inline Rational parse_decimal(std::string_view text) {
  if (text.empty()) throw Error("empty number");
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    ++i;
  }
  std::int64_t int_part = 0;
  std::int64_t frac_num = 0;
  std::int64_t frac_den = 1;
  bool seen_digit = false;
  bool seen_dot = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (seen_dot) throw Error("malformed number '" + std::string(text) + "'");
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') throw Error("malformed number '" + std::string(text) + "'");
    seen_digit = true;
    const int digit = c - '0';
    std::int64_t* target = seen_dot ? &frac_num : &int_part;
    if (__builtin_mul_overflow(*target, 10, target) || __builtin_add_overflow(*target, digit, target))
      throw OverflowError("number too large '" + std::string(text) + "'");
    if (seen_dot && __builtin_mul_overflow(frac_den, 10, &frac_den))
      throw OverflowError("too many decimals '" + std::string(text) + "'");
  }
  if (!seen_digit) throw Error("malformed number '" + std::string(text) + "'");
  Rational value = Rational(int_part) + Rational(frac_num, frac_den);
  return negative ? -value : value;
}

}  // namespace detail

inline Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return detail::parse_decimal(text);
  const Rational n = detail::parse_decimal(text.substr(0, slash));
  const Rational d = detail::parse_decimal(text.substr(slash + 1));
  if (d.is_zero()) throw Error("zero denominator in '" + std::string(text) + "'");
  return n / d;
}

/// Least positive value that is an integer multiple of every period:
/// lcm(numerators) / gcd(denominators) for reduced fractions.
inline TimeSpan hyperperiod(std::span<const TimeSpan> periods) {
  if (periods.empty()) throw Error("hyperperiod: empty period list");
  std::int64_t l = 1;
  std::int64_t g = 0;
  for (const TimeSpan& p : periods) {
    if (!p.is_positive()) throw Error("hyperperiod: non-positive period " + p.to_string());
    const std::int64_t step = p.num() / std::gcd(l, p.num());
    if (__builtin_mul_overflow(l, step, &l)) throw OverflowError("hyperperiod overflow");
    g = std::gcd(g, p.den());
  }
  return Rational(l, g);
}

// ---------------------------------------------------------------------------
// Durations with units: "20ms", "0.2ms", "1/15s", "500us".

/// Parses a unit-suffixed duration. Bare numbers are rejected. Negative values
/// parse; range checks belong to the caller.
inline TimeSpan parse_duration(std::string_view text) {
  struct Unit {
    std::string_view suffix;
    std::int64_t per_second;
  };
  // Longest suffixes first so "ms" is not read as "s".
  static constexpr Unit kUnits[] = {{"ns", 1000000000}, {"us", 1000000}, {"ms", 1000}, {"s", 1}};
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  for (const Unit& u : kUnits) {
    if (text.size() > u.suffix.size() && text.ends_with(u.suffix)) {
      std::string_view number = text.substr(0, text.size() - u.suffix.size());
      while (!number.empty() && number.back() == ' ') number.remove_suffix(1);
      try {
        return Rational::parse(number) / Rational(u.per_second);
      } catch (const OverflowError&) {
        throw;
      } catch (const Error&) {
        throw Error("malformed duration '" + std::string(text) + "'");
      }
    }
  }
  throw Error("duration '" + std::string(text) + "' needs a unit suffix (s, ms, us, ns)");
}

/// "20ms" / "0.2ms" when the value is an exact decimal number of
/// milliseconds, "1/15s" otherwise.
inline std::string format_duration(const TimeSpan& t) {
  const Rational ms = t * Rational(1000);
  const std::string dec = ms.to_decimal_string();
  if (!dec.empty()) return dec + "ms";
  return t.to_fraction_string() + "s";
}

}  // namespace ovsim
