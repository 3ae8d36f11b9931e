// Copyright 2026 The symvar Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact rational scalar and the scalar traits that let every numeric
// template in the library run either exactly or in double precision.

#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

#include "symvar/errors.hpp"

namespace symvar {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* mode_name = "exact";
  static Rational tolerance() { return Rational(0); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  static Rational from_rational(const Rational& v) { return v; }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* mode_name = "float";
  static double tolerance() { return 1e-12; }
  static double to_double(double v) { return v; }
  static double from_rational(const Rational& v) { return v.convert_to<double>(); }
};

template <class S>
concept Scalar = requires { ScalarTraits<S>::exact; };

template <Scalar S>
S abs_value(const S& v) {
  return v < S(0) ? S(-v) : v;
}

/// Largest integer not exceeding v.
inline Rational floor_value(const Rational& v) {
  BigInt num = boost::multiprecision::numerator(v);
  BigInt den = boost::multiprecision::denominator(v);
  BigInt q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) q -= 1;
  return Rational(q);
}

inline double floor_value(double v) { return std::floor(v); }

template <Scalar S>
S power(const S& base, unsigned exponent) {
  S result(1);
  S b = base;
  while (exponent != 0) {
    if (exponent & 1u) result *= b;
    exponent >>= 1;
    if (exponent != 0) b *= b;
  }
  return result;
}

/// Parses "3", "-0.25", "1e-3", "2.5E+2" or "3/10" into an exact rational.
/// Decimal notation is interpreted exactly ("0.3" is 3/10, not the double).
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw ValidationError("not a rational number: '" + std::string(text) + "'",
                          "use a decimal such as 0.3 or a fraction such as 3/10");
  };
  std::size_t begin = 0, end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  const std::string s(text.substr(begin, end - begin));
  if (s.empty()) return fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    if (s.find('/', slash + 1) != std::string::npos) return fail();
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) return fail();
    return num / den;
  }

  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  BigInt mantissa = 0;
  long fraction_digits = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_point) ++fraction_digits;
      any_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return fail();
  long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') return fail();
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) exp_negative = s[i++] == '-';
    if (i == s.size()) return fail();
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return fail();
      exponent = exponent * 10 + (s[i] - '0');
      if (exponent > 4000) return fail();
    }
    if (exp_negative) exponent = -exponent;
  }
  long scale = exponent - fraction_digits;
  Rational value(mantissa);
  Rational ten_power = power(Rational(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  value = scale < 0 ? value / ten_power : value * ten_power;
  return negative ? Rational(-value) : value;
}

/// "a/b" form (or "a" for integers).
inline std::string to_fraction_string(const Rational& v) { return v.str(); }

/// True when v has a finite decimal expansion.
inline bool is_terminating_decimal(const Rational& v) {
  BigInt den = boost::multiprecision::denominator(v);
  while (den % 2 == 0) den /= 2;
  while (den % 5 == 0) den /= 5;
  return den == 1;
}

/// Decimal rendering. Exact for terminating decimals; otherwise rounded to
/// `digits` fractional digits with trailing zeros stripped.
inline std::string to_decimal_string(const Rational& v, unsigned digits = 20) {
  BigInt num = boost::multiprecision::numerator(v);
  BigInt den = boost::multiprecision::denominator(v);
  bool negative = num < 0;
  if (negative) num = -num;

  unsigned places = 0;
  if (is_terminating_decimal(v)) {
    BigInt d = den;
    unsigned twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    places = std::max(twos, fives);
  } else {
    places = digits;
  }
  BigInt scale = 1;
  for (unsigned k = 0; k < places; ++k) scale *= 10;
  BigInt scaled = (2 * num * scale + den) / (2 * den);  // round half up
  std::string body = scaled.str();
  if (places > 0) {
    if (body.size() <= places) body.insert(0, places - body.size() + 1, '0');
    body.insert(body.size() - places, ".");
    while (body.back() == '0') body.pop_back();
    if (body.back() == '.') body.pop_back();
  }
  if (negative && body != "0") body.insert(0, "-");
  return body;
}

/// Lossless string: terminating decimal when possible, else "a/b".
inline std::string to_exact_string(const Rational& v) {
  return is_terminating_decimal(v) ? to_decimal_string(v) : to_fraction_string(v);
}

}  // namespace symvar
