// Copyright 2026 The comag Authors
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

#ifndef COMAG_CORE_RATIONAL_HPP_
#define COMAG_CORE_RATIONAL_HPP_

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace comag {

// Exact rational arithmetic for everything finite-game. cpp_rational keeps
// the fraction in lowest terms with a positive denominator, which is exactly
// the invariant the rest of the code relies on.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string rat_to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "num/den", "num", and optionally a leading sign on either part.
inline std::optional<Rational> rat_parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      BigInt num(text);
      return Rational(num);
    }
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) return std::nullopt;
    return Rational(num, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline Rational rat_parse_or_throw(const std::string& text) {
  auto r = rat_parse(text);
  if (!r) throw std::invalid_argument("invalid rational: '" + text + "'");
  return *r;
}

inline double rat_to_double(const Rational& r) {
  return static_cast<double>(r);
}

}  // namespace comag

#endif  // COMAG_CORE_RATIONAL_HPP_
