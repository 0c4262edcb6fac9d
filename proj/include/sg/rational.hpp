// Copyright 2026 The sg Authors.
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

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sg {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Rounds v * scale to the nearest integer and returns the reduced fraction.
// Used to lift floating-point payoffs into exact arithmetic.
inline Rational rationalize(double v, std::int64_t scale = 1'000'000) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument("rationalize: payoff is not finite");
  }
  const double scaled = v * static_cast<double>(scale);
  if (std::abs(scaled) > 9.0e18) {
    throw std::invalid_argument("rationalize: payoff too large for scale " +
                                std::to_string(scale));
  }
  const auto num = static_cast<std::int64_t>(std::llround(scaled));
  return Rational(BigInt(num), BigInt(scale));
}

// "p/q" for proper fractions, plain "p" for integers.
inline std::string fraction_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline bool is_zero(const RationalVector& v) {
  for (const auto& e : v) {
    if (e != 0) return false;
  }
  return true;
}

inline Rational sum(const RationalVector& v) {
  Rational s = 0;
  for (const auto& e : v) s += e;
  return s;
}

}  // namespace sg
