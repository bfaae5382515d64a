#pragma once

/**
 * @file rational.hpp
 * @brief Exact arbitrary-precision integers and rationals.
 *
 * Densities are kept exact end to end; floating point only appears when a
 * report is rendered. Backed by Boost.Multiprecision (header-only).
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace lamvar {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// num/den with den > 0, reduced to lowest terms (cpp_rational canonicalizes).
inline Rational make_rational(BigInt num, BigInt den) { return Rational(std::move(num), std::move(den)); }

/// Renders "num/den" (always with an explicit denominator, e.g. "0/1", "5/24").
inline std::string fraction_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline BigInt pow_bigint(BigInt base, std::uint64_t exp) {
  BigInt out = 1;
  while (exp > 0) {
    if (exp & 1) out *= base;
    base *= base;
    exp >>= 1;
  }
  return out;
}

} // namespace lamvar
