#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "lmeas/errors.hpp"

namespace lmeas {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// base^e for nonnegative integer exponents; exact.
Rational rational_pow(const Rational& base, std::uint64_t e);

/// 2-adic valuation of n > 0.
unsigned dyadic_valuation_of(std::uint64_t n);

/// true iff the denominator (in lowest terms) is a power of two.
bool is_dyadic(const Rational& r);

/// Canonical text: "p" when the denominator is 1, "p/q" otherwise, reduced.
std::string rational_str(const Rational& r);

/// Parses "p" or "p/q" (optionally signed). Throws ParseError.
Rational parse_rational(std::string_view text);

} // namespace lmeas
