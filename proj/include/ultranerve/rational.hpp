#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ultranerve {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts "n", "n/d", and plain decimals such as "0.7" or "-12.05".
// Throws ParseError on anything else (including a zero denominator).
Rational parse_rational(std::string_view text);

// Canonical "num/den" form; integers print as "n/1".
std::string rational_to_string(const Rational& r);

BigInt ipow(std::uint32_t base, std::uint64_t exponent);

}  // namespace ultranerve
