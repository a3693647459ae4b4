#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ultranerve/gamma.hpp"

namespace ultranerve {

inline constexpr std::size_t kDefaultPrecision = 32;

bool is_prime(std::uint64_t n);

/**
 * Element of Q_p known to a bounded number of significant digits.
 *
 * A nonzero value is p^valuation * (d_0 + d_1 p + d_2 p^2 + ...), with
 * d_0 != 0 and exactly precision() digits retained, so every digit at an
 * absolute position below valuation() + precision() is known. Zero is a
 * tagged value with no digits and is treated as exact.
 *
 * Arithmetic truncates to the digits both operands determine; it never
 * rounds. Values are immutable.
 */
class PAdic {
public:
  static PAdic zero(std::uint32_t prime);

  // Digits are least significant first. Low zero digits are absorbed into the
  // valuation; the remaining digits set the precision. All-zero input is zero.
  static PAdic from_digits(std::uint32_t prime, std::int64_t valuation,
                           std::span<const std::uint32_t> digits);

  // Exact integer expansion (two's-complement style for negatives) kept to
  // `precision` significant digits.
  static PAdic from_integer(std::uint32_t prime, std::int64_t value,
                            std::size_t precision = kDefaultPrecision);

  // p^k to the given precision.
  static PAdic power_of_prime(std::uint32_t prime, std::int64_t k,
                              std::size_t precision = kDefaultPrecision);

  std::uint32_t prime() const { return prime_; }
  bool is_zero() const { return digits_.empty(); }
  // 0 for the zero value.
  std::int64_t valuation() const { return valuation_; }
  std::size_t precision() const { return digits_.size(); }
  std::span<const std::uint32_t> digits() const { return digits_; }

  // One past the highest known absolute digit position (unbounded for zero).
  std::int64_t known_until() const;
  // Digit at absolute position i (coefficient of p^i). Throws InvalidArgument
  // when i lies beyond the retained precision.
  std::uint32_t digit_at(std::int64_t i) const;

  // |x|_p = p^-valuation; zero maps to the zero value.
  GammaValue norm() const;

  PAdic operator-() const;
  friend PAdic operator+(const PAdic& a, const PAdic& b);
  friend PAdic operator-(const PAdic& a, const PAdic& b);
  friend PAdic operator*(const PAdic& a, const PAdic& b);
  friend bool operator==(const PAdic&, const PAdic&) = default;

  // "p:<prime> v:<valuation> d:<digit,digit,...>"; zero prints "p:<prime> v:0 d:".
  std::string to_string() const;
  static PAdic parse(std::string_view text);

private:
  PAdic(std::uint32_t prime, std::int64_t valuation, std::vector<std::uint32_t> digits);

  std::uint32_t prime_ = 2;
  std::int64_t valuation_ = 0;
  std::vector<std::uint32_t> digits_;
};

GammaValue padic_norm(const PAdic& a);
PAdic padic_add(const PAdic& a, const PAdic& b);

}  // namespace ultranerve
