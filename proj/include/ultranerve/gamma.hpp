#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ultranerve/rational.hpp"

namespace ultranerve {

/**
 * An element of the closed value group {p^-e : e in Z} ∪ {0}.
 *
 * Only the exponent is stored; the metric value is p^-e, so a larger exponent
 * is a smaller value. The distinguished infinite exponent encodes the value 0.
 * Comparison operators order by the encoded real value, never by exponent.
 * The prime is not part of the value; callers keep it alongside.
 */
class GammaValue {
public:
  constexpr GammaValue() = default;  // zero

  static constexpr GammaValue zero() { return GammaValue(); }
  static constexpr GammaValue from_exponent(std::int64_t e) { return GammaValue(e); }
  // p^k, the value with exponent -k.
  static constexpr GammaValue power(std::int64_t k) { return GammaValue(-k); }

  constexpr bool is_zero() const { return !exponent_.has_value(); }
  // Throws InvalidArgument for the zero value.
  std::int64_t exponent() const;
  constexpr std::optional<std::int64_t> maybe_exponent() const { return exponent_; }

  // Multiplication by p^k.
  GammaValue scaled(std::int64_t k) const;

  Rational to_rational(std::uint32_t prime) const;

  // Integer exponent, or "INF" for the zero value.
  std::string to_string() const;
  static GammaValue parse(std::string_view text);

  friend constexpr bool operator==(const GammaValue&, const GammaValue&) = default;
  friend constexpr std::strong_ordering operator<=>(const GammaValue& a, const GammaValue& b) {
    if (a.is_zero() || b.is_zero()) {
      return b.is_zero() <=> a.is_zero();
    }
    return *b.exponent_ <=> *a.exponent_;
  }

private:
  constexpr explicit GammaValue(std::int64_t e) : exponent_(e) {}

  std::optional<std::int64_t> exponent_;
};

constexpr GammaValue max(GammaValue a, GammaValue b) { return a < b ? b : a; }
constexpr GammaValue min(GammaValue a, GammaValue b) { return a < b ? a : b; }

// Largest element of the value group that does not exceed r. Exact.
GammaValue round_to_gamma(const Rational& r, std::uint32_t prime);

}  // namespace ultranerve
