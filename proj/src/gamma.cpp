#include "ultranerve/gamma.hpp"

#include <charconv>

#include "ultranerve/error.hpp"

namespace ultranerve {

std::int64_t GammaValue::exponent() const {
  if (!exponent_) throw InvalidArgument("zero value has no finite exponent");
  return *exponent_;
}

GammaValue GammaValue::scaled(std::int64_t k) const {
  if (is_zero()) return *this;
  return GammaValue(*exponent_ - k);
}

Rational GammaValue::to_rational(std::uint32_t prime) const {
  if (is_zero()) return Rational(0);
  const std::int64_t e = *exponent_;
  if (e >= 0) return Rational(BigInt(1), ipow(prime, static_cast<std::uint64_t>(e)));
  return Rational(ipow(prime, static_cast<std::uint64_t>(-e)));
}

std::string GammaValue::to_string() const {
  return is_zero() ? std::string("INF") : std::to_string(*exponent_);
}

GammaValue GammaValue::parse(std::string_view text) {
  if (text == "INF") return zero();
  std::int64_t e = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), e);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("malformed gamma exponent '" + std::string(text) + "'");
  }
  return from_exponent(e);
}

GammaValue round_to_gamma(const Rational& r, std::uint32_t prime) {
  if (prime < 2) throw InvalidPrime("prime must be >= 2");
  if (r < 0) throw NegativeValue("cannot round a negative distance");
  if (r == 0) return GammaValue::zero();

  // Find k with p^k <= r < p^(k+1); the answer has exponent -k.
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  std::int64_t k = 0;
  if (r >= 1) {
    BigInt q = num / den;  // floor(r) >= 1, and floor(log_p r) == floor(log_p floor(r))
    while (q >= prime) {
      q /= prime;
      ++k;
    }
  } else {
    // r < 1: smallest m >= 1 with p^-m <= r, i.e. den <= num * p^m.
    BigInt scaled = num;
    do {
      scaled *= prime;
      --k;
    } while (scaled < den);
  }
  return GammaValue::power(k);
}

}  // namespace ultranerve
