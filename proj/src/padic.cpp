#include "ultranerve/padic.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ultranerve/error.hpp"

namespace ultranerve {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

namespace {

void require_prime(std::uint32_t p) {
  if (!is_prime(p)) throw InvalidPrime(std::to_string(p) + " is not prime");
}

void require_same_prime(const PAdic& a, const PAdic& b) {
  if (a.prime() != b.prime()) {
    throw PrimeMismatch("p-adic operands over different primes: " + std::to_string(a.prime()) +
                        " and " + std::to_string(b.prime()));
  }
}

}  // namespace

PAdic::PAdic(std::uint32_t prime, std::int64_t valuation, std::vector<std::uint32_t> digits)
    : prime_(prime), valuation_(valuation), digits_(std::move(digits)) {
  auto first = std::find_if(digits_.begin(), digits_.end(), [](std::uint32_t d) { return d != 0; });
  valuation_ += first - digits_.begin();
  digits_.erase(digits_.begin(), first);
  if (digits_.empty()) valuation_ = 0;
}

PAdic PAdic::zero(std::uint32_t prime) {
  require_prime(prime);
  return PAdic(prime, 0, {});
}

PAdic PAdic::from_digits(std::uint32_t prime, std::int64_t valuation,
                         std::span<const std::uint32_t> digits) {
  require_prime(prime);
  for (std::uint32_t d : digits) {
    if (d >= prime) {
      throw InvalidArgument("digit " + std::to_string(d) + " out of range for p=" + std::to_string(prime));
    }
  }
  return PAdic(prime, valuation, std::vector<std::uint32_t>(digits.begin(), digits.end()));
}

PAdic PAdic::from_integer(std::uint32_t prime, std::int64_t value, std::size_t precision) {
  require_prime(prime);
  if (precision == 0) throw InvalidArgument("precision must be positive");
  if (value == 0) return PAdic(prime, 0, {});

  BigInt unit = value;
  std::int64_t valuation = 0;
  while (unit % prime == 0) {
    unit /= prime;
    ++valuation;
  }
  const BigInt modulus = ipow(prime, precision);
  BigInt residue = unit % modulus;
  if (residue < 0) residue += modulus;

  std::vector<std::uint32_t> digits(precision);
  for (auto& d : digits) {
    d = static_cast<std::uint32_t>(residue % prime);
    residue /= prime;
  }
  return PAdic(prime, valuation, std::move(digits));
}

PAdic PAdic::power_of_prime(std::uint32_t prime, std::int64_t k, std::size_t precision) {
  require_prime(prime);
  if (precision == 0) throw InvalidArgument("precision must be positive");
  std::vector<std::uint32_t> digits(precision, 0);
  digits[0] = 1;
  return PAdic(prime, k, std::move(digits));
}

std::int64_t PAdic::known_until() const {
  if (is_zero()) return std::numeric_limits<std::int64_t>::max();
  return valuation_ + static_cast<std::int64_t>(digits_.size());
}

std::uint32_t PAdic::digit_at(std::int64_t i) const {
  if (is_zero() || i < valuation_) return 0;
  if (i >= known_until()) {
    throw InvalidArgument("digit position " + std::to_string(i) + " beyond precision");
  }
  return digits_[static_cast<std::size_t>(i - valuation_)];
}

GammaValue PAdic::norm() const {
  return is_zero() ? GammaValue::zero() : GammaValue::from_exponent(valuation_);
}

PAdic PAdic::operator-() const {
  if (is_zero()) return *this;
  std::vector<std::uint32_t> out(digits_.size());
  out[0] = prime_ - digits_[0];
  for (std::size_t i = 1; i < digits_.size(); ++i) out[i] = prime_ - 1 - digits_[i];
  return PAdic(prime_, valuation_, std::move(out));
}

PAdic operator+(const PAdic& a, const PAdic& b) {
  require_same_prime(a, b);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;

  const std::int64_t lo = std::min(a.valuation_, b.valuation_);
  const std::int64_t hi = std::min(a.known_until(), b.known_until());
  std::vector<std::uint32_t> out(static_cast<std::size_t>(hi - lo));
  std::uint32_t carry = 0;
  for (std::int64_t i = lo; i < hi; ++i) {
    std::uint32_t s = a.digit_at(i) + b.digit_at(i) + carry;
    carry = s >= a.prime_ ? 1 : 0;
    out[static_cast<std::size_t>(i - lo)] = s - carry * a.prime_;
  }
  return PAdic(a.prime_, lo, std::move(out));
}

PAdic operator-(const PAdic& a, const PAdic& b) { return a + (-b); }

PAdic operator*(const PAdic& a, const PAdic& b) {
  require_same_prime(a, b);
  if (a.is_zero() || b.is_zero()) return PAdic(a.prime_, 0, {});

  const std::size_t n = std::min(a.digits_.size(), b.digits_.size());
  std::vector<std::uint64_t> acc(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; i + j < n; ++j) {
      acc[i + j] += static_cast<std::uint64_t>(a.digits_[i]) * b.digits_[j];
    }
  }
  std::vector<std::uint32_t> out(n);
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t s = acc[i] + carry;
    out[i] = static_cast<std::uint32_t>(s % a.prime_);
    carry = s / a.prime_;
  }
  // Units multiply to a unit, so the leading digit stays nonzero.
  return PAdic(a.prime_, a.valuation_ + b.valuation_, std::move(out));
}

std::string PAdic::to_string() const {
  std::ostringstream os;
  os << "p:" << prime_ << " v:" << valuation_ << " d:";
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (i) os << ',';
    os << digits_[i];
  }
  return os.str();
}

PAdic PAdic::parse(std::string_view text) {
  auto fail = [&] { return ParseError("malformed p-adic '" + std::string(text) + "'"); };
  auto read_int = [&](std::string_view s, auto& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw fail();
  };

  std::istringstream in{std::string(text)};
  std::string pf, vf, df;
  in >> pf >> vf;
  std::getline(in, df);
  while (!df.empty() && df.front() == ' ') df.erase(df.begin());
  if (pf.rfind("p:", 0) != 0 || vf.rfind("v:", 0) != 0 || df.rfind("d:", 0) != 0) throw fail();

  std::uint32_t prime = 0;
  std::int64_t valuation = 0;
  read_int(std::string_view(pf).substr(2), prime);
  read_int(std::string_view(vf).substr(2), valuation);

  std::vector<std::uint32_t> digits;
  std::string_view rest = std::string_view(df).substr(2);
  while (!rest.empty()) {
    auto comma = rest.find(',');
    std::uint32_t d = 0;
    read_int(rest.substr(0, comma), d);
    digits.push_back(d);
    rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
  }
  return from_digits(prime, valuation, digits);
}

GammaValue padic_norm(const PAdic& a) { return a.norm(); }

PAdic padic_add(const PAdic& a, const PAdic& b) { return a + b; }

}  // namespace ultranerve
