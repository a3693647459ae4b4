// Test-only generators and independent oracles. Nothing here calls into the
// code paths it is used to check.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ultranerve/gamma.hpp"
#include "ultranerve/padic.hpp"
#include "ultranerve/rational.hpp"
#include "ultranerve/ultraspace.hpp"

namespace ultranerve::testing {

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline std::vector<std::string> numbered_labels(std::size_t n, const std::string& prefix = "x") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Random hierarchical ultrametric: points are split recursively into 2..5
// groups; points in different groups sit at p^-e for the split's exponent e,
// and exponents strictly increase going down the hierarchy.
inline UltraSpace random_dendrogram_space(std::mt19937_64& rng, std::uint32_t p, std::size_t n) {
  std::vector<GammaValue> dist(n * n, GammaValue::zero());
  std::function<void(std::vector<std::size_t>, std::int64_t)> split = [&](std::vector<std::size_t> pts,
                                                                           std::int64_t floor) {
    if (pts.size() < 2) return;
    const std::int64_t e = floor + uniform_int(rng, 1, 3);
    const auto groups = static_cast<std::size_t>(uniform_int(rng, 2, std::min<std::int64_t>(5, pts.size())));
    std::shuffle(pts.begin(), pts.end(), rng);
    std::vector<std::size_t> cuts;
    while (cuts.size() + 1 < groups) {
      auto c = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(pts.size()) - 1));
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(pts.size());
    std::vector<std::vector<std::size_t>> parts;
    std::size_t start = 0;
    for (std::size_t c : cuts) {
      parts.emplace_back(pts.begin() + static_cast<std::ptrdiff_t>(start), pts.begin() + static_cast<std::ptrdiff_t>(c));
      start = c;
    }
    for (std::size_t a = 0; a < parts.size(); ++a) {
      for (std::size_t b = a + 1; b < parts.size(); ++b) {
        for (std::size_t x : parts[a]) {
          for (std::size_t y : parts[b]) dist[x * n + y] = dist[y * n + x] = GammaValue::from_exponent(e);
        }
      }
    }
    for (auto& part : parts) split(part, e);
  };
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  split(all, uniform_int(rng, -3, 1));
  return UltraSpace(numbered_labels(n), p, std::move(dist));
}

// n distinct residues below p^digits under the p-adic metric.
inline UltraSpace random_padic_space(std::mt19937_64& rng, std::uint32_t p, std::size_t n, std::size_t digits = 6) {
  std::int64_t bound = 1;
  for (std::size_t i = 0; i < digits; ++i) bound *= p;
  std::set<std::int64_t> chosen;
  while (chosen.size() < n) chosen.insert(uniform_int(rng, 0, bound - 1));
  std::vector<std::string> labels;
  std::vector<PAdic> points;
  for (std::int64_t v : chosen) {
    labels.push_back(std::to_string(v));
    points.push_back(PAdic::from_integer(p, v, kDefaultPrecision));
  }
  return space_from_padics(std::move(labels), points);
}

// The same space corpus the acceptance suite runs over.
inline std::vector<UltraSpace> corpus(std::uint64_t seed, std::size_t count, std::size_t max_points = 64) {
  std::mt19937_64 rng(seed);
  const std::uint32_t primes[] = {2, 3, 5};
  std::vector<UltraSpace> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t p = primes[i % 3];
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(max_points)));
    if (i % 4 == 3 && n <= 200) {
      out.push_back(random_padic_space(rng, p, n));
    } else {
      out.push_back(random_dendrogram_space(rng, p, n));
    }
  }
  return out;
}

// ---- oracles -------------------------------------------------------------

// Number of factors of p in a nonzero integer, by trial division.
inline std::int64_t trial_valuation(BigInt value, std::uint32_t p) {
  if (value < 0) value = -value;
  std::int64_t v = 0;
  while (value % p == 0) {
    value /= p;
    ++v;
  }
  return v;
}

// Largest p^k <= r by scanning k over a wide window (r > 0).
inline std::int64_t enumerate_floor_log(const Rational& r, std::uint32_t p) {
  std::int64_t best = -1000;
  for (std::int64_t k = -300; k <= 300; ++k) {
    const Rational pk = k >= 0 ? Rational(ipow(p, static_cast<std::uint64_t>(k)))
                               : Rational(BigInt(1), ipow(p, static_cast<std::uint64_t>(-k)));
    if (pk <= r) best = k;
  }
  return best;
}

// Digits of a + b over the window [lo, hi) computed through big-integer
// arithmetic on the windowed values rather than digit-wise carrying.
inline std::vector<std::uint32_t> bigint_window_sum(std::uint32_t p, std::int64_t va, const std::vector<std::uint32_t>& da,
                                                    std::int64_t vb, const std::vector<std::uint32_t>& db,
                                                    std::int64_t lo, std::int64_t hi) {
  auto value = [&](std::int64_t v, const std::vector<std::uint32_t>& d) {
    BigInt acc = 0;
    for (std::size_t i = d.size(); i-- > 0;) {
      const std::int64_t pos = v + static_cast<std::int64_t>(i);
      if (pos >= hi) continue;
      acc += BigInt(d[i]) * ipow(p, static_cast<std::uint64_t>(pos - lo));
    }
    return acc;
  };
  BigInt s = (value(va, da) + value(vb, db)) % ipow(p, static_cast<std::uint64_t>(hi - lo));
  std::vector<std::uint32_t> out;
  for (std::int64_t i = lo; i < hi; ++i) {
    out.push_back(static_cast<std::uint32_t>(s % p));
    s /= p;
  }
  return out;
}

// Minimax path distance by enumerating every simple path (small n only).
inline RationalMatrix brute_minimax(const RationalMatrix& m) {
  const std::size_t n = m.size();
  RationalMatrix out = m;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::function<void(std::size_t, Rational)> walk = [&](std::size_t at, Rational worst) {
      if (at != s && worst < out[s][at]) out[s][at] = worst;
      seen[at] = true;
      for (std::size_t nx = 0; nx < n; ++nx) {
        if (!seen[nx]) walk(nx, std::max(worst, m[at][nx]));
      }
      seen[at] = false;
    };
    walk(s, Rational(0));
  }
  return out;
}

// Connected components of the graph {rho <= p^-j} by breadth-first search.
inline std::set<std::set<std::size_t>> threshold_components(const UltraSpace& space, std::int64_t j) {
  const std::size_t n = space.size();
  std::vector<bool> seen(n, false);
  std::set<std::set<std::size_t>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::set<std::size_t> comp;
    std::vector<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const std::size_t x = queue.back();
      queue.pop_back();
      comp.insert(x);
      for (std::size_t y = 0; y < n; ++y) {
        const auto e = space.dist(x, y).maybe_exponent();
        const bool close = !e || *e >= j;
        if (!seen[y] && close) {
          seen[y] = true;
          queue.push_back(y);
        }
      }
    }
    out.insert(comp);
  }
  return out;
}

inline std::set<std::set<std::size_t>> as_set_family(const std::vector<std::vector<std::size_t>>& blocks) {
  std::set<std::set<std::size_t>> out;
  for (const auto& b : blocks) out.insert(std::set<std::size_t>(b.begin(), b.end()));
  return out;
}

// Exact sum of digits[i] * p^-(i+1) accumulated term by term.
inline Rational digit_series(std::uint32_t p, const std::vector<std::uint32_t>& digits) {
  Rational acc = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    acc += Rational(BigInt(digits[i]), ipow(p, i + 1));
  }
  return acc;
}

}  // namespace ultranerve::testing
