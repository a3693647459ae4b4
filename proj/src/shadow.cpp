#include "ultranerve/shadow.hpp"

#include <algorithm>
#include <set>

#include "ultranerve/error.hpp"

namespace ultranerve {

Rational theta(const PAdic& x, std::size_t n) {
  if (x.is_zero()) return Rational(0);
  if (x.valuation() < 0) throw InvalidArgument("theta needs |x| <= 1, got " + x.to_string());
  if (static_cast<std::int64_t>(n) > x.known_until()) {
    throw InvalidArgument("theta at " + std::to_string(n) + " digits exceeds the known digits of " + x.to_string());
  }
  // Horner over a_0, a_1, ... keeps everything over the single denominator p^n.
  BigInt numerator = 0;
  for (std::size_t i = 0; i < n; ++i) numerator = numerator * x.prime() + x.digit_at(static_cast<std::int64_t>(i));
  return Rational(numerator, ipow(x.prime(), n));
}

std::vector<PAdic> unit_ball_grid(std::uint32_t p, std::size_t n) {
  if (!is_prime(p)) throw InvalidPrime(std::to_string(p) + " is not prime");
  const BigInt total = ipow(p, n);
  if (n == 0 || total > 1'000'000) throw InvalidArgument("grid of p^n elements needs 1 <= p^n <= 10^6");
  std::vector<PAdic> out;
  for (std::uint64_t k = 0; k < total; ++k) out.push_back(theta_preimage(p, n, k));
  return out;
}

ThetaPairReport theta_nonstretch_check(std::span<const std::pair<PAdic, PAdic>> pairs, std::size_t n) {
  ThetaPairReport report;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    ++report.pairs_checked;
    const Rational gap = abs(theta(x, n) - theta(y, n));
    if (gap > (x - y).norm().to_rational(x.prime())) report.violations.push_back(i);
  }
  return report;
}

std::size_t theta_monotone_violations(std::uint32_t p, std::size_t n) {
  const auto grid = unit_ball_grid(p, n);
  std::size_t violations = 0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (theta(grid[i + 1], n) < theta(grid[i], n)) ++violations;
  }
  return violations;
}

std::vector<BoundaryPair> theta_boundary_pairs(std::uint32_t p, std::size_t n) {
  if (n < 2) throw InvalidArgument("boundary pairs need at least 2 digits");
  std::vector<BoundaryPair> out;
  for (const PAdic& x : unit_ball_grid(p, n)) {
    std::vector<std::uint32_t> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = x.digit_at(static_cast<std::int64_t>(i));
    std::size_t tail = n;
    while (tail > 0 && d[tail - 1] == p - 1) --tail;
    if (tail == n || tail == 0) continue;  // no (p-1) tail, or all (p-1)
    std::vector<std::uint32_t> e = d;
    ++e[tail - 1];
    std::fill(e.begin() + static_cast<std::ptrdiff_t>(tail), e.end(), 0U);
    PAdic y = PAdic::from_digits(p, 0, e);
    out.push_back({x, y, theta(x, n), theta(y, n)});
  }
  return out;
}

PAdic theta_preimage(std::uint32_t p, std::size_t n, std::uint64_t k) {
  if (k >= ipow(p, n)) throw InvalidArgument("theta reaches k p^-n only for k < p^n");
  std::vector<std::uint32_t> digits(n);
  for (std::size_t i = n; i-- > 0;) {
    digits[i] = static_cast<std::uint32_t>(k % p);
    k /= p;
  }
  return PAdic::from_digits(p, 0, digits);
}

ShadowComplex shadow_complex(const NerveComplex& nerve, const Realization* realization) {
  if (realization == nullptr) throw UnrealizedComplex("nerve at level " + std::to_string(nerve.level) + " is not realized");
  if (realization->simplexes.size() != nerve.maximal_simplexes.size() || realization->vertices != nerve.vertices) {
    throw UnrealizedComplex("realization does not match the nerve at level " + std::to_string(nerve.level));
  }
  ShadowComplex out;
  out.level = nerve.level;
  out.vertices = nerve.vertices;
  for (std::size_t i = 0; i < nerve.maximal_simplexes.size(); ++i) {
    const auto& simplex = nerve.maximal_simplexes[i];
    if (realization->simplexes[i].vertices != simplex) {
      throw UnrealizedComplex("realized simplex " + std::to_string(i) + " differs from the nerve");
    }
    RealSimplex cell;
    cell.vertices = simplex;
    cell.base = simplex.front();
    cell.axes.assign(simplex.begin() + 1, simplex.end());
    cell.dim_r = static_cast<std::int64_t>(cell.axes.size());
    out.cells.push_back(std::move(cell));
  }
  return out;
}

ShadowComplex shadow_complex(const Level& level) {
  return shadow_complex(level.nerve, level.realization ? &*level.realization : nullptr);
}

ShadowCheck check_shadow(const NerveComplex& nerve, const ShadowComplex& shadow, std::size_t enumerate_below) {
  ShadowCheck check;
  check.same_vertices = nerve.vertices == shadow.vertices;

  std::set<std::vector<std::size_t>> facets;
  for (const auto& cell : shadow.cells) facets.insert(cell.vertices);
  check.same_faces = facets == std::set<std::vector<std::size_t>>(nerve.maximal_simplexes.begin(),
                                                                   nerve.maximal_simplexes.end());
  const bool small = std::all_of(shadow.cells.begin(), shadow.cells.end(),
                                 [&](const RealSimplex& c) { return c.vertices.size() <= enumerate_below; });
  if (check.same_faces && small) {
    // A face of the shadow is a base vertex plus any subset of the cube axes.
    std::set<std::vector<std::size_t>> shadow_faces;
    for (const auto& cell : shadow.cells) {
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << cell.vertices.size()); ++mask) {
        std::vector<std::size_t> face;
        for (std::size_t i = 0; i < cell.vertices.size(); ++i) {
          if (mask & (std::uint64_t{1} << i)) face.push_back(i == 0 ? cell.base : cell.axes[i - 1]);
        }
        std::sort(face.begin(), face.end());
        shadow_faces.insert(face);
      }
    }
    const auto faces = nerve.faces(enumerate_below);
    check.same_faces = shadow_faces == std::set<std::vector<std::size_t>>(faces.begin(), faces.end());
  }

  for (std::size_t i = 0; i < shadow.cells.size() && i < nerve.maximal_simplexes.size(); ++i) {
    if (shadow.cells[i].dim_r != static_cast<std::int64_t>(nerve.maximal_simplexes[i].size()) - 1) {
      check.dimension_mismatches.push_back(i);
    }
  }
  return check;
}

ShadowBonding shadow_bonding(const BondingMap& map, const ShadowComplex& source, const ShadowComplex& target) {
  std::vector<std::size_t> keys;
  for (const auto& [v, w] : map.vertex_map) keys.push_back(v);
  if (keys != source.vertices) throw MismatchedComplexes("source shadow does not carry the map's vertices");

  std::map<std::size_t, std::size_t> cell_of;
  for (std::size_t c = 0; c < target.cells.size(); ++c) {
    for (std::size_t v : target.cells[c].vertices) cell_of[v] = c;
  }
  ShadowBonding out;
  out.source_level = source.level;
  out.target_level = target.level;
  out.vertex_map = map.vertex_map;
  for (std::size_t c = 0; c < source.cells.size(); ++c) {
    AffineCell cell;
    cell.source_cell = c;
    std::set<std::size_t> hit;
    for (std::size_t v : source.cells[c].vertices) {
      const std::size_t w = map.vertex_map.at(v);
      const auto found = cell_of.find(w);
      if (found == cell_of.end()) throw MismatchedComplexes("vertex " + std::to_string(w) + " is not in the target shadow");
      hit.insert(found->second);
      cell.vertex_images.emplace_back(v, w);
    }
    if (hit.size() != 1) {
      throw MismatchedComplexes("cell " + std::to_string(c) + " is not sent into a single target cell");
    }
    cell.target_cell = *hit.begin();
    out.cells.push_back(std::move(cell));
  }
  return out;
}

ShadowBonding compose(const ShadowBonding& first, const ShadowBonding& second) {
  if (first.target_level != second.source_level) throw MismatchedComplexes("shadow bondings are not composable");
  ShadowBonding out;
  out.source_level = first.source_level;
  out.target_level = second.target_level;
  for (const auto& [v, w] : first.vertex_map) out.vertex_map[v] = second.vertex_map.at(w);
  for (const auto& cell : first.cells) {
    AffineCell chained;
    chained.source_cell = cell.source_cell;
    chained.target_cell = second.cells.at(cell.target_cell).target_cell;
    for (const auto& [v, w] : cell.vertex_images) chained.vertex_images.emplace_back(v, second.vertex_map.at(w));
    out.cells.push_back(std::move(chained));
  }
  return out;
}

}  // namespace ultranerve
