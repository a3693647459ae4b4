#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ultranerve/nerve.hpp"
#include "ultranerve/padic.hpp"
#include "ultranerve/rational.hpp"
#include "ultranerve/spectrum.hpp"

namespace ultranerve {

// Base-p reading of the first n digits of a unit-ball element:
// sum_{i<n} a_i p^-(i+1). Throws InvalidArgument when |x| > 1 or when the
// digits past the known precision would be needed.
Rational theta(const PAdic& x, std::size_t n);

// Every element of p^n digits 0..p-1 at valuation >= 0, in lexicographic
// order of (a_0, a_1, ...).
std::vector<PAdic> unit_ball_grid(std::uint32_t p, std::size_t n);

struct ThetaPairReport {
  std::size_t pairs_checked = 0;
  std::vector<std::size_t> violations;  // indices into the input
};

// |theta(x) - theta(y)| <= |x - y|_p for every pair.
ThetaPairReport theta_nonstretch_check(std::span<const std::pair<PAdic, PAdic>> pairs, std::size_t n);

// Number of consecutive grid elements whose theta values decrease.
std::size_t theta_monotone_violations(std::uint32_t p, std::size_t n);

struct BoundaryPair {
  PAdic x;  // (..., a, p-1, ..., p-1)
  PAdic y;  // (..., a+1, 0, ..., 0)
  Rational theta_x;
  Rational theta_y;
};

// Pairs of n-digit streams glued by theta in the limit. There are
// p^(n-1) - 1 of them, each with theta gap p^-n. Throws for n < 2.
std::vector<BoundaryPair> theta_boundary_pairs(std::uint32_t p, std::size_t n);

// n-digit element with theta = k p^-n for 0 <= k < p^n.
PAdic theta_preimage(std::uint32_t p, std::size_t n, std::uint64_t k);

// Cube {0 <= e^a(y) <= 1 : a in axes} spanned at the base vertex.
struct RealSimplex {
  std::vector<std::size_t> vertices;
  std::size_t base = 0;
  std::vector<std::size_t> axes;  // vertices other than the base
  std::int64_t dim_r = 0;
};

struct ShadowComplex {
  std::int64_t level = 0;
  std::vector<std::size_t> vertices;
  std::vector<RealSimplex> cells;  // cells[i] mirrors maximal simplex i
};

// Throws UnrealizedComplex when `realization` is missing or does not match
// the nerve.
ShadowComplex shadow_complex(const NerveComplex& nerve, const Realization* realization);
ShadowComplex shadow_complex(const Level& level);

struct ShadowCheck {
  bool same_vertices = false;
  bool same_faces = false;
  std::vector<std::size_t> dimension_mismatches;  // cell indices with dimR != dimL
  bool ok() const { return same_vertices && same_faces && dimension_mismatches.empty(); }
};

// Compares facets, and every face when all cells have at most
// `enumerate_below` vertices.
ShadowCheck check_shadow(const NerveComplex& nerve, const ShadowComplex& shadow, std::size_t enumerate_below = 12);

// Vertex map of a bonding map carried to the shadows. Each source cell is
// sent affinely onto the face of its target cell spanned by the image vertices.
struct AffineCell {
  std::size_t source_cell = 0;
  std::size_t target_cell = 0;
  std::vector<std::pair<std::size_t, std::size_t>> vertex_images;

  friend bool operator==(const AffineCell&, const AffineCell&) = default;
};

struct ShadowBonding {
  std::int64_t source_level = 0;
  std::int64_t target_level = 0;
  std::map<std::size_t, std::size_t> vertex_map;
  std::vector<AffineCell> cells;

  friend bool operator==(const ShadowBonding&, const ShadowBonding&) = default;
};

// Throws MismatchedComplexes when the shadows are not the map's ends.
ShadowBonding shadow_bonding(const BondingMap& map, const ShadowComplex& source, const ShadowComplex& target);

// first then second, chaining cells and vertex images.
ShadowBonding compose(const ShadowBonding& first, const ShadowBonding& second);

}  // namespace ultranerve
