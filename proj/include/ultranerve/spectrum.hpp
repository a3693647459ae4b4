#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ultranerve/gamma.hpp"
#include "ultranerve/nerve.hpp"
#include "ultranerve/ultraspace.hpp"

namespace ultranerve {

/**
 * Scales of an expansion. Level m uses the cover at radius p^-j(m) and the
 * nerve threshold p^k(m) * b_m, where b_m = p^-j(m) unless `b` overrides it.
 *
 * Empty `j` means automatic: consecutive levels from min(0, e_min) on until
 * the finest level separates. `k` empty means 0 everywhere, a single entry is
 * a constant, anything longer is one value per level.
 */
struct Schedule {
  std::vector<std::int64_t> j;
  std::vector<std::int64_t> k;
  std::optional<GammaValue> b;
};

// Schedule with every level spelled out.
struct ResolvedSchedule {
  std::vector<std::int64_t> j;
  std::vector<std::int64_t> k;
  std::optional<GammaValue> b;
  std::vector<GammaValue> thresholds;
};

struct Level {
  std::int64_t j = 0;
  std::int64_t k = 0;
  ScaleCover cover;
  NerveComplex nerve;
  std::optional<Realization> realization;
};

// Vertex map from level `source` onto the coarser level `target`.
struct BondingMap {
  std::size_t source = 0;
  std::size_t target = 0;
  std::map<std::size_t, std::size_t> vertex_map;
  // Source simplexes (by index) whose image is not inside one target simplex.
  std::vector<std::size_t> containment_violations;

  bool contains_simplexes() const { return containment_violations.empty(); }
  std::vector<std::size_t> image(const std::vector<std::size_t>& simplex) const;
  bool is_identity() const;
  friend bool operator==(const BondingMap& a, const BondingMap& b) {
    return a.source == b.source && a.target == b.target && a.vertex_map == b.vertex_map;
  }
};

// Throws NonNestedCovers when `fine` does not refine `coarse`.
BondingMap bonding_map(const Level& fine, const Level& coarse, std::size_t source, std::size_t target);

// first then second: source of `first` -> target of `second`.
BondingMap compose(const BondingMap& first, const BondingMap& second);

struct Expansion {
  std::shared_ptr<const UltraSpace> space;
  ResolvedSchedule schedule;
  std::vector<Level> levels;                // coarse to fine
  std::vector<BondingMap> bonding;          // bonding[m]: level m+1 -> level m
  std::shared_ptr<const Embedding> embedding;

  // Composite of consecutive bonding maps from level `from` down to `to`.
  BondingMap composite(std::size_t from, std::size_t to) const;
  // Bonding map built directly between two levels.
  BondingMap direct(std::size_t from, std::size_t to) const;
};

// Throws ScheduleError on a nonmonotone schedule, an inadmissible threshold
// or a finest level that does not separate the points.
Expansion assemble_expansion(const UltraSpace& space, const Schedule& schedule = {},
                             std::size_t precision = kDefaultPrecision);

struct FunctorialityReport {
  std::size_t triples_checked = 0;
  // (l, m', m) with f^m_l != f^m'_l o f^m_m'.
  std::vector<std::array<std::size_t, 3>> failures;
};

FunctorialityReport verify_functoriality(const Expansion& expansion);

struct NonstretchingReport {
  std::size_t pairs_checked = 0;
  std::vector<std::pair<std::size_t, std::size_t>> violations;  // source vertex pairs
  std::size_t collapsed = 0;                                    // pairs sent to one vertex
  // Smallest e with normalized image distance <= p^-e * normalized source
  // distance over pairs with distinct images; nullopt when all collapse.
  std::optional<std::int64_t> min_factor_exponent;

  bool factor_p() const { return !min_factor_exponent || *min_factor_exponent >= 1; }
};

// Distances are read from the realizations; normalization divides each side
// by its level's scale.
NonstretchingReport verify_nonstretching(const BondingMap& map, const Realization& source, const Realization& target);

struct NondegeneracyReport {
  std::vector<std::size_t> flagged;  // source simplexes of >= 2 vertices sent to a vertex
  std::size_t merged_vertices = 0;   // target vertices with >= 2 preimages
};

NondegeneracyReport verify_nondegenerate(const BondingMap& map, const NerveComplex& source);

struct Thread {
  std::size_t point = 0;
  std::vector<std::size_t> simplexes;  // index into levels[m].nerve.maximal_simplexes
};

// Throws UnknownPoint.
Thread thread(const Expansion& expansion, std::size_t point);
Thread thread(const Expansion& expansion, const std::string& label);

bool is_coherent(const Expansion& expansion, const Thread& t);

// Points whose simplex at every level matches the thread. Throws
// IncoherentThread for threads the bonding maps do not link.
std::vector<std::size_t> reconstruct(const Expansion& expansion, const Thread& t);

// First `count` levels of an expansion.
Expansion truncate(const Expansion& expansion, std::size_t count);

struct IsometryMismatch {
  std::size_t a = 0, b = 0;
  std::optional<GammaValue> recovered;  // nullopt: separated at the first level
  GammaValue actual;
};

struct LimitIsometryReport {
  std::size_t pairs_checked = 0;
  std::vector<IsometryMismatch> mismatches;
  // Recovered scales are exact when this is 0; otherwise the true distance
  // lies within a factor p^bound_exponent below the recovered one.
  std::int64_t bound_exponent = 0;
};

// Reads each distance off the first level where the two threads part.
LimitIsometryReport limit_isometry_check(const Expansion& expansion);

struct GroupExpansionReport {
  Expansion expansion;
  std::vector<std::int64_t> residues;  // point index -> residue
  std::vector<std::size_t> level_sizes;
  bool sizes_match = false;            // level i has as many vertices as residues mod p^i
  bool bonding_is_reduction = false;
  bool translation_invariant = false;
};

// Residues 0..p^m-1 (or `subset`) of Z/p^m under |x - y|_p, expanded with
// the default schedule. Throws InvalidPrime or InvalidArgument.
GroupExpansionReport group_expansion(std::uint32_t p, std::int64_t m,
                                     const std::optional<std::vector<std::int64_t>>& subset = std::nullopt);

}  // namespace ultranerve
