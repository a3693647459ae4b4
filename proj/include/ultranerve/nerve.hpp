#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ultranerve/gamma.hpp"
#include "ultranerve/ultraspace.hpp"

namespace ultranerve {

/**
 * Partition of a space into the clopen balls of radius p^-level.
 *
 * Blocks hold sorted point indices and are ordered by their smallest member,
 * which doubles as the block's vertex id in every nerve built on the cover.
 */
struct ScaleCover {
  std::int64_t level = 0;
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> block_of;  // point -> block index

  std::size_t representative(std::size_t block) const { return blocks[block].front(); }
  std::vector<std::size_t> representatives() const;
  // Block whose representative is `vertex`; throws UnknownPoint otherwise.
  std::size_t block_with_representative(std::size_t vertex) const;
  GammaValue diameter(const UltraSpace& space, std::size_t block) const;
  GammaValue sup_diameter(const UltraSpace& space) const;
};

ScaleCover scale_cover(const UltraSpace& space, std::int64_t level);

// Levels j_min..j_max inclusive. Throws InvalidArgument if j_min > j_max.
std::vector<ScaleCover> cover_tower(const UltraSpace& space, std::int64_t j_min, std::int64_t j_max);

// True when every block of `fine` lies inside a single block of `coarse`.
bool refines(const ScaleCover& fine, const ScaleCover& coarse);

// min over member pairs.
GammaValue set_distance(const UltraSpace& space, std::span<const std::size_t> a, std::span<const std::size_t> b);

/**
 * Abstract simplicial complex over L whose vertices are the blocks of a cover.
 *
 * Only maximal simplexes are stored; they partition the vertex set, and every
 * nonempty subset of a maximal simplex is a face.
 */
struct NerveComplex {
  std::int64_t level = 0;
  std::vector<std::size_t> vertices;                        // ascending
  std::vector<std::vector<std::size_t>> maximal_simplexes;  // ordered by first vertex
  GammaValue threshold;

  std::int64_t dim_l() const;
  std::size_t simplex_index_of(std::size_t vertex) const;
  bool contains(std::span<const std::size_t> face) const;
  // Every simplex (nonempty face), in a deterministic order. Only sensible for
  // small complexes; throws InvalidArgument when a maximal simplex has more
  // than `max_vertices` vertices.
  std::vector<std::vector<std::size_t>> faces(std::size_t max_vertices = 16) const;
};

// Spans simplexes on blocks at set distance <= p^k * b. `b` defaults to the
// largest block diameter. Throws ThresholdBelowDiameter when p^k * b is
// smaller than some block diameter.
NerveComplex build_nerve(const UltraSpace& space, const ScaleCover& cover, std::int64_t k,
                         std::optional<GammaValue> b = std::nullopt);

struct IsolationEntry {
  std::size_t point = 0;
  std::optional<GammaValue> nearest;  // nullopt for a one-point space
  std::optional<std::size_t> first_isolated_level;  // tower index
};

struct IsolationReport {
  std::vector<IsolationEntry> entries;
  // (point, tower index) where an isolated point's simplex is not {point}.
  std::vector<std::pair<std::size_t, std::size_t>> exceptions;
};

// A point is isolated at tower index m when its nearest neighbour lies beyond
// both the block radius and the nerve threshold of that level; from then on
// its simplex must be the single vertex {point}.
IsolationReport isolated_point_check(const UltraSpace& space, std::span<const ScaleCover> tower,
                                     std::span<const NerveComplex> nerves);

/**
 * Points of a space placed in c0(Q_p) by baire_encode + c0_embed, together
 * with the distance matrix recomputed from those positions.
 */
class Embedding {
public:
  explicit Embedding(const UltraSpace& space, std::size_t precision = kDefaultPrecision);

  std::uint32_t prime() const { return prime_; }
  std::size_t size() const { return positions_.size(); }
  const C0Vector& position(std::size_t i) const { return positions_[i]; }
  GammaValue distance(std::size_t a, std::size_t b) const { return dist_[a * positions_.size() + b]; }

private:
  std::uint32_t prime_;
  std::vector<C0Vector> positions_;
  std::vector<GammaValue> dist_;
};

struct RealizedSimplex {
  std::vector<std::size_t> vertices;
  std::vector<std::size_t> support;  // embedded points inside the ball
  std::size_t center = 0;
  GammaValue radius;
  std::int64_t dim_l = 0;
  std::optional<std::size_t> parent;  // set by subdivide()
};

struct Realization {
  std::shared_ptr<const Embedding> embedding;
  std::vector<std::size_t> vertices;  // vertex id == point whose position realizes it
  std::vector<RealizedSimplex> simplexes;
  GammaValue scale;  // radius bound of the underlying cover

  GammaValue distance(std::size_t a, std::size_t b) const { return embedding->distance(a, b); }
};

// Each maximal simplex becomes the smallest ball around the union of its
// blocks, centred at its smallest point.
Realization realize(const NerveComplex& nerve, const ScaleCover& cover, std::shared_ptr<const Embedding> embedding);

struct UniformityReport {
  GammaValue sup_diam;
  std::optional<GammaValue> inf_dist;  // nullopt: fewer than two simplexes
  bool is_uniform = false;
};

UniformityReport check_uniform(const Realization& realization);

// Replaces each simplex of radius r by the sub-balls of radius r p^-j that
// meet its support. Throws InvalidArgument for j < 1.
Realization subdivide(const Realization& realization, std::int64_t j);

}  // namespace ultranerve
