#include "ultranerve/nerve.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ultranerve/error.hpp"

namespace ultranerve {

namespace {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  // Classes as sorted index lists, ordered by smallest member.
  std::vector<std::vector<std::size_t>> classes() {
    std::map<std::size_t, std::vector<std::size_t>> by_root;
    for (std::size_t i = 0; i < parent_.size(); ++i) by_root[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : by_root) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  std::vector<std::size_t> parent_;
};

GammaValue support_diameter(const Embedding& e, std::span<const std::size_t> support) {
  GammaValue diam = GammaValue::zero();
  for (std::size_t a = 0; a < support.size(); ++a) {
    for (std::size_t b = a + 1; b < support.size(); ++b) diam = max(diam, e.distance(support[a], support[b]));
  }
  return diam;
}

}  // namespace

std::vector<std::size_t> ScaleCover::representatives() const {
  std::vector<std::size_t> reps;
  reps.reserve(blocks.size());
  for (const auto& b : blocks) reps.push_back(b.front());
  return reps;
}

std::size_t ScaleCover::block_with_representative(std::size_t vertex) const {
  if (vertex >= block_of.size() || representative(block_of[vertex]) != vertex) {
    throw UnknownPoint("no block of level " + std::to_string(level) + " is represented by point " +
                       std::to_string(vertex));
  }
  return block_of[vertex];
}

GammaValue ScaleCover::diameter(const UltraSpace& space, std::size_t block) const {
  const auto& members = blocks[block];
  GammaValue diam = GammaValue::zero();
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = a + 1; b < members.size(); ++b) diam = max(diam, space.dist(members[a], members[b]));
  }
  return diam;
}

GammaValue ScaleCover::sup_diameter(const UltraSpace& space) const {
  GammaValue sup = GammaValue::zero();
  for (std::size_t b = 0; b < blocks.size(); ++b) sup = max(sup, diameter(space, b));
  return sup;
}

ScaleCover scale_cover(const UltraSpace& space, std::int64_t level) {
  const GammaValue radius = GammaValue::from_exponent(level);
  DisjointSets sets(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      if (space.dist(i, j) <= radius) sets.unite(i, j);
    }
  }
  ScaleCover cover;
  cover.level = level;
  cover.blocks = sets.classes();
  cover.block_of.resize(space.size());
  for (std::size_t b = 0; b < cover.blocks.size(); ++b) {
    for (std::size_t x : cover.blocks[b]) cover.block_of[x] = b;
  }
  return cover;
}

std::vector<ScaleCover> cover_tower(const UltraSpace& space, std::int64_t j_min, std::int64_t j_max) {
  if (j_min > j_max) throw InvalidArgument("cover tower needs j_min <= j_max");
  std::vector<ScaleCover> tower;
  for (std::int64_t j = j_min; j <= j_max; ++j) tower.push_back(scale_cover(space, j));
  return tower;
}

bool refines(const ScaleCover& fine, const ScaleCover& coarse) {
  if (fine.block_of.size() != coarse.block_of.size()) return false;
  for (const auto& block : fine.blocks) {
    const std::size_t target = coarse.block_of[block.front()];
    for (std::size_t x : block) {
      if (coarse.block_of[x] != target) return false;
    }
  }
  return true;
}

GammaValue set_distance(const UltraSpace& space, std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::optional<GammaValue> best;
  for (std::size_t x : a) {
    for (std::size_t y : b) {
      const GammaValue d = space.dist(x, y);
      if (!best || d < *best) best = d;
    }
  }
  if (!best) throw InvalidArgument("set distance of an empty set");
  return *best;
}

std::int64_t NerveComplex::dim_l() const {
  std::size_t widest = 0;
  for (const auto& s : maximal_simplexes) widest = std::max(widest, s.size());
  return static_cast<std::int64_t>(widest) - 1;
}

std::size_t NerveComplex::simplex_index_of(std::size_t vertex) const {
  for (std::size_t i = 0; i < maximal_simplexes.size(); ++i) {
    if (std::binary_search(maximal_simplexes[i].begin(), maximal_simplexes[i].end(), vertex)) return i;
  }
  throw UnknownPoint("vertex " + std::to_string(vertex) + " not in nerve at level " + std::to_string(level));
}

bool NerveComplex::contains(std::span<const std::size_t> face) const {
  if (face.empty()) return false;
  for (const auto& s : maximal_simplexes) {
    if (std::all_of(face.begin(), face.end(),
                    [&](std::size_t v) { return std::binary_search(s.begin(), s.end(), v); })) {
      return true;
    }
  }
  return false;
}

std::vector<std::vector<std::size_t>> NerveComplex::faces(std::size_t max_vertices) const {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& s : maximal_simplexes) {
    if (s.size() > max_vertices) {
      throw InvalidArgument("simplex with " + std::to_string(s.size()) + " vertices is too large to enumerate");
    }
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << s.size()); ++mask) {
      std::vector<std::size_t> face;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (mask & (std::uint64_t{1} << i)) face.push_back(s[i]);
      }
      out.push_back(std::move(face));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

NerveComplex build_nerve(const UltraSpace& space, const ScaleCover& cover, std::int64_t k, std::optional<GammaValue> b) {
  const GammaValue sup_diam = cover.sup_diameter(space);
  const GammaValue threshold = b.value_or(sup_diam).scaled(k);
  if (threshold < sup_diam) {
    throw ThresholdBelowDiameter("threshold p^" + std::to_string(k) + "*b = " + threshold.to_string() +
                                 " is below block diameter " + sup_diam.to_string() + " at level " +
                                 std::to_string(cover.level));
  }

  const std::size_t nb = cover.blocks.size();
  std::vector<GammaValue> block_dist(nb * nb);
  DisjointSets sets(nb);
  for (std::size_t a = 0; a < nb; ++a) {
    for (std::size_t c = a + 1; c < nb; ++c) {
      const GammaValue d = set_distance(space, cover.blocks[a], cover.blocks[c]);
      block_dist[a * nb + c] = block_dist[c * nb + a] = d;
      if (d <= threshold) sets.unite(a, c);
    }
  }

  NerveComplex nerve;
  nerve.level = cover.level;
  nerve.threshold = threshold;
  nerve.vertices = cover.representatives();
  for (const auto& cls : sets.classes()) {
    // Proximity is transitive once the threshold covers the block diameters,
    // so every class is a clique.
    for (std::size_t a = 0; a < cls.size(); ++a) {
      for (std::size_t c = a + 1; c < cls.size(); ++c) {
        if (block_dist[cls[a] * nb + cls[c]] > threshold) {
          throw Error("proximity classes are not cliques at level " + std::to_string(cover.level));
        }
      }
    }
    std::vector<std::size_t> simplex;
    for (std::size_t block : cls) simplex.push_back(cover.representative(block));
    nerve.maximal_simplexes.push_back(std::move(simplex));
  }
  return nerve;
}

IsolationReport isolated_point_check(const UltraSpace& space, std::span<const ScaleCover> tower,
                                     std::span<const NerveComplex> nerves) {
  if (tower.size() != nerves.size()) throw InvalidArgument("tower and nerve sequence differ in length");
  IsolationReport report;
  for (std::size_t x = 0; x < space.size(); ++x) {
    IsolationEntry entry;
    entry.point = x;
    if (space.size() > 1) entry.nearest = space.nearest(x);
    for (std::size_t m = 0; m < tower.size(); ++m) {
      const GammaValue bound = max(GammaValue::from_exponent(tower[m].level), nerves[m].threshold);
      if (!entry.nearest || bound < *entry.nearest) {
        entry.first_isolated_level = m;
        break;
      }
    }
    if (entry.first_isolated_level) {
      for (std::size_t m = *entry.first_isolated_level; m < tower.size(); ++m) {
        const auto& block = tower[m].blocks[tower[m].block_of[x]];
        const auto& simplex = nerves[m].maximal_simplexes[nerves[m].simplex_index_of(block.front())];
        if (block.size() != 1 || simplex.size() != 1) report.exceptions.emplace_back(x, m);
      }
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

Embedding::Embedding(const UltraSpace& space, std::size_t precision) : prime_(space.prime()) {
  positions_ = c0_embed(baire_encode(space), prime_, precision);
  const std::size_t n = positions_.size();
  dist_.assign(n * n, GammaValue::zero());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) dist_[a * n + b] = dist_[b * n + a] = c0_distance(positions_[a], positions_[b]);
  }
}

Realization realize(const NerveComplex& nerve, const ScaleCover& cover, std::shared_ptr<const Embedding> embedding) {
  if (!embedding || embedding->size() != cover.block_of.size()) {
    throw UnrealizedComplex("embedding does not match the cover's point set");
  }
  Realization r;
  r.embedding = std::move(embedding);
  r.vertices = nerve.vertices;
  r.scale = GammaValue::from_exponent(cover.level);
  for (const auto& simplex : nerve.maximal_simplexes) {
    RealizedSimplex rs;
    rs.vertices = simplex;
    for (std::size_t v : simplex) {
      const auto& block = cover.blocks[cover.block_with_representative(v)];
      rs.support.insert(rs.support.end(), block.begin(), block.end());
    }
    std::sort(rs.support.begin(), rs.support.end());
    rs.center = rs.support.front();
    rs.radius = support_diameter(*r.embedding, rs.support);
    rs.dim_l = static_cast<std::int64_t>(simplex.size()) - 1;
    r.simplexes.push_back(std::move(rs));
  }
  return r;
}

UniformityReport check_uniform(const Realization& realization) {
  if (realization.simplexes.empty()) throw EmptyComplex("uniformity check on an empty complex");
  UniformityReport report;
  report.sup_diam = GammaValue::zero();
  for (const auto& s : realization.simplexes) report.sup_diam = max(report.sup_diam, s.radius);
  for (std::size_t a = 0; a < realization.simplexes.size(); ++a) {
    for (std::size_t b = a + 1; b < realization.simplexes.size(); ++b) {
      for (std::size_t x : realization.simplexes[a].support) {
        for (std::size_t y : realization.simplexes[b].support) {
          const GammaValue d = realization.distance(x, y);
          if (!report.inf_dist || d < *report.inf_dist) report.inf_dist = d;
        }
      }
    }
  }
  report.is_uniform = !report.inf_dist || !report.inf_dist->is_zero();
  return report;
}

Realization subdivide(const Realization& realization, std::int64_t j) {
  if (j < 1) throw InvalidArgument("subdivision order must be at least 1");
  Realization out;
  out.embedding = realization.embedding;
  out.vertices = realization.vertices;
  out.scale = realization.scale.scaled(-j);
  for (std::size_t idx = 0; idx < realization.simplexes.size(); ++idx) {
    const auto& parent = realization.simplexes[idx];
    const GammaValue sub_radius = parent.radius.scaled(-j);
    DisjointSets sets(parent.support.size());
    for (std::size_t a = 0; a < parent.support.size(); ++a) {
      for (std::size_t b = a + 1; b < parent.support.size(); ++b) {
        if (realization.distance(parent.support[a], parent.support[b]) <= sub_radius) sets.unite(a, b);
      }
    }
    for (const auto& cls : sets.classes()) {
      RealizedSimplex rs;
      for (std::size_t i : cls) rs.support.push_back(parent.support[i]);
      for (std::size_t v : parent.vertices) {
        if (std::binary_search(rs.support.begin(), rs.support.end(), v)) rs.vertices.push_back(v);
      }
      rs.center = rs.support.front();
      rs.radius = sub_radius;
      rs.dim_l = parent.dim_l;
      rs.parent = idx;
      out.simplexes.push_back(std::move(rs));
    }
  }
  return out;
}

}  // namespace ultranerve
