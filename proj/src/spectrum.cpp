#include "ultranerve/spectrum.hpp"

#include <algorithm>
#include <set>

#include "ultranerve/error.hpp"
#include "ultranerve/padic.hpp"

namespace ultranerve {

namespace {

bool separates(const Level& level) {
  for (const auto& block : level.cover.blocks) {
    if (block.size() != 1) return false;
  }
  for (const auto& simplex : level.nerve.maximal_simplexes) {
    if (simplex.size() != 1) return false;
  }
  return true;
}

Level make_level(const UltraSpace& space, std::int64_t j, std::int64_t k, const std::optional<GammaValue>& b) {
  Level level;
  level.j = j;
  level.k = k;
  level.cover = scale_cover(space, j);
  try {
    level.nerve = build_nerve(space, level.cover, k, b.value_or(GammaValue::from_exponent(j)));
  } catch (const ThresholdBelowDiameter& e) {
    throw ScheduleError(e.what());
  }
  return level;
}

// Largest of the nerve threshold and the block radius: two points share a
// simplex at this level exactly when their distance is at most this value.
GammaValue joining_scale(const Level& level) {
  return max(level.nerve.threshold, GammaValue::from_exponent(level.j));
}

}  // namespace

std::vector<std::size_t> BondingMap::image(const std::vector<std::size_t>& simplex) const {
  std::set<std::size_t> out;
  for (std::size_t v : simplex) out.insert(vertex_map.at(v));
  return {out.begin(), out.end()};
}

bool BondingMap::is_identity() const {
  return std::all_of(vertex_map.begin(), vertex_map.end(), [](const auto& kv) { return kv.first == kv.second; });
}

BondingMap bonding_map(const Level& fine, const Level& coarse, std::size_t source, std::size_t target) {
  if (!refines(fine.cover, coarse.cover)) {
    throw NonNestedCovers("cover at level " + std::to_string(fine.j) + " does not refine level " +
                          std::to_string(coarse.j));
  }
  BondingMap map;
  map.source = source;
  map.target = target;
  for (std::size_t v : fine.nerve.vertices) {
    map.vertex_map[v] = coarse.cover.representative(coarse.cover.block_of[v]);
  }
  for (std::size_t s = 0; s < fine.nerve.maximal_simplexes.size(); ++s) {
    if (!coarse.nerve.contains(map.image(fine.nerve.maximal_simplexes[s]))) map.containment_violations.push_back(s);
  }
  return map;
}

BondingMap compose(const BondingMap& first, const BondingMap& second) {
  if (first.target != second.source) throw InvalidArgument("bonding maps are not composable");
  BondingMap out;
  out.source = first.source;
  out.target = second.target;
  for (const auto& [v, w] : first.vertex_map) out.vertex_map[v] = second.vertex_map.at(w);
  return out;
}

BondingMap Expansion::composite(std::size_t from, std::size_t to) const {
  if (from >= levels.size() || to > from) throw InvalidArgument("no bonding from level " + std::to_string(from) +
                                                                " to level " + std::to_string(to));
  BondingMap out;
  out.source = out.target = from;
  for (std::size_t v : levels[from].nerve.vertices) out.vertex_map[v] = v;
  for (std::size_t m = from; m > to; --m) out = compose(out, bonding[m - 1]);
  return out;
}

BondingMap Expansion::direct(std::size_t from, std::size_t to) const {
  if (from >= levels.size() || to > from) throw InvalidArgument("no bonding from level " + std::to_string(from) +
                                                                " to level " + std::to_string(to));
  return bonding_map(levels[from], levels[to], from, to);
}

Expansion assemble_expansion(const UltraSpace& space, const Schedule& schedule, std::size_t precision) {
  for (std::size_t m = 1; m < schedule.k.size(); ++m) {
    if (schedule.k[m] > schedule.k[m - 1]) {
      throw ScheduleError("k must not increase: k(" + std::to_string(m) + ") = " + std::to_string(schedule.k[m]) +
                          " > k(" + std::to_string(m - 1) + ") = " + std::to_string(schedule.k[m - 1]));
    }
  }
  for (std::size_t m = 1; m < schedule.j.size(); ++m) {
    if (schedule.j[m] <= schedule.j[m - 1]) throw ScheduleError("j must increase strictly");
  }
  if (!schedule.j.empty() && schedule.k.size() > 1 && schedule.k.size() != schedule.j.size()) {
    throw ScheduleError("j and k lists differ in length");
  }
  if (schedule.b && schedule.b->is_zero()) throw ScheduleError("b must be positive");

  auto k_at = [&](std::size_t m) -> std::int64_t {
    if (schedule.k.empty()) return 0;
    return schedule.k.size() == 1 ? schedule.k[0] : schedule.k[m];
  };

  Expansion out;
  out.space = std::make_shared<const UltraSpace>(space);
  if (!schedule.j.empty()) {
    for (std::size_t m = 0; m < schedule.j.size(); ++m) {
      out.levels.push_back(make_level(space, schedule.j[m], k_at(m), schedule.b));
    }
  } else {
    const std::int64_t j0 = std::min<std::int64_t>(0, space.min_exponent().value_or(0));
    if (schedule.k.size() > 1) {
      for (std::size_t m = 0; m < schedule.k.size(); ++m) {
        out.levels.push_back(make_level(space, j0 + static_cast<std::int64_t>(m), k_at(m), schedule.b));
      }
    } else {
      // With k constant the threshold exponent grows with j (or stays put
      // under a b override), so nothing changes past this bound.
      const std::int64_t e_max = space.max_exponent().value_or(j0 - 1);
      const std::int64_t j_last = std::max(j0, e_max + 1) + std::max<std::int64_t>(0, k_at(0));
      for (std::int64_t j = j0; j <= j_last; ++j) {
        out.levels.push_back(make_level(space, j, k_at(0), schedule.b));
        if (separates(out.levels.back())) break;
      }
    }
  }
  if (!separates(out.levels.back())) {
    throw ScheduleError("finest level j = " + std::to_string(out.levels.back().j) + " does not separate the points");
  }

  out.schedule.b = schedule.b;
  for (const auto& level : out.levels) {
    out.schedule.j.push_back(level.j);
    out.schedule.k.push_back(level.k);
    out.schedule.thresholds.push_back(level.nerve.threshold);
  }
  for (std::size_t m = 0; m + 1 < out.levels.size(); ++m) {
    out.bonding.push_back(bonding_map(out.levels[m + 1], out.levels[m], m + 1, m));
  }
  out.embedding = std::make_shared<const Embedding>(space, precision);
  for (auto& level : out.levels) level.realization = realize(level.nerve, level.cover, out.embedding);
  return out;
}

FunctorialityReport verify_functoriality(const Expansion& expansion) {
  const std::size_t n = expansion.levels.size();
  std::vector<std::vector<BondingMap>> direct(n);
  for (std::size_t from = 0; from < n; ++from) {
    for (std::size_t to = 0; to <= from; ++to) direct[from].push_back(expansion.direct(from, to));
  }
  FunctorialityReport report;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t mid = 0; mid <= m; ++mid) {
      for (std::size_t l = 0; l <= mid; ++l) {
        ++report.triples_checked;
        if (compose(direct[m][mid], direct[mid][l]) != direct[m][l]) report.failures.push_back({l, mid, m});
      }
    }
  }
  return report;
}

NonstretchingReport verify_nonstretching(const BondingMap& map, const Realization& source, const Realization& target) {
  NonstretchingReport report;
  const std::int64_t source_scale = source.scale.exponent();
  const std::int64_t target_scale = target.scale.exponent();
  const auto& vs = source.vertices;
  for (std::size_t a = 0; a < vs.size(); ++a) {
    for (std::size_t b = a + 1; b < vs.size(); ++b) {
      ++report.pairs_checked;
      const std::size_t fa = map.vertex_map.at(vs[a]), fb = map.vertex_map.at(vs[b]);
      const GammaValue before = source.distance(vs[a], vs[b]);
      if (fa == fb) {
        ++report.collapsed;
        continue;
      }
      const GammaValue after = target.distance(fa, fb);
      if (after > before) {
        report.violations.emplace_back(vs[a], vs[b]);
        continue;
      }
      const std::int64_t factor = (after.exponent() - target_scale) - (before.exponent() - source_scale);
      if (!report.min_factor_exponent || factor < *report.min_factor_exponent) report.min_factor_exponent = factor;
    }
  }
  return report;
}

NondegeneracyReport verify_nondegenerate(const BondingMap& map, const NerveComplex& source) {
  NondegeneracyReport report;
  for (std::size_t s = 0; s < source.maximal_simplexes.size(); ++s) {
    const auto& simplex = source.maximal_simplexes[s];
    if (simplex.size() >= 2 && map.image(simplex).size() == 1) report.flagged.push_back(s);
  }
  std::map<std::size_t, std::size_t> preimages;
  for (const auto& [v, w] : map.vertex_map) ++preimages[w];
  for (const auto& [w, count] : preimages) {
    if (count >= 2) ++report.merged_vertices;
  }
  return report;
}

Thread thread(const Expansion& expansion, std::size_t point) {
  if (point >= expansion.space->size()) throw UnknownPoint("no point with index " + std::to_string(point));
  Thread t;
  t.point = point;
  for (const auto& level : expansion.levels) {
    const std::size_t vertex = level.cover.representative(level.cover.block_of[point]);
    t.simplexes.push_back(level.nerve.simplex_index_of(vertex));
  }
  return t;
}

Thread thread(const Expansion& expansion, const std::string& label) {
  return thread(expansion, expansion.space->index_of(label));
}

bool is_coherent(const Expansion& expansion, const Thread& t) {
  if (t.simplexes.size() != expansion.levels.size()) return false;
  for (std::size_t m = 0; m < t.simplexes.size(); ++m) {
    if (t.simplexes[m] >= expansion.levels[m].nerve.maximal_simplexes.size()) return false;
  }
  for (std::size_t m = 0; m + 1 < t.simplexes.size(); ++m) {
    const auto& fine = expansion.levels[m + 1].nerve.maximal_simplexes[t.simplexes[m + 1]];
    const auto& coarse = expansion.levels[m].nerve.maximal_simplexes[t.simplexes[m]];
    for (std::size_t v : expansion.bonding[m].image(fine)) {
      if (!std::binary_search(coarse.begin(), coarse.end(), v)) return false;
    }
  }
  return true;
}

std::vector<std::size_t> reconstruct(const Expansion& expansion, const Thread& t) {
  if (!is_coherent(expansion, t)) throw IncoherentThread("thread is not linked by the bonding maps");
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < expansion.space->size(); ++x) {
    bool inside = true;
    for (std::size_t m = 0; m < expansion.levels.size() && inside; ++m) {
      const auto& level = expansion.levels[m];
      inside = level.nerve.simplex_index_of(level.cover.representative(level.cover.block_of[x])) == t.simplexes[m];
    }
    if (inside) out.push_back(x);
  }
  return out;
}

Expansion truncate(const Expansion& expansion, std::size_t count) {
  if (count == 0 || count > expansion.levels.size()) {
    throw InvalidArgument("cannot keep " + std::to_string(count) + " of " + std::to_string(expansion.levels.size()) +
                          " levels");
  }
  Expansion out = expansion;
  out.levels.resize(count);
  out.bonding.resize(count - 1);
  out.schedule.j.resize(count);
  out.schedule.k.resize(count);
  out.schedule.thresholds.resize(count);
  return out;
}

LimitIsometryReport limit_isometry_check(const Expansion& expansion) {
  const UltraSpace& space = *expansion.space;
  std::vector<Thread> threads;
  for (std::size_t x = 0; x < space.size(); ++x) threads.push_back(thread(expansion, x));

  LimitIsometryReport report;
  for (std::size_t a = 0; a < space.size(); ++a) {
    for (std::size_t b = a + 1; b < space.size(); ++b) {
      ++report.pairs_checked;
      std::size_t m = 0;
      while (m < expansion.levels.size() && threads[a].simplexes[m] == threads[b].simplexes[m]) ++m;
      IsometryMismatch entry{a, b, std::nullopt, space.dist(a, b)};
      if (m == expansion.levels.size()) {
        entry.recovered = GammaValue::zero();
      } else if (m > 0) {
        const GammaValue joined = joining_scale(expansion.levels[m - 1]);
        const GammaValue parted = joining_scale(expansion.levels[m]);
        entry.recovered = joined;
        report.bound_exponent = std::max(report.bound_exponent, parted.exponent() - joined.exponent() - 1);
      }
      if (entry.recovered != entry.actual) report.mismatches.push_back(entry);
    }
  }
  return report;
}

GroupExpansionReport group_expansion(std::uint32_t p, std::int64_t m, const std::optional<std::vector<std::int64_t>>& subset) {
  if (!is_prime(p)) throw InvalidPrime(std::to_string(p) + " is not prime");
  if (m < 1) throw InvalidArgument("depth must be at least 1");
  std::int64_t order = 1;
  for (std::int64_t i = 0; i < m; ++i) {
    order *= p;
    if (order > (std::int64_t{1} << 20)) throw InvalidArgument("p^m is too large for an explicit expansion");
  }

  GroupExpansionReport report;
  if (subset) {
    std::set<std::int64_t> chosen(subset->begin(), subset->end());
    if (chosen.empty()) throw InvalidArgument("empty residue subset");
    if (*chosen.begin() < 0 || *chosen.rbegin() >= order) throw InvalidArgument("residue outside 0..p^m-1");
    report.residues.assign(chosen.begin(), chosen.end());
  } else {
    for (std::int64_t x = 0; x < order; ++x) report.residues.push_back(x);
  }

  std::vector<std::string> labels;
  std::vector<PAdic> points;
  for (std::int64_t x : report.residues) {
    labels.push_back(std::to_string(x));
    points.push_back(PAdic::from_integer(p, x, std::max<std::size_t>(kDefaultPrecision, static_cast<std::size_t>(m) + 1)));
  }
  report.expansion = assemble_expansion(space_from_padics(std::move(labels), points));
  const Expansion& ex = report.expansion;

  auto modulus = [&](std::int64_t j) {
    std::int64_t q = 1;
    for (std::int64_t i = 0; i < std::min(j, m); ++i) q *= p;
    return q;
  };

  report.sizes_match = true;
  for (const auto& level : ex.levels) {
    report.level_sizes.push_back(level.nerve.vertices.size());
    std::set<std::int64_t> classes;
    for (std::int64_t x : report.residues) classes.insert(x % modulus(level.j));
    report.sizes_match = report.sizes_match && classes.size() == level.nerve.vertices.size();
  }

  // The image of x must be the smallest chosen residue congruent to x.
  report.bonding_is_reduction = true;
  for (const auto& map : ex.bonding) {
    const std::int64_t q = modulus(ex.levels[map.target].j);
    std::map<std::int64_t, std::int64_t> smallest;
    for (std::int64_t x : report.residues) smallest.try_emplace(x % q, x);
    for (const auto& [v, w] : map.vertex_map) {
      if (report.residues[w] != smallest.at(report.residues[v] % q)) report.bonding_is_reduction = false;
    }
  }

  // |(x + c) - (y + c)|_p recomputed in Z_p for every shift c of Z/p^m.
  report.translation_invariant = true;
  const UltraSpace& space = *ex.space;
  const std::size_t digits = static_cast<std::size_t>(m) + 1;
  for (std::int64_t c = 0; c < order && report.translation_invariant; ++c) {
    std::vector<PAdic> shifted;
    for (std::int64_t x : report.residues) shifted.push_back(PAdic::from_integer(p, (x + c) % order, digits));
    for (std::size_t a = 0; a < shifted.size(); ++a) {
      for (std::size_t b = a + 1; b < shifted.size(); ++b) {
        if ((shifted[a] - shifted[b]).norm() != space.dist(a, b)) report.translation_invariant = false;
      }
    }
  }
  return report;
}

}  // namespace ultranerve
