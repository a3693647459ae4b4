#include <random>

#include "doctest.h"
#include "support.hpp"
#include "ultranerve/error.hpp"
#include "ultranerve/spectrum.hpp"

using namespace ultranerve;
using namespace ultranerve::testing;

namespace {

UltraSpace residues(std::uint32_t p, std::int64_t count) {
  std::vector<std::string> labels;
  std::vector<PAdic> pts;
  for (std::int64_t x = 0; x < count; ++x) {
    labels.push_back(std::to_string(x));
    pts.push_back(PAdic::from_integer(p, x));
  }
  return space_from_padics(std::move(labels), pts);
}

std::int64_t power(std::int64_t p, std::int64_t e) {
  std::int64_t out = 1;
  while (e-- > 0) out *= p;
  return out;
}

// Oracle: the coarse block containing a fine block, found by subset test.
std::size_t containing_block(const ScaleCover& coarse, const std::vector<std::size_t>& fine_block) {
  for (const auto& block : coarse.blocks) {
    if (std::includes(block.begin(), block.end(), fine_block.begin(), fine_block.end())) return block.front();
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST_CASE("bonding_map") {
  SUBCASE("identical levels give the identity") {
    const auto ex = assemble_expansion(residues(2, 4));
    const auto id = bonding_map(ex.levels[1], ex.levels[1], 1, 1);
    CHECK(id.is_identity());
    CHECK(id.contains_simplexes());
  }
  SUBCASE("Z/9 singletons onto triples is reduction mod 3") {
    const auto ex = assemble_expansion(residues(3, 9));
    REQUIRE(ex.levels.size() == 3);
    const auto& map = ex.bonding[1];
    CHECK(map.source == 2);
    CHECK(map.target == 1);
    REQUIRE(map.vertex_map.size() == 9);
    for (const auto& [v, w] : map.vertex_map) CHECK(w == v % 3);
  }
  SUBCASE("vertex maps agree with brute-force containment") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 30; ++trial) {
      const auto s = random_dendrogram_space(rng, 3, static_cast<std::size_t>(uniform_int(rng, 1, 30)));
      const auto ex = assemble_expansion(s);
      for (std::size_t from = 0; from < ex.levels.size(); ++from) {
        for (std::size_t to = 0; to <= from; ++to) {
          const auto map = ex.direct(from, to);
          CHECK(map.contains_simplexes());
          for (const auto& block : ex.levels[from].cover.blocks) {
            CHECK(map.vertex_map.at(block.front()) == containing_block(ex.levels[to].cover, block));
          }
        }
      }
    }
  }
  SUBCASE("non-nested covers are rejected") {
    const auto ex = assemble_expansion(residues(2, 8));
    CHECK_THROWS_AS(bonding_map(ex.levels[0], ex.levels[2], 0, 2), NonNestedCovers);
  }
}

TEST_CASE("verify_nonstretching") {
  SUBCASE("identity") {
    const auto ex = assemble_expansion(residues(3, 9));
    const auto& level = ex.levels[1];
    const auto r = verify_nonstretching(bonding_map(level, level, 1, 1), *level.realization, *level.realization);
    CHECK(r.violations.empty());
    CHECK(r.collapsed == 0);
    CHECK(r.min_factor_exponent == std::optional<std::int64_t>(0));
  }
  SUBCASE("reduction mod p on Z/p^2") {
    for (std::uint32_t p : {2u, 3u, 5u}) {
      const auto ex = assemble_expansion(residues(p, p * p));
      REQUIRE(ex.levels.size() == 3);
      const auto& fine = ex.levels[2];
      const auto& coarse = ex.levels[1];
      const auto r = verify_nonstretching(ex.bonding[1], *fine.realization, *coarse.realization);
      CHECK(r.violations.empty());
      CHECK(r.min_factor_exponent == std::optional<std::int64_t>(1));
      // Direct recomputation: pairs with equal residues mod p collapse; the
      // rest keep |x - y|_p = 1 while the scale shrinks from 1/p^2 to 1/p.
      std::size_t collapsed = 0;
      for (std::uint32_t x = 0; x < p * p; ++x) {
        for (std::uint32_t y = x + 1; y < p * p; ++y) {
          if (x % p == y % p) {
            ++collapsed;
          } else {
            CHECK(trial_valuation(y - x, p) == 0);
            CHECK(coarse.realization->distance(x % p, y % p) == fine.realization->distance(x, y));
          }
        }
      }
      CHECK(r.collapsed == collapsed);
    }
  }
  SUBCASE("random towers never stretch") {
    for (const auto& s : corpus(89, 30, 40)) {
      const auto ex = assemble_expansion(s);
      for (const auto& map : ex.bonding) {
        const auto r = verify_nonstretching(map, *ex.levels[map.source].realization, *ex.levels[map.target].realization);
        CHECK(r.violations.empty());
        CHECK(r.factor_p());
        CHECK(r.pairs_checked == ex.levels[map.source].nerve.vertices.size() *
                                     (ex.levels[map.source].nerve.vertices.size() - 1) / 2);
      }
    }
  }
}

TEST_CASE("verify_nondegenerate") {
  SUBCASE("identity") {
    const auto ex = assemble_expansion(residues(2, 8), Schedule{{}, {1}, {}});
    const auto& level = ex.levels[1];
    const auto r = verify_nondegenerate(bonding_map(level, level, 1, 1), level.nerve);
    CHECK(r.flagged.empty());
    CHECK(r.merged_vertices == 0);
  }
  SUBCASE("a simplex sent to one vertex is flagged") {
    NerveComplex source;
    source.vertices = {0, 1, 2};
    source.maximal_simplexes = {{0, 1, 2}};
    BondingMap map;
    map.vertex_map = {{0, 7}, {1, 7}, {2, 7}};
    const auto r = verify_nondegenerate(map, source);
    CHECK(r.flagged == std::vector<std::size_t>{0});
    CHECK(r.merged_vertices == 1);
  }
  SUBCASE("with k = 1 flags match the block merges") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 30; ++trial) {
      const auto s = random_dendrogram_space(rng, 2, static_cast<std::size_t>(uniform_int(rng, 2, 30)));
      const auto ex = assemble_expansion(s, Schedule{{}, {1}, {}});
      for (const auto& map : ex.bonding) {
        const auto& fine = ex.levels[map.source].cover;
        const auto& coarse = ex.levels[map.target].cover;
        // Oracle: coarse blocks holding at least two fine blocks.
        std::size_t merges = 0;
        for (const auto& block : coarse.blocks) {
          std::set<std::size_t> children;
          for (std::size_t x : block) children.insert(fine.block_of[x]);
          if (children.size() >= 2) ++merges;
        }
        const auto r = verify_nondegenerate(map, ex.levels[map.source].nerve);
        CHECK(r.flagged.size() == merges);
        CHECK(r.merged_vertices == merges);
      }
    }
  }
  SUBCASE("default schedule has 0-dimensional nerves and no flags") {
    const auto ex = assemble_expansion(residues(3, 27));
    for (const auto& map : ex.bonding) CHECK(verify_nondegenerate(map, ex.levels[map.source].nerve).flagged.empty());
  }
}

TEST_CASE("assemble_expansion") {
  SUBCASE("one point") {
    const UltraSpace s({"solo"}, 3, {GammaValue::zero()});
    const auto ex = assemble_expansion(s);
    CHECK(ex.levels.size() == 1);
    CHECK(ex.bonding.empty());
    CHECK(ex.levels[0].nerve.maximal_simplexes.size() == 1);
  }
  SUBCASE("27 residues of Z_3") {
    const auto ex = assemble_expansion(residues(3, 27));
    REQUIRE(ex.levels.size() == 4);
    const std::size_t sizes[] = {1, 3, 9, 27};
    for (std::size_t m = 0; m < 4; ++m) {
      CHECK(ex.levels[m].j == static_cast<std::int64_t>(m));
      CHECK(ex.levels[m].nerve.vertices.size() == sizes[m]);
    }
    for (const auto& map : ex.bonding) {
      const auto q = static_cast<std::size_t>(power(3, static_cast<std::int64_t>(map.target)));
      for (const auto& [v, w] : map.vertex_map) CHECK(w == v % q);
    }
  }
  SUBCASE("functoriality on random 2-adic spaces") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 10; ++trial) {
      const auto ex = assemble_expansion(random_padic_space(rng, 2, 16));
      const auto r = verify_functoriality(ex);
      const std::size_t n = ex.levels.size();
      CHECK(r.triples_checked == n * (n + 1) * (n + 2) / 6);
      CHECK(r.failures.empty());
      for (std::size_t from = 0; from < n; ++from) {
        for (std::size_t to = 0; to <= from; ++to) CHECK(ex.composite(from, to) == ex.direct(from, to));
      }
    }
  }
  SUBCASE("scales shrink toward the finest level") {
    for (const auto& s : corpus(103, 20, 40)) {
      const auto ex = assemble_expansion(s);
      for (std::size_t m = 0; m + 1 < ex.levels.size(); ++m) {
        CHECK(ex.levels[m + 1].realization->scale < ex.levels[m].realization->scale);
        CHECK(check_uniform(*ex.levels[m + 1].realization).sup_diam <= check_uniform(*ex.levels[m].realization).sup_diam);
      }
      CHECK(check_uniform(*ex.levels.back().realization).sup_diam.is_zero());
    }
  }
  SUBCASE("explicit schedules and a b override") {
    const auto s = residues(2, 8);
    const auto ex = assemble_expansion(s, Schedule{{0, 1, 2, 3}, {2, 1, 0, 0}, {}});
    CHECK(ex.schedule.thresholds[0] == GammaValue::from_exponent(-2));
    CHECK(ex.schedule.thresholds[2] == GammaValue::from_exponent(2));
    const auto over = assemble_expansion(s, Schedule{{3, 4}, {1}, GammaValue::from_exponent(5)});
    for (const auto& t : over.schedule.thresholds) CHECK(t == GammaValue::from_exponent(4));
    // The override applies at every level, including coarse ones it cannot cover.
    CHECK_THROWS_AS(assemble_expansion(s, Schedule{{}, {}, GammaValue::from_exponent(5)}), ScheduleError);
  }
  SUBCASE("schedule rejections") {
    const auto s = residues(3, 9);
    CHECK_THROWS_AS(assemble_expansion(s, Schedule{{}, {0, 1}, {}}), ScheduleError);
    CHECK_THROWS_AS(assemble_expansion(s, Schedule{{0, 2, 2}, {}, {}}), ScheduleError);
    CHECK_THROWS_AS(assemble_expansion(s, Schedule{{0, 1}, {}, {}}), ScheduleError);
    CHECK_THROWS_AS(assemble_expansion(s, Schedule{{0, 1, 2}, {0, 0}, {}}), ScheduleError);
    CHECK_THROWS_AS(assemble_expansion(s, Schedule{{}, {-1}, {}}), ScheduleError);
    // A b override at the largest distance never lets the nerve separate.
    CHECK_THROWS_AS(assemble_expansion(s, Schedule{{}, {}, GammaValue::from_exponent(0)}), ScheduleError);
    CHECK_THROWS_AS(assemble_expansion(s, Schedule{{}, {}, GammaValue::zero()}), ScheduleError);
  }
}

TEST_CASE("thread and reconstruct") {
  const auto ex = assemble_expansion(residues(3, 9));
  SUBCASE("point 5 of Z/9") {
    const auto t = thread(ex, "5");
    REQUIRE(t.simplexes.size() == 3);
    CHECK(ex.levels[0].nerve.maximal_simplexes[t.simplexes[0]] == std::vector<std::size_t>{0});
    CHECK(ex.levels[1].cover.blocks[ex.levels[1].cover.block_of[5]] == std::vector<std::size_t>{2, 5, 8});
    CHECK(ex.levels[1].nerve.maximal_simplexes[t.simplexes[1]] == std::vector<std::size_t>{2});
    CHECK(ex.levels[2].nerve.maximal_simplexes[t.simplexes[2]] == std::vector<std::size_t>{5});
    CHECK(reconstruct(ex, t) == std::vector<std::size_t>{5});
    CHECK(reconstruct(truncate(ex, 2), thread(truncate(ex, 2), 5)) == std::vector<std::size_t>{2, 5, 8});
    CHECK(reconstruct(truncate(ex, 1), thread(truncate(ex, 1), 5)).size() == 9);
  }
  SUBCASE("one level") {
    const auto one = truncate(ex, 1);
    CHECK(thread(one, 3).simplexes == std::vector<std::size_t>{0});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(thread(ex, "9"), UnknownPoint);
    CHECK_THROWS_AS(thread(ex, 9), UnknownPoint);
    Thread broken = thread(ex, 4);
    broken.simplexes[1] = 0;  // 4 lies over 1 mod 3, not 0
    CHECK_FALSE(is_coherent(ex, broken));
    CHECK_THROWS_AS(reconstruct(ex, broken), IncoherentThread);
    broken.simplexes.pop_back();
    CHECK_THROWS_AS(reconstruct(ex, broken), IncoherentThread);
    CHECK_THROWS_AS(truncate(ex, 0), InvalidArgument);
  }
  SUBCASE("threads are coherent and reconstruction is a bijection") {
    for (const auto& s : corpus(107, 30, 40)) {
      const auto full = assemble_expansion(s);
      std::set<std::size_t> recovered;
      for (std::size_t x = 0; x < s.size(); ++x) {
        const auto t = thread(full, x);
        CHECK(is_coherent(full, t));
        const auto points = reconstruct(full, t);
        REQUIRE(points.size() == 1);
        CHECK(points[0] == x);
        recovered.insert(points[0]);
      }
      CHECK(recovered.size() == s.size());
    }
  }
}

TEST_CASE("limit_isometry_check") {
  SUBCASE("equilateral space parts at one level") {
    std::vector<GammaValue> d(16, GammaValue::from_exponent(2));
    for (std::size_t i = 0; i < 4; ++i) d[i * 5] = GammaValue::zero();
    const UltraSpace s(numbered_labels(4), 5, d);
    const auto ex = assemble_expansion(s);
    const auto r = limit_isometry_check(ex);
    CHECK(r.pairs_checked == 6);
    CHECK(r.mismatches.empty());
    for (std::size_t x = 0; x < 4; ++x) {
      for (std::size_t y = x + 1; y < 4; ++y) {
        const auto tx = thread(ex, x), ty = thread(ex, y);
        std::size_t m = 0;
        while (tx.simplexes[m] == ty.simplexes[m]) ++m;
        CHECK(m == ex.levels.size() - 1);
      }
    }
  }
  SUBCASE("2-adic 8-point sample") {
    const auto s = residues(2, 8);
    const auto r = limit_isometry_check(assemble_expansion(s));
    CHECK(r.pairs_checked == 28);
    CHECK(r.mismatches.empty());
    CHECK(r.bound_exponent == 0);
  }
  SUBCASE("default schedule on the corpus") {
    for (const auto& s : corpus(109, 30, 40)) {
      const auto r = limit_isometry_check(assemble_expansion(s));
      CHECK(r.mismatches.empty());
      CHECK(r.bound_exponent == 0);
    }
  }
  SUBCASE("sparse schedule gives a bound") {
    // Levels at j = 0, 2, 4 of Z/16 in Z_2: distances 1/2 and 1/4 (and 1/8,
    // 1/16) are read off as the coarser level's scale.
    const auto s = residues(2, 16);
    const auto r = limit_isometry_check(assemble_expansion(s, Schedule{{0, 2, 4}, {}, {}}));
    CHECK(r.bound_exponent == 1);
    CHECK_FALSE(r.mismatches.empty());
    for (const auto& mm : r.mismatches) {
      REQUIRE(mm.recovered.has_value());
      const std::int64_t actual = mm.actual.exponent();
      // Schedule arithmetic: the recovered exponent is the even number just below.
      CHECK(mm.recovered->exponent() == actual - 1);
      CHECK(actual % 2 == 1);
    }
  }
}

TEST_CASE("group_expansion") {
  SUBCASE("p = 3, m = 3") {
    const auto r = group_expansion(3, 3);
    CHECK(r.level_sizes == std::vector<std::size_t>{1, 3, 9, 27});
    CHECK(r.sizes_match);
    CHECK(r.bonding_is_reduction);
    CHECK(r.translation_invariant);
    for (const auto& map : r.expansion.bonding) {
      const auto q = static_cast<std::size_t>(power(3, static_cast<std::int64_t>(map.target)));
      for (const auto& [v, w] : map.vertex_map) CHECK(w == v % q);
    }
  }
  SUBCASE("p = 2, m = 1") {
    const auto r = group_expansion(2, 1);
    CHECK(r.level_sizes == std::vector<std::size_t>{1, 2});
    CHECK(r.expansion.space->dist(0, 1) == GammaValue::from_exponent(0));
    CHECK(r.bonding_is_reduction);
  }
  SUBCASE("translations preserve every distance") {
    // Independent of the library metric: valuation by trial division.
    const auto r = group_expansion(5, 2);
    const auto& s = *r.expansion.space;
    for (std::int64_t c = 0; c < 25; ++c) {
      for (std::int64_t x = 0; x < 25; ++x) {
        for (std::int64_t y = x + 1; y < 25; ++y) {
          const std::int64_t tx = (x + c) % 25, ty = (y + c) % 25;
          CHECK(s.dist(static_cast<std::size_t>(x), static_cast<std::size_t>(y)).exponent() ==
                trial_valuation(tx - ty, 5));
        }
      }
    }
    CHECK(r.translation_invariant);
  }
  SUBCASE("subset") {
    const auto r = group_expansion(3, 2, std::vector<std::int64_t>{1, 4, 5, 8});
    CHECK(r.sizes_match);
    CHECK(r.bonding_is_reduction);
    CHECK(r.level_sizes.back() == 4);
  }
  CHECK_THROWS_AS(group_expansion(4, 2), InvalidPrime);
  CHECK_THROWS_AS(group_expansion(3, 0), InvalidArgument);
  CHECK_THROWS_AS(group_expansion(3, 2, std::vector<std::int64_t>{9}), InvalidArgument);
}
