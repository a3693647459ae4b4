#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ultranerve/gamma.hpp"
#include "ultranerve/padic.hpp"
#include "ultranerve/rational.hpp"

namespace ultranerve {

using RationalMatrix = std::vector<std::vector<Rational>>;

/**
 * Finite ultrametric space whose distances lie in the value group.
 *
 * Distances are stored as GammaValue exponents. Construction enforces
 * symmetry, a zero diagonal and the strong triangle inequality; points at
 * distance zero are allowed until quotient_zero() merges them.
 */
class UltraSpace {
public:
  UltraSpace(std::vector<std::string> labels, std::uint32_t prime, std::vector<GammaValue> dist);

  std::size_t size() const { return labels_.size(); }
  std::uint32_t prime() const { return prime_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  GammaValue dist(std::size_t i, std::size_t j) const { return dist_[i * labels_.size() + j]; }

  // Throws UnknownPoint.
  std::size_t index_of(const std::string& label) const;

  bool is_separated() const;
  // Largest and smallest finite exponents over distinct pairs; empty when
  // there are no pairs at positive distance.
  std::optional<std::int64_t> max_exponent() const;
  std::optional<std::int64_t> min_exponent() const;
  // Distance to the nearest other point (zero value for a singleton space).
  GammaValue nearest(std::size_t i) const;

private:
  std::vector<std::string> labels_;
  std::uint32_t prime_;
  std::vector<GammaValue> dist_;
};

struct Triple {
  std::size_t i, j, k;  // rho(i, k) > max(rho(i, j), rho(j, k))
  friend bool operator==(const Triple&, const Triple&) = default;
};

// Checks shape, symmetry, sign and diagonal (each a distinct MalformedMatrix
// subtype) and returns every triple breaking the strong triangle inequality,
// with i < k and j the intermediate point.
std::vector<Triple> validate_ultrametric(std::span<const std::string> labels, const RationalMatrix& m);

// Maximal ultrametric below m: the minimax path distance.
RationalMatrix subdominant_closure(const RationalMatrix& m);

// Entrywise round_to_gamma; throws NotUltrametric naming a violating triple.
UltraSpace round_space(std::vector<std::string> labels, const RationalMatrix& m, std::uint32_t prime);

// Distance matrix |x_i - x_j|_p of a list of p-adic points.
UltraSpace space_from_padics(std::vector<std::string> labels, std::span<const PAdic> points);

struct QuotientResult {
  UltraSpace space;
  // Every original label mapped to the label of its class representative
  // (the class member with the smallest index).
  std::map<std::string, std::string> merged;
};

QuotientResult quotient_zero(const UltraSpace& space);

/**
 * Codes of a finite ultrametric space in the Baire space.
 *
 * Position i runs from first_position to first_position + depth - 1; the
 * symbol at position i is the index of the point's ball of radius p^-(i+1).
 * Two points at distance p^-k first differ at position k.
 */
struct BaireCode {
  std::int64_t first_position = 1;
  std::size_t depth = 1;
  std::vector<std::vector<std::uint32_t>> codes;  // one per point

  // Position of the first difference, or nullopt for identical codes.
  std::optional<std::int64_t> first_difference(std::size_t a, std::size_t b) const;
};

BaireCode baire_encode(const UltraSpace& space);

/**
 * Finitely supported vector of c0(Q_p, N x C): coordinate (position, symbol)
 * maps to its coefficient. Absent coordinates are zero.
 */
struct C0Vector {
  std::uint32_t prime = 2;
  std::map<std::pair<std::int64_t, std::uint32_t>, PAdic> coefficients;

  GammaValue norm() const;
  friend C0Vector operator-(const C0Vector& a, const C0Vector& b);
};

GammaValue c0_distance(const C0Vector& a, const C0Vector& b);

// f(x) = sum_i p^i e_{i, x_i}; isometric for the metric the codes came from.
std::vector<C0Vector> c0_embed(const BaireCode& codes, std::uint32_t prime,
                               std::size_t precision = kDefaultPrecision);

}  // namespace ultranerve
