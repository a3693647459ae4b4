#include "ultranerve/ultraspace.hpp"

#include <algorithm>
#include <numeric>

#include "ultranerve/error.hpp"

namespace ultranerve {

namespace {

std::string triple_text(std::span<const std::string> labels, const Triple& t) {
  return "(" + labels[t.i] + ", " + labels[t.j] + ", " + labels[t.k] + ")";
}

void check_shape(std::size_t n, const RationalMatrix& m) {
  if (m.size() != n) {
    throw MalformedMatrix("matrix has " + std::to_string(m.size()) + " rows for " + std::to_string(n) +
                          " labels");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) {
      throw MalformedMatrix("row " + std::to_string(i) + " has " + std::to_string(m[i].size()) +
                            " entries, expected " + std::to_string(n));
    }
  }
}

void check_entries(std::span<const std::string> labels, const RationalMatrix& m) {
  const std::size_t n = labels.size();
  check_shape(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m[i][j] < 0) {
        throw NegativeEntry("negative distance between " + labels[i] + " and " + labels[j]);
      }
    }
    if (m[i][i] != 0) throw NonzeroDiagonal("nonzero self-distance at " + labels[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (m[i][j] != m[j][i]) {
        throw AsymmetricMatrix("asymmetric distance between " + labels[i] + " and " + labels[j]);
      }
    }
  }
}

// Classes of {(x, y) : rho(x, y) <= p^-level}, numbered in order of their
// smallest member label. Relies on the relation being an equivalence.
std::vector<std::uint32_t> ball_indices(const UltraSpace& space, std::int64_t level) {
  const std::size_t n = space.size();
  const GammaValue radius = GammaValue::from_exponent(level);
  std::vector<std::size_t> rep(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep[i] = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (space.dist(i, j) <= radius) {
        rep[i] = rep[j];
        break;
      }
    }
  }
  // Smallest label per class, then rank classes by it.
  std::map<std::size_t, std::string> smallest;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = smallest.try_emplace(rep[i], space.label(i));
    if (!inserted && space.label(i) < it->second) it->second = space.label(i);
  }
  std::vector<std::pair<std::string, std::size_t>> order;
  for (const auto& [r, lbl] : smallest) order.emplace_back(lbl, r);
  std::sort(order.begin(), order.end());
  std::map<std::size_t, std::uint32_t> index;
  for (std::size_t k = 0; k < order.size(); ++k) index[order[k].second] = static_cast<std::uint32_t>(k);

  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = index[rep[i]];
  return out;
}

}  // namespace

UltraSpace::UltraSpace(std::vector<std::string> labels, std::uint32_t prime, std::vector<GammaValue> distances)
    : labels_(std::move(labels)), prime_(prime), dist_(std::move(distances)) {
  if (!is_prime(prime_)) throw InvalidPrime(std::to_string(prime_) + " is not prime");
  const std::size_t n = labels_.size();
  if (dist_.size() != n * n) throw MalformedMatrix("distance matrix does not match label count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!dist(i, i).is_zero()) throw NonzeroDiagonal("nonzero self-distance at " + labels_[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist(i, j) != dist(j, i)) {
        throw AsymmetricMatrix("asymmetric distance between " + labels_[i] + " and " + labels_[j]);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = i + 1; k < n; ++k) {
        if (dist(i, k) > max(dist(i, j), dist(j, k))) {
          throw NotUltrametric("violating triple " + triple_text(labels_, Triple{i, j, k}));
        }
      }
    }
  }
}

std::size_t UltraSpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw UnknownPoint("unknown point '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

bool UltraSpace::is_separated() const {
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) {
      if (dist(i, j).is_zero()) return false;
    }
  }
  return true;
}

std::optional<std::int64_t> UltraSpace::max_exponent() const {
  std::optional<std::int64_t> best;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) {
      if (auto e = dist(i, j).maybe_exponent(); e && (!best || *e > *best)) best = e;
    }
  }
  return best;
}

std::optional<std::int64_t> UltraSpace::min_exponent() const {
  std::optional<std::int64_t> best;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) {
      if (auto e = dist(i, j).maybe_exponent(); e && (!best || *e < *best)) best = e;
    }
  }
  return best;
}

GammaValue UltraSpace::nearest(std::size_t i) const {
  std::optional<GammaValue> best;
  for (std::size_t j = 0; j < size(); ++j) {
    if (j != i && (!best || dist(i, j) < *best)) best = dist(i, j);
  }
  return best.value_or(GammaValue::zero());
}

std::vector<Triple> validate_ultrametric(std::span<const std::string> labels, const RationalMatrix& m) {
  check_entries(labels, m);
  const std::size_t n = labels.size();
  std::vector<Triple> violations;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        if (m[i][k] > std::max(m[i][j], m[j][k])) violations.push_back({i, j, k});
      }
    }
  }
  return violations;
}

RationalMatrix subdominant_closure(const RationalMatrix& m) {
  std::vector<std::string> labels(m.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
  check_entries(labels, m);

  RationalMatrix d = m;
  const std::size_t n = d.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Rational& via = std::max(d[i][k], d[k][j]);
        if (via < d[i][j]) d[i][j] = via;
      }
    }
  }
  return d;
}

UltraSpace round_space(std::vector<std::string> labels, const RationalMatrix& m, std::uint32_t prime) {
  auto violations = validate_ultrametric(labels, m);
  if (!violations.empty()) {
    throw NotUltrametric("violating triple " + triple_text(labels, violations.front()));
  }
  const std::size_t n = labels.size();
  std::vector<GammaValue> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = round_to_gamma(m[i][j], prime);
  }
  return UltraSpace(std::move(labels), prime, std::move(dist));
}

UltraSpace space_from_padics(std::vector<std::string> labels, std::span<const PAdic> points) {
  if (labels.size() != points.size()) throw MalformedMatrix("label count does not match point count");
  if (points.empty()) throw MalformedMatrix("no points");
  const std::uint32_t prime = points.front().prime();
  const std::size_t n = points.size();
  std::vector<GammaValue> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = (points[i] - points[j]).norm();
    }
  }
  return UltraSpace(std::move(labels), prime, std::move(dist));
}

QuotientResult quotient_zero(const UltraSpace& space) {
  const std::size_t n = space.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (space.dist(i, j).is_zero()) {
        auto a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::size_t> keep;
  std::map<std::string, std::string> merged;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (r == i) keep.push_back(i);
    merged[space.label(i)] = space.label(r);
  }
  std::vector<std::string> labels;
  std::vector<GammaValue> dist(keep.size() * keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    labels.push_back(space.label(keep[a]));
    for (std::size_t b = 0; b < keep.size(); ++b) dist[a * keep.size() + b] = space.dist(keep[a], keep[b]);
  }
  return {UltraSpace(std::move(labels), space.prime(), std::move(dist)), std::move(merged)};
}

std::optional<std::int64_t> BaireCode::first_difference(std::size_t a, std::size_t b) const {
  for (std::size_t i = 0; i < depth; ++i) {
    if (codes[a][i] != codes[b][i]) return first_position + static_cast<std::int64_t>(i);
  }
  return std::nullopt;
}

BaireCode baire_encode(const UltraSpace& space) {
  if (!space.is_separated()) throw NotSeparated("Baire coding needs a separated space; apply quotient_zero");
  BaireCode out;
  const auto lo = space.min_exponent();
  const auto hi = space.max_exponent();
  out.first_position = lo ? std::min<std::int64_t>(1, *lo) : 1;
  const std::int64_t last = hi ? std::max(*hi, out.first_position) : out.first_position;
  out.depth = static_cast<std::size_t>(last - out.first_position + 1);
  out.codes.assign(space.size(), std::vector<std::uint32_t>(out.depth));
  for (std::size_t pos = 0; pos < out.depth; ++pos) {
    const auto symbols = ball_indices(space, out.first_position + static_cast<std::int64_t>(pos) + 1);
    for (std::size_t x = 0; x < space.size(); ++x) out.codes[x][pos] = symbols[x];
  }
  return out;
}

GammaValue C0Vector::norm() const {
  GammaValue best = GammaValue::zero();
  for (const auto& [key, c] : coefficients) best = max(best, c.norm());
  return best;
}

C0Vector operator-(const C0Vector& a, const C0Vector& b) {
  if (a.prime != b.prime) throw PrimeMismatch("c0 vectors over different primes");
  C0Vector out{a.prime, a.coefficients};
  for (const auto& [key, c] : b.coefficients) {
    auto it = out.coefficients.find(key);
    if (it == out.coefficients.end()) {
      out.coefficients.emplace(key, -c);
    } else {
      it->second = it->second - c;
      if (it->second.is_zero()) out.coefficients.erase(it);
    }
  }
  return out;
}

GammaValue c0_distance(const C0Vector& a, const C0Vector& b) { return (a - b).norm(); }

std::vector<C0Vector> c0_embed(const BaireCode& codes, std::uint32_t prime, std::size_t precision) {
  std::vector<C0Vector> out;
  out.reserve(codes.codes.size());
  for (const auto& code : codes.codes) {
    C0Vector v{prime, {}};
    for (std::size_t pos = 0; pos < codes.depth; ++pos) {
      const std::int64_t i = codes.first_position + static_cast<std::int64_t>(pos);
      v.coefficients.emplace(std::pair{i, code[pos]}, PAdic::power_of_prime(prime, i, precision));
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace ultranerve
