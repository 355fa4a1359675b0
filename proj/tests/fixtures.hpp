#pragma once

#include <random>

#include "toricwf/cobordism.hpp"

namespace fixtures {

using namespace toricwf;

inline std::vector<RayId> iota(std::size_t n) {
  std::vector<RayId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

// Faces of ⟨e1,e2,e3,e4⟩ with v0 = (1,1,-1,-1).
inline CobordismFan flop() {
  std::vector<LatticeVector> rays;
  for (std::size_t i = 0; i < 4; ++i) rays.push_back(unit_vector(4, i));
  return CobordismFan(Fan(4, rays, {Cone(iota(4))}), vec({1, 1, -1, -1}));
}

inline CobordismFan plane_pair() {
  return CobordismFan(Fan(2, {vec({1, 0}), vec({1, 2})}, {Cone{0, 1}}), vec({0, 1}));
}

// Two circuits stacked along v0 = (0,1): ⟨(1,-1),(1,0)⟩ below ⟨(1,0),(1,1)⟩.
inline CobordismFan stacked() {
  return CobordismFan(Fan(2, {vec({1, -1}), vec({1, 0}), vec({1, 1})}, {Cone{0, 1}, Cone{1, 2}}), vec({0, 1}));
}

// Two circuits whose stars do not meet.
inline CobordismFan disjoint_pair() {
  return CobordismFan(Fan(2, {vec({1, -1}), vec({1, 1}), vec({-1, -1}), vec({-1, 1})}, {Cone{0, 1}, Cone{2, 3}}),
                      vec({0, 1}));
}

// Rank-3 stack: the blow-up cobordism of the plane followed by a second
// circuit above it, checked by hand: relations of ⟨e1,e2,u⟩ and ⟨e1,u,s⟩.
inline CobordismFan stacked3() {
  std::vector<LatticeVector> rays{vec({1, 0, 0}), vec({0, 1, 0}), vec({1, 1, 1}), vec({1, 2, 2})};
  return CobordismFan(Fan(3, rays, {Cone{0, 1, 2}, Cone{1, 2, 3}}), vec({0, 0, 1}));
}

inline LatticeVector random_vector(std::mt19937_64& rng, std::size_t d, long lo, long hi) {
  std::uniform_int_distribution<long> dist(lo, hi);
  LatticeVector v(d);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline LatticeVector random_primitive(std::mt19937_64& rng, std::size_t d, long lo, long hi) {
  while (true) {
    auto v = random_vector(rng, d, lo, hi);
    if (!is_zero(v)) return primitive(v);
  }
}

}  // namespace fixtures
