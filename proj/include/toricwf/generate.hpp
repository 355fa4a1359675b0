#pragma once

#include <random>

#include "cobordism.hpp"

namespace toricwf {

struct GeneratorOptions {
  std::size_t rank = 3;
  long lo = -3;
  long hi = 3;
  std::size_t max_cones = 3;
  bool lower_dimensional = true;  // allow maximal cones of codimension one
  std::size_t attempts = 10000;
};

namespace detail {

inline LatticeVector random_primitive(std::mt19937_64& rng, std::size_t d, long lo, long hi) {
  std::uniform_int_distribution<long> dist(lo, hi);
  while (true) {
    LatticeVector v(d);
    for (auto& x : v) x = dist(rng);
    if (!is_zero(v)) return primitive(v);
  }
}

inline std::optional<CobordismFan> try_cobordism(std::size_t rank, const std::vector<LatticeVector>& rays,
                                                 const std::vector<Cone>& cones, const LatticeVector& v0) {
  try {
    Fan f(rank, rays, cones);
    if (!has_intersection_property(f)) return std::nullopt;
    CobordismFan b(std::move(f), v0);
    validate(b);
    return b;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace detail

// A random simplicial π-strictly convex cobordism fan: one seed cone, then
// further cones glued along facets of existing ones.
inline CobordismFan random_cobordism_fan(std::mt19937_64& rng, const GeneratorOptions& opt) {
  const std::size_t d = opt.rank;
  if (d < 2) throw DimensionError("generator: rank must be at least 2");
  for (std::size_t attempt = 0; attempt < opt.attempts; ++attempt) {
    auto v0 = detail::random_primitive(rng, d, opt.lo, opt.hi);
    std::size_t dim = (opt.lower_dimensional && rng() % 3 == 0) ? d - 1 : d;
    std::vector<LatticeVector> rays;
    for (std::size_t i = 0; i < dim; ++i) rays.push_back(detail::random_primitive(rng, d, opt.lo, opt.hi));
    std::vector<RayId> ids(dim);
    for (std::size_t i = 0; i < dim; ++i) ids[i] = i;
    std::vector<Cone> cones{Cone(ids)};
    auto b = detail::try_cobordism(d, rays, cones, v0);
    if (!b) continue;
    const std::size_t target = 1 + rng() % opt.max_cones;
    for (std::size_t tries = 0; cones.size() < target && tries < 50; ++tries) {
      const Cone& base = cones[rng() % cones.size()];
      RayId drop = base.rays()[rng() % base.dim()];
      auto u = detail::random_primitive(rng, d, opt.lo, opt.hi);
      auto new_rays = rays;
      RayId uid;
      if (auto existing = std::find(rays.begin(), rays.end(), u); existing != rays.end()) {
        uid = static_cast<RayId>(existing - rays.begin());
      } else {
        uid = rays.size();
        new_rays.push_back(u);
      }
      Cone c = base.without(drop);
      if (c.contains(uid)) continue;
      c = c.with(uid);
      if (std::find(cones.begin(), cones.end(), c) != cones.end()) continue;
      auto new_cones = cones;
      new_cones.push_back(c);
      if (auto nb = detail::try_cobordism(d, new_rays, new_cones, v0)) {
        rays = std::move(new_rays);
        cones = std::move(new_cones);
        b = std::move(nb);
      }
    }
    return *b;
  }
  throw InvariantViolation("generator: no valid cobordism fan found");
}

// A random simplicial fan of the given rank and an integral point in the
// relative interior of one of its maximal cones.
inline std::pair<Fan, LatticeVector> random_fan_with_point(std::mt19937_64& rng, const GeneratorOptions& opt) {
  Fan f = random_cobordism_fan(rng, opt).fan();
  const auto& ms = f.maximal_cones();
  const Cone& c = ms[rng() % ms.size()];
  std::uniform_int_distribution<long> coef(1, 3);
  LatticeVector v(f.rank(), 0);
  for (const auto& g : f.generators_of(c)) v = v + Integer(coef(rng)) * g;
  return {f, primitive(v)};
}

}  // namespace toricwf
