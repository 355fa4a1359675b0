#pragma once

#include <map>
#include <optional>
#include <set>

#include "lattice.hpp"
#include "lp.hpp"

namespace toricwf {

using RayId = std::size_t;

class Cone {
 public:
  Cone() = default;
  explicit Cone(std::vector<RayId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }
  Cone(std::initializer_list<RayId> ids) : Cone(std::vector<RayId>(ids)) {}

  const std::vector<RayId>& rays() const { return ids_; }
  std::size_t dim() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(RayId r) const { return std::binary_search(ids_.begin(), ids_.end(), r); }
  bool has_face(const Cone& f) const { return std::includes(ids_.begin(), ids_.end(), f.ids_.begin(), f.ids_.end()); }
  Cone with(RayId r) const {
    auto v = ids_;
    v.push_back(r);
    return Cone(std::move(v));
  }
  Cone without(RayId r) const {
    auto v = ids_;
    v.erase(std::remove(v.begin(), v.end(), r), v.end());
    return Cone(std::move(v));
  }
  Cone join(const Cone& o) const {
    auto v = ids_;
    v.insert(v.end(), o.ids_.begin(), o.ids_.end());
    return Cone(std::move(v));
  }

  auto operator<=>(const Cone&) const = default;

 private:
  std::vector<RayId> ids_;
};

inline std::string to_string(const Cone& c) {
  std::string s = "<";
  for (std::size_t i = 0; i < c.rays().size(); ++i) {
    if (i) s += ',';
    s += std::to_string(c.rays()[i]);
  }
  return s + ">";
}

// All 2^k subsets of a simplicial cone's rays.
inline std::vector<Cone> faces(const Cone& c) {
  const auto& r = c.rays();
  if (r.size() > 30) throw DimensionError("faces: cone too large");
  std::vector<Cone> out;
  for (unsigned long mask = 0; mask < (1UL << r.size()); ++mask) {
    std::vector<RayId> ids;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (mask & (1UL << i)) ids.push_back(r[i]);
    out.emplace_back(std::move(ids));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Fan invariant checks other than the pairwise intersection property happen
// on construction; that one needs linear programming and lives in validate().
class Fan {
 public:
  Fan() = default;

  Fan(std::size_t rank, std::vector<LatticeVector> rays, const std::vector<Cone>& generators)
      : rank_(rank), rays_(std::move(rays)) {
    std::set<LatticeVector> seen;
    for (const auto& r : rays_) {
      if (r.size() != rank_) throw DimensionError("fan: ray rank mismatch");
      if (!is_primitive(r)) throw DomainError("fan: ray " + to_string(r) + " is not primitive");
      if (!seen.insert(r).second) throw DomainError("fan: duplicate ray " + to_string(r));
    }
    for (const auto& c : generators) {
      for (RayId id : c.rays())
        if (id >= rays_.size()) throw NotFoundError("fan: ray index out of range");
      if (!independent(generators_of(c))) throw DomainError("fan: cone " + to_string(c) + " is not simplicial");
      for (auto& f : faces(c)) cones_.insert(std::move(f));
    }
    cones_.insert(Cone{});
    compute_maximal();
  }

  static Fan from_cone_set(std::size_t rank, std::vector<LatticeVector> rays, std::set<Cone> cones) {
    Fan f;
    f.rank_ = rank;
    f.rays_ = std::move(rays);
    f.cones_ = std::move(cones);
    f.cones_.insert(Cone{});
    f.compute_maximal();
    return f;
  }

  std::size_t rank() const { return rank_; }
  const std::vector<LatticeVector>& rays() const { return rays_; }
  const LatticeVector& ray(RayId id) const { return rays_.at(id); }
  const std::set<Cone>& cones() const { return cones_; }
  const std::vector<Cone>& maximal_cones() const { return maximal_; }
  bool contains(const Cone& c) const { return cones_.count(c) != 0; }

  std::vector<LatticeVector> generators_of(const Cone& c) const {
    std::vector<LatticeVector> g;
    g.reserve(c.dim());
    for (RayId id : c.rays()) g.push_back(rays_.at(id));
    return g;
  }

  std::optional<RayId> find_ray(const LatticeVector& v) const {
    for (RayId i = 0; i < rays_.size(); ++i)
      if (rays_[i] == v) return i;
    return std::nullopt;
  }

  // Rays appearing in some cone.
  std::vector<RayId> used_rays() const {
    std::set<RayId> s;
    for (const auto& c : maximal_)
      for (RayId r : c.rays()) s.insert(r);
    return {s.begin(), s.end()};
  }

  // The cone set with rays replaced by their vectors; id-independent.
  std::set<std::vector<LatticeVector>> canonical() const {
    std::set<std::vector<LatticeVector>> out;
    for (const auto& c : cones_) {
      auto g = generators_of(c);
      std::sort(g.begin(), g.end());
      out.insert(std::move(g));
    }
    return out;
  }

  std::vector<LatticeVector> sorted_generators(const Cone& c) const {
    auto g = generators_of(c);
    std::sort(g.begin(), g.end());
    return g;
  }

  bool identical(const Fan& o) const { return rank_ == o.rank_ && rays_ == o.rays_ && cones_ == o.cones_; }

  friend bool operator==(const Fan& a, const Fan& b) { return a.rank_ == b.rank_ && a.canonical() == b.canonical(); }

  Fan restricted(const std::set<Cone>& keep) const { return from_cone_set(rank_, rays_, keep); }

 private:
  void compute_maximal() {
    maximal_.clear();
    std::set<Cone> covered;
    for (const auto& c : cones_)
      for (RayId r : c.rays()) covered.insert(c.without(r));
    for (const auto& c : cones_)
      if (!covered.count(c)) maximal_.push_back(c);
  }

  std::size_t rank_ = 0;
  std::vector<LatticeVector> rays_;
  std::set<Cone> cones_;
  std::vector<Cone> maximal_;
};

inline std::vector<Cone> star(const Cone& tau, const Fan& fan) {
  if (!fan.contains(tau)) throw NotFoundError("star: cone not in fan");
  std::vector<Cone> out;
  for (const auto& c : fan.cones())
    if (c.has_face(tau)) out.push_back(c);
  return out;
}

inline std::vector<Cone> closed_star(const Cone& tau, const Fan& fan) {
  std::set<Cone> out;
  for (const auto& c : star(tau, fan))
    for (auto& f : faces(c)) out.insert(std::move(f));
  return {out.begin(), out.end()};
}

// The unique cone containing v in its relative interior.
inline std::optional<Cone> locate(const Fan& fan, const LatticeVector& v) {
  if (v.size() != fan.rank()) throw DimensionError("locate: rank mismatch");
  if (is_zero(v)) return Cone{};
  for (const auto& m : fan.maximal_cones()) {
    auto x = coordinates(fan.generators_of(m), v);
    if (!x) continue;
    bool inside = true;
    std::vector<RayId> ids;
    for (std::size_t i = 0; i < x->size(); ++i) {
      if ((*x)[i] < 0) inside = false;
      else if ((*x)[i] > 0) ids.push_back(m.rays()[i]);
    }
    if (inside) return Cone(std::move(ids));
  }
  return std::nullopt;
}

inline bool in_support(const Fan& fan, const LatticeVector& v) { return locate(fan, v).has_value(); }

// ϱ·Σ = (Σ \ Star(τ)) ∪ {ϱ + σ : σ ∈ closed star, τ ⋠ σ}.  Also returns the id
// of the inserted ray.
inline std::pair<Fan, RayId> star_subdivide_with_id(const Fan& fan, const LatticeVector& v) {
  if (is_zero(v)) throw DomainError("star_subdivide: zero vector");
  if (!is_primitive(v)) throw PreconditionError("star_subdivide: vector must be primitive");
  auto tau = locate(fan, v);
  if (!tau) throw DomainError("star_subdivide: " + to_string(v) + " is outside the support");
  if (tau->dim() == 1) return {fan, tau->rays().front()};
  auto rays = fan.rays();
  const RayId nid = rays.size();
  rays.push_back(v);
  std::set<Cone> cones;
  for (const auto& c : fan.cones())
    if (!c.has_face(*tau)) cones.insert(c);
  for (const auto& s : closed_star(*tau, fan))
    if (!s.has_face(*tau)) cones.insert(s.with(nid));
  return {Fan::from_cone_set(fan.rank(), std::move(rays), std::move(cones)), nid};
}

inline Fan star_subdivide(const Fan& fan, const LatticeVector& v) { return star_subdivide_with_id(fan, v).first; }

inline Integer multiplicity(const Fan& fan, const Cone& c) { return multiplicity(fan.generators_of(c)); }

inline bool is_nonsingular(const std::vector<LatticeVector>& gens) { return multiplicity(gens) == 1; }

inline bool is_nonsingular(const Fan& fan, const Cone& c) { return multiplicity(fan, c) == 1; }

inline bool is_nonsingular_fan(const Fan& fan) {
  for (const auto& m : fan.maximal_cones())
    if (!is_nonsingular(fan, m)) return false;
  return true;
}

// Does cone(outer) contain every vector of inner?
inline bool cone_contains(const std::vector<LatticeVector>& outer, const std::vector<LatticeVector>& inner) {
  for (const auto& u : inner) {
    auto x = coordinates(outer, u);
    if (!x) return false;
    for (const auto& a : *x)
      if (a < 0) return false;
  }
  return true;
}

// Pairwise intersection property for the maximal cones.
inline std::optional<std::pair<Cone, Cone>> intersection_violation(const Fan& fan) {
  const auto& ms = fan.maximal_cones();
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const auto& a = ms[i];
      const auto& b = ms[j];
      std::vector<bool> as, bs;
      for (RayId r : a.rays()) as.push_back(b.contains(r));
      for (RayId r : b.rays()) bs.push_back(a.contains(r));
      if (cones_overlap_badly(fan.generators_of(a), fan.generators_of(b), as, bs)) return std::make_pair(a, b);
    }
  return std::nullopt;
}

inline bool has_intersection_property(const Fan& fan) { return !intersection_violation(fan).has_value(); }

inline void validate(const Fan& fan) {
  if (auto bad = intersection_violation(fan))
    throw InvariantViolation("fan: cones " + to_string(bad->first) + " and " + to_string(bad->second) +
                             " do not meet in a common face");
}

// Containment plus volume additivity.  Volumes are measured inside each
// maximal cone σ of `sigma` in the coordinates of σ's generators, where the
// simplex cut out by the unit-sum functional has normalized volume 1; a piece
// with generators u contributes |det(coords(u))| / Π (coordinate sum of u).
inline bool is_subdivision_of(const Fan& delta, const Fan& sigma) {
  if (delta.rank() != sigma.rank()) return false;
  std::map<Cone, Rational> volume;
  for (const auto& m : sigma.maximal_cones()) volume[m] = 0;
  for (const auto& d : delta.maximal_cones()) {
    auto dg = delta.generators_of(d);
    bool placed = false;
    for (const auto& m : sigma.maximal_cones()) {
      if (m.dim() != d.dim()) continue;
      auto mg = sigma.generators_of(m);
      IntMatrix scaled;
      Rational denom = 1;
      bool inside = true;
      std::vector<RatVector> coords;
      for (const auto& u : dg) {
        auto x = coordinates(mg, u);
        if (!x) {
          inside = false;
          break;
        }
        Rational s = 0;
        for (const auto& a : *x) {
          if (a < 0) inside = false;
          s += a;
        }
        if (!inside) break;
        coords.push_back(*x);
        denom *= s;
      }
      if (!inside) continue;
      // determinant of the rational coordinate matrix
      Integer l = 1;
      for (const auto& row : coords)
        for (const auto& q : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
      for (const auto& row : coords) {
        LatticeVector r;
        for (const auto& q : row) r.push_back(Rational(q * Rational(l)).get_num());
        scaled.push_back(r);
      }
      Rational det = Rational(abs(determinant(scaled)));
      for (std::size_t i = 0; i < coords.size(); ++i) det /= Rational(l);
      volume[m] += det / denom;
      placed = true;
      break;
    }
    if (!placed) return false;
  }
  for (const auto& [m, v] : volume)
    if (v != 1) return false;
  return true;
}

// Possibly non-simplicial cones over a shared ray table; the listed cones
// are the maximal ones.
struct PolyFan {
  std::size_t rank = 0;
  std::vector<LatticeVector> rays;
  std::vector<std::vector<RayId>> cones;
};

namespace detail {

// Coordinates (indices) on which the projection is injective on span(gens).
inline std::vector<std::size_t> spanning_coordinates(const std::vector<LatticeVector>& gens, std::size_t d) {
  std::vector<std::size_t> sel;
  IntMatrix chosen;
  const std::size_t r = rank(gens);
  for (std::size_t i = 0; i < d && sel.size() < r; ++i) {
    LatticeVector col;
    for (const auto& g : gens) col.push_back(g[i]);
    chosen.push_back(col);
    if (rank(chosen) == chosen.size()) sel.push_back(i);
    else chosen.pop_back();
  }
  return sel;
}

inline std::vector<std::vector<RayId>> cone_facets(const std::vector<RayId>& ids, const std::vector<LatticeVector>& rays) {
  std::vector<LatticeVector> gens;
  for (RayId id : ids) gens.push_back(rays[id]);
  const std::size_t d = rank(gens);
  auto sel = spanning_coordinates(gens, rays.front().size());
  std::vector<LatticeVector> proj;
  for (const auto& g : gens) {
    LatticeVector p;
    for (std::size_t s : sel) p.push_back(g[s]);
    proj.push_back(p);
  }
  std::set<std::vector<RayId>> facets;
  const std::size_t m = ids.size();
  // enumerate (d-1)-subsets
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(d - 1), true);
  std::sort(mask.begin(), mask.end(), std::greater<bool>());
  do {
    std::vector<LatticeVector> sub;
    for (std::size_t i = 0; i < m; ++i)
      if (mask[i]) sub.push_back(proj[i]);
    if (rank(sub) != d - 1) continue;
    auto ker = kernel(sub, d);
    if (ker.size() != 1) continue;
    const auto& l = ker.front();
    int sign = 0;
    bool ok = true;
    std::vector<RayId> on;
    for (std::size_t i = 0; i < m && ok; ++i) {
      int s = sgn(dot(l, proj[i]));
      if (s == 0) {
        on.push_back(ids[i]);
        continue;
      }
      if (sign == 0) sign = s;
      else if (s != sign) ok = false;
    }
    if (ok) facets.insert(on);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return {facets.begin(), facets.end()};
}

inline void pull(const std::vector<RayId>& ids, const std::vector<LatticeVector>& rays,
                 std::vector<std::vector<RayId>>& out) {
  std::vector<LatticeVector> gens;
  for (RayId id : ids) gens.push_back(rays[id]);
  if (independent(gens)) {
    out.push_back(ids);
    return;
  }
  const RayId r = *std::min_element(ids.begin(), ids.end());
  for (const auto& f : cone_facets(ids, rays)) {
    if (std::find(f.begin(), f.end(), r) != f.end()) continue;
    std::vector<std::vector<RayId>> sub;
    pull(f, rays, sub);
    for (auto& t : sub) {
      t.push_back(r);
      std::sort(t.begin(), t.end());
      out.push_back(t);
    }
  }
}

}  // namespace detail

// Pulling triangulation in the global ray order; adds no rays.
inline Fan triangulate(const PolyFan& pf) {
  std::vector<Cone> gens;
  for (const auto& c : pf.cones) {
    std::vector<LatticeVector> g;
    for (RayId id : c) g.push_back(pf.rays.at(id));
    if (!strictly_convex(g)) throw DomainError("triangulate: cone is not strictly convex");
    std::vector<std::vector<RayId>> pieces;
    detail::pull(Cone(c).rays(), pf.rays, pieces);
    for (auto& p : pieces) gens.emplace_back(std::move(p));
  }
  return Fan(pf.rank, pf.rays, gens);
}

inline PolyFan to_polyfan(const Fan& f) {
  PolyFan p{f.rank(), f.rays(), {}};
  for (const auto& m : f.maximal_cones()) p.cones.push_back(m.rays());
  return p;
}

// Ordering by sorted ray vectors, used for deterministic tie-breaking.
inline bool vector_order_less(const Fan& fan, const Cone& a, const Cone& b) {
  return fan.sorted_generators(a) < fan.sorted_generators(b);
}

// The nonzero point of the half-open parallelepiped minimizing (sum of
// coordinates, then the coordinates lexicographically, then the point).
inline std::optional<std::pair<LatticeVector, RatVector>> best_par_point(const std::vector<LatticeVector>& gens) {
  std::optional<std::pair<LatticeVector, RatVector>> best;
  Rational best_sum;
  for (const auto& p : enumerate_par(gens, false)) {
    if (is_zero(p)) continue;
    auto a = *coordinates(gens, p);
    Rational s = 0;
    for (const auto& x : a) s += x;
    if (!best || s < best_sum || (s == best_sum && std::make_pair(a, p) < std::make_pair(best->second, best->first))) {
      best = std::make_pair(p, a);
      best_sum = s;
    }
  }
  return best;
}

struct Desingularization {
  Fan fan;
  std::vector<LatticeVector> inserted;
};

inline Desingularization desingularize(const Fan& input) {
  Desingularization d{input, {}};
  while (true) {
    std::optional<Cone> worst;
    Integer worst_mult = 1;
    for (const auto& m : d.fan.maximal_cones()) {
      Integer mu = multiplicity(d.fan, m);
      if (mu > worst_mult || (mu == worst_mult && mu > 1 && worst && vector_order_less(d.fan, m, *worst))) {
        worst = m;
        worst_mult = mu;
      }
    }
    if (!worst) break;
    auto p = best_par_point(d.fan.generators_of(*worst));
    auto v = primitive(p->first);
    d.fan = star_subdivide(d.fan, v);
    d.inserted.push_back(v);
  }
  return d;
}

}  // namespace toricwf
