#pragma once

#include <functional>
#include <memory>

#include "fan.hpp"

namespace toricwf {

enum class Sign { Plus, Minus };

inline Sign opposite(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
inline const char* to_string(Sign s) { return s == Sign::Plus ? "+" : "-"; }

// The dependence relation of a dependent cone σ = ⟨v_1..v_k⟩.
//   r     : normal coefficients on the primitive projections w_i, with
//           |r_i| = |det(w_1..w̌_i..w_k)| in a basis of span(π(σ)) ∩ N
//           and Σ r_i w_i = 0;
//   lift  : primitive integers c_i with Σ c_i v_i = a·v0, a > 0;
//   m     : π(v_i) = m_i·w_i, so r_i is a positive multiple of c_i·m_i.
struct NormalRelation {
  Cone cone;
  std::vector<Integer> r;
  std::vector<Integer> lift;
  Integer a;
  std::vector<LatticeVector> w;
  std::vector<Integer> m;

  std::size_t index_of(RayId id) const {
    const auto& ids = cone.rays();
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) throw NotFoundError("relation: ray not in cone");
    return static_cast<std::size_t>(it - ids.begin());
  }
  const Integer& coefficient(RayId id) const { return r[index_of(id)]; }

  std::vector<RayId> rays_with(int sign) const {
    std::vector<RayId> out;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (sgn(r[i]) == sign) out.push_back(cone.rays()[i]);
    return out;
  }
  std::vector<RayId> positive() const { return rays_with(1); }
  std::vector<RayId> negative() const { return rays_with(-1); }
  std::vector<RayId> null() const { return rays_with(0); }
  Cone circuit() const {
    std::vector<RayId> ids;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] != 0) ids.push_back(cone.rays()[i]);
    return Cone(std::move(ids));
  }
  // σ₊ / σ₋: the rays with r ≥ 0 / r ≤ 0 (null rays on both sides).
  Cone side(Sign s) const {
    std::vector<RayId> ids;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (s == Sign::Plus ? r[i] >= 0 : r[i] <= 0) ids.push_back(cone.rays()[i]);
    return Cone(std::move(ids));
  }
};

// Normal relation of generators v_i whose span contains v0 exactly once.
inline NormalRelation compute_normal_relation(const Cone& cone, const std::vector<LatticeVector>& v,
                                              const LatticeVector& v0, const QuotientMap& pi) {
  NormalRelation rel;
  rel.cone = cone;
  const std::size_t k = v.size();
  auto cols = v;
  cols.push_back(v0);
  auto ker = integral_nullspace(cols);
  if (ker.size() != 1 || ker[0][k] == 0) throw PreconditionError("normal relation: cone is not dependent");
  auto c = ker[0];
  if (c[k] > 0) c = -c;
  rel.a = -c[k];
  rel.lift.assign(c.begin(), c.begin() + static_cast<long>(k));
  for (const auto& vi : v) {
    auto p = pi.apply(vi);
    if (is_zero(p)) throw DomainError("normal relation: a ray lies on the line of v0");
    rel.m.push_back(content(p));
    rel.w.push_back(primitive(p));
  }
  auto basis = saturation_basis(rel.w, pi.target_rank);
  if (basis.size() + 1 != k) throw InvariantViolation("normal relation: projected span has wrong dimension");
  std::vector<LatticeVector> x;
  for (const auto& wi : rel.w) {
    auto q = coordinates(basis, wi);
    LatticeVector xi;
    for (const auto& t : *q) {
      if (t.get_den() != 1) throw InvariantViolation("normal relation: non-integral coordinates");
      xi.push_back(t.get_num());
    }
    x.push_back(xi);
  }
  rel.r.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<LatticeVector> rows;
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) rows.push_back(x[j]);
    Integer d = determinant(rows);
    rel.r[i] = (i % 2 == 0) ? d : Integer(-d);
  }
  std::size_t ref = 0;
  while (ref < k && rel.lift[ref] == 0) ++ref;
  if (ref == k) throw InvariantViolation("normal relation: empty circuit");
  if (sgn(rel.r[ref]) != sgn(rel.lift[ref]))
    for (auto& t : rel.r) t = -t;
  for (std::size_t i = 0; i < k; ++i)
    if (rel.r[i] * rel.lift[ref] * rel.m[ref] != rel.r[ref] * rel.lift[i] * rel.m[i])
      throw InvariantViolation("normal relation: projected and lifted relations disagree");
  return rel;
}

class CobordismFan {
 public:
  CobordismFan(Fan fan, LatticeVector v0) : fan_(std::move(fan)), v0_(std::move(v0)) {
    if (v0_.size() != fan_.rank()) throw DimensionError("cobordism: v0 rank differs from fan rank");
    if (fan_.rank() < 2) throw DimensionError("cobordism: rank must be at least 2");
    pi_ = quotient_map(v0_);
    build(nullptr);
  }

  // The same cobordism data for a fan whose ray list extends this one's,
  // reusing the relations of cones that survive unchanged.
  CobordismFan refined(Fan fan) const {
    if (fan.rank() != fan_.rank() || fan.rays().size() < fan_.rays().size() ||
        !std::equal(fan_.rays().begin(), fan_.rays().end(), fan.rays().begin()))
      return CobordismFan(std::move(fan), v0_);
    CobordismFan out;
    out.fan_ = std::move(fan);
    out.v0_ = v0_;
    out.pi_ = pi_;
    out.w_ = w_;
    out.m_ = m_;
    out.mult_cache_ = mult_cache_;
    out.build(this);
    return out;
  }

  const Fan& fan() const { return fan_; }
  const LatticeVector& v0() const { return v0_; }
  const QuotientMap& pi() const { return pi_; }
  std::size_t rank() const { return fan_.rank(); }

  bool is_dependent(const Cone& c) const { return relations_.count(c) != 0; }

  const NormalRelation& relation(const Cone& c) const {
    auto it = relations_.find(c);
    if (it == relations_.end()) throw PreconditionError("cone " + to_string(c) + " is not dependent");
    return it->second;
  }

  std::vector<Cone> dependent_cones() const {
    std::vector<Cone> out;
    for (const auto& [c, rel] : relations_) out.push_back(c);
    return out;
  }

  std::vector<Cone> independent_cones() const {
    std::vector<Cone> out;
    for (const auto& c : fan_.cones())
      if (!is_dependent(c)) out.push_back(c);
    return out;
  }

  // Circuits in the order of their sorted ray vectors.
  std::vector<Cone> circuits() const {
    std::set<Cone> s;
    for (const auto& [c, rel] : relations_) s.insert(rel.circuit());
    std::vector<Cone> out(s.begin(), s.end());
    std::sort(out.begin(), out.end(), [&](const Cone& a, const Cone& b) { return vector_order_less(fan_, a, b); });
    return out;
  }

  const LatticeVector& w(RayId id) const { return w_.at(id); }
  const Integer& m(RayId id) const { return m_.at(id); }
  std::vector<LatticeVector> projected(const Cone& c) const {
    std::vector<LatticeVector> out;
    for (RayId id : c.rays()) out.push_back(w_.at(id));
    return out;
  }

  // Multiplicity of π(τ) for an independent cone.
  Integer projected_multiplicity(const Cone& tau) const {
    auto it = mult_cache_->find(tau);
    if (it != mult_cache_->end()) return it->second;
    Integer m = multiplicity(projected(tau));
    mult_cache_->emplace(tau, m);
    return m;
  }

  CobordismFan subfan(const std::set<Cone>& keep) const { return CobordismFan(fan_.restricted(keep), v0_); }

 private:
  CobordismFan() = default;

  void build(const CobordismFan* reuse) {
    for (std::size_t id = w_.size(); id < fan_.rays().size(); ++id) {
      const auto& ray = fan_.ray(id);
      auto p = pi_.apply(ray);
      if (is_zero(p)) throw DomainError("cobordism: ray " + to_string(ray) + " is on the line of v0");
      m_.push_back(content(p));
      w_.push_back(primitive(p));
    }
    for (const auto& mc : fan_.maximal_cones()) {
      if (reuse && reuse->fan_.contains(mc)) {
        // dependence and relations depend only on the ray vectors
        if (reuse->relations_.count(mc))
          for (const auto& f : faces(mc))
            if (auto it = reuse->relations_.find(f); it != reuse->relations_.end()) relations_.insert(*it);
        continue;
      }
      auto g = fan_.generators_of(mc);
      g.push_back(v0_);
      if (independent(g)) continue;
      auto rel = compute_normal_relation(mc, fan_.generators_of(mc), v0_, pi_);
      bool pos = false, neg = false;
      for (const auto& c : rel.lift) {
        pos = pos || c > 0;
        neg = neg || c < 0;
      }
      if (!pos || !neg) throw DomainError("cobordism: cone " + to_string(mc) + " is not π-strictly convex");
      const Cone circ = rel.circuit();
      for (const auto& f : faces(mc)) {
        if (!f.has_face(circ) || relations_.count(f)) continue;
        if (reuse) {
          if (auto it = reuse->relations_.find(f); it != reuse->relations_.end()) {
            relations_.insert(*it);
            continue;
          }
        }
        relations_.emplace(f, f == mc ? rel : compute_normal_relation(f, fan_.generators_of(f), v0_, pi_));
      }
    }
  }

  Fan fan_;
  LatticeVector v0_;
  QuotientMap pi_;
  std::vector<LatticeVector> w_;
  std::vector<Integer> m_;
  std::map<Cone, NormalRelation> relations_;
  // keyed by ray ids, so shared only between fans with a common ray prefix
  std::shared_ptr<std::map<Cone, Integer>> mult_cache_ = std::make_shared<std::map<Cone, Integer>>();
};

enum class ConeClass { Independent, Dependent };

inline ConeClass classify(const Cone& c, const CobordismFan& b) {
  if (!b.fan().contains(c)) throw NotFoundError("classify: cone not in fan");
  return b.is_dependent(c) ? ConeClass::Dependent : ConeClass::Independent;
}

inline Cone find_circuit(const Cone& c, const CobordismFan& b) { return b.relation(c).circuit(); }

inline const NormalRelation& normal_relation(const Cone& c, const CobordismFan& b) { return b.relation(c); }

// Where does p + εv0 (Plus) or p - εv0 (Minus), p interior to the independent
// cone τ, land?  Returns the cone of Σ containing it in its relative interior,
// or nothing if it leaves the support.
inline std::optional<Cone> flow_cone(const CobordismFan& b, const Cone& tau, Sign s) {
  if (b.is_dependent(tau)) throw PreconditionError("flow: cone is dependent");
  for (const auto& mc : b.fan().maximal_cones()) {
    if (!mc.has_face(tau) || !b.is_dependent(mc)) continue;
    const auto& rel = b.relation(mc);
    bool ok = true;
    std::vector<RayId> ids = tau.rays();
    for (std::size_t i = 0; i < mc.rays().size() && ok; ++i) {
      RayId id = mc.rays()[i];
      if (tau.contains(id)) continue;
      int c = sgn(rel.lift[i]);
      if (s == Sign::Minus) c = -c;
      if (c < 0) ok = false;
      else if (c > 0) ids.push_back(id);
    }
    if (ok) return Cone(std::move(ids));
  }
  return std::nullopt;
}

// The circuit F whose fixed locus is the limit of the orbit through O_τ as
// t → 0 (Plus) or t → ∞ (Minus).
inline std::optional<Cone> flow_circuit(const CobordismFan& b, const Cone& tau, Sign s) {
  auto c = flow_cone(b, tau, s);
  if (!c) return std::nullopt;
  return b.relation(*c).circuit();
}

// ∂₊(Σ): independent cones from whose interior a step along +v0 leaves the
// support; ∂₋(Σ) likewise along −v0.
inline std::set<Cone> boundary(const CobordismFan& b, Sign s) {
  std::set<Cone> out;
  for (const auto& c : b.fan().cones()) {
    if (b.is_dependent(c)) continue;
    if (!flow_cone(b, c, s)) out.insert(c);
  }
  return out;
}

inline Fan boundary_plus(const CobordismFan& b) { return b.fan().restricted(boundary(b, Sign::Plus)); }
inline Fan boundary_minus(const CobordismFan& b) { return b.fan().restricted(boundary(b, Sign::Minus)); }

// ∂±(σ) for a single cone: for dependent σ the independent faces missing a
// ray with r_i < 0 (Plus) or r_i > 0 (Minus); every face otherwise.
inline std::set<Cone> cone_boundary(const CobordismFan& b, const Cone& sigma, Sign s) {
  std::set<Cone> out;
  if (!b.is_dependent(sigma)) {
    for (auto& f : faces(sigma)) out.insert(f);
    return out;
  }
  const auto& rel = b.relation(sigma);
  for (auto& f : faces(sigma)) {
    for (std::size_t i = 0; i < rel.r.size(); ++i) {
      int c = sgn(rel.r[i]);
      if (s == Sign::Minus) c = -c;
      if (c < 0 && !f.contains(sigma.rays()[i])) {
        out.insert(f);
        break;
      }
    }
  }
  return out;
}

// π applied to a set of independent cones, rays replaced by primitive images.
inline Fan project_cones(const CobordismFan& b, const std::set<Cone>& cones) {
  std::set<RayId> used;
  for (const auto& c : cones) {
    if (b.is_dependent(c)) throw PreconditionError("project: dependent cone");
    for (RayId r : c.rays()) used.insert(r);
  }
  std::map<RayId, RayId> index;
  std::vector<LatticeVector> rays;
  std::map<LatticeVector, RayId> seen;
  for (RayId r : used) {
    auto [it, fresh] = seen.emplace(b.w(r), rays.size());
    if (fresh) rays.push_back(b.w(r));
    index[r] = it->second;
  }
  std::vector<Cone> gens;
  for (const auto& c : cones) {
    std::vector<RayId> ids;
    for (RayId r : c.rays()) ids.push_back(index[r]);
    Cone pc(ids);
    if (pc.dim() != c.dim()) throw InvariantViolation("project: two rays of a boundary cone share a projection");
    gens.push_back(pc);
  }
  Fan f(b.pi().target_rank, rays, gens);
  if (auto bad = intersection_violation(f))
    throw InvariantViolation("project: image cones " + to_string(bad->first) + " and " + to_string(bad->second) +
                             " overlap");
  return f;
}

inline Fan project_boundary(const CobordismFan& b, Sign s) { return project_cones(b, boundary(b, s)); }

inline LatticeVector ctr(const NormalRelation& rel, Sign s) {
  LatticeVector out(rel.w.front().size(), 0);
  for (std::size_t i = 0; i < rel.r.size(); ++i)
    if (s == Sign::Plus ? rel.r[i] > 0 : rel.r[i] < 0) out = out + rel.w[i];
  return out;
}

inline LatticeVector ctr(const CobordismFan&, const NormalRelation& rel, Sign s) { return ctr(rel, s); }

// Mid(v, σ): the sum of the pullbacks of v to ∂₋(σ) and ∂₊(σ), made primitive.
inline LatticeVector mid(const std::vector<LatticeVector>& gens, const NormalRelation& rel, const LatticeVector& v0,
                         const QuotientMap& pi, const LatticeVector& v) {
  const std::size_t k = gens.size();
  const std::size_t d = v0.size();
  // particular preimage: drop one circuit ray so the projections become independent
  std::size_t drop = 0;
  while (rel.lift[drop] == 0) ++drop;
  std::vector<LatticeVector> pg;
  for (std::size_t i = 0; i < k; ++i)
    if (i != drop) pg.push_back(pi.apply(gens[i]));
  auto x = coordinates(pg, v);
  if (!x) throw DomainError("mid: vector not in the span of π(σ)");
  RatVector beta(k, 0);
  for (std::size_t i = 0, j = 0; i < k; ++i)
    if (i != drop) beta[i] = (*x)[j++];
  // point(t) has σ-coordinates beta + t·lift/a
  std::optional<Rational> lo, hi;
  for (std::size_t i = 0; i < k; ++i) {
    const Integer& c = rel.lift[i];
    if (c == 0) {
      if (beta[i] < 0) throw DomainError("mid: vector not in π(σ)");
      continue;
    }
    Rational bound = -beta[i] * Rational(rel.a) / Rational(c);
    if (c > 0) {
      if (!lo || bound > *lo) lo = bound;
    } else {
      if (!hi || bound < *hi) hi = bound;
    }
  }
  if (!lo || !hi || *lo > *hi) throw DomainError("mid: vector not in π(σ)");
  Rational t = *lo + *hi;
  RatVector p(d, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < d; ++j) p[j] += 2 * beta[i] * Rational(gens[i][j]);
  for (std::size_t j = 0; j < d; ++j) p[j] += t * Rational(v0[j]);
  return primitive(p);
}

inline LatticeVector mid(const CobordismFan& b, const LatticeVector& v, const Cone& sigma) {
  return mid(b.fan().generators_of(sigma), b.relation(sigma), b.v0(), b.pi(), v);
}

inline void require_circuit(const CobordismFan& b, const Cone& d) {
  if (!b.is_dependent(d) || b.relation(d).circuit() != d) throw PreconditionError("not a circuit: " + to_string(d));
}

// F1 < F2 immediately: some orbit has its t → 0 limit in F1 and its t → ∞
// limit in F2.
inline bool immediate_predecessor(const Cone& d1, const Cone& d2, const CobordismFan& b) {
  require_circuit(b, d1);
  require_circuit(b, d2);
  for (const auto& tau : b.independent_cones()) {
    auto up = flow_circuit(b, tau, Sign::Plus);
    if (!up || *up != d1) continue;
    auto down = flow_circuit(b, tau, Sign::Minus);
    if (down && *down == d2) return true;
  }
  return false;
}

// The same relation read off faces: an independent cone containing the
// negative rays of d1 and the positive rays of d2.
inline bool immediate_predecessor_by_faces(const Cone& d1, const Cone& d2, const CobordismFan& b) {
  require_circuit(b, d1);
  require_circuit(b, d2);
  Cone need = Cone(b.relation(d1).negative()).join(Cone(b.relation(d2).positive()));
  for (const auto& c : b.fan().cones())
    if (!b.is_dependent(c) && c.has_face(need)) return true;
  return false;
}

using ChiAssignment = std::map<Cone, long>;

inline ChiAssignment chi(const CobordismFan& b) {
  auto circs = b.circuits();
  std::map<Cone, std::set<Cone>> succ;
  for (const auto& c : circs) succ[c];
  for (const auto& tau : b.independent_cones()) {
    auto up = flow_circuit(b, tau, Sign::Plus);
    auto down = flow_circuit(b, tau, Sign::Minus);
    if (up && down) succ[*up].insert(*down);
  }
  ChiAssignment out;
  std::map<Cone, int> state;
  std::function<long(const Cone&)> longest_to;
  std::map<Cone, std::set<Cone>> pred;
  for (const auto& [a, ss] : succ)
    for (const auto& s : ss) pred[s].insert(a);
  longest_to = [&](const Cone& c) -> long {
    if (state[c] == 2) return out[c];
    if (state[c] == 1) throw NotCollapsibleError("chi: the predecessor relation has a cycle");
    state[c] = 1;
    long best = 0;
    for (const auto& p : pred[c]) best = std::max(best, longest_to(p) + 1);
    state[c] = 2;
    out[c] = best;
    return best;
  };
  for (const auto& c : circs) longest_to(c);
  return out;
}

struct ElementaryPiece {
  long value;
  CobordismFan fan;
};

// B_a = B minus the orbits flowing (t → ∞) into circuits with χ < a and
// (t → 0) into circuits with χ > a, fixed loci of other levels included.
inline std::vector<ElementaryPiece> elementary_decomposition(const CobordismFan& b, const ChiAssignment& x) {
  std::set<long> values;
  for (const auto& [c, v] : x) values.insert(v);
  std::map<Cone, std::pair<std::optional<Cone>, std::optional<Cone>>> flows;
  for (const auto& tau : b.independent_cones())
    flows[tau] = {flow_circuit(b, tau, Sign::Plus), flow_circuit(b, tau, Sign::Minus)};
  std::vector<ElementaryPiece> out;
  for (long a : values) {
    std::set<Cone> keep;
    for (const auto& c : b.fan().cones()) {
      bool removed;
      if (b.is_dependent(c)) {
        removed = x.at(b.relation(c).circuit()) != a;
      } else {
        const auto& [up, down] = flows.at(c);
        removed = (down && x.at(*down) < a) || (up && x.at(*up) > a);
      }
      if (!removed) keep.insert(c);
    }
    for (const auto& c : keep)
      for (const auto& f : faces(c))
        if (!keep.count(f)) throw InvariantViolation("elementary piece is not face-closed");
    out.push_back({a, b.subfan(keep)});
  }
  return out;
}

// Fan-level checks that construction skips: the boundary images are fans.
inline void validate(const CobordismFan& b) {
  validate(b.fan());
  project_boundary(b, Sign::Plus);
  project_boundary(b, Sign::Minus);
}

}  // namespace toricwf
