#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <tuple>
#include <variant>

#include "cobordism.hpp"

namespace toricwf {

// n of a cone: |det π(τ)| for independent τ, the maximum over independent
// faces for dependent cones (which is max |r_i| for a normal relation).
inline Integer cone_n(const Cone& c, const CobordismFan& b) {
  if (!b.is_dependent(c)) return b.projected_multiplicity(c);
  Integer n = 0;
  for (const auto& r : b.relation(c).r)
    if (abs(r) > n) n = abs(r);
  return n;
}

inline bool is_pi_nonsingular(const Cone& c, const CobordismFan& b) { return cone_n(c, b) == 1; }

inline bool is_pi_nonsingular_fan(const CobordismFan& b) {
  for (const auto& c : b.fan().maximal_cones())
    if (!is_pi_nonsingular(c, b)) return false;
  return true;
}

struct ConeTypeReport {
  Cone cone;
  Integer n;
  int type_index = 0;
  Sign sgn = Sign::Plus;
  std::pair<Integer, int> inv;
  std::vector<Integer> positive;  // r_1 ≥ … ≥ r_k > 0
  std::vector<Integer> negative;  // -r_{k+1} ≥ … ≥ -r_{k+l} > 0
};

inline ConeTypeReport type_from_relation(const Cone& c, const std::vector<Integer>& r) {
  ConeTypeReport t;
  t.cone = c;
  for (const auto& x : r) {
    if (x > 0) t.positive.push_back(x);
    if (x < 0) t.negative.push_back(-x);
  }
  if (t.positive.empty() || t.negative.empty()) throw PreconditionError("cone_type: relation has only one sign");
  std::sort(t.positive.rbegin(), t.positive.rend());
  std::sort(t.negative.rbegin(), t.negative.rend());
  const Integer& r1 = t.positive.front();
  const Integer& s1 = t.negative.front();
  const std::size_t k = t.positive.size(), l = t.negative.size();
  t.n = std::max(r1, s1);
  t.sgn = (r1 > s1 || (r1 == s1 && l >= 2)) ? Sign::Plus : Sign::Minus;
  if (r1 == s1) {
    if (k >= 2 && l >= 2) t.type_index = 1;
    else if (k == 1 && l == 1) t.type_index = 4;
    else t.type_index = 2;  // k = 1, l ≥ 2 (+) or k ≥ 2, l = 1 (−)
  } else {
    // the longer side carries n: (n,*;*) or its mirror is type 3, (n;*) or its mirror type 5
    std::size_t big = r1 > s1 ? k : l;
    t.type_index = big >= 2 ? 3 : 5;
  }
  t.inv = {t.n, -t.type_index};
  return t;
}

inline ConeTypeReport cone_type(const Cone& c, const CobordismFan& b) {
  if (!b.is_dependent(c)) throw PreconditionError("cone_type: cone " + to_string(c) + " is independent");
  return type_from_relation(c, b.relation(c).r);
}

// Centers of the two sanctioned kinds, as seen from one dependent cone.
//   MidCenter: Mid(Ctr_side(δ), δ).
//   ParCenter: the pullback of w = Σ α_i w_i, α given on the rays of δ and
//              supported on a codefinite face.
struct MidCenter {
  Sign side;
};
struct ParCenter {
  RatVector alpha;
};
using CenterMode = std::variant<MidCenter, ParCenter>;

// Normal relation of the child δ_{i0} (ray i0 replaced by the new ray) from
// the parent's normal relation.  Entry i0 of the result is the coefficient of
// the new ray; other entries keep their positions.
inline std::vector<Integer> update_relation_after_subdivision(const NormalRelation& rel, std::size_t i0,
                                                              const CenterMode& mode) {
  const std::size_t k = rel.r.size();
  if (i0 >= k) throw PreconditionError("update: omitted index out of range");
  const std::size_t d = rel.w.front().size();
  std::vector<Rational> out(k, 0);
  int flip = 1;
  if (const auto* mc = std::get_if<MidCenter>(&mode)) {
    if (mc->side == Sign::Minus) flip = -1;
    std::vector<Rational> r(k);
    for (std::size_t i = 0; i < k; ++i) r[i] = flip * rel.r[i];
    LatticeVector ctr_sum(d, 0);
    for (std::size_t i = 0; i < k; ++i)
      if (r[i] > 0) ctr_sum = ctr_sum + rel.w[i];
    const Rational mw = content(ctr_sum);
    const Rational& ri0 = r[i0];
    if (ri0 == 0) throw PreconditionError("update: a null ray is not replaced by a Mid center");
    for (std::size_t i = 0; i < k; ++i) {
      if (i == i0) continue;
      if (ri0 > 0) out[i] = r[i] > 0 ? Rational((r[i] - ri0) / mw) : Rational(r[i] / mw);
      else out[i] = r[i] > 0 ? Rational(-ri0 / mw) : Rational(0);
    }
    out[i0] = ri0;
  } else {
    const auto& alpha = std::get<ParCenter>(mode).alpha;
    if (alpha.size() != k) throw PreconditionError("update: α has the wrong length");
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (alpha[i] < 0) throw PreconditionError("update: negative α");
      if (alpha[i] == 0) continue;
      pos = pos || rel.r[i] > 0;
      neg = neg || rel.r[i] < 0;
    }
    if (pos && neg) throw PreconditionError("update: center face is not codefinite");
    if (alpha[i0] == 0) throw PreconditionError("update: omitted ray is not in the center face");
    if (neg) flip = -1;
    RatVector wpar(d, 0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < d; ++j) wpar[j] += alpha[i] * Rational(rel.w[i][j]);
    LatticeVector wi;
    for (const auto& x : wpar) {
      if (x.get_den() != 1) throw PreconditionError("update: Σ α_i w_i is not a lattice point");
      wi.push_back(x.get_num());
    }
    const Rational g = content(wi);
    const Rational ri0 = flip * rel.r[i0];
    for (std::size_t i = 0; i < k; ++i)
      if (i != i0) out[i] = (alpha[i0] * Rational(flip * rel.r[i]) - alpha[i] * ri0) / g;
    out[i0] = ri0;
  }
  std::vector<Integer> res(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (out[i].get_den() != 1) throw PreconditionError("update: formula produced a non-integral coefficient");
    res[i] = flip * out[i].get_num();
  }
  return res;
}

// Compare the update formulas with the actual relations of the children of
// one dependent parent δ ⊇ τ after subdividing at a center interior to τ
// whose primitive projection is pv.
inline std::size_t check_children(const NormalRelation& rel, const Cone& tau, bool tau_dependent,
                                  const LatticeVector& pv, const std::vector<LatticeVector>& tau_w, RayId new_id,
                                  const std::function<const NormalRelation&(const Cone&)>& child_relation) {
  const Cone& delta = rel.cone;
  CenterMode mode;
  if (tau_dependent) {
    if (pv == primitive(ctr(rel, Sign::Plus))) mode = MidCenter{Sign::Plus};
    else if (pv == primitive(ctr(rel, Sign::Minus))) mode = MidCenter{Sign::Minus};
    else throw InvariantViolation("cross-check: dependent center is not a Mid center");
  } else {
    auto a = coordinates(tau_w, pv);
    if (!a) throw InvariantViolation("cross-check: center outside the span of its face");
    RatVector alpha(delta.dim(), 0);
    for (std::size_t j = 0; j < tau.dim(); ++j) alpha[rel.index_of(tau.rays()[j])] = (*a)[j];
    mode = ParCenter{alpha};
  }
  std::size_t checked = 0;
  for (std::size_t i0 = 0; i0 < delta.dim(); ++i0) {
    RayId old = delta.rays()[i0];
    if (!tau.contains(old)) continue;
    auto predicted = update_relation_after_subdivision(rel, i0, mode);
    Cone child = delta.without(old).with(new_id);
    std::vector<Integer> expect;
    for (std::size_t i = 0; i < delta.dim(); ++i)
      if (i != i0) expect.push_back(predicted[i]);
    expect.push_back(predicted[i0]);
    if (expect != child_relation(child).r)
      throw InvariantViolation("cross-check: relation of " + to_string(child) + " differs from the update formula");
    ++checked;
  }
  return checked;
}

// Recompute every child relation after a subdivision at v and compare with
// the formulas.  Returns the number of child cones checked.
inline std::size_t cross_check_relation_updates(const CobordismFan& before, const CobordismFan& after,
                                                const LatticeVector& v, RayId new_id) {
  auto tau = locate(before.fan(), v);
  if (!tau) throw PreconditionError("cross-check: center outside the support");
  const auto pv = primitive(before.pi().apply(v));
  std::size_t checked = 0;
  for (const auto& delta : before.dependent_cones()) {
    if (!delta.has_face(*tau)) continue;
    checked += check_children(before.relation(delta), *tau, before.is_dependent(*tau), pv, before.projected(*tau),
                              new_id, [&](const Cone& c) -> const NormalRelation& { return after.relation(c); });
  }
  return checked;
}

enum class CenterKind { Mid, Par };

inline const char* to_string(CenterKind k) { return k == CenterKind::Mid ? "mid" : "par"; }

struct SubdivisionRecord {
  int step;
  Integer n;
  int type;  // 0 for an independent cone
  CenterKind kind;
  LatticeVector center;
  std::vector<LatticeVector> cone;
};

struct PiDesingOptions {
  bool cross_check = false;
  std::size_t max_subdivisions = 1000000;
  std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt;
};

struct PiDesingularization {
  CobordismFan fan;
  std::vector<SubdivisionRecord> log;
};

// (n, number of type-1..5 dependent n-cones, number of independent n-cones)
using DesingMeasure = std::array<Integer, 7>;

inline Integer global_n(const CobordismFan& b) {
  Integer n = 1;
  for (const auto& c : b.independent_cones())
    if (!c.empty()) n = std::max(n, b.projected_multiplicity(c));
  return n;
}

inline DesingMeasure desing_measure(const CobordismFan& b) {
  DesingMeasure m{};
  m[0] = global_n(b);
  for (const auto& c : b.dependent_cones()) {
    auto t = cone_type(c, b);
    if (t.n == m[0]) m[t.type_index] += 1;
  }
  for (const auto& c : b.independent_cones())
    if (!c.empty() && b.projected_multiplicity(c) == m[0]) m[6] += 1;
  return m;
}

namespace detail {

// Mutable fan state for the resolution loop.  Subdivisions touch only the
// star of the center; cones are bucketed by n and type so the next target and
// the step measure are cheap to read.
class Desingularizer {
 public:
  Desingularizer(const CobordismFan& b, PiDesingOptions opt)
      : rank_(b.rank()), v0_(b.v0()), pi_(b.pi()), rays_(b.fan().rays()), opt_(opt) {
    incidence_.resize(rays_.size());
    for (RayId id = 0; id < rays_.size(); ++id) {
      w_.push_back(b.w(id));
      m_.push_back(b.m(id));
    }
    for (const auto& c : b.fan().cones()) {
      if (c.empty()) continue;
      add(c, b.is_dependent(c) ? &b.relation(c) : nullptr);
    }
  }

  PiDesingularization run() {
    auto before = measure();
    while (before[0] > 1) {
      step(before[0]);
      auto after = measure();
      if (!(after < before)) throw InvariantViolation("pi_desingularize: step measure did not decrease");
      before = after;
    }
    return finish();
  }

  PiDesingularization finish() const {
    Fan f = Fan::from_cone_set(rank_, rays_, cones_);
    return {CobordismFan(std::move(f), v0_), log_};
  }

  DesingMeasure measure() const {
    DesingMeasure m{};
    m[0] = 1;
    if (!indep_.empty()) m[0] = indep_.rbegin()->first;
    if (auto it = dep_count_.find(m[0]); it != dep_count_.end())
      for (int t = 1; t <= 5; ++t) m[t] = it->second[t];
    if (auto it = indep_.find(m[0]); it != indep_.end()) m[6] = it->second.size();
    return m;
  }

  void make_codefinite(const Cone& tau, int step) {
    while (true) {
      std::optional<std::tuple<int, Integer, std::vector<LatticeVector>, Cone>> pick;
      for (const auto& delta : star(tau)) {
        auto it = rel_.find(delta);
        if (it == rel_.end()) continue;
        const auto& rel = it->second;
        bool pos = false, neg = false;
        for (RayId id : tau.rays()) {
          pos = pos || rel.coefficient(id) > 0;
          neg = neg || rel.coefficient(id) < 0;
        }
        if (!pos || !neg) continue;
        const auto& t = type_.at(delta);
        int group = (t.type_index == 1 || t.type_index == 3) ? 0 : (t.type_index == 2 || t.type_index == 5) ? 1 : 2;
        std::tuple<int, Integer, std::vector<LatticeVector>, Cone> cand{group, -t.n, key(delta), delta};
        if (!pick || cand < *pick) pick = std::move(cand);
      }
      if (!pick) return;
      subdivide_mid(std::get<3>(*pick), step);
    }
  }

  bool has_cone(const Cone& c) const { return cones_.count(c) != 0; }

 private:
  std::vector<LatticeVector> key(const Cone& c) const {
    std::vector<LatticeVector> g;
    for (RayId id : c.rays()) g.push_back(rays_[id]);
    std::sort(g.begin(), g.end());
    return g;
  }

  std::vector<LatticeVector> gens(const Cone& c) const {
    std::vector<LatticeVector> g;
    for (RayId id : c.rays()) g.push_back(rays_[id]);
    return g;
  }

  std::vector<LatticeVector> projected(const Cone& c) const {
    std::vector<LatticeVector> g;
    for (RayId id : c.rays()) g.push_back(w_[id]);
    return g;
  }

  // Cones containing τ.
  std::vector<Cone> star(const Cone& tau) const {
    const std::set<Cone>* smallest = nullptr;
    for (RayId id : tau.rays())
      if (!smallest || incidence_[id].size() < smallest->size()) smallest = &incidence_[id];
    std::vector<Cone> out;
    for (const auto& c : *smallest)
      if (c.has_face(tau)) out.push_back(c);
    return out;
  }

  void add(const Cone& c, const NormalRelation* known) {
    cones_.insert(c);
    for (RayId id : c.rays()) incidence_[id].insert(c);
    auto g = gens(c);
    g.push_back(v0_);
    if (independent(g)) {
      Integer n = multiplicity(projected(c));
      indep_[n].insert({key(c), c});
      mult_.emplace(c, n);
      return;
    }
    const auto& rel = rel_.emplace(c, known ? *known : compute_normal_relation(c, gens(c), v0_, pi_)).first->second;
    auto t = type_from_relation(c, rel.r);
    dep_[t.n].insert({t.type_index, key(c), c});
    auto& counts = dep_count_[t.n];
    counts[t.type_index] += 1;
    type_.emplace(c, std::move(t));
  }

  void remove(const Cone& c) {
    cones_.erase(c);
    for (RayId id : c.rays()) incidence_[id].erase(c);
    if (auto it = mult_.find(c); it != mult_.end()) {
      auto b = indep_.find(it->second);
      b->second.erase({key(c), c});
      if (b->second.empty()) indep_.erase(b);
      mult_.erase(it);
      return;
    }
    const auto& t = type_.at(c);
    auto b = dep_.find(t.n);
    b->second.erase({t.type_index, key(c), c});
    if (b->second.empty()) dep_.erase(b);
    dep_count_[t.n][t.type_index] -= 1;
    type_.erase(c);
    rel_.erase(c);
  }

  // Star subdivision at v, interior to the cone tau of the current fan.
  void subdivide(const LatticeVector& v, const Cone& tau, int step, const Integer& n, int type, CenterKind kind,
                 const Cone& target) {
    if (++count_ > opt_.max_subdivisions) throw LimitExceeded("pi_desingularize: subdivision bound exceeded");
    if (opt_.deadline && std::chrono::steady_clock::now() > *opt_.deadline)
      throw LimitExceeded("pi_desingularize: deadline passed");
    if (!cones_.count(tau)) throw InvariantViolation("pi_desingularize: center face is not in the fan");
    auto coords = coordinates(gens(tau), v);
    if (!coords) throw InvariantViolation("pi_desingularize: center outside its face");
    for (const auto& x : *coords)
      if (x <= 0) throw InvariantViolation("pi_desingularize: center not interior to its face");
    log_.push_back({step, n, type, kind, v, key(target)});

    auto p = pi_.apply(v);
    if (is_zero(p)) throw InvariantViolation("pi_desingularize: center on the line of v0");
    const RayId nid = rays_.size();
    rays_.push_back(v);
    m_.push_back(content(p));
    w_.push_back(primitive(p));
    incidence_.emplace_back();

    auto affected = star(tau);
    std::vector<NormalRelation> parents;
    if (opt_.cross_check)
      for (const auto& c : affected)
        if (auto it = rel_.find(c); it != rel_.end()) parents.push_back(it->second);
    std::set<Cone> fresh;
    for (const auto& c : affected)
      for (const auto& f : faces(c))
        if (!f.has_face(tau)) fresh.insert(f.with(nid));
    for (const auto& c : affected) remove(c);
    for (const auto& c : fresh) add(c, nullptr);

    if (opt_.cross_check) {
      const bool tau_dependent = rel_tau_dependent(tau);
      for (const auto& rel : parents)
        check_children(rel, tau, tau_dependent, w_[nid], projected(tau), nid,
                       [&](const Cone& c) -> const NormalRelation& { return rel_.at(c); });
    }
  }

  bool rel_tau_dependent(const Cone& tau) const {
    auto g = gens(tau);
    g.push_back(v0_);
    return !independent(g);
  }

  void subdivide_mid(const Cone& delta, int step) {
    const auto& rel = rel_.at(delta);
    auto t = type_.at(delta);
    auto v = mid(gens(delta), rel, v0_, pi_, ctr(rel, t.sgn));
    subdivide(v, rel.circuit(), step, t.n, t.type_index, CenterKind::Mid, delta);
  }

  // Pull back the best par point of π(face) and subdivide there, after making
  // its support codefinite.
  void subdivide_par(const Cone& face, int step, const Integer& n, int type, const Cone& target) {
    auto best = best_par_point(projected(face));
    if (!best) throw InvariantViolation("pi_desingularize: singular face has no par point");
    const auto& alpha = best->second;
    RatVector p(rank_, 0);
    std::vector<RayId> support;
    for (std::size_t i = 0; i < face.dim(); ++i) {
      if (alpha[i] == 0) continue;
      RayId id = face.rays()[i];
      support.push_back(id);
      for (std::size_t j = 0; j < rank_; ++j) p[j] += alpha[i] * Rational(rays_[id][j]) / Rational(m_[id]);
    }
    auto v = primitive(p);
    Cone tau0(support);
    make_codefinite(tau0, step);
    subdivide(v, tau0, step, n, type, CenterKind::Par, target);
  }

  void step(const Integer& n) {
    if (auto it = dep_.find(n); it != dep_.end() && !it->second.empty()) {
      const Cone delta = std::get<2>(*it->second.begin());
      const auto t = type_.at(delta);
      if (t.type_index == 1 || t.type_index == 3) {
        subdivide_mid(delta, t.type_index);
      } else {
        Cone face = rel_.at(delta).side(opposite(t.sgn));
        subdivide_par(face, t.type_index, n, t.type_index, delta);
      }
      return;
    }
    auto it = indep_.find(n);
    if (it == indep_.end() || it->second.empty()) throw InvariantViolation("pi_desingularize: no n-cone found");
    const Cone tau = it->second.begin()->second;
    subdivide_par(tau, 6, n, 0, tau);
  }

  std::size_t rank_;
  LatticeVector v0_;
  QuotientMap pi_;
  std::vector<LatticeVector> rays_;
  std::vector<LatticeVector> w_;
  std::vector<Integer> m_;
  PiDesingOptions opt_;
  std::set<Cone> cones_;
  std::vector<std::set<Cone>> incidence_;
  std::map<Cone, NormalRelation> rel_;
  std::map<Cone, ConeTypeReport> type_;
  std::map<Cone, Integer> mult_;
  std::map<Integer, std::set<std::tuple<int, std::vector<LatticeVector>, Cone>>> dep_;
  std::map<Integer, std::array<long, 6>> dep_count_;
  std::map<Integer, std::set<std::pair<std::vector<LatticeVector>, Cone>>> indep_;
  std::vector<SubdivisionRecord> log_;
  std::size_t count_ = 0;
};

}  // namespace detail

inline PiDesingularization pi_desingularize(const CobordismFan& b, PiDesingOptions opt = {}) {
  return detail::Desingularizer(b, opt).run();
}

// Make τ a codefinite face of every dependent cone containing it.
inline PiDesingularization make_codefinite(const CobordismFan& b, const Cone& tau, PiDesingOptions opt = {}) {
  if (!b.fan().contains(tau) || b.is_dependent(tau)) throw PreconditionError("make_codefinite: need an independent cone");
  detail::Desingularizer d(b, opt);
  d.make_codefinite(tau, 0);
  return d.finish();
}

}  // namespace toricwf
