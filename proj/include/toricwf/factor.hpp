#pragma once

#include "pidesing.hpp"

namespace toricwf {

// Monomial ideal data: for each maximal cone of the base fan, integral
// functionals F_j whose monomials x^{F_j} generate the ideal on that chart.
struct MonomialIdealData {
  std::map<Cone, std::vector<LatticeVector>> functionals;
};

// The same generators on every maximal cone (e.g. an ideal on affine space).
inline MonomialIdealData uniform_ideal(const Fan& fan, const std::vector<LatticeVector>& fs) {
  MonomialIdealData out;
  for (const auto& m : fan.maximal_cones()) out.functionals[m] = fs;
  return out;
}

inline Integer ord_on_cone(const std::vector<LatticeVector>& fs, const LatticeVector& p) {
  if (fs.empty()) throw PreconditionError("ideal: no functionals on a cone");
  Integer best = dot(fs.front(), p);
  for (const auto& f : fs) best = std::min(best, Integer(dot(f, p)));
  return best;
}

inline void validate_ideal(const Fan& fan, const MonomialIdealData& ideal) {
  for (const auto& m : fan.maximal_cones()) {
    auto it = ideal.functionals.find(m);
    if (it == ideal.functionals.end() || it->second.empty())
      throw PreconditionError("ideal: no functionals on " + to_string(m));
    for (const auto& f : it->second) {
      if (f.size() != fan.rank()) throw DimensionError("ideal: functional rank mismatch");
      for (const auto& g : fan.generators_of(m))
        if (dot(f, g) < 0) throw PreconditionError("ideal: functional " + to_string(f) + " negative on " + to_string(m));
    }
  }
  for (const auto& [c, fs] : ideal.functionals)
    if (std::find(fan.maximal_cones().begin(), fan.maximal_cones().end(), c) == fan.maximal_cones().end())
      throw PreconditionError("ideal: " + to_string(c) + " is not a maximal cone");
  const auto& ms = fan.maximal_cones();
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      std::vector<RayId> common;
      std::set_intersection(ms[i].rays().begin(), ms[i].rays().end(), ms[j].rays().begin(), ms[j].rays().end(),
                            std::back_inserter(common));
      for (const auto& f : faces(Cone(common))) {
        if (f.empty()) continue;
        LatticeVector p(fan.rank(), 0);
        for (const auto& g : fan.generators_of(f)) p = p + g;
        if (ord_on_cone(ideal.functionals.at(ms[i]), p) != ord_on_cone(ideal.functionals.at(ms[j]), p))
          throw PreconditionError("ideal: inconsistent on the shared face " + to_string(f));
      }
    }
}

inline Integer ord(const Fan& fan, const MonomialIdealData& ideal, const LatticeVector& p) {
  for (const auto& m : fan.maximal_cones()) {
    auto x = coordinates(fan.generators_of(m), p);
    if (!x) continue;
    if (std::all_of(x->begin(), x->end(), [](const Rational& a) { return a >= 0; }))
      return ord_on_cone(ideal.functionals.at(m), p);
  }
  throw DomainError("ord: point outside the support");
}

namespace detail {

// Extreme rays, in σ-coordinates, of {λ ≥ 0 : A λ ≥ 0}.
inline std::vector<LatticeVector> extreme_rays(const IntMatrix& ineq, std::size_t k) {
  IntMatrix all = ineq;
  for (std::size_t i = 0; i < k; ++i) all.push_back(unit_vector(k, i));
  auto ok = [&](const LatticeVector& u) {
    for (const auto& row : all)
      if (dot(row, u) < 0) return false;
    return !is_zero(u);
  };
  std::set<LatticeVector> out;
  if (k == 1) {
    if (ok(unit_vector(1, 0))) out.insert(unit_vector(1, 0));
    return {out.begin(), out.end()};
  }
  const std::size_t m = all.size();
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(k - 1), true);
  do {
    IntMatrix sub;
    for (std::size_t i = 0; i < m; ++i)
      if (mask[i]) sub.push_back(all[i]);
    if (rank(sub) != k - 1) continue;
    auto ker = kernel(sub, k);
    if (ker.size() != 1) continue;
    auto u = primitive(ker.front());
    if (ok(u)) out.insert(u);
    LatticeVector neg = u;
    for (auto& x : neg) x = -x;
    if (ok(neg)) out.insert(neg);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return {out.begin(), out.end()};
}

}  // namespace detail

// The coarsest subdivision on which ord is linear: each maximal cone is cut
// into the full-dimensional regions where one functional attains the minimum.
inline PolyFan ord_subdivision(const Fan& fan, const MonomialIdealData& ideal) {
  validate_ideal(fan, ideal);
  PolyFan out{fan.rank(), {}, {}};
  std::map<LatticeVector, RayId> index;
  auto ray_id = [&](const LatticeVector& v) {
    auto [it, fresh] = index.emplace(v, out.rays.size());
    if (fresh) out.rays.push_back(v);
    return it->second;
  };
  std::set<std::vector<RayId>> seen;
  for (const auto& m : fan.maximal_cones()) {
    const auto gens = fan.generators_of(m);
    const std::size_t k = gens.size();
    std::set<LatticeVector> restricted;
    for (const auto& f : ideal.functionals.at(m)) {
      LatticeVector r(k);
      for (std::size_t i = 0; i < k; ++i) r[i] = dot(f, gens[i]);
      restricted.insert(r);
    }
    for (const auto& fi : restricted) {
      IntMatrix ineq;
      for (const auto& fj : restricted)
        if (fj != fi) ineq.push_back(fj - fi);
      auto ext = detail::extreme_rays(ineq, k);
      if (rank(ext) != k) continue;
      std::vector<RayId> ids;
      for (const auto& lam : ext) {
        LatticeVector p(fan.rank(), 0);
        for (std::size_t i = 0; i < k; ++i)
          if (lam[i] != 0) p = p + lam[i] * gens[i];
        ids.push_back(ray_id(primitive(p)));
      }
      std::sort(ids.begin(), ids.end());
      if (seen.insert(ids).second) out.cones.push_back(ids);
    }
  }
  return out;
}

inline bool polyfan_is_simplicial(const PolyFan& pf) {
  for (const auto& c : pf.cones) {
    std::vector<LatticeVector> g;
    for (RayId id : c) g.push_back(pf.rays[id]);
    if (!independent(g)) return false;
  }
  return true;
}

// I_{val(v),a} on every chart, with a divisible enough that the minimizing
// functionals are integral.  Charts not containing v get the unit ideal.
struct ValuationIdeal {
  MonomialIdealData ideal;
  Integer a;
};

inline ValuationIdeal valuation_ideal(const Fan& fan, const LatticeVector& v) {
  if (!in_support(fan, v)) throw DomainError("valuation ideal: " + to_string(v) + " is outside the support");
  const std::size_t d = fan.rank();
  struct Chart {
    Cone cone;
    std::vector<RatVector> duals;  // e_j^* / c_j for the rays of the face carrying v
  };
  std::vector<Chart> charts;
  Integer a = 1;
  for (const auto& m : fan.maximal_cones()) {
    auto gens = fan.generators_of(m);
    auto x = coordinates(gens, v);
    Chart ch{m, {}};
    if (x && std::all_of(x->begin(), x->end(), [](const Rational& c) { return c >= 0; })) {
      // complete σ's rays to a basis and invert
      IntMatrix basis = gens;
      for (std::size_t i = 0; i < d && basis.size() < d; ++i) {
        basis.push_back(unit_vector(d, i));
        if (!independent(basis)) basis.pop_back();
      }
      for (std::size_t j = 0; j < gens.size(); ++j) {
        if ((*x)[j] == 0) continue;
        RatVector dual(d);
        for (std::size_t t = 0; t < d; ++t) {
          auto e = *coordinates(basis, unit_vector(d, t));
          dual[t] = e[j] / (*x)[j];
          mpz_lcm(a.get_mpz_t(), a.get_mpz_t(), dual[t].get_den_mpz_t());
        }
        ch.duals.push_back(dual);
      }
    }
    charts.push_back(std::move(ch));
  }
  ValuationIdeal out{{}, a};
  for (const auto& ch : charts) {
    auto& fs = out.ideal.functionals[ch.cone];
    if (ch.duals.empty()) fs.push_back(LatticeVector(d, 0));
    for (const auto& dual : ch.duals) {
      LatticeVector f(d);
      for (std::size_t t = 0; t < d; ++t) f[t] = Rational(dual[t] * Rational(a)).get_num();
      fs.push_back(f);
    }
  }
  return out;
}

// ⟨v⟩·Σ.  In test mode the subdivision is also computed as the ord
// subdivision of I_{val(v),a} and the two are compared.
inline Fan valuation_ideal_subdivision(const Fan& fan, const LatticeVector& v, bool test_mode = false) {
  if (v.size() != fan.rank()) throw DimensionError("valuation ideal: rank mismatch");
  if (is_zero(v) || !in_support(fan, v)) throw DomainError("valuation ideal: " + to_string(v) + " is outside the support");
  Fan direct = star_subdivide(fan, primitive(v));
  if (test_mode) {
    auto vi = valuation_ideal(fan, v);
    auto pf = ord_subdivision(fan, vi.ideal);
    if (!polyfan_is_simplicial(pf)) throw InvariantViolation("valuation ideal: ord subdivision is not simplicial");
    if (!(triangulate(pf) == direct))
      throw InvariantViolation("valuation ideal: ord subdivision differs from the star subdivision at " + to_string(v));
  }
  return direct;
}

namespace detail {

// Drop rays not used by any cone.
inline Fan compact(const Fan& f) {
  auto used = f.used_rays();
  std::map<RayId, RayId> index;
  std::vector<LatticeVector> rays;
  for (RayId r : used) {
    index[r] = rays.size();
    rays.push_back(f.ray(r));
  }
  std::set<Cone> cones;
  for (const auto& c : f.cones()) {
    std::vector<RayId> ids;
    for (RayId r : c.rays()) ids.push_back(index.at(r));
    cones.insert(Cone(ids));
  }
  return Fan::from_cone_set(f.rank(), std::move(rays), std::move(cones));
}

inline std::optional<Cone> find_cone(const Fan& f, const std::vector<LatticeVector>& gens) {
  std::vector<RayId> ids;
  for (const auto& g : gens) {
    auto id = f.find_ray(g);
    if (!id) return std::nullopt;
    ids.push_back(*id);
  }
  Cone c(ids);
  if (c.dim() != gens.size() || !f.contains(c)) return std::nullopt;
  return c;
}

// Every maximal cone of `fine` lies in some cone of the polyhedral fan, and
// they have the same rays.
inline bool triangulates(const Fan& fine, const PolyFan& pf) {
  std::set<LatticeVector> a(pf.rays.begin(), pf.rays.end());
  std::set<LatticeVector> b;
  for (RayId r : fine.used_rays()) b.insert(fine.ray(r));
  if (a != b) return false;
  for (const auto& m : fine.maximal_cones()) {
    bool inside = false;
    for (const auto& c : pf.cones) {
      std::vector<LatticeVector> g;
      for (RayId id : c) g.push_back(pf.rays[id]);
      if (cone_contains(g, fine.generators_of(m))) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

}  // namespace detail

// The cobordism of the blow-up of the ideal: the fan of base × A¹ cut by
// ord(p, t) = min(ord_I(p), t), minus the cones through e_{n+1}.
inline CobordismFan build_cobordism(const Fan& base, const MonomialIdealData& ideal) {
  if (!is_nonsingular_fan(base)) throw PreconditionError("build_cobordism: base fan must be nonsingular");
  validate_ideal(base, ideal);
  const std::size_t d = base.rank();
  auto lift = [d](const LatticeVector& v, long t) {
    LatticeVector out = v;
    out.resize(d + 1);
    out[d] = t;
    return out;
  };
  std::vector<LatticeVector> rays;
  for (const auto& r : base.rays()) rays.push_back(lift(r, 0));
  const RayId e = rays.size();
  rays.push_back(unit_vector(d + 1, d));
  std::vector<Cone> gens;
  MonomialIdealData lifted;
  for (const auto& m : base.maximal_cones()) {
    Cone c = m.with(e);
    gens.push_back(c);
    auto& fs = lifted.functionals[c];
    for (const auto& f : ideal.functionals.at(m)) fs.push_back(lift(f, 0));
    fs.push_back(unit_vector(d + 1, d));
  }
  Fan product(d + 1, rays, gens);
  PolyFan pf = ord_subdivision(product, lifted);

  // pull the t = 0 rays first; e_{n+1} last
  std::vector<RayId> order(pf.rays.size());
  for (RayId i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](RayId x, RayId y) {
    return std::make_pair(pf.rays[x][d] != 0, pf.rays[x][d]) < std::make_pair(pf.rays[y][d] != 0, pf.rays[y][d]);
  });
  auto ez = std::find_if(order.begin(), order.end(), [&](RayId r) { return pf.rays[r] == unit_vector(d + 1, d); });
  if (ez != order.end()) std::rotate(ez, ez + 1, order.end());
  PolyFan sorted{d + 1, {}, {}};
  std::vector<RayId> where(pf.rays.size());
  for (RayId i = 0; i < order.size(); ++i) {
    where[order[i]] = i;
    sorted.rays.push_back(pf.rays[order[i]]);
  }
  for (const auto& c : pf.cones) {
    std::vector<RayId> ids;
    for (RayId r : c) ids.push_back(where[r]);
    sorted.cones.push_back(ids);
  }
  Fan tri = triangulate(sorted);
  std::set<Cone> keep;
  auto eid = tri.find_ray(unit_vector(d + 1, d));
  for (const auto& c : tri.cones())
    if (!eid || !c.contains(*eid)) keep.insert(c);
  Fan f = detail::compact(tri.restricted(keep));

  std::optional<CobordismFan> b;
  try {
    b.emplace(std::move(f), unit_vector(d + 1, d));
  } catch (const DomainError& err) {
    throw DomainError(std::string("build_cobordism: bad ideal data: ") + err.what());
  }
  if (!(project_boundary(*b, Sign::Minus) == base))
    throw InvariantViolation("build_cobordism: the minus side does not project onto the base fan");
  if (!detail::triangulates(project_boundary(*b, Sign::Plus), ord_subdivision(base, ideal)))
    throw InvariantViolation("build_cobordism: the plus side does not project onto the ideal's blow-up");
  return *b;
}

enum class StepKind { BlowUp, BlowDown };

inline const char* to_string(StepKind k) { return k == StepKind::BlowUp ? "blow-up" : "blow-down"; }

struct FactorizationStep {
  StepKind kind;
  std::vector<LatticeVector> center;  // generators, a cone of the finer side's coarse fan
  LatticeVector ray;
  Fan fan_before;
  Fan fan_after;
  long piece;                          // χ value of the elementary piece
  std::vector<LatticeVector> circuit;  // sorted generators in N ⊕ Z
};

struct FactorizationCertificate {
  Fan source_fan;
  Fan target_fan;
  std::vector<FactorizationStep> steps;
  bool source_refined = false;  // the source is a resolution of π(∂₊) of the input
  std::size_t desingularization_steps = 0;
};

struct VerificationReport {
  bool ok = true;
  std::optional<std::size_t> failed_step;
  std::string message;
};

inline VerificationReport verify_certificate(const FactorizationCertificate& cert) {
  auto fail = [](std::optional<std::size_t> i, std::string msg) { return VerificationReport{false, i, std::move(msg)}; };
  if (!is_nonsingular_fan(cert.source_fan)) return fail(std::nullopt, "source fan is singular");
  if (!is_nonsingular_fan(cert.target_fan)) return fail(std::nullopt, "target fan is singular");
  if (cert.steps.empty())
    return cert.source_fan == cert.target_fan ? VerificationReport{} : fail(std::nullopt, "no steps but source differs from target");
  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    const auto& s = cert.steps[i];
    const Fan& before = i == 0 ? cert.source_fan : cert.steps[i - 1].fan_after;
    if (!(s.fan_before == before)) return fail(i, "chain broken: fan_before differs from the previous fan");
    const Fan& coarse = s.kind == StepKind::BlowUp ? s.fan_before : s.fan_after;
    const Fan& fine = s.kind == StepKind::BlowUp ? s.fan_after : s.fan_before;
    if (s.center.size() < 2) return fail(i, "center has dimension below two");
    if (!detail::find_cone(coarse, s.center)) return fail(i, "center is not a cone of the fan");
    if (!is_nonsingular(s.center)) return fail(i, "center is singular");
    LatticeVector sum(coarse.rank(), 0);
    for (const auto& g : s.center) sum = sum + g;
    if (primitive(sum) != s.ray) return fail(i, "ray is not the primitive sum of the center");
    Fan expect;
    try {
      expect = star_subdivide(coarse, s.ray);
    } catch (const Error& e) {
      return fail(i, e.what());
    }
    if (!(expect == fine)) return fail(i, "fans differ from the star subdivision at the ray");
    if (!is_nonsingular_fan(s.fan_after)) return fail(i, "intermediate fan is singular");
  }
  if (!(cert.steps.back().fan_after == cert.target_fan)) return fail(cert.steps.size() - 1, "last fan differs from the target");
  return {};
}

// The certificate of the inverse map: steps in reverse order, blow-ups and
// blow-downs exchanged.
inline FactorizationCertificate reverse(const FactorizationCertificate& cert) {
  FactorizationCertificate out{cert.target_fan, cert.source_fan, {}, cert.source_refined, cert.desingularization_steps};
  for (auto it = cert.steps.rbegin(); it != cert.steps.rend(); ++it) {
    FactorizationStep s = *it;
    s.kind = s.kind == StepKind::BlowUp ? StepKind::BlowDown : StepKind::BlowUp;
    std::swap(s.fan_before, s.fan_after);
    out.steps.push_back(std::move(s));
  }
  return out;
}

// Blow-up/blow-down factorization of the birational map π(∂₊) ⇢ π(∂₋).
inline FactorizationCertificate factorize(const CobordismFan& input, PiDesingOptions opt = {}) {
  auto res = pi_desingularize(input, opt);
  const CobordismFan& b = res.fan;
  FactorizationCertificate cert{project_boundary(b, Sign::Plus), project_boundary(b, Sign::Minus), {}, false,
                                res.log.size()};
  cert.source_refined = !(cert.source_fan == project_boundary(input, Sign::Plus));
  auto x = chi(b);
  auto pieces = elementary_decomposition(b, x);
  std::sort(pieces.begin(), pieces.end(), [](const auto& p, const auto& q) { return p.value < q.value; });

  Fan current = cert.source_fan;
  for (const auto& piece : pieces) {
    const CobordismFan& ba = piece.fan;
    Fan plus = project_boundary(ba, Sign::Plus);
    Fan minus = project_boundary(ba, Sign::Minus);
    if (!(plus == current)) throw InvariantViolation("factorize: elementary pieces do not chain");
    struct Item {
      std::vector<LatticeVector> id, up, down;
      LatticeVector rho;
    };
    std::vector<Item> items;
    for (const auto& c : ba.circuits()) {
      const auto& rel = ba.relation(c);
      Item it{ba.fan().sorted_generators(c), {}, {}, LatticeVector(ba.pi().target_rank, 0)};
      for (std::size_t i = 0; i < rel.r.size(); ++i) {
        if (abs(rel.r[i]) > 1) throw InvariantViolation("factorize: circuit relation has a coefficient beyond ±1");
        if (rel.r[i] > 0) {
          it.up.push_back(rel.w[i]);
          it.rho = it.rho + rel.w[i];
        } else if (rel.r[i] < 0) {
          it.down.push_back(rel.w[i]);
        }
      }
      items.push_back(std::move(it));
    }
    auto stars_disjoint = [&](const Fan& f, bool up) {
      std::set<Cone> seen;
      for (const auto& it : items) {
        auto c = detail::find_cone(f, up ? it.up : it.down);
        if (!c) throw InvariantViolation("factorize: circuit side is not a cone of the quotient fan");
        for (const auto& s : star(*c, f))
          if (!seen.insert(s).second) throw InvariantViolation("factorize: circuit stars overlap");
      }
    };
    stars_disjoint(plus, true);
    stars_disjoint(minus, false);

    for (const auto& it : items) {
      if (it.up.size() < 2) continue;
      Fan after = star_subdivide(current, it.rho);
      cert.steps.push_back({StepKind::BlowUp, it.up, it.rho, current, after, piece.value, it.id});
      current = after;
    }
    // the fans between the peak and π(∂₋(B_a)): the minus side blown up at the remaining rays
    auto blown = [&](std::size_t from) {
      Fan f = minus;
      for (std::size_t j = from; j < items.size(); ++j)
        if (items[j].down.size() >= 2) f = star_subdivide(f, items[j].rho);
      return f;
    };
    if (!(blown(0) == current)) throw InvariantViolation("factorize: the two ϱ-subdivisions differ");
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].down.size() < 2) continue;
      Fan after = blown(i + 1);
      cert.steps.push_back({StepKind::BlowDown, items[i].down, items[i].rho, current, after, piece.value, items[i].id});
      current = after;
    }
    if (!(current == minus)) throw InvariantViolation("factorize: blow-downs do not reach the minus side");
  }
  if (!(current == cert.target_fan)) throw InvariantViolation("factorize: the chain does not reach the target");
  return cert;
}

}  // namespace toricwf
