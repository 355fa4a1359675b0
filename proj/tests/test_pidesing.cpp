#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "toricwf/generate.hpp"
#include "toricwf/pidesing.hpp"

using namespace toricwf;
using namespace fixtures;

namespace {

CobordismFan spec_fixture() {
  return CobordismFan(Fan(3, {vec({1, 0, 0}), vec({1, 2, 0}), vec({0, 1, 1})}, {Cone{0, 1, 2}}), vec({0, 0, 1}));
}

CobordismFan mirrored(const CobordismFan& b) { return CobordismFan(b.fan(), -b.v0()); }

ConeTypeReport type_of(std::vector<long> r) {
  std::vector<Integer> rr(r.begin(), r.end());
  return type_from_relation(Cone(iota(r.size())), rr);
}

// Same-vector cone lookup across fans with different ray numbering.
bool has_cone_with(const Fan& f, const std::vector<LatticeVector>& gens) {
  std::vector<RayId> ids;
  for (const auto& g : gens) {
    auto id = f.find_ray(g);
    if (!id) return false;
    ids.push_back(*id);
  }
  return f.contains(Cone(ids));
}

}  // namespace

TEST(PiNonsingular, Examples) {
  auto f = flop();
  for (const auto& c : f.fan().cones()) EXPECT_TRUE(is_pi_nonsingular(c, f));
  EXPECT_TRUE(is_pi_nonsingular_fan(f));
  auto p = plane_pair();
  EXPECT_TRUE(is_pi_nonsingular(Cone{0}, p));
  EXPECT_TRUE(is_pi_nonsingular(Cone{1}, p));
  EXPECT_TRUE(is_pi_nonsingular(Cone{0, 1}, p));
  EXPECT_TRUE(is_pi_nonsingular_fan(p));
  CobordismFan s(Fan(3, {vec({1, 0, 0}), vec({1, 2, 0})}, {Cone{0, 1}}), vec({0, 0, 1}));
  EXPECT_FALSE(is_pi_nonsingular(Cone{0, 1}, s));
  EXPECT_FALSE(is_pi_nonsingular_fan(s));
}

TEST(ConeN, MatchesIndependentFaceMaximum) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 80; ++trial) {
    auto b = random_cobordism_fan(rng, {.rank = 2 + static_cast<std::size_t>(trial % 3)});
    for (const auto& c : b.dependent_cones()) {
      Integer best = 0;
      for (const auto& f : faces(c))
        if (!b.is_dependent(f) && !f.empty()) best = std::max(best, b.projected_multiplicity(f));
      EXPECT_EQ(cone_n(c, b), best);
    }
  }
}

TEST(ConeType, Examples) {
  auto f = flop();
  auto t = cone_type(Cone{0, 1, 2, 3}, f);
  EXPECT_EQ(t.n, 1);
  EXPECT_EQ(t.type_index, 1);
  EXPECT_EQ(t.sgn, Sign::Plus);
  EXPECT_EQ(t.inv, std::make_pair(Integer(1), -1));
  EXPECT_EQ(t.positive, (std::vector<Integer>{1, 1}));
  EXPECT_EQ(t.negative, (std::vector<Integer>{1, 1}));

  EXPECT_EQ(type_of({3, -3}).type_index, 4);
  auto three = type_of({2, 1, -1});
  EXPECT_EQ(three.type_index, 3);
  EXPECT_EQ(three.sgn, Sign::Plus);
  EXPECT_THROW(cone_type(Cone{0, 1}, f), PreconditionError);
}

TEST(ConeType, AllCasesAndMirrors) {
  struct Case {
    std::vector<long> r;
    int type;
    Sign sgn;
  };
  std::vector<Case> cases{
      {{2, 1, -2, -1}, 1, Sign::Plus}, {{2, -2, -1}, 2, Sign::Plus}, {{2, 1, -2}, 2, Sign::Minus},
      {{2, 1, -1}, 3, Sign::Plus},     {{1, -2, -1}, 3, Sign::Minus}, {{2, -2}, 4, Sign::Minus},
      {{3, -1, -1}, 5, Sign::Plus},    {{1, 1, -3}, 5, Sign::Minus},  {{2, 1, 0, -1}, 3, Sign::Plus},
  };
  for (const auto& c : cases) {
    auto t = type_of(c.r);
    EXPECT_EQ(t.type_index, c.type);
    EXPECT_EQ(t.sgn, c.sgn);
    std::vector<long> neg;
    for (long x : c.r) neg.push_back(-x);
    auto m = type_of(neg);
    EXPECT_EQ(m.type_index, c.type);
    // types 2, 3 and 5 swap sign under mirroring; 1 and 4 are symmetric
    if (c.type == 2 || c.type == 3 || c.type == 5) EXPECT_NE(m.sgn, t.sgn);
    else EXPECT_EQ(m.sgn, t.sgn);
  }
}

TEST(ConeType, MirroredFansHaveMirroredTypes) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    auto b = random_cobordism_fan(rng, {.rank = 2 + static_cast<std::size_t>(trial % 3)});
    auto m = mirrored(b);
    for (const auto& c : b.dependent_cones()) {
      auto t = cone_type(c, b);
      auto u = cone_type(c, m);
      EXPECT_EQ(t.type_index, u.type_index);
      EXPECT_EQ(t.positive, u.negative);
      EXPECT_EQ(t.negative, u.positive);
    }
  }
}

TEST(UpdateRelation, FlopMidNegativeChild) {
  auto b = flop();
  Cone d{0, 1, 2, 3};
  const auto& rel = b.relation(d);
  auto child = update_relation_after_subdivision(rel, 3, MidCenter{Sign::Plus});
  // on (e1, e2, e3, new ray): the new ray is the single negative ray
  EXPECT_EQ(child, (std::vector<Integer>{1, 1, 0, -1}));
  auto v = mid(b, ctr(b, rel, Sign::Plus), d);
  auto [f, id] = star_subdivide_with_id(b.fan(), v);
  CobordismFan after(f, b.v0());
  EXPECT_EQ(after.relation(Cone{0, 1, 2, id}).r, (std::vector<Integer>{1, 1, 0, -1}));
  EXPECT_GT(cross_check_relation_updates(b, after, v, id), 0u);
}

TEST(UpdateRelation, NullRayChildIsNull) {
  // (1,0,0) and (1,2,0) project to the same ray; (1,0,2) is a null ray
  CobordismFan b(Fan(3, {vec({1, 0, 0}), vec({1, 2, 0}), vec({1, 0, 2})}, {Cone{0, 1, 2}}), vec({0, 1, 0}));
  const auto& rel = b.relation(Cone{0, 1, 2});
  ASSERT_EQ(rel.r[2], 0);
  RatVector alpha{Rational(1, 2), 0, Rational(1, 2)};
  auto child = update_relation_after_subdivision(rel, 2, ParCenter{alpha});
  EXPECT_EQ(child[2], 0);
  EXPECT_THROW(update_relation_after_subdivision(rel, 1, ParCenter{alpha}), PreconditionError);
  auto [f, id] = star_subdivide_with_id(b.fan(), vec({1, 0, 1}));
  CobordismFan after(f, b.v0());
  EXPECT_EQ(cross_check_relation_updates(b, after, vec({1, 0, 1}), id), 2u);
}

TEST(UpdateRelation, RejectsNonCodefiniteFace) {
  auto b = flop();
  const auto& rel = b.relation(Cone{0, 1, 2, 3});
  RatVector alpha{Rational(1, 2), 0, Rational(1, 2), 0};
  EXPECT_THROW(update_relation_after_subdivision(rel, 0, ParCenter{alpha}), PreconditionError);
}

// Random Mid and par subdivisions of single dependent cones, child relations
// recomputed from scratch.
TEST(UpdateRelation, RandomCrossCheck) {
  std::mt19937_64 rng(57);
  int done = 0, mids = 0, pars = 0;
  for (int attempt = 0; done < 200; ++attempt) {
    ASSERT_LT(attempt, 100000);
    auto b = random_cobordism_fan(rng, {.rank = 2 + static_cast<std::size_t>(attempt % 3), .max_cones = 1});
    auto deps = b.dependent_cones();
    if (deps.empty()) continue;
    const Cone& delta = deps.back();
    const auto& rel = b.relation(delta);
    LatticeVector v;
    if (attempt % 2 == 0) {
      auto t = cone_type(delta, b);
      v = mid(b, ctr(b, rel, t.sgn), delta);
      ++mids;
    } else {
      Sign first = rng() % 2 ? Sign::Plus : Sign::Minus;
      Cone face = rel.side(first);
      auto best = best_par_point(b.projected(face));
      if (!best) {
        face = rel.side(opposite(first));
        best = best_par_point(b.projected(face));
      }
      if (!best) continue;
      RatVector p(b.rank(), 0);
      for (std::size_t i = 0; i < face.dim(); ++i)
        for (std::size_t j = 0; j < b.rank(); ++j)
          p[j] += best->second[i] * Rational(b.fan().ray(face.rays()[i])[j]) / Rational(b.m(face.rays()[i]));
      v = primitive(p);
      ++pars;
    }
    auto [f, id] = star_subdivide_with_id(b.fan(), v);
    CobordismFan after(f, b.v0());
    EXPECT_GT(cross_check_relation_updates(b, after, v, id), 0u);
    ++done;
  }
  EXPECT_GT(mids, 50);
  EXPECT_GT(pars, 50);
}

TEST(MakeCodefinite, NoOpWhenAlreadyCodefinite) {
  auto b = flop();
  auto r = make_codefinite(b, Cone{0, 1});
  EXPECT_TRUE(r.log.empty());
  EXPECT_TRUE(r.fan.fan().identical(b.fan()));
}

TEST(MakeCodefinite, FlopMixedFace) {
  auto b = flop();
  Cone tau{0, 2};
  auto r = make_codefinite(b, tau, {.cross_check = true});
  EXPECT_GE(r.log.size(), 1u);
  ASSERT_TRUE(r.fan.fan().contains(tau));
  for (const auto& d : r.fan.dependent_cones()) {
    if (!d.has_face(tau)) continue;
    const auto& rel = r.fan.relation(d);
    bool pos = false, neg = false;
    for (RayId id : tau.rays()) pos = pos || rel.coefficient(id) > 0, neg = neg || rel.coefficient(id) < 0;
    EXPECT_FALSE(pos && neg);
  }
}

TEST(PiDesingularize, AlreadyNonsingular) {
  auto b = flop();
  auto r = pi_desingularize(b);
  EXPECT_TRUE(r.log.empty());
  EXPECT_TRUE(r.fan.fan().identical(b.fan()));
}

TEST(PiDesingularize, RankThreeFixture) {
  auto b = spec_fixture();
  auto t = cone_type(Cone{0, 1, 2}, b);
  EXPECT_EQ(t.type_index, 3);
  EXPECT_EQ(t.n, 2);
  auto r = pi_desingularize(b, {.cross_check = true});
  EXPECT_FALSE(r.log.empty());
  EXPECT_TRUE(is_pi_nonsingular_fan(r.fan));
  EXPECT_TRUE(is_subdivision_of(r.fan.fan(), b.fan()));
  EXPECT_EQ(r.log.front().step, 3);
}

TEST(PiDesingularize, IndependentConeUsesStepSix) {
  CobordismFan b(Fan(3, {vec({1, 0, 0}), vec({1, 2, 0})}, {Cone{0, 1}}), vec({0, 0, 1}));
  auto r = pi_desingularize(b, {.cross_check = true});
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_EQ(r.log[0].step, 6);
  EXPECT_EQ(r.log[0].center, vec({1, 1, 0}));
  EXPECT_TRUE(is_pi_nonsingular_fan(r.fan));
  EXPECT_TRUE(is_subdivision_of(r.fan.fan(), b.fan()));
}

TEST(PiDesingularize, RejectsNonStrictlyConvex) {
  EXPECT_THROW(pi_desingularize(CobordismFan(Fan(2, {vec({1, 0}), vec({1, 2})}, {Cone{0, 1}}), vec({1, 1}))),
               DomainError);
}

static void check_resolution(const CobordismFan& b, const PiDesingularization& r, bool replay) {
  ASSERT_TRUE(is_pi_nonsingular_fan(r.fan));
  EXPECT_TRUE(is_subdivision_of(r.fan.fan(), b.fan()));
  for (const auto& c : b.independent_cones()) {
    if (!c.empty() && is_pi_nonsingular(c, b)) {
      EXPECT_TRUE(has_cone_with(r.fan.fan(), b.fan().generators_of(c)));
    }
  }
  if (!replay) return;
  // every center is interior to a cone of the current fan and only its star changes
  Fan f = b.fan();
  int last_step = 0;
  Integer last_n = 0;
  for (const auto& rec : r.log) {
    auto tau = locate(f, rec.center);
    ASSERT_TRUE(tau);
    EXPECT_GE(tau->dim(), 2u);
    CobordismFan cur(f, b.v0());
    if (rec.kind == CenterKind::Mid) {
      EXPECT_TRUE(cur.is_dependent(*tau));
    } else {
      EXPECT_FALSE(cur.is_dependent(*tau));
    }
    Fan g = star_subdivide(f, rec.center);
    for (const auto& c : f.cones()) {
      if (!c.has_face(*tau)) {
        EXPECT_TRUE(has_cone_with(g, f.generators_of(c)));
      }
    }
    if (rec.n == last_n) {
      EXPECT_GE(rec.step, last_step);
    }
    last_step = rec.step;
    last_n = rec.n;
    f = g;
  }
  EXPECT_EQ(f, r.fan.fan());
}

TEST(PiDesingularize, RandomFans) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    auto b = random_cobordism_fan(rng, {.rank = 2 + static_cast<std::size_t>(trial % 2)});
    auto r = pi_desingularize(b, {.cross_check = true});
    SCOPED_TRACE(trial);
    check_resolution(b, r, r.log.size() <= 200);
  }
}

// Rank four inputs can need many thousands of subdivisions; check the ones
// that finish under a small bound.
TEST(PiDesingularize, RankFourUnderBound) {
  std::mt19937_64 rng(11);
  int finished = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto b = random_cobordism_fan(rng, {.rank = 4});
    try {
      auto r = pi_desingularize(b, {.cross_check = true, .max_subdivisions = 400});
      SCOPED_TRACE(trial);
      check_resolution(b, r, r.log.size() <= 60);
      ++finished;
    } catch (const LimitExceeded&) {
    }
  }
  EXPECT_GE(finished, 5);
}

TEST(PiDesingularize, DeadlineStopsTheLoop) {
  std::mt19937_64 rng(5);
  auto b = random_cobordism_fan(rng, {.rank = 4});
  EXPECT_THROW(pi_desingularize(b, {.deadline = std::chrono::steady_clock::now()}), LimitExceeded);
}

TEST(PiDesingularize, MirrorAlsoResolves) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    auto b = random_cobordism_fan(rng, {.rank = 3});
    auto r = pi_desingularize(mirrored(b));
    EXPECT_TRUE(is_pi_nonsingular_fan(r.fan));
  }
}

TEST(PiDesingularize, Deterministic) {
  std::mt19937_64 rng(5);
  auto b = random_cobordism_fan(rng, {.rank = 3});
  auto r1 = pi_desingularize(b);
  auto r2 = pi_desingularize(b);
  EXPECT_TRUE(r1.fan.fan().identical(r2.fan.fan()));
  ASSERT_EQ(r1.log.size(), r2.log.size());
  for (std::size_t i = 0; i < r1.log.size(); ++i) EXPECT_EQ(r1.log[i].center, r2.log[i].center);
}

TEST(Generator, ProducesValidFans) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t d = 2 + static_cast<std::size_t>(trial % 3);
    auto b = random_cobordism_fan(rng, {.rank = d});
    EXPECT_EQ(b.rank(), d);
    EXPECT_LE(b.fan().maximal_cones().size(), 3u);
    EXPECT_NO_THROW(validate(b));
    for (const auto& r : b.fan().rays())
      for (const auto& x : r) EXPECT_LE(abs(x), 3);
  }
}
