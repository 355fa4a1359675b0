#include <gtest/gtest.h>

#include <random>

#include "toricwf/fan.hpp"

using namespace toricwf;

namespace {

Fan quadrant() { return Fan(2, {vec({1, 0}), vec({0, 1})}, {Cone{0, 1}}); }

std::set<std::vector<LatticeVector>> maximal_vectors(const Fan& f) {
  std::set<std::vector<LatticeVector>> out;
  for (const auto& m : f.maximal_cones()) out.insert(f.sorted_generators(m));
  return out;
}

// Random complete-ish simplicial fan: a star subdivision sequence of the
// positive orthant.
Fan random_fan(std::mt19937_64& rng, std::size_t d, int steps) {
  std::vector<LatticeVector> rays;
  for (std::size_t i = 0; i < d; ++i) rays.push_back(unit_vector(d, i));
  std::vector<RayId> ids(d);
  for (std::size_t i = 0; i < d; ++i) ids[i] = i;
  Fan f(d, rays, {Cone(ids)});
  std::uniform_int_distribution<long> dist(0, 3);
  for (int s = 0; s < steps; ++s) {
    LatticeVector v(d);
    for (auto& x : v) x = dist(rng);
    if (is_zero(v)) continue;
    f = star_subdivide(f, primitive(v));
  }
  return f;
}

}  // namespace

TEST(Faces, Counts) {
  EXPECT_EQ(faces(Cone{}).size(), 1u);
  EXPECT_EQ(faces(Cone{3}).size(), 2u);
  EXPECT_EQ(faces(Cone{1, 2}).size(), 4u);
}

TEST(Star, Examples) {
  auto f = quadrant();
  EXPECT_EQ(star(Cone{}, f).size(), f.cones().size());
  auto s = star(Cone{0}, f);
  EXPECT_EQ(std::set<Cone>(s.begin(), s.end()), (std::set<Cone>{Cone{0}, Cone{0, 1}}));
  auto cs = closed_star(Cone{0}, f);
  EXPECT_EQ(std::set<Cone>(cs.begin(), cs.end()), (std::set<Cone>{Cone{}, Cone{0}, Cone{1}, Cone{0, 1}}));
  EXPECT_THROW(star(Cone{5}, f), NotFoundError);
}

TEST(Fan, RejectsBadInput) {
  EXPECT_THROW(Fan(2, {vec({2, 0})}, {Cone{0}}), DomainError);
  EXPECT_THROW(Fan(2, {vec({1, 0}), vec({1, 0})}, {}), DomainError);
  EXPECT_THROW(Fan(2, {vec({1, 0}), vec({-1, 0})}, {Cone{0, 1}}), DomainError);
  Fan overlapping(2, {vec({1, 0}), vec({0, 1}), vec({1, 1})}, {Cone{0, 1}, Cone{0, 2}});
  EXPECT_THROW(validate(overlapping), InvariantViolation);
  EXPECT_NO_THROW(validate(quadrant()));
}

TEST(StarSubdivide, BlowUpOfPlane) {
  auto f = star_subdivide(quadrant(), vec({1, 1}));
  EXPECT_EQ(maximal_vectors(f), (std::set<std::vector<LatticeVector>>{{vec({0, 1}), vec({1, 1})},
                                                                       {vec({1, 0}), vec({1, 1})}}));
  EXPECT_TRUE(is_nonsingular_fan(f));
}

TEST(StarSubdivide, ExistingRayIsIdentity) {
  auto f = quadrant();
  EXPECT_TRUE(star_subdivide(f, vec({1, 0})).identical(f));
}

TEST(StarSubdivide, SingularCone) {
  Fan f(2, {vec({1, 0}), vec({1, 2})}, {Cone{0, 1}});
  auto g = star_subdivide(f, vec({1, 1}));
  for (const auto& m : g.maximal_cones()) EXPECT_EQ(abs(determinant(g.generators_of(m))), 1);
  EXPECT_EQ(g.maximal_cones().size(), 2u);
}

TEST(StarSubdivide, Errors) {
  auto f = quadrant();
  EXPECT_THROW(star_subdivide(f, vec({0, 0})), DomainError);
  EXPECT_THROW(star_subdivide(f, vec({-1, 1})), DomainError);
}

TEST(Nonsingular, Examples) {
  Fan f(2, {vec({1, 0}), vec({0, 1}), vec({1, 2})}, {Cone{0, 1}, Cone{2}});
  EXPECT_TRUE(is_nonsingular(f, Cone{0, 1}));
  EXPECT_TRUE(is_nonsingular(f, Cone{2}));
  Fan g(2, {vec({1, 0}), vec({1, 2})}, {Cone{0, 1}});
  EXPECT_FALSE(is_nonsingular(g, Cone{0, 1}));
  EXPECT_FALSE(is_nonsingular_fan(g));
}

TEST(Subdivision, Examples) {
  auto q = quadrant();
  auto b = star_subdivide(q, vec({1, 1}));
  EXPECT_TRUE(is_subdivision_of(b, q));
  EXPECT_FALSE(is_subdivision_of(q, b));
  Fan half(2, {vec({1, 0}), vec({1, 1})}, {Cone{0, 1}});
  EXPECT_FALSE(is_subdivision_of(half, q));
}

TEST(Subdivision, RandomStarSubdivisions) {
  std::mt19937_64 rng(3);
  int done = 0;
  while (done < 500) {
    std::size_t d = 2 + done % 2;
    auto f = random_fan(rng, d, done % 4);
    std::uniform_int_distribution<long> dist(0, 4);
    LatticeVector v(d);
    for (auto& x : v) x = dist(rng);
    if (is_zero(v)) continue;
    v = primitive(v);
    auto g = star_subdivide(f, v);
    ASSERT_TRUE(is_subdivision_of(g, f));
    EXPECT_TRUE(has_intersection_property(g));
    ++done;
  }
}

TEST(StarSubdivide, NonsingularCenterKeepsNonsingularity) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t d = 2 + trial % 2;
    auto f = desingularize(random_fan(rng, d, 3)).fan;
    ASSERT_TRUE(is_nonsingular_fan(f));
    const auto& cones = f.maximal_cones();
    const auto& c = cones[static_cast<std::size_t>(trial) % cones.size()];
    std::vector<RayId> ids = c.rays();
    ids.resize(1 + static_cast<std::size_t>(trial) % ids.size());
    LatticeVector s = sum(f.generators_of(Cone(ids)), d);
    auto g = star_subdivide(f, s);
    EXPECT_TRUE(is_nonsingular_fan(g));
  }
}

TEST(StarClosure, Containments) {
  std::mt19937_64 rng(4);
  auto f = random_fan(rng, 3, 4);
  for (const auto& tau : f.cones()) {
    auto s = star(tau, f);
    auto cs = closed_star(tau, f);
    std::set<Cone> css(cs.begin(), cs.end());
    for (const auto& c : s) EXPECT_TRUE(css.count(c));
    for (const auto& c : cs) {
      EXPECT_TRUE(f.contains(c));
      for (const auto& g : faces(c)) EXPECT_TRUE(css.count(g));
    }
  }
}

TEST(Triangulate, SimplicialUnchanged) {
  auto f = star_subdivide(quadrant(), vec({1, 1}));
  EXPECT_TRUE(triangulate(to_polyfan(f)).identical(f));
}

TEST(Triangulate, Square) {
  PolyFan p{3, {vec({1, 0, 1}), vec({0, 1, 1}), vec({-1, 0, 1}), vec({0, -1, 1})}, {{0, 1, 2, 3}}};
  auto f = triangulate(p);
  ASSERT_EQ(f.maximal_cones().size(), 2u);
  for (const auto& m : f.maximal_cones()) EXPECT_TRUE(m.contains(0));
  EXPECT_TRUE(f.contains(Cone{0, 2}));
}

TEST(Triangulate, Pentagon) {
  PolyFan p{3,
            {vec({1, 0, 1}), vec({1, 1, 1}), vec({0, 1, 1}), vec({-1, 0, 1}), vec({0, -1, 1})},
            {{0, 1, 2, 3, 4}}};
  auto f = triangulate(p);
  EXPECT_EQ(f.maximal_cones().size(), 3u);
  EXPECT_TRUE(has_intersection_property(f));
}

TEST(Triangulate, RejectsNonStrictlyConvex) {
  PolyFan p{2, {vec({1, 0}), vec({-1, 0}), vec({0, 1})}, {{0, 1, 2}}};
  EXPECT_THROW(triangulate(p), DomainError);
}

TEST(Desingularize, Examples) {
  auto q = quadrant();
  auto r = desingularize(q);
  EXPECT_TRUE(r.inserted.empty());
  EXPECT_TRUE(r.fan.identical(q));

  Fan a(2, {vec({1, 0}), vec({1, 2})}, {Cone{0, 1}});
  r = desingularize(a);
  EXPECT_EQ(r.inserted, std::vector<LatticeVector>{vec({1, 1})});
  EXPECT_TRUE(is_nonsingular_fan(r.fan));

  Fan b(2, {vec({1, 0}), vec({1, 3})}, {Cone{0, 1}});
  r = desingularize(b);
  EXPECT_LE(r.inserted.size(), 2u);
  EXPECT_TRUE(is_nonsingular_fan(r.fan));
  EXPECT_TRUE(is_subdivision_of(r.fan, b));
}

TEST(Desingularize, RandomFans) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t d = 2 + trial % 2;
    std::vector<LatticeVector> g;
    std::uniform_int_distribution<long> dist(-3, 3);
    while (true) {
      g.clear();
      for (std::size_t i = 0; i < d; ++i) {
        LatticeVector v(d);
        for (auto& x : v) x = dist(rng);
        if (is_zero(v)) break;
        g.push_back(primitive(v));
      }
      if (g.size() == d && independent(g)) break;
    }
    std::vector<RayId> ids(d);
    for (std::size_t i = 0; i < d; ++i) ids[i] = i;
    Fan f(d, g, {Cone(ids)});
    auto r = desingularize(f);
    EXPECT_TRUE(is_nonsingular_fan(r.fan));
    EXPECT_TRUE(is_subdivision_of(r.fan, f));
  }
}
