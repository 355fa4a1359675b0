#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "toricwf/generate.hpp"
#include "toricwf/io.hpp"

using namespace toricwf;
using namespace fixtures;

namespace {

const std::string kFixtures = FIXTURE_DIR;

io::FanFile reload(const Fan& f) { return io::fan_from_json(json::parse(io::to_json(f).dump())); }

}  // namespace

TEST(Io, IntegersBeyondDoublePrecisionAreStrings) {
  Integer small = (Integer(1) << 53);
  Integer big = small + 1;
  EXPECT_TRUE(io::to_json(small).is_number_integer());
  EXPECT_TRUE(io::to_json(-small).is_number_integer());
  EXPECT_TRUE(io::to_json(big).is_string());
  EXPECT_EQ(io::integer_from_json(io::to_json(big)), big);
  EXPECT_EQ(io::integer_from_json(io::to_json(-big * big)), -big * big);
  EXPECT_EQ(io::integer_from_json(json("-12")), -12);
  EXPECT_THROW(io::integer_from_json(json("12x")), InputError);
  EXPECT_THROW(io::integer_from_json(json(1.5)), InputError);
}

TEST(Io, FixtureFilesRoundTripBitIdentically) {
  for (const char* name : {"flop", "plane", "space", "plane_blowup", "trivial", "stacked", "singular_cobordism"}) {
    auto j = io::read_file(kFixtures + "/" + name + ".json");
    auto file = io::fan_from_json(j);
    auto again = reload(file.fan);
    EXPECT_TRUE(again.fan.identical(file.fan)) << name;
    if (file.v0) {
      auto b = file.cobordism();
      auto jb = json::parse(io::to_json(b).dump());
      EXPECT_TRUE(io::fan_from_json(jb).fan.identical(b.fan())) << name;
      EXPECT_EQ(*io::fan_from_json(jb).v0, b.v0()) << name;
    }
  }
}

TEST(Io, RandomFansRoundTripBitIdentically) {
  std::mt19937_64 rng(17);
  for (std::size_t rank : {2, 3, 4}) {
    GeneratorOptions opt;
    opt.rank = rank;
    for (int i = 0; i < 20; ++i) {
      auto b = random_cobordism_fan(rng, opt);
      auto back = io::fan_from_json(io::to_json(b));
      EXPECT_TRUE(back.fan.identical(b.fan()));
      EXPECT_EQ(*back.v0, b.v0());
    }
  }
}

TEST(Io, HugeCoordinatesSurvive) {
  Integer h("123456789012345678901234567890");
  Fan f(2, {LatticeVector{h, 1}, vec({0, 1})}, {Cone{0, 1}});
  auto text = io::to_json(f).dump();
  EXPECT_NE(text.find("\"123456789012345678901234567890\""), std::string::npos);
  EXPECT_TRUE(reload(f).fan.identical(f));
}

TEST(Io, RejectsMalformedFans) {
  auto bad = [](const char* text) { return io::fan_from_json(json::parse(text)); };
  EXPECT_THROW(bad(R"([1,2])"), InputError);
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[1,0]]})"), InputError);
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[2,0]],"cones":[[0]]})"), InputError);
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[1,0],[1,0]],"cones":[]})"), InputError);
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[1,0,0]],"cones":[]})"), InputError);
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[1,0]],"cones":[[3]]})"), InputError);
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[1,0]],"cones":[[0,0]]})"), InputError);
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[1,0],[-1,0]],"cones":[[0,1]]})"), InputError);
  // overlapping cones
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[1,0],[0,1],[1,1]],"cones":[[0,1],[0,2]]})"), InputError);
  // v0 inside a cone that is not π-strictly convex
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[1,0],[-1,0]],"cones":[[0],[1]],"v0":[1,0]})"), InputError);
  EXPECT_THROW(bad(R"({"rank":2,"rays":[[1,0]],"cones":[[0]],"v0":[1,0,0]})"), InputError);
  EXPECT_THROW(io::fan_from_json(json::parse(R"({"rank":2,"rays":[],"cones":[]})")).cobordism(), InputError);
}

TEST(Io, IdealIndicesFollowTheListedCones) {
  auto base = io::fan_from_json(json::parse(R"({"rank":2,"rays":[[1,0],[0,1],[-1,-1]],"cones":[[1,2],[0,1],[2,0]]})"));
  // the point ideal (x,y) on the chart ⟨e1,e2⟩ (listed second); unit ideal elsewhere
  auto ideal = io::ideal_from_json(json::parse(R"({"cones":[1,0,2],"functionals":[[[1,0],[0,1]],[[0,0]],[[0,0]]]})"), base);
  EXPECT_EQ(ideal.functionals.at(Cone{0, 1}), (std::vector<LatticeVector>{vec({1, 0}), vec({0, 1})}));
  EXPECT_THROW(io::ideal_from_json(json::parse(R"({"cones":[1,0,2],"functionals":[[[1,0]],[[0,0]],[[0,0]]]})"), base),
               InputError);
  auto again = io::ideal_from_json(io::to_json(ideal, base.listed), base);
  EXPECT_EQ(again.functionals, ideal.functionals);
  EXPECT_THROW(io::ideal_from_json(json::parse(R"({"cones":[5],"functionals":[[[1,0]]]})"), base), InputError);
  EXPECT_THROW(io::ideal_from_json(json::parse(R"({"cones":[0],"functionals":[]})"), base), InputError);
  EXPECT_THROW(io::ideal_from_json(json::parse(R"({"cones":[1],"functionals":[[[-1,0]]]})"), base), InputError);
}

TEST(Io, CertificatesRoundTrip) {
  auto cert = factorize(flop());
  auto back = io::certificate_from_json(json::parse(io::to_json(cert).dump()));
  EXPECT_TRUE(verify_certificate(back).ok);
  ASSERT_EQ(back.steps.size(), cert.steps.size());
  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    EXPECT_EQ(back.steps[i].kind, cert.steps[i].kind);
    EXPECT_EQ(back.steps[i].center, cert.steps[i].center);
    EXPECT_EQ(back.steps[i].ray, cert.steps[i].ray);
    EXPECT_TRUE(back.steps[i].fan_after.identical(cert.steps[i].fan_after));
  }
  auto j = io::to_json(cert);
  j["steps"][0]["kind"] = "flip";
  EXPECT_THROW(io::certificate_from_json(j), InputError);
}

TEST(Io, ReversedCertificateVerifies) {
  for (const auto& b : {flop(), stacked3()}) {
    auto cert = factorize(b);
    auto rev = reverse(cert);
    EXPECT_TRUE(verify_certificate(rev).ok);
    EXPECT_TRUE(rev.source_fan == cert.target_fan);
    EXPECT_TRUE(reverse(rev).source_fan == cert.source_fan);
  }
}
