#include <gtest/gtest.h>

#include "nilext/io.hpp"
#include "nilext/nonext.hpp"
#include "test_support.hpp"

using namespace nilext;
using io::json;
using nilext::testing::Rng;
using nilext::testing::uniform;

TEST(IoGroup, Examples) {
  EXPECT_EQ(io::to_json(FinAbGroup({4, 2})).dump(), R"({"factors":[4,2]})");
  EXPECT_EQ(io::parse_group(json::parse(R"({"factors":[9,3,1]})")), FinAbGroup({9, 3, 1}));
  EXPECT_THROW(io::parse_group(json::parse(R"({"factors":[0]})")), io::ParseError);
  EXPECT_THROW(io::parse_group(json::parse(R"({"order":4})")), io::ParseError);
  EXPECT_THROW(io::parse_group(json::parse(R"({"factors":"4"})")), io::ParseError);
}

TEST(IoEmbedding, RoundTripAndValidation) {
  NonextInstance in = make_nonext(3);
  json j = io::to_json(in.emb);
  EXPECT_EQ(j["map"].dump(), "[[3,0],[0,1]]");
  SubgroupEmbedding e = io::parse_embedding(j);
  EXPECT_EQ(e.sub, in.emb.sub);
  EXPECT_EQ(e.amb, in.emb.amb);
  EXPECT_EQ(e.map.to_rows(), in.emb.map.to_rows());
  j["map"] = {{1, 0}, {0, 1}};  // Z_3 -> Z_9 by 1 is not a homomorphism
  EXPECT_THROW(io::parse_embedding(j), PreconditionError);
  j["map"] = {{1, 0}};
  EXPECT_THROW(io::parse_embedding(j), io::ParseError);
}

TEST(IoPolyMap, LiteralSchema) {
  json j = json::parse(R"({"r":2,"k":2,"target":"torus","coeffs":[{"w":[1,1],"a":"1/5"},{"w":[0,0],"a":"-2/3"}]})");
  PolyMap f = io::parse_polymap(j);
  EXPECT_EQ(f.coeff_at({1, 1}), Rational(1, 5));
  EXPECT_EQ(f.coeff_at({0, 0}), Rational(-2, 3));
  EXPECT_EQ(f.coeff_at({1, 0}), Rational(0));
  // Written in index order, zeros dropped.
  EXPECT_EQ(io::to_json(f).dump(),
            R"({"coeffs":[{"a":"-2/3","w":[0,0]},{"a":"1/5","w":[1,1]}],"k":2,"r":2,"target":"torus"})");
}

TEST(IoPolyMap, Malformed) {
  auto bad = [](const char* s) { EXPECT_THROW(io::parse_polymap(json::parse(s)), io::ParseError) << s; };
  bad(R"({"r":1,"k":1,"target":"torus","coeffs":[{"w":[2],"a":"1"}]})");
  bad(R"({"r":1,"k":1,"target":"torus","coeffs":[{"w":[1,0],"a":"1"}]})");
  bad(R"({"r":1,"k":1,"target":"torus","coeffs":[{"w":[1],"a":"1/x"}]})");
  bad(R"({"r":1,"k":1,"target":"sphere","coeffs":[]})");
  bad(R"({"r":1,"k":1,"target":"cyclic:q","coeffs":[]})");
  bad(R"({"r":1,"target":"torus","coeffs":[]})");
  bad(R"({"r":1,"k":1,"target":"torus","coeffs":{}})");
}

TEST(IoPolyMap, RandomRoundTrip) {
  Rng rng(197);
  for (int it = 0; it < 100; ++it) {
    int r = static_cast<int>(uniform(rng, 0, 3)), k = static_cast<int>(uniform(rng, 0, 3));
    int d = static_cast<int>(uniform(rng, 1, 3));
    Target t = std::vector<Target>{Target::real(), Target::torus(), Target::cyclic(6)}[static_cast<std::size_t>(it % 3)];
    if (t.kind == TargetKind::Cyclic) d = 1;
    PolyMap f(r, k, d, t);
    for (std::size_t i = 0; i < f.num_terms(); ++i)
      for (int c = 0; c < d; ++c)
        f.coeff(i, c) = t.kind == TargetKind::Cyclic ? Rational(uniform(rng, 0, 5))
                                                     : nilext::testing::random_rational(rng, 30, 4);
    PolyMap g = io::parse_polymap(json::parse(io::to_json(f).dump()));
    EXPECT_EQ(g.target(), f.target());
    EXPECT_EQ(g.raw_coeffs(), f.raw_coeffs());
  }
}

TEST(IoFunction, RoundTripIsExact) {
  Rng rng(199);
  FinAbGroup g({6, 4});
  GroupFunction f = phase_function(nilext::testing::random_phase_poly(rng, g.factors(), 2), g);
  GroupFunction h = io::parse_function(json::parse(io::to_json(f).dump()));
  EXPECT_EQ(h.group, g);
  EXPECT_EQ(h.values, f.values);
  EXPECT_THROW(io::parse_function(json::parse(R"({"group":{"factors":[2]},"values":[[1,0]]})")), io::ParseError);
  EXPECT_THROW(io::parse_function(json::parse(R"({"group":{"factors":[1]},"values":[[1,0,0]]})")), io::ParseError);
}

TEST(IoHPoint, ShiftsAreRationalStrings) {
  HPoint h = h_identity(2, 1, 1);
  h.shift = {Rational(1, 3), Rational(-2)};
  h.poly.set({1, 0}, Rational(5, 7));
  json j = io::to_json(h);
  EXPECT_EQ(j["shift"].dump(), R"(["1/3","-2"])");
  EXPECT_EQ(io::parse_hpoint(j), h);
  j["poly"]["target"] = "torus";
  EXPECT_THROW(io::parse_hpoint(j), io::ParseError);
}

TEST(IoNilsequence, RoundTripPreservesEveryValue) {
  Rng rng(211);
  for (int it = 0; it < 20; ++it) {
    FinAbGroup amb = nilext::testing::random_group(rng, 3, 300, 10);
    SubgroupEmbedding emb = nilext::testing::random_subgroup(rng, amb);
    Nilsequence N0 = make_nilsequence(emb.sub, nilext::testing::random_phase_poly(rng, emb.sub.factors(), 2));
    for (const Nilsequence& N : {N0, linearize(N0), extend_along_ladder(N0, build_ladder(emb)).result}) {
      Nilsequence M = io::parse_nilsequence(json::parse(io::to_json(N).dump()));
      EXPECT_EQ(M.is_linear(), N.is_linear());
      EXPECT_EQ(M.complexity(), N.complexity());
      N.domain.for_each_element([&](const std::vector<Int>& x) { EXPECT_EQ(M.point(x), N.point(x)); });
    }
  }
}

TEST(IoNilsequence, RejectsInconsistentData) {
  Nilsequence N = linearize(make_nilsequence(FinAbGroup({4}), io::parse_polymap(json::parse(
                                                                  R"({"r":1,"k":1,"target":"torus","coeffs":[{"w":[1],"a":"1/4"}]})"))));
  json j = io::to_json(N);
  j["orbit"]["moduli"] = {5};
  EXPECT_THROW(io::parse_nilsequence(j), PreconditionError);
  j = io::to_json(N);
  j["form"] = "tabular";
  EXPECT_THROW(io::parse_nilsequence(j), io::ParseError);
}

TEST(IoCertificate, NonextCertificateSerializes) {
  auto res = check_extension_feasible(make_nonext(2).g, make_nonext(2).emb, 2);
  ASSERT_TRUE(std::holds_alternative<InfeasibilityCertificate>(res));
  json j = io::to_json(std::get<InfeasibilityCertificate>(res));
  EXPECT_TRUE(j["verified"].get<bool>());
  EXPECT_FALSE(Rational::parse(j["value"].get<std::string>()).is_integer());
  EXPECT_FALSE(j["functional"].empty());
}
