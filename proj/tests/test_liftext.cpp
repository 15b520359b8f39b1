#include <gtest/gtest.h>

#include <cmath>

#include "nilext/liftext.hpp"
#include "nilext/nonext.hpp"
#include "test_support.hpp"

using namespace nilext;
using nilext::testing::random_rational;
using nilext::testing::Rng;
using nilext::testing::uniform;

namespace {

PolyMap random_real_poly(Rng& rng, int r, int k, int d, int max_deg, Int max_den) {
  PolyMap f(r, k, d, Target::real());
  for (std::size_t i = 0; i < f.num_terms(); ++i) {
    if (total_degree(f.indices()[i]) > max_deg) continue;
    for (int c = 0; c < d; ++c) f.coeff(i, c) = random_rational(rng, max_den, 6);
  }
  return f;
}

std::vector<Rational> random_vec(Rng& rng, int r, Int max_den) {
  std::vector<Rational> x;
  for (int i = 0; i < r; ++i) x.push_back(random_rational(rng, max_den, 4));
  return x;
}

HPoint random_hpoint(Rng& rng, int r, int k, int d, Int max_den = 6) {
  return {random_real_poly(rng, r, k, d, k, max_den), random_vec(rng, r, max_den)};
}

HPoint random_lattice_point(Rng& rng, int r, int k, int d) {
  HPoint l{PolyMap(r, k, d, Target::real()), {}};
  for (std::size_t i = 0; i < l.poly.num_terms(); ++i)
    for (int c = 0; c < d; ++c) l.poly.coeff(i, c) = Rational(uniform(rng, -3, 3));
  for (int i = 0; i < r; ++i) l.shift.push_back(Rational(uniform(rng, -3, 3)));
  return l;
}

std::vector<Rational> add(std::vector<Rational> a, const std::vector<Rational>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

// Product by its definition, checked pointwise: (f + g(. + x))(v) = f(v) + g(v + x).
void expect_product_pointwise(const HPoint& a, const HPoint& b, const HPoint& c, Rng& rng) {
  ASSERT_EQ(c.shift, add(a.shift, b.shift));
  for (int t = 0; t < 6; ++t) {
    auto v = random_vec(rng, a.arity(), 5);
    auto lhs = c.poly.eval_raw(v);
    auto fa = a.poly.eval_raw(v), gb = b.poly.eval_raw(add(v, a.shift));
    for (std::size_t q = 0; q < lhs.size(); ++q) EXPECT_EQ(lhs[q], fa[q] + gb[q]);
  }
}

PolyMap torus_poly(int r, int k, const std::vector<std::pair<MultiIndex, Rational>>& terms) {
  PolyMap f(r, k, 1, Target::torus());
  for (const auto& [w, a] : terms) f.set(w, a);
  return f;
}

// Exhaustive eq. of orbit_eval(linearize(phi)) with phi on prod Z_{n_i}.
void expect_linearization_exact(const PolyMap& phi, const std::vector<Int>& moduli) {
  LinearOrbit L = linearize(phi, moduli);
  FinAbGroup g(moduli);
  g.for_each_element([&](const std::vector<Int>& z) {
    auto v = orbit_eval(L, z);
    ASSERT_TRUE(v.has_value());
    EXPECT_EQ(*v, phi.eval(z));
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// HPoint

TEST(HPoint, PureShiftsAndPureFibersMultiplyAdditively) {
  HPoint a = h_identity(2, 2, 1), b = h_identity(2, 2, 1);
  a.shift = {Rational(1, 2), Rational(3)};
  b.shift = {Rational(-1, 3), Rational(1)};
  EXPECT_EQ(h_mul(a, b), (HPoint{PolyMap(2, 2, 1, Target::real()), {Rational(1, 6), Rational(4)}}));
  Rng rng(131);
  HPoint f{random_real_poly(rng, 2, 2, 1, 2, 5), {Rational(0), Rational(0)}};
  HPoint g{random_real_poly(rng, 2, 2, 1, 2, 5), {Rational(0), Rational(0)}};
  EXPECT_EQ(h_mul(f, g), (HPoint{f.poly + g.poly, f.shift}));
}

TEST(HPoint, ConjugatingByAShiftShiftsThePolynomial) {
  HPoint a = h_identity(2, 2, 1);
  a.shift = {Rational(1), Rational(0)};
  HPoint b = h_identity(2, 2, 1);
  b.poly.set({2, 0}, Rational(1));  // binom(v_1, 2)
  // a b a^{-1} = (f(. + e_1), 0) and a^{-1} b a = (f(. - e_1), 0).
  HPoint plus = h_mul(h_mul(a, b), h_inv(a)), minus = h_mul(h_mul(h_inv(a), b), a);
  PolyMap fp(2, 2, 1, Target::real()), fm(2, 2, 1, Target::real());
  fp.set({2, 0}, Rational(1));
  fp.set({1, 0}, Rational(1));  // binom(v+1,2) = binom(v,2) + v
  fm.set({2, 0}, Rational(1));
  fm.set({1, 0}, Rational(-1));
  fm.set({0, 0}, Rational(1));  // binom(v-1,2) = binom(v,2) - v + 1
  EXPECT_EQ(plus, (HPoint{fp, {Rational(0), Rational(0)}}));
  EXPECT_EQ(minus, (HPoint{fm, {Rational(0), Rational(0)}}));
  for (int v = -4; v <= 4; ++v) {
    EXPECT_EQ(plus.poly.eval_raw({Rational(v), Rational(0)})[0], binom(Rational(v + 1), 2));
    EXPECT_EQ(minus.poly.eval_raw({Rational(v), Rational(0)})[0], binom(Rational(v - 1), 2));
  }
}

TEST(HPoint, ProductMatchesDefinitionPointwise) {
  Rng rng(137);
  for (int it = 0; it < 60; ++it) {
    int r = static_cast<int>(uniform(rng, 1, 3)), k = static_cast<int>(uniform(rng, 0, 3));
    int d = static_cast<int>(uniform(rng, 1, 2));
    HPoint a = random_hpoint(rng, r, k, d), b = random_hpoint(rng, r, k, d);
    expect_product_pointwise(a, b, h_mul(a, b), rng);
  }
}

TEST(HPoint, GroupAxioms) {
  Rng rng(139);
  for (int it = 0; it < 100; ++it) {
    int r = static_cast<int>(uniform(rng, 1, 3)), k = static_cast<int>(uniform(rng, 0, 3));
    int d = static_cast<int>(uniform(rng, 1, 2));
    HPoint a = random_hpoint(rng, r, k, d), b = random_hpoint(rng, r, k, d), c = random_hpoint(rng, r, k, d);
    HPoint e = h_identity(r, k, d);
    EXPECT_EQ(h_mul(h_mul(a, b), c), h_mul(a, h_mul(b, c)));
    EXPECT_EQ(h_mul(a, h_inv(a)), e);
    EXPECT_EQ(h_mul(h_inv(a), a), e);
    EXPECT_EQ(h_mul(a, e), a);
    EXPECT_EQ(h_mul(e, a), a);
  }
}

TEST(HPoint, RejectsShapeMismatch) {
  EXPECT_THROW(h_mul(h_identity(2, 2, 1), h_identity(2, 3, 1)), PreconditionError);
  EXPECT_THROW(h_mul(h_identity(1, 2, 1), h_identity(2, 2, 1)), PreconditionError);
}

TEST(HPoint, IntegerPowersAreRepeatedProducts) {
  Rng rng(149);
  for (int it = 0; it < 30; ++it) {
    int r = static_cast<int>(uniform(rng, 1, 3)), k = static_cast<int>(uniform(rng, 0, 3));
    HPoint a = random_hpoint(rng, r, k, 1);
    HPoint acc = h_identity(r, k, 1);
    EXPECT_EQ(h_pow(a, Rational(0)), acc);
    for (int n = 1; n <= 5; ++n) {
      acc = h_mul(acc, a);
      EXPECT_EQ(h_pow(a, Rational(n)), acc);
      EXPECT_EQ(h_pow(a, Rational(-n)), h_inv(acc));
    }
  }
}

TEST(HPoint, PowersFormAOneParameterSubgroup) {
  Rng rng(151);
  for (int it = 0; it < 100; ++it) {
    int r = static_cast<int>(uniform(rng, 1, 3)), k = static_cast<int>(uniform(rng, 0, 3));
    HPoint a = random_hpoint(rng, r, k, 1, 4);
    Rational s = random_rational(rng, 6, 5), t = random_rational(rng, 6, 5);
    OneParameter flow(a);
    EXPECT_EQ(flow.at(Rational(1)), a);
    EXPECT_EQ(h_mul(flow.at(s), flow.at(t)), flow.at(s + t));
    EXPECT_EQ(h_pow(flow.at(s), t), flow.at(s * t));
  }
}

TEST(HPoint, RootsThenPowersRecoverTheElement) {
  Rng rng(157);
  for (int it = 0; it < 100; ++it) {
    Int p = std::vector<Int>{2, 3, 5}[static_cast<std::size_t>(it % 3)];
    int r = static_cast<int>(uniform(rng, 1, 3)), k = static_cast<int>(uniform(rng, 0, 3));
    HPoint a = random_hpoint(rng, r, k, 1, 6);
    HPoint w = h_pow(a, Rational(1, p));
    EXPECT_EQ(h_pow(w, Rational(p)), a);
    HPoint prod = h_identity(r, k, 1);
    for (Int j = 0; j < p; ++j) prod = h_mul(prod, w);
    EXPECT_EQ(prod, a);
  }
}

TEST(HPoint, CommutatorsRespectTheFiltration) {
  // H_1 = everything; H_i (i >= 2) = (poly of degree <= k - i + 1, 0).
  Rng rng(163);
  const int k = 3;
  auto draw = [&](int level, int r) {
    if (level <= 1) return random_hpoint(rng, r, k, 1, 5);
    return HPoint{random_real_poly(rng, r, k, 1, k - level + 1, 5),
                  std::vector<Rational>(static_cast<std::size_t>(r), Rational(0))};
  };
  for (int it = 0; it < 500; ++it) {
    int r = static_cast<int>(uniform(rng, 1, 3));
    int i = static_cast<int>(uniform(rng, 1, 4)), j = static_cast<int>(uniform(rng, 1, 4));
    HPoint c = h_commutator(draw(i, r), draw(j, r));
    for (const auto& q : c.shift) EXPECT_TRUE(q.is_zero());
    EXPECT_LE(c.poly.actual_degree(), std::max(k - (i + j) + 1, -1)) << i << " " << j;
  }
  for (int it = 0; it < 20; ++it) {
    HPoint a = h_identity(2, k, 1), b = h_identity(2, k, 1);
    a.shift = random_vec(rng, 2, 7);
    b.shift = random_vec(rng, 2, 7);
    EXPECT_EQ(h_commutator(a, b), h_identity(2, k, 1));
  }
}

TEST(HPoint, RationalDerivativesDropTheDegree) {
  Rng rng(167);
  for (int it = 0; it < 100; ++it) {
    int r = static_cast<int>(uniform(rng, 1, 3)), m = static_cast<int>(uniform(rng, 0, 3));
    PolyMap f = random_real_poly(rng, r, 3, 1, m, 6);
    auto x = random_vec(rng, r, 6);
    EXPECT_LE(f.derivative(x).actual_degree(), m - 1);
  }
}

TEST(LambdaCoset, Examples) {
  Rng rng(173);
  HPoint half = h_identity(1, 1, 1);
  half.poly.set({1}, Rational(1, 2));
  EXPECT_FALSE(lambda_coset_eq(half, h_identity(1, 1, 1)));
  for (int it = 0; it < 60; ++it) {
    int r = static_cast<int>(uniform(rng, 1, 3)), k = static_cast<int>(uniform(rng, 0, 3));
    HPoint a = random_hpoint(rng, r, k, 1);
    EXPECT_TRUE(lambda_coset_eq(a, a));
    HPoint l = random_lattice_point(rng, r, k, 1);
    EXPECT_TRUE(lambda_coset_eq(h_mul(a, l), a));
    EXPECT_TRUE(lambda_coset_eq(a, h_mul(a, l)));
    HPoint off = l;
    off.shift[0] += Rational(1, 3);
    EXPECT_FALSE(lambda_coset_eq(h_mul(a, off), a));
  }
}

// ---------------------------------------------------------------------------
// Linearization

TEST(Linearize, LinearPhaseIsItsOwnLinearization) {
  for (Int n : {3, 7, 10}) {
    PolyMap phi = torus_poly(1, 1, {{{1}, Rational(1, n)}});
    LinearOrbit L = linearize(phi, {n});
    const HPoint& h = L.generators()[0];
    EXPECT_EQ(h.shift, std::vector<Rational>{Rational(1)});
    EXPECT_EQ(h.poly.coeff_at({0}), Rational(1, n));
    EXPECT_EQ(h.poly.coeff_at({1}), Rational(0));
    expect_linearization_exact(phi, {n});
  }
}

TEST(Linearize, QuadraticPhaseOnZ2n) {
  for (Int n : {2, 3, 5}) {
    PolyMap phi = torus_poly(1, 2, {{{2}, Rational(1, n)}});
    LinearOrbit L = linearize(phi, {2 * n});
    const HPoint& h = L.generators()[0];
    EXPECT_EQ(h.poly.coeff_at({0}), Rational(0));
    EXPECT_EQ(h.poly.coeff_at({1}), Rational(1, n));
    EXPECT_EQ(h.poly.coeff_at({2}), Rational(0));
    expect_linearization_exact(phi, {2 * n});
  }
}

TEST(Linearize, BilinearPhase) {
  for (Int n : {2, 3, 4, 6}) {
    PolyMap phi = torus_poly(2, 2, {{{1, 1}, Rational(1, n)}});
    LinearOrbit L = linearize(phi, {n, n});
    EXPECT_EQ(L.generators()[0].poly.coeff_at({0, 1}), Rational(1, n));
    EXPECT_EQ(L.generators()[1].poly.coeff_at({1, 0}), Rational(1, n));
    EXPECT_EQ(L.generators()[1].poly.coeff_at({0, 0}), Rational(0));
    EXPECT_TRUE(L.generators_commute());
    EXPECT_TRUE(L.periods_in_lattice());
    expect_linearization_exact(phi, {n, n});
  }
}

TEST(Linearize, ZeroPointGivesTheBaseValue) {
  PolyMap phi = torus_poly(2, 2, {{{0, 0}, Rational(2, 7)}, {{1, 1}, Rational(1, 7)}});
  LinearOrbit L = linearize(phi, {7, 7});
  EXPECT_EQ(*orbit_eval(L, {0, 0}), std::vector<Rational>{Rational(2, 7)});
}

TEST(Linearize, RejectsNonPeriodicMaps) {
  PolyMap phi = torus_poly(1, 1, {{{1}, Rational(1, 4)}});
  EXPECT_THROW(linearize(phi, {2}), PreconditionError);
}

TEST(Linearize, FastEvaluationMatchesTheFullProduct) {
  Rng rng(179);
  for (int it = 0; it < 30; ++it) {
    FinAbGroup g = nilext::testing::random_group(rng, 3, 300, 8);
    int k = static_cast<int>(uniform(rng, 1, 3));
    PolyMap phi = nilext::testing::random_phase_poly(rng, g.factors(), k);
    LinearOrbit L = linearize(phi, g.factors());
    for (int t = 0; t < 10; ++t) {
      auto z = g.element_at(uniform(rng, 0, g.order() - 1));
      HPoint P = L.point(z);
      auto [s, v] = L.shift_and_value(z);
      EXPECT_EQ(P.shift, s);
      for (int c = 0; c < P.poly.dim(); ++c) EXPECT_EQ(P.poly.coeff(0, c), v[static_cast<std::size_t>(c)]);
    }
  }
}

TEST(Linearize, RandomFamilyIsBitExact) {
  Rng rng(181);
  for (int it = 0; it < 60; ++it) {
    FinAbGroup g = nilext::testing::random_group(rng, 3, 12 * 12 * 12, 12);
    int k = static_cast<int>(uniform(rng, 1, 3));
    expect_linearization_exact(nilext::testing::random_phase_poly(rng, g.factors(), k), g.factors());
  }
}

// ---------------------------------------------------------------------------
// Extension steps

TEST(ExtendSplit, CharacterOnZn) {
  for (bool lin : {false, true}) {
    const Int n = 5, p = 3;
    Nilsequence N = make_nilsequence(FinAbGroup({n}), torus_poly(1, 1, {{{1}, Rational(1, n)}}));
    if (lin) N = linearize(N);
    Nilsequence E = extend_split(N, p);
    EXPECT_EQ(E.domain, FinAbGroup({p, n}));
    E.domain.for_each_element([&](const std::vector<Int>& zx) {
      EXPECT_EQ(*E.point(zx), std::vector<Rational>{Rational(zx[1], n)});
    });
    for (Int x = 0; x < n; ++x) EXPECT_EQ(E.point({0, x}), N.point({x}));
    EXPECT_EQ(E.complexity().k, N.complexity().k);
    EXPECT_EQ(E.complexity().max_den, N.complexity().max_den);
    EXPECT_EQ(E.complexity().r, N.complexity().r + (lin ? 0 : 1));
  }
}

TEST(ExtendSplit, ConstantStaysConstant) {
  Nilsequence N = make_nilsequence(FinAbGroup({4}), torus_poly(1, 2, {{{0}, Rational(1, 3)}}));
  Nilsequence E = extend_split(linearize(N), 2);
  E.domain.for_each_element(
      [&](const std::vector<Int>& x) { EXPECT_EQ(*E.point(x), std::vector<Rational>{Rational(1, 3)}); });
}

TEST(ExtendNonsplit, NonextDataAtTwo) {
  NonextInstance in = make_nonext(2);
  // Subgroup coordinates already read Z_d + K with d = p = 2.
  Nilsequence N = linearize(make_nilsequence(in.emb.sub, in.g));
  Nilsequence E = extend_nonsplit(N, 2, 2);
  EXPECT_EQ(E.domain, FinAbGroup({4, 2}));
  EXPECT_EQ(E.nonsplit_steps, 1);
  in.emb.sub.for_each_element([&](const std::vector<Int>& y) {
    auto v = E.point({2 * y[0], y[1]});
    ASSERT_TRUE(v.has_value());
    EXPECT_EQ(*v, in.g.eval(y));
    EXPECT_EQ(*v, std::vector<Rational>{Rational(y[0] * y[1], 2).frac()});
  });
  EXPECT_FALSE(E.point({1, 0}).has_value());
  EXPECT_FALSE(E.point({3, 1}).has_value());
}

TEST(ExtendNonsplit, ZeroMapGivesTheZeroOrbit) {
  NonextInstance in = make_nonext(3);
  Nilsequence N = linearize(make_nilsequence(in.emb.sub, PolyMap(2, 2, 1, Target::torus())));
  Nilsequence E = extend_nonsplit(N, 3, 3);
  for (const auto& h : E.linear().generators()) EXPECT_EQ(h.poly.actual_degree(), -1);
  E.domain.for_each_element([&](const std::vector<Int>& x) {
    auto v = E.point(x);
    EXPECT_EQ(v.has_value(), x[0] % 3 == 0);
    if (v) EXPECT_EQ(*v, std::vector<Rational>{Rational(0)});
  });
}

TEST(ExtendNonsplit, OneVariableQuadratic) {
  for (auto [p, d] : std::vector<std::pair<Int, Int>>{{2, 3}, {3, 5}, {5, 3}, {2, 7}}) {
    PolyMap phi = torus_poly(1, 2, {{{2}, Rational(1, d)}});
    Nilsequence N = linearize(make_nilsequence(FinAbGroup({d}), phi));
    Nilsequence E = extend_nonsplit(N, p, d);
    for (Int z = 0; z < p * d; ++z) {
      auto v = E.point({z});
      ASSERT_EQ(v.has_value(), z % p == 0) << z;
      if (v) EXPECT_EQ(*v, phi.eval(std::vector<Int>{z / p}));
    }
  }
}

TEST(ExtendNonsplit, Preconditions) {
  Nilsequence N = make_nilsequence(FinAbGroup({3}), torus_poly(1, 1, {{{1}, Rational(1, 3)}}));
  EXPECT_THROW(extend_nonsplit(N, 2, 3), PreconditionError);  // polynomial form
  EXPECT_THROW(extend_nonsplit(linearize(N), 2, 4), PreconditionError);
  EXPECT_THROW(extend_nonsplit(linearize(N), 4, 3), PreconditionError);
}

TEST(ExtendAlongLadder, EmptyLadderReturnsTheInput) {
  FinAbGroup g({6});
  Nilsequence N = make_nilsequence(g, torus_poly(1, 2, {{{2}, Rational(1, 3)}}));
  SubgroupEmbedding id{g, g, IntMatrix{{1}}};
  LadderExtension e = extend_along_ladder(N, build_ladder(id));
  EXPECT_EQ(e.result.poly(), N.poly());
  EXPECT_EQ(e.result.domain, g);
}

TEST(ExtendAlongLadder, OneSplitStepProjects) {
  // Z_2 <= Z_2 + Z_3.
  SubgroupEmbedding emb{FinAbGroup({2}), FinAbGroup({2, 3}), IntMatrix{{1}, {0}}};
  Ladder L = build_ladder(emb);
  ASSERT_EQ(L.length(), 1u);
  ASSERT_EQ(L.steps[0].kind, StepKind::Split);
  Nilsequence N = make_nilsequence(emb.sub, torus_poly(1, 1, {{{1}, Rational(1, 2)}}));
  Nilsequence E = extend_along_ladder(N, L).result;
  emb.amb.for_each_element([&](const std::vector<Int>& x) {
    EXPECT_EQ(*E.point(x), std::vector<Rational>{Rational(x[0], 2)});
  });
}

TEST(ExtendAlongLadder, NonextPipeline) {
  for (Int p : {2, 3, 5}) {
    NonextLinearExtension r = nonext_linear_extension(make_nonext(p));
    ASSERT_EQ(r.ladder.length(), 1u);
    EXPECT_EQ(r.ladder.steps[0].kind, StepKind::NonSplit);
    EXPECT_EQ(r.subgroup_size, p * p);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.outside, p * p * p - p * p);
    EXPECT_EQ(r.extended.nonsplit_steps, 1);
  }
}

TEST(ExtendAlongLadder, RandomInstancesAgreeOnTheSubgroup) {
  Rng rng(191);
  int nonsplit_runs = 0;
  for (int it = 0; it < 25; ++it) {
    FinAbGroup amb = nilext::testing::random_group(rng, 3, 2000, 12);
    SubgroupEmbedding emb = nilext::testing::random_subgroup(rng, amb);
    int k = static_cast<int>(uniform(rng, 1, 3));
    Nilsequence N0 = make_nilsequence(emb.sub, nilext::testing::random_phase_poly(rng, emb.sub.factors(), k));
    Ladder L = build_ladder(emb);
    LadderExtension e = extend_along_ladder(N0, L);
    ASSERT_EQ(e.result.domain, amb);
    EXPECT_LE(static_cast<double>(L.length()), std::log2(static_cast<double>(emb.index())) + 1e-12);
    int nonsplit = 0;
    for (const auto& s : L.steps) nonsplit += s.kind == StepKind::NonSplit;
    EXPECT_EQ(e.result.nonsplit_steps, nonsplit);
    nonsplit_runs += nonsplit > 0;
    emb.sub.for_each_element([&](const std::vector<Int>& y) {
      auto v = e.result.point(emb.apply(y));
      ASSERT_TRUE(v.has_value());
      EXPECT_EQ(*v, *N0.point(y));
    });
  }
  EXPECT_GT(nonsplit_runs, 0);
}

// ---------------------------------------------------------------------------
// Assembly

TEST(Assemble, WholeGroupIsTheIdentityTwist) {
  FinAbGroup g({5, 3});
  Nilsequence N0 = make_nilsequence(g, torus_poly(2, 2, {{{0, 2}, Rational(1, 3)}, {{2, 0}, Rational(2, 5)}}));
  GroupFunction f = N0.sample();
  SubgroupEmbedding id{g, g, IntMatrix::identity(2)};
  Assembly a = assemble_full_nilsequence(f, id, {0, 0}, N0, 1.0);
  EXPECT_NEAR(a.report.epsilon, 1.0, 1e-12);
  EXPECT_EQ(a.report.character, (std::vector<Int>{0, 0}));
  EXPECT_EQ(a.report.index, 1);
}

TEST(Assemble, ExtensionByZeroSaturatesTheBound) {
  Rng rng(193);
  for (int it = 0; it < 15; ++it) {
    FinAbGroup amb = nilext::testing::random_group(rng, 3, 400, 10);
    SubgroupEmbedding emb = nilext::testing::random_subgroup(rng, amb);
    Nilsequence N0 = make_nilsequence(emb.sub, nilext::testing::random_phase_poly(rng, emb.sub.factors(), 2));
    std::vector<Int> t0 = amb.element_at(uniform(rng, 0, amb.order() - 1));
    GroupFunction f(amb);
    emb.sub.for_each_element([&](const std::vector<Int>& y) {
      f[static_cast<std::size_t>(amb.index_of(amb.add(t0, emb.apply(y))))] = N0.value(y);
    });
    Assembly a = assemble_full_nilsequence(f, emb, t0, N0, 1.0);
    EXPECT_NEAR(a.report.subgroup_correlation, 1.0, 1e-12);
    EXPECT_NEAR(a.report.epsilon, 1.0 / static_cast<double>(emb.index()), 1e-9);
  }
}

TEST(Assemble, RejectsOverclaimedEpsilon) {
  FinAbGroup g({4});
  SubgroupEmbedding emb{FinAbGroup({2}), g, IntMatrix{{2}}};
  Nilsequence N0 = make_nilsequence(emb.sub, torus_poly(1, 1, {{{1}, Rational(1, 2)}}));
  GroupFunction f(g);  // zero
  EXPECT_THROW(assemble_full_nilsequence(f, emb, {0}, N0, 0.5), PreconditionError);
}

TEST(Assemble, NonextDemoMatchesScaledSubgroupCorrelation) {
  NonextInstance in = make_nonext(2);
  Nilsequence N0 = make_nilsequence(in.emb.sub, in.g);
  const FinAbGroup& Z = in.emb.amb;
  std::vector<Int> t0{1, 1};
  GroupFunction f(Z);
  in.emb.sub.for_each_element([&](const std::vector<Int>& y) {
    f[static_cast<std::size_t>(Z.index_of(Z.add(t0, in.emb.apply(y))))] = N0.value(y);
  });
  Assembly a = assemble_full_nilsequence(f, in.emb, t0, N0, 1.0);
  EXPECT_NEAR(a.report.epsilon, a.report.subgroup_correlation / static_cast<double>(in.emb.index()), 1e-6);
  EXPECT_EQ(a.report.complexity.nonsplit_steps, 1);
}
