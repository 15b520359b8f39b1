#pragma once

#include <optional>

#include "nilext/liftext.hpp"
#include "nilext/polymap.hpp"

namespace nilext {

/// The quadratic phase that does not extend: on Z = Z_{p^2} x Z_p with
/// Z_0 = p Z_{p^2} x Z_p, g(p x, y) = x y / p. In subgroup coordinates
/// (x, y) in Z_p x Z_p the map is the single Taylor term xy/p.
struct NonextInstance {
  Int p = 0;
  int k = 2;
  SubgroupEmbedding emb;
  PolyMap g;
};

inline NonextInstance make_nonext(Int p, int k = 2) {
  require(is_prime(p), "p must be prime");
  require(k >= 2, "g has degree 2, so k >= 2");
  NonextInstance in;
  in.p = p;
  in.k = k;
  in.emb = SubgroupEmbedding{FinAbGroup({p, p}), FinAbGroup({p * p, p}), IntMatrix{{p, 0}, {0, 1}}};
  in.emb.validate();
  in.g = PolyMap(2, k, 1, Target::torus());
  in.g.set({1, 1}, Rational(1, p));
  return in;
}

/// Outcome of the polynomial-form extension attempt, broken into the steps
/// of the hand argument. Writing h(x,y) = a_1 + a_2 x + a_3 y + a_4 C(x,2) +
/// a_5 C(y,2) + a_6 xy (plus higher terms when k > 2):
///   pure_y_vanish:     restriction alone forces every coefficient at w = (0, j)
///                      to 0 (for k = 2: a_1 = a_3 = a_5 = 0);
///   p_cross_vanishes:  y-periodicity plus restriction force p a_6 = 0;
///   infeasible_without_x_period: the system stays inconsistent when the
///                      x-periodicity rows are dropped;
///   x_period_redundant: every x-periodicity row is implied (with value 0)
///                      by the restriction rows.
struct NonextDeduction {
  ExtensionResult result;
  bool pure_y_vanish = false;
  bool p_cross_vanishes = false;
  bool infeasible_without_x_period = false;
  bool x_period_redundant = false;
};

inline NonextDeduction deduce_nonext(const NonextInstance& in) {
  NonextDeduction out{check_extension_feasible(in.g, in.emb, in.k), false, false, false, false};
  auto J = MultiIndexSet::get(2, in.k);
  const std::size_t N = J->size();
  auto unit = [&](const MultiIndex& w, Int scale) {
    std::vector<Int> e(N, 0);
    e[*J->find(w)] = scale;
    return e;
  };

  TorusSystem restrict_only = extension_system(in.g, in.emb, in.k, 0, {{false, false}, true});
  out.pure_y_vanish = true;
  for (int j = 0; j <= in.k; ++j) {
    auto v = implied_value(restrict_only, unit({0, j}, 1));
    out.pure_y_vanish = out.pure_y_vanish && v && v->is_zero();
  }

  TorusSystem y_and_restrict = extension_system(in.g, in.emb, in.k, 0, {{false, true}, true});
  auto cross = implied_value(y_and_restrict, unit({1, 1}, in.p));
  out.p_cross_vanishes = cross && cross->is_zero();
  out.infeasible_without_x_period =
      std::holds_alternative<InfeasibilityCertificate>(solve_torus_system(y_and_restrict, N));

  TorusSystem x_only = extension_system(in.g, in.emb, in.k, 0, {{true, false}, false});
  out.x_period_redundant = true;
  for (std::size_t i = 0; i < x_only.A.rows(); ++i) {
    auto v = implied_value(restrict_only, x_only.A.row(i));
    out.x_period_redundant = out.x_period_redundant && v && v->is_zero();
  }
  return out;
}

/// The linear-form extension of the same data: g is linearized on Z_0 and
/// carried up the ladder of Z_0 <= Z.
struct NonextLinearExtension {
  Nilsequence extended;
  Ladder ladder;
  Int agreements = 0;  // subgroup points where the extension reproduces g exactly
  Int subgroup_size = 0;
  Int outside = 0;  // ambient points off rho^{-1}(0)
  bool ok() const { return agreements == subgroup_size; }
};

inline NonextLinearExtension nonext_linear_extension(const NonextInstance& in) {
  NonextLinearExtension out;
  Nilsequence N0 = make_nilsequence(in.emb.sub, in.g);
  out.ladder = build_ladder(in.emb);
  out.extended = extend_along_ladder(N0, out.ladder).result;
  out.subgroup_size = in.emb.sub.order();
  in.emb.sub.for_each_element([&](const std::vector<Int>& y) {
    if (out.extended.point(in.emb.apply(y)) == N0.point(y)) ++out.agreements;
  });
  in.emb.amb.for_each_element([&](const std::vector<Int>& x) {
    if (!out.extended.point(x)) ++out.outside;
  });
  return out;
}

}  // namespace nilext
