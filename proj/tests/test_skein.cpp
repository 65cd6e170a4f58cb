#include <doctest.h>

#include <random>

#include "cs/errors.hpp"
#include "cs/skein.hpp"
#include "cs/theta.hpp"

using namespace cs;

namespace {

TorusElement mono(const Exp& e) { return TorusElement::monomial(e); }

CurveWord annulus_loop(const TriangulatedSurface& a) { return curve_from_text(a, "loop: [(g1,R),(g2,L)]"); }

// A closed loop found by always turning the same way.
CurveWord peripheral_loop(const TriangulatedSurface& s, size_t arc, Turn t) {
  SideRef s0 = s.sides_of(arc)[0];
  SideRef into = s0;
  CurveWord w;
  w.kind = CurveKind::Loop;
  do {
    w.arcs.push_back(s.arc_at(into));
    w.turns.push_back(t);
    SideRef ex{into.tri, (into.pos + (t == Turn::R ? 1 : 2)) % 3};
    into = *s.glued(ex);
  } while (into != s0);
  return w;
}

}  // namespace

TEST_CASE("annulus loop trace") {
  auto a = surfaces::annulus();
  auto tr = trace_monodromy(a, annulus_loop(a));
  CHECK(tr.scale == 2);
  CHECK_FALSE(tr.integral());
  // X^{-pi(L)} (1 + X2 + X1 X2) with doubled exponents.
  CHECK(tr.scaled == mono({-1, -1, 0, 0}) + mono({-1, 1, 0, 0}) + mono({1, 1, 0, 0}));
  CHECK_THROWS_AS(tr.value(), ComputationError);
  auto lifted = pstar(tr, examples::annulus());
  CHECK(lifted == mono({1, -1, 0, 0}) + mono({-1, 1, 0, 0}) + mono({-1, -1, 1, 1}));
}

TEST_CASE("weighted traces follow the Chebyshev recursion") {
  auto a = surfaces::annulus();
  auto l = annulus_loop(a);
  auto seed = examples::annulus();
  Twist zero = Twist::zero(4);
  auto one = pstar(trace_monodromy(a, l), seed);
  for (unsigned k = 2; k <= 4; ++k)
    CHECK(pstar(trace_monodromy(a, l, k), seed) == eval_poly(chebyshev_T(k), one, zero));
}

TEST_CASE("peripheral loops give a single monomial") {
  auto t = surfaces::punctured_torus();
  for (Turn turn : {Turn::L, Turn::R}) {
    auto p = peripheral_loop(t, 0, turn);
    CHECK(is_peripheral(p));
    CHECK(p.arcs.size() == 6);
    auto tr = trace_monodromy(t, p);
    CHECK(tr.scaled == mono({-2, -2, -2}));
    CHECK(tr.value() == mono({-1, -1, -1}));
  }
}

TEST_CASE("once-punctured torus loop pulls back to the Markov expression") {
  auto t = surfaces::punctured_torus();
  auto l = loop_from_arcs(t, {1, 2});
  auto x = pstar(trace_monodromy(t, l), seed_of(t));
  // (A1^2 + A2^2 + A3^2) / (A2 A3)
  CHECK(x == mono({2, -1, -1}) + mono({0, 1, -1}) + mono({0, -1, 1}));
  // With principal coefficients only even weights pull back integrally.
  auto prin = principal_extend(seed_of(t));
  CHECK_THROWS_AS(pstar(trace_monodromy(t, l), prin), ComputationError);
  auto two = pstar(trace_monodromy(t, l, 2), prin);
  CHECK(two.coeff({0, 2, -2, 0, -1, -1}) == 1);
}

TEST_CASE("loop traces are pointed at -pi with positive coefficients") {
  std::mt19937 rng(3);
  int checked = 0;
  for (const auto& s : {surfaces::annulus(), surfaces::annulus_pq(2, 2), surfaces::punctured_torus()}) {
    std::vector<SideRef> sides;
    for (size_t a = 0; a < s.arc_count(); ++a)
      if (!s.is_boundary(a))
        for (auto sd : s.sides_of(a)) sides.push_back(sd);
    for (int attempt = 0; attempt < 400 && checked < 60; ++attempt) {
      SideRef s0 = sides[rng() % sides.size()], into = s0;
      CurveWord w;
      w.kind = CurveKind::Loop;
      bool closed = false;
      for (int step = 0; step < 10 && !closed; ++step) {
        Turn t = rng() % 2 ? Turn::L : Turn::R;
        SideRef ex{into.tri, (into.pos + (t == Turn::R ? 1 : 2)) % 3};
        if (s.is_boundary(s.arc_at(ex))) break;
        w.arcs.push_back(s.arc_at(into));
        w.turns.push_back(t);
        into = *s.glued(ex);
        closed = into == s0;
      }
      if (!closed) continue;
      auto tr = trace_monodromy(s, w);
      Exp lead(s.arc_count(), 0);
      for (size_t a : w.arcs) lead[a] -= 1;
      CHECK(tr.scaled.coeff(lead) == 1);
      for (const auto& [e, c] : tr.scaled.terms()) {
        CHECK(c.nonnegative());
        for (size_t i = 0; i < e.size(); ++i) CHECK(e[i] >= lead[i]);
      }
      ++checked;
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("traces reject unsupported input") {
  auto a = surfaces::annulus();
  auto arc = elementary_laminate(a, TaggedArc{0});
  CHECK_THROWS_AS(trace_monodromy(a, arc), ComputationError);
  CHECK_THROWS_AS(trace_monodromy(a, annulus_loop(a), 0), ComputationError);
  auto d = flip(surfaces::punctured_digon(), 1);
  REQUIRE(d.has_self_folded());
  CurveWord loop{CurveKind::Loop, {d.arc_index("r1")}, {Turn::L}};
  CHECK_THROWS_AS(trace_monodromy(d, loop), UnsupportedError);
}

TEST_CASE("annulus bracelets equal theta functions") {
  auto a = surfaces::annulus();
  auto seed = examples::annulus();
  auto d = consistent_complete(initial_diagram(seed, Side::A, 6, true), 6);
  QVec q = positive_point(d);
  for (int64_t k = 1; k <= 2; ++k) {
    BraceletComponent c;
    c.loop = annulus_loop(a);
    c.weight = k;
    auto x = bracelet_expand(a, Bracelet{{c}}, seed, true);
    CHECK(x == theta(d, {k, -k, 0, 0}, q, 6));
    CHECK(x.bar() == x);
    CHECK(g_vector(x, seed) == Exp{k, -k, 0, 0});
  }
}

TEST_CASE("classical bracelet of weight two is [L]^2 - 2") {
  auto a = surfaces::annulus();
  auto seed = examples::annulus();
  BraceletComponent c;
  c.loop = annulus_loop(a);
  auto one = bracelet_expand(a, Bracelet{{c}}, seed, false);
  c.weight = 2;
  auto two = bracelet_expand(a, Bracelet{{c}}, seed, false);
  Twist zero = Twist::zero(4);
  CHECK(two == t_multiply(one, one, zero) - TorusElement::constant(4, 2));
}

TEST_CASE("g-vectors of bracelets add over components") {
  auto a = surfaces::annulus();
  auto seed = examples::annulus();
  BraceletComponent loop;
  loop.loop = annulus_loop(a);
  loop.weight = 2;
  BraceletComponent bd;
  bd.kind = BraceletComponent::Kind::Arc;
  bd.index = 2;
  bd.weight = -1;
  BraceletComponent bd2 = bd;
  bd2.index = 3;
  bd2.weight = 3;
  auto x = bracelet_expand(a, Bracelet{{loop, bd, bd2}}, seed, true);
  CHECK(g_vector(x, seed) == Exp{2, -2, -1, 3});

  BraceletComponent inner;
  inner.kind = BraceletComponent::Kind::Arc;
  inner.index = 0;
  inner.weight = -1;
  CHECK_THROWS_AS(bracelet_expand(a, Bracelet{{inner}}, seed, true), ComputationError);
}

TEST_CASE("annulus skein relation A2 [L] = q A1 + q^-1 A3") {
  auto a = surfaces::annulus();
  auto seed = examples::annulus();
  Twist form = seed.a_twist();
  BraceletComponent c;
  c.loop = annulus_loop(a);
  auto l = bracelet_expand(a, Bracelet{{c}}, seed, true);
  auto a1 = mono({1, 0, 0, 0});
  auto a2 = mono({0, 1, 0, 0});
  auto a3 = cluster_variable(seed, {0}, 0);
  TCoeff q = TCoeff::t_power(-2), qinv = TCoeff::t_power(2);
  CHECK(t_multiply(a2, l, form) == a1.scaled(q) + a3.scaled(qinv));
}

TEST_CASE("noose relation on the punctured digon") {
  auto d = surfaces::punctured_digon();
  auto r = noose_relation(d, d.arc_index("r2"));
  CHECK(r.pass);
  CHECK(r.lhs == r.rhs);
  auto r1 = noose_relation(d, d.arc_index("r1"));
  CHECK(r1.pass);
  CHECK_THROWS_AS(noose_relation(surfaces::annulus(), 0), ComputationError);
}

TEST_CASE("loops away from a cut keep their expansion") {
  auto t = surfaces::punctured_torus();
  auto cut = cut_along(t, {0});
  REQUIRE(cut.seed_relation_holds);
  auto l = loop_from_arcs(t, {1, 2});
  auto on_cut = trace_monodromy(cut.surface, curve_from_text(cut.surface, curve_str(t, l)));
  // Drop the second half of the cut arc, which the loop never meets.
  IMat drop(3, IVec(4, 0));
  for (size_t i = 0; i < 3; ++i) drop[i][i] = 1;
  ScaledElement back{on_cut.scaled.map_exponents(drop), on_cut.scale};
  auto glued = unfreeze(glue_frozen(seed_of(cut.surface), {{cut.halves[0].first, cut.halves[0].second}}), {0});
  CHECK(pstar(back, glued) == pstar(trace_monodromy(t, l), seed_of(t)));
}

TEST_CASE("seed and surface must agree") {
  auto a = surfaces::annulus();
  BraceletComponent c;
  c.loop = annulus_loop(a);
  CHECK_THROWS_AS(bracelet_expand(a, Bracelet{{c}}, examples::markov(), false), ComputationError);
  CHECK_THROWS_AS(bracelet_expand(a, Bracelet{{c}}, seed_of(surfaces::polygon(5)), false), ComputationError);
}
