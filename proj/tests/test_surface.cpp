#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "cs/errors.hpp"
#include "cs/surface.hpp"

using namespace cs;

namespace {

QVec omega1_of(const CompatibleSeed& s, const QVec& pi) {
  const auto& om = s.omega_matrix();
  QVec out(pi.size(), 0);
  for (size_t j = 0; j < pi.size(); ++j)
    for (size_t i = 0; i < pi.size(); ++i) out[j] += pi[i] * om[i][j];
  return out;
}

// Triangles up to rotation and order, for comparing triangulations.
std::vector<std::array<size_t, 3>> canonical_triangles(const TriangulatedSurface& s) {
  auto tris = s.triangles();
  for (auto& t : tris) {
    auto best = t;
    for (int r = 0; r < 3; ++r) {
      std::rotate(t.begin(), t.begin() + 1, t.end());
      best = std::min(best, t);
    }
    t = best;
  }
  std::sort(tris.begin(), tris.end());
  return tris;
}

}  // namespace

TEST_CASE("annulus triangulation reproduces the annulus seed") {
  auto a = surfaces::annulus();
  CHECK(a.mark_count() == 2);
  CHECK(a.puncture_count() == 0);
  CHECK(a.euler_characteristic() == 0);
  CHECK(q_from_int(b_matrix(a)) == examples::annulus().b_matrix());
  auto lam = orientation_lambda(a);
  CHECK(lam[0][1] == 2);
  CHECK(lam[1][0] == -2);
  auto rep = check_compatible(seed_of(a));
  CHECK(rep.ok);
  CHECK(rep.d == 4);
}

TEST_CASE("torus and polygon exchange matrices") {
  auto t = surfaces::punctured_torus();
  CHECK(t.mark_count() == 1);
  CHECK(t.puncture_count() == 1);
  CHECK(t.euler_characteristic() == 0);
  CHECK(b_matrix(t) == IMat{{0, -2, 2}, {2, 0, -2}, {-2, 2, 0}});
  CHECK_THROWS_AS(orientation_lambda(t), UnsupportedError);

  // Pentagon: two diagonals from mark 0, which share a triangle.
  auto p = surfaces::polygon(5);
  auto b = b_matrix(p);
  size_t d2 = p.arc_index("d2"), d3 = p.arc_index("d3");
  CHECK(std::abs(b[d2][d3]) == 1);
  CHECK(b[d2][d3] == -b[d3][d2]);
  CHECK(check_compatible(seed_of(p)).d == 4);
}

TEST_CASE("arcs with no common endpoint do not pair") {
  auto p = surfaces::polygon(6);
  auto lam = orientation_lambda(p);
  // s1 joins marks 1,2 and s3 joins marks 3,4.
  CHECK(lam[p.arc_index("s1")][p.arc_index("s3")] == 0);
}

TEST_CASE("malformed surfaces are rejected") {
  CHECK_THROWS_AS(TriangulatedSurface({"a", "b", "c"}, {false, true, true}, {{{0, 1, 2}}}), ParseError);
  CHECK_THROWS_AS(surface_from_json_text("{\"arcs\": [\"a\"]}"), ParseError);
  CHECK_THROWS_AS(surface_from_json_text("not json"), ParseError);
  CHECK_THROWS_AS(TriangulatedSurface({"a", "a"}, {true, true}, {}), ParseError);
}

TEST_CASE("surface JSON round trip") {
  for (const auto& s : {surfaces::annulus(), surfaces::punctured_torus(), surfaces::polygon(6),
                        surfaces::punctured_digon(), surfaces::annulus_pq(2, 3)}) {
    auto back = surface_from_json_text(s.to_json_text());
    CHECK(back.labels() == s.labels());
    CHECK(back.triangles() == s.triangles());
    CHECK(b_matrix(back) == b_matrix(s));
  }
}

TEST_CASE("flip is an involution and boundary arcs cannot flip") {
  auto a = surfaces::annulus();
  auto f = flip(a, 0);
  CHECK(canonical_triangles(flip(f, 0)) == canonical_triangles(a));
  CHECK(seed_of(f).b_matrix() == mutate_seed(seed_of(a), 0).b_matrix());
  CHECK_THROWS_AS(flip(a, a.arc_index("b1")), ComputationError);
  auto t = surfaces::punctured_torus();
  for (size_t i = 0; i < 3; ++i) CHECK(canonical_triangles(flip(flip(t, i), i)) == canonical_triangles(t));
}

TEST_CASE("flips commute with seed mutation on random triangulations") {
  std::mt19937 rng(20261016);
  std::vector<TriangulatedSurface> bases = {surfaces::annulus(), surfaces::punctured_torus(), surfaces::polygon(7),
                                            surfaces::annulus_pq(2, 2), surfaces::annulus_pq(1, 3),
                                            surfaces::punctured_digon()};
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    auto s = random_flips(bases[static_cast<size_t>(trial) % bases.size()], rng, 6);
    auto f = flippable_arcs(s);
    if (f.empty()) continue;
    size_t i = f[rng() % f.size()];
    auto lhs = seed_of(flip(s, i)).b_matrix();
    auto rhs = mutate_seed(seed_of(s), i).b_matrix();
    CHECK(lhs == rhs);
    if (s.puncture_count() == 0) {
      auto rep = check_compatible(seed_of(s));
      CHECK(rep.ok);
      CHECK(rep.d == 4);
    }
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("Ptolemy relation matches the exchange relation") {
  auto a = surfaces::annulus();
  auto seed = seed_of(a);
  std::vector<TorusElement> vals;
  for (size_t i = 0; i < a.arc_count(); ++i) {
    Exp e(a.arc_count(), 0);
    e[i] = 1;
    vals.push_back(TorusElement::monomial(e));
  }
  auto classical = examples::annulus();
  auto mutated = cluster_variable(CompatibleSeed(classical.labels(), classical.frozen(), classical.omega_matrix()),
                                  {0}, 0);
  CHECK(ptolemy_flip_value(a, 0, vals, Twist::zero(a.arc_count())) == mutated);
  (void)seed;
}

TEST_CASE("loop words: parsing, location and canonical form") {
  auto a = surfaces::annulus();
  auto l = curve_from_text(a, "loop: [(g1,R),(g2,L)]");
  CHECK(curve_str(a, l) == "loop: [(g1,R),(g2,L)]");
  CHECK(locate(a, l).size() == 2);
  CHECK(loop_from_arcs(a, {0, 1}) == l);
  CHECK(canonical_loop(curve_from_text(a, "loop: [(g2,L),(g1,R)]")) == canonical_loop(l));
  CHECK_FALSE(is_peripheral(l));
  CHECK_THROWS_AS(locate(a, curve_from_text(a, "loop: [(g1,L),(g2,L)]")), ComputationError);
  CHECK_THROWS_AS(curve_from_text(a, "loop: [(zz,L)]"), ParseError);
  CHECK_THROWS_AS(curve_from_text(a, "spiral"), ParseError);
}

TEST_CASE("shear and intersection coordinates of the annulus loop") {
  auto a = surfaces::annulus();
  auto l = curve_from_text(a, "loop: [(g1,R),(g2,L)]");
  CHECK(shear_coords(a, l) == QVec{-1, 1, 0, 0});
  auto pi = intersection_coords(a, l);
  CHECK(pi == QVec{mpq_class(1, 2), mpq_class(1, 2), 0, 0});
  // -omega_1(pi(L)) is the g-vector (1,-1,0,0).
  auto w = omega1_of(seed_of(a), pi);
  CHECK(w == QVec{-1, 1, 0, 0});
}

TEST_CASE("omega_1 of intersection coordinates equals extended shear coordinates") {
  std::mt19937 rng(7);
  int checked = 0;
  std::vector<TriangulatedSurface> bases = {surfaces::annulus(), surfaces::polygon(6), surfaces::annulus_pq(2, 1),
                                            surfaces::annulus_pq(2, 3)};
  for (size_t b = 0; b < bases.size(); ++b) {
    for (int variant = 0; variant < 3; ++variant) {
      auto s = random_flips(bases[b], rng, 2 * variant);
      auto seed = seed_of(s);
      auto curves = boundary_curves(s, 6);
      auto loops = random_loops(s, rng, 10);
      curves.insert(curves.end(), loops.begin(), loops.end());
      for (const auto& c : curves) {
        CHECK(omega1_of(seed, intersection_coords(s, c)) == shear_coords(s, c));
        ++checked;
      }
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("distinct normal curves in a disk have distinct shear coordinates") {
  auto p = surfaces::polygon(6);
  std::map<QVec, std::string> seen;
  for (const auto& c : boundary_curves(p, 8)) {
    // Each curve is enumerated from both ends; keep one direction.
    CurveWord r = c;
    std::reverse(r.arcs.begin(), r.arcs.end());
    std::reverse(r.turns.begin(), r.turns.end());
    for (auto& t : r.turns) t = mirror(t);
    if (r.arcs < c.arcs || (r.arcs == c.arcs && r.turns < c.turns)) continue;
    auto b = shear_coords(p, c);
    auto [it, fresh] = seen.emplace(b, curve_str(p, c));
    CHECK_MESSAGE(fresh, it->second << " and " << curve_str(p, c));
  }
  CHECK(seen.size() >= 10);
}

TEST_CASE("elementary laminates have shear coordinates -e_gamma") {
  std::mt19937 rng(11);
  std::vector<TriangulatedSurface> bases = {surfaces::annulus(), surfaces::punctured_torus(), surfaces::polygon(6),
                                            surfaces::annulus_pq(2, 2), surfaces::punctured_digon()};
  int checked = 0;
  for (const auto& base : bases)
    for (int variant = 0; variant < 4; ++variant) {
      auto s = random_flips(base, rng, variant);
      for (size_t g = 0; g < s.arc_count(); ++g) {
        if (s.is_boundary(g) || s.noose_of(g)) continue;
        // A noose stands for the arc it encloses, notched at the puncture.
        TaggedArc ta{g};
        for (size_t in = 0; in < s.arc_count(); ++in)
          if (s.noose_of(in) == g) {
            ta.arc = in;
            bool p_first = s.endpoints(in).first == *s.enclosed_puncture(in);
            (p_first ? ta.tag0 : ta.tag1) = Tag::Notched;
          }
        auto e = elementary_laminate(s, ta);
        auto b = shear_coords(s, e);
        for (size_t j = 0; j < s.arc_count(); ++j)
          if (!s.is_boundary(j)) CHECK_MESSAGE(b[j] == (j == g ? -1 : 0), s.to_json_text() << " arc " << g << " j " << j << " b " << b[j].get_str() << " " << curve_str(s, e));
        ++checked;
      }
    }
  CHECK(checked >= 30);
}

TEST_CASE("elementary laminate end behaviour") {
  auto t = surfaces::punctured_torus();
  auto e = elementary_laminate(t, TaggedArc{0});
  CHECK(e.start == EndKind::SpiralCW);
  CHECK(e.finish == EndKind::SpiralCW);
  auto n = elementary_laminate(t, TaggedArc{0, Tag::Notched, Tag::Notched});
  CHECK(n.start == EndKind::SpiralCCW);
  CHECK(n.finish == EndKind::SpiralCCW);
  CHECK(shear_coords(t, n) == QVec{1, 0, 0});

  auto a = surfaces::annulus();
  auto ea = elementary_laminate(a, TaggedArc{0});
  CHECK(ea.start == EndKind::Boundary);
  CHECK(a.is_boundary(ea.arcs.front()));
  CHECK(a.is_boundary(ea.arcs.back()));
  CHECK_THROWS(elementary_laminate(a, TaggedArc{0, Tag::Notched, Tag::Plain}));
}

TEST_CASE("Dehn twists on the annulus") {
  auto a = surfaces::annulus();
  auto l = curve_from_text(a, "loop: [(g1,R),(g2,L)]");
  CHECK(dehn_twist(a, l, l, 3) == l);
  auto e = elementary_laminate(a, TaggedArc{0});
  CHECK(dehn_twist(a, e, l, 0) == e);
  size_t cross = intersection_number(a, e, l);
  CHECK(cross == 1);
  auto bl = shear_coords(a, l);
  std::vector<QVec> b;
  std::vector<size_t> g2_crossings;
  for (int m = 0; m <= 6; ++m) {
    auto tw = dehn_twist(a, e, l, m);
    b.push_back(shear_coords(a, tw));
    g2_crossings.push_back(crossings_with(tw, 1));
    CHECK(omega1_of(seed_of(a), intersection_coords(a, tw)) == b.back());
  }
  // Affine from m = 2 on with slope #(e cap L) * b(L).
  for (size_t m = 3; m <= 6; ++m)
    for (size_t j = 0; j < 4; ++j) CHECK(b[m][j] - b[m - 1][j] == mpq_class(static_cast<long>(cross)) * bl[j]);
  for (size_t m = 3; m <= 6; ++m) CHECK(g2_crossings[m] == g2_crossings[m - 1] + 1);
  // Twisting back undoes the twist.
  CHECK(dehn_twist(a, dehn_twist(a, e, l, 4), l, -4) == e);
}

TEST_CASE("cutting the punctured torus along an arc gives an annulus") {
  auto t = surfaces::punctured_torus();
  auto cut = cut_along(t, {0});
  CHECK(cut.seed_relation_holds);
  CHECK(cut.surface.puncture_count() == 0);
  CHECK(cut.surface.mark_count() == 2);
  CHECK(cut.surface.euler_characteristic() == 0);
  // Interior part of B is the annulus block.
  auto b = b_matrix(cut.surface);
  size_t g2 = cut.surface.arc_index("g2"), g3 = cut.surface.arc_index("g3");
  CHECK(std::abs(b[g2][g3]) == 2);
  CHECK(check_compatible(seed_of(cut.surface)).d == 4);

  auto none = cut_along(t, {});
  CHECK(none.seed_relation_holds);
  CHECK(b_matrix(none.surface) == b_matrix(t));
  CHECK_THROWS_AS(cut_along(surfaces::annulus(), {2}), ComputationError);
}

TEST_CASE("gluing frozen directions identifies their duals") {
  auto cut = cut_along(surfaces::punctured_torus(), {0});
  auto seed = seed_of(cut.surface);
  IMat proj;
  auto [h1, h2] = cut.halves[0];
  auto glued = glue_frozen(seed, {{h1, h2}}, &proj);
  CHECK(glued.size() == seed.size() - 1);
  size_t row = 0;
  for (size_t r = 0; r < proj.size(); ++r)
    if (proj[r][h1] == 1) row = r;
  CHECK(proj[row][h1] == 1);
  CHECK(proj[row][h2] == 1);
  CHECK_THROWS_AS(glue_frozen(seed, {{0, 1}}), ComputationError);
}
