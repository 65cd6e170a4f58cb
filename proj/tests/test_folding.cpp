#include <doctest.h>

#include "cs/errors.hpp"
#include "cs/folding.hpp"
#include "cs/surface.hpp"
#include "cs/theta.hpp"

using namespace cs;

namespace {

const std::vector<std::vector<size_t>> kA3Parts{{0, 1, 2}, {3, 4, 5}};

TorusElement mono(const Exp& e) { return TorusElement::monomial(e); }

// Double cover of the once-punctured torus: every arc lifts to an a- and a
// b-copy.
TriangulatedSurface torus_double_cover() {
  return TriangulatedSurface({"g1a", "g1b", "g2a", "g2b", "g3a", "g3b"}, std::vector<bool>(6, false),
                             {{{0, 2, 4}}, {{1, 2, 4}}, {{1, 3, 5}}, {{0, 3, 5}}});
}

TorusElement one_plus_x_powers(const Exp& base, const Exp& v, std::vector<long> coeffs) {
  TorusElement out(base.size());
  for (size_t j = 0; j < coeffs.size(); ++j) {
    Exp e = base;
    for (size_t i = 0; i < e.size(); ++i) e[i] += static_cast<int64_t>(j) * v[i];
    out.add_term(e, coeffs[j]);
  }
  return out;
}

}  // namespace

TEST_CASE("cyclic A3 folds to a rank one seed") {
  auto cov = check_covering(examples::cyclic_a3_prin(), kA3Parts, true);
  CHECK(cov.omega_bar == QMat{{0, 1}, {-1, 0}});
  CHECK(cov.omega_bar_circ == QMat{{0, 3}, {-3, 0}});
  CHECK(cov.d_bar == std::vector<mpq_class>{mpq_class(1, 3), mpq_class(1, 3)});
  CHECK(cov.folded.rank() == 1);
  CHECK(cov.folded.is_frozen(1));
  CHECK(q_mul(q_from_int(cov.iota_star), cov.kappa) == q_identity(2));
  for (size_t i = 0; i < 6; ++i) CHECK(cov.iota[i][cov.part_of[i]] == 1);
}

TEST_CASE("singleton parts leave the seed unchanged") {
  for (const auto& s : {examples::a2_classical(), examples::kronecker_prin(), examples::cyclic_a3_prin()}) {
    std::vector<std::vector<size_t>> parts;
    for (size_t i = 0; i < s.size(); ++i) parts.push_back({i});
    auto cov = check_covering(s, parts, true);
    CHECK(cov.folded.omega_matrix() == s.omega_matrix());
    CHECK(cov.folded.frozen() == s.frozen());
    CHECK(cov.folded.labels() == s.labels());
  }
}

TEST_CASE("invalid partitions are rejected with the offending indices") {
  auto s = examples::cyclic_a3_prin();
  CHECK_THROWS_WITH_AS(check_covering(s, {{0, 1, 2, 3}, {4, 5}}), doctest::Contains("frozen"), ComputationError);
  CHECK_THROWS_AS(check_covering(s, {{0, 1, 2}, {3, 4}}), ComputationError);
  CHECK_THROWS_AS(check_covering(s, {{0, 1, 2}, {2, 3, 4, 5}}), ComputationError);
  CHECK_THROWS_AS(check_covering(s, {{0, 1, 2}, {3, 4, 5, 9}}), ComputationError);
  // Row sums over {2,3} differ between 'A1' and 'A2'.
  CHECK_THROWS_WITH_AS(check_covering(examples::kronecker_prin(), {{0, 1}, {2, 3}}), doctest::Contains("row sums"),
                       ComputationError);
  CompatibleSeed uneven({"a", "b"}, {false, false}, {{0, 1}, {-1, 0}}, std::nullopt, {1, 2});
  CHECK_THROWS_WITH_AS(check_covering(uneven, {{0, 1}}), doctest::Contains("symmetrizers"), ComputationError);
}

TEST_CASE("iota^* intertwines omega_1") {
  auto cov = check_covering(examples::cyclic_a3_prin(), kA3Parts);
  for (size_t i = 0; i < 6; ++i) {
    IVec e(6, 0);
    e[i] = 1;
    QVec w = cov.big.omega1(e);
    size_t p = cov.part_of[i];
    for (size_t b = 0; b < 2; ++b) {
      mpq_class img = 0;
      for (size_t j : cov.parts[b]) img += w[j];
      CHECK(img == cov.omega_bar[p][b]);
    }
  }
}

TEST_CASE("unfolding verdicts") {
  SUBCASE("cyclic A3 has arrows inside its unfrozen part") {
    auto v = check_unfolding(check_covering(examples::cyclic_a3_prin(), kA3Parts), 3);
    CHECK_FALSE(v.ok);
    CHECK(v.seeds_checked == 1);
    CHECK(v.failure.find("cannot be mutated") != std::string::npos);
  }
  SUBCASE("opposite arrows into one part break the sign condition") {
    QMat om = q_zero(4, 4);
    om[0][2] = 1, om[0][3] = -1, om[1][2] = -1, om[1][3] = 1;
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < i; ++j) om[i][j] = -om[j][i];
    CompatibleSeed s({"a", "a'", "b", "b'"}, std::vector<bool>(4, false), om);
    auto v = check_unfolding(check_covering(s, {{0, 1}, {2, 3}}), 2);
    CHECK_FALSE(v.ok);
    CHECK(v.failure.find("sign condition") != std::string::npos);
  }
  SUBCASE("lifted triangulation of a torus double cover") {
    auto cover = torus_double_cover();
    auto cov = check_covering(seed_of(cover), {{0, 1}, {2, 3}, {4, 5}}, true);
    CHECK(cov.folded.omega_matrix() == seed_of(surfaces::punctured_torus()).omega_matrix());
    auto v = check_unfolding(cov, 4);
    CHECK(v.ok);
    CHECK(v.failure.empty());
    CHECK(v.seeds_checked > 1);
    auto prin = check_unfolding(check_covering(principal_extend(seed_of(cover)),
                                               {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}, {10, 11}}),
                                3);
    CHECK(prin.ok);
  }
  SUBCASE("A2 doubled without arrows between copies") {
    QMat om = q_zero(4, 4);
    om[0][2] = 1, om[2][0] = -1, om[1][3] = 1, om[3][1] = -1;
    CompatibleSeed s({"a", "a'", "b", "b'"}, {false, false, false, false}, om);
    auto v = check_unfolding(check_covering(s, {{0, 1}, {2, 3}}, true), 6);
    CHECK(v.ok);
    CHECK(v.seeds_checked == 2);
  }
}

TEST_CASE("unfolded cyclic A3 theta factors into three trinomials") {
  auto seed = examples::cyclic_a3_prin();
  auto d = consistent_complete(initial_diagram(seed, Side::A, 6, false), 6);
  Exp m{-1, -1, -1, 0, 0, 0};
  TorusElement expect = mono(m);
  for (size_t i = 0; i < 3; ++i) {
    IVec vi = seed.omega1_basis(i), vp = seed.omega1_basis((i + 2) % 3);
    Exp a(6), b(6);
    for (size_t k = 0; k < 6; ++k) a[k] = vi[k], b[k] = vi[k] + vp[k];
    expect = t_multiply(expect, mono(Exp(6, 0)) + mono(a) + mono(b), Twist::zero(6));
  }
  CHECK(theta(d, m, positive_point(d), 6) == expect);
}

TEST_CASE("projected slice carries 1 + x + x^2") {
  auto cov = check_covering(examples::cyclic_a3_prin(), kA3Parts, true);
  auto big = consistent_complete(initial_diagram(cov.big, Side::A, 6, false), 6);
  auto proj = project_diagram(big, cov, 6);
  REQUIRE(proj.walls().size() == 1);
  CHECK(proj.walls()[0].full);
  CHECK(proj.walls()[0].g == WallFunction{1, 1, 1});
  // Different perturbations of the lifted point agree.
  CHECK(project_diagram(big, cov, 6, 7).walls()[0].g == WallFunction{1, 1, 1});
  CHECK_THROWS_AS(project_diagram(big, check_covering(examples::cyclic_a3_prin(), {{0, 1, 2}, {3}, {4}, {5}}), 6),
                  ComputationError);
}

TEST_CASE("folded, lifted and projected theta functions") {
  auto cov = check_covering(examples::cyclic_a3_prin(), kA3Parts, true);
  Exp v{0, 1};
  SUBCASE("negative side: the folded seed misses the extra wall") {
    Exp m{-3, 0};
    auto r = folded_theta_compare(cov, m, 6);
    CHECK(r.folded == one_plus_x_powers(m, v, {1, 3, 3, 1}));
    CHECK(r.projected == one_plus_x_powers(m, v, {1, 3, 6, 7, 6, 3, 1}));
    REQUIRE(r.has_lift);
    CHECK(r.lifted == r.projected);
    CHECK(r.lifted_equals_projected);
    CHECK_FALSE(r.folded_equals_projected);
  }
  SUBCASE("zero") {
    auto r = folded_theta_compare(cov, {0, 0}, 6);
    CHECK(r.folded == mono({0, 0}));
    CHECK(r.projected == mono({0, 0}));
    CHECK(r.lifted == mono({0, 0}));
  }
  SUBCASE("positive chamber gives cluster monomials") {
    for (Exp m : {Exp{3, 0}, Exp{3, -6}, Exp{1, 2}}) {
      auto r = folded_theta_compare(cov, m, 6);
      CHECK(r.folded == mono(m));
      CHECK(r.folded_equals_projected);
      if (r.has_lift) CHECK(r.lifted == mono(m));
    }
  }
}
