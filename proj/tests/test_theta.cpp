#include <doctest.h>

#include "cs/theta.hpp"

using namespace cs;

namespace {

TorusElement mono(const Exp& e, const TCoeff& c = 1) { return TorusElement::monomial(e, c); }

const ScatteringDiagram& a2_diagram() {
  static const ScatteringDiagram d = consistent_complete(initial_diagram(examples::a2(1), Side::A, 6, true), 6);
  return d;
}

const ScatteringDiagram& annulus_diagram() {
  static const ScatteringDiagram d =
      consistent_complete(initial_diagram(examples::annulus(), Side::A, 8, true), 8);
  return d;
}

}  // namespace

TEST_CASE("A2 theta from three broken lines") {
  const auto& d = a2_diagram();
  QVec q{mpq_class(17, 20), mpq_class(3, 2)};
  Exp p{0, -1};
  auto lines = broken_lines(d, p, q, 6);
  CHECK(lines.size() == 3);
  for (const auto& bl : lines) {
    CHECK(bl.initial == p);
    CHECK(bl.end == q);
    CHECK(bl.segments.front().exponent == p);
  }
  CHECK(theta(d, p, q, 6) == mono({-1, 0}) + mono({-1, -1}) + mono({0, -1}));
}

TEST_CASE("theta functions in the positive chamber are monomials") {
  const auto& d = a2_diagram();
  QVec q = positive_point(d);
  for (Exp p : {Exp{1, 0}, Exp{0, 1}, Exp{2, 3}, Exp{0, 0}}) CHECK(theta(d, p, q, 6) == mono(p));
}

TEST_CASE("theta_0 is 1 at order 0") {
  const auto& d = a2_diagram();
  CHECK(theta(d, {0, 0}, {mpq_class(17, 20), mpq_class(3, 2)}, 0) == mono({0, 0}));
}

TEST_CASE("parallel and serial theta agree") {
  const auto& d = annulus_diagram();
  QVec q = point_near(d, {1, -1}, default_perturbation(2));
  for (Exp p : {Exp{1, -1, 0, 0}, Exp{2, -2, 0, 0}, Exp{-1, 0, 1, 1}}) CHECK(theta(d, p, q, 8) == theta_serial(d, p, q, 8));
}

TEST_CASE("theta functions are bar invariant and pointed") {
  const auto& d = a2_diagram();
  QVec q{mpq_class(17, 20), mpq_class(3, 2)};
  for (Exp p : {Exp{0, -1}, Exp{-1, 0}, Exp{-1, -1}, Exp{1, -2}}) {
    auto th = theta(d, p, q, 6);
    CHECK(th == th.bar());
    CHECK(th.coeff(p) == TCoeff(1));
    for (const auto& [e, c] : th.terms()) CHECK(solve_key(d, p, e).has_value());
  }
}

TEST_CASE("transport moves theta functions between base points") {
  const auto& d = a2_diagram();
  QVec q1{mpq_class(17, 20), mpq_class(3, 2)}, q2 = positive_point(d);
  Exp p{0, -1};
  CHECK(transport(d, theta(d, p, q1, 6), q1, q2, 6) == theta(d, p, q2, 6));
}

TEST_CASE("annulus structure constants") {
  const auto& d = annulus_diagram();
  auto prod = theta_product(d, {{0, 1, 0, 0}, {1, -1, 0, 0}}, 6);
  std::map<Exp, TCoeff> want{{{1, 0, 0, 0}, TCoeff::t_power(-2)}, {{-1, 0, 1, 1}, TCoeff::t_power(2)}};
  CHECK(prod == want);
  CHECK(structure_constant(d, {{0, 1, 0, 0}, {1, -1, 0, 0}}, {1, 0, 0, 0}, 6) == TCoeff::t_power(-2));
}

TEST_CASE("Chebyshev law on the limiting ray") {
  const auto& d = annulus_diagram();
  QVec q = point_near(d, {1, -1}, default_perturbation(2));
  Exp p{1, -1, 0, 0};
  auto th = theta(d, p, q, 8);
  for (unsigned k = 2; k <= 3; ++k) {
    auto tk = eval_poly(chebyshev_T(k), th, product_form(d));
    Exp kp = p;
    for (auto& x : kp) x *= k;
    CHECK(theta_decompose(d, tk, q, 8) == std::map<Exp, TCoeff>{{kp, 1}});
  }
}

TEST_CASE("DT transformation of A2") {
  const auto& d = a2_diagram();
  QVec q = positive_point(d);
  for (Exp m : {Exp{1, 0}, Exp{0, 1}, Exp{1, 1}}) {
    Exp neg = m;
    for (auto& x : neg) x = -x;
    CHECK(dt_transform(d, mono(m), 6) == theta(d, neg, q, 6));
  }
  auto path = green_to_red(examples::a2(1), 6);
  REQUIRE(path.has_value());
  CHECK(path->size() == 2);
}

TEST_CASE("chamber location") {
  auto seed = examples::a2(1);
  auto here = chamber_locate(seed, positive_point(a2_diagram()), 4);
  REQUIRE(here.has_value());
  CHECK(here->empty());
  CHECK(chamber_locate(seed, {-1, mpq_class(-1, 3)}, 5).has_value());
}
