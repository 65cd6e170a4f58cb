#include <doctest.h>

#include <random>

#include "cs/qtorus.hpp"

using namespace cs;

namespace {

TorusElement random_element(std::mt19937& rng, size_t dim, int terms) {
  std::uniform_int_distribution<int> ex(-2, 2), co(-3, 3), tp(-2, 2);
  TorusElement x(dim);
  for (int i = 0; i < terms; ++i) {
    Exp e(dim);
    for (auto& v : e) v = ex(rng);
    x.add_term(e, TCoeff::t_power(tp(rng), co(rng)));
  }
  return x;
}

Twist random_twist(std::mt19937& rng, size_t dim) {
  std::uniform_int_distribution<int> d(-3, 3);
  std::vector<std::vector<mpq_class>> m(dim, std::vector<mpq_class>(dim, 0));
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = i + 1; j < dim; ++j) {
      m[i][j] = mpq_class(d(rng), 2);
      m[j][i] = -m[i][j];
    }
  return Twist::from_rationals(m);
}

}  // namespace

TEST_CASE("TCoeff arithmetic and rendering") {
  TCoeff a = TCoeff::t_power(1) + TCoeff::t_power(-1);
  CHECK(a.str() == "t + t^(-1)");
  CHECK((a * a).str() == "t^2 + 2 + t^(-2)");
  TCoeff h = TCoeff::t_power(mpq_class(1, 2));
  CHECK(h.str() == "t^(1/2)");
  CHECK((h * h) == TCoeff::t_power(1));
  CHECK((a - a).is_zero());
  CHECK(a.at_one() == 2);
  CHECK(TCoeff::t_power(3, 2).bar() == TCoeff::t_power(-3, 2));
}

TEST_CASE("twisted product on the annulus Lambda") {
  std::vector<std::vector<mpq_class>> lam = {
      {0, 2, 0, 0}, {-2, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}};
  Twist tw = Twist::from_rationals(lam);
  auto a = TorusElement::monomial({1, 0, 0, 0});
  auto b = TorusElement::monomial({0, 1, 0, 0});
  CHECK(t_multiply(a, b, tw) == TorusElement::monomial({1, 1, 0, 0}, TCoeff::t_power(2)));
  auto one = TorusElement::constant(4, 1);
  CHECK(t_multiply(a, one, tw) == a);
  // z^u z^v = t^{2 Lambda(u,v)} z^v z^u
  CHECK(t_multiply(a, b, tw) == t_multiply(b, a, tw).scaled(TCoeff::t_power(4)));
}

TEST_CASE("qbinom values") {
  CHECK(qbinom(5, 0).is_one());
  CHECK(qbinom(2, 1) == TCoeff::t_power(1) + TCoeff::t_power(-1));
  CHECK(qbinom(3, 1).at_one() == 3);
  for (int a = 0; a <= 7; ++a)
    for (int k = 0; k <= a; ++k) {
      TCoeff q = qbinom(a, k);
      CHECK(q.bar() == q);
      CHECK(q.nonnegative());
      mpz_class b;
      mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(k));
      CHECK(q.at_one() == b);
    }
}

TEST_CASE("Chebyshev polynomials") {
  CHECK(poly_str(chebyshev_T(0)) == "2");
  CHECK(poly_str(chebyshev_T(1)) == "z");
  CHECK(poly_str(chebyshev_T(2)) == "z^2 - 2");
  Twist zero = Twist::zero(1);
  TorusElement x = TorusElement::monomial({1}) + TorusElement::monomial({-1});
  CHECK(eval_poly(chebyshev_T(3), x, zero) == TorusElement::monomial({3}) + TorusElement::monomial({-3}));
  // T_k T_l = T_{k+l} + T_{|k-l|}
  for (unsigned k = 0; k <= 8; ++k)
    for (unsigned l = 0; l <= 8; ++l) {
      auto lhs = t_multiply(eval_poly(chebyshev_T(k), x, zero), eval_poly(chebyshev_T(l), x, zero), zero);
      auto rhs = eval_poly(chebyshev_T(k + l), x, zero) +
                 eval_poly(chebyshev_T(k > l ? k - l : l - k), x, zero);
      CHECK(lhs == rhs);
    }
}

TEST_CASE("property: twist associativity, bar anti-automorphism, classical limit") {
  std::mt19937 rng(20240611);
  for (int iter = 0; iter < 100; ++iter) {
    size_t dim = 2 + static_cast<size_t>(iter % 3);
    Twist tw = random_twist(rng, dim);
    auto a = random_element(rng, dim, 3), b = random_element(rng, dim, 3), c = random_element(rng, dim, 3);
    CHECK(t_multiply(t_multiply(a, b, tw), c, tw) == t_multiply(a, t_multiply(b, c, tw), tw));
    CHECK(a.bar().bar() == a);
    CHECK(t_multiply(a, b, tw).bar() == t_multiply(b.bar(), a.bar(), tw));
    CHECK(t_multiply(a, b, tw).at_one() == t_multiply(a.at_one(), b.at_one(), Twist::zero(dim)));
  }
}

TEST_CASE("parallel and serial products agree") {
  std::mt19937 rng(7);
  Twist tw = random_twist(rng, 3);
  auto a = random_element(rng, 3, 80), b = random_element(rng, 3, 80);
  CHECK(t_multiply_parallel(a, b, tw) == t_multiply_serial(a, b, tw));
}
