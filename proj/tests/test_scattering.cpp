#include <doctest.h>

#include "cs/errors.hpp"
#include "cs/scattering.hpp"

using namespace cs;

namespace {

std::vector<const Wall*> outgoing(const ScatteringDiagram& d) {
  std::vector<const Wall*> out;
  for (const auto& w : d.walls())
    if (!w.initial) out.push_back(&w);
  return out;
}

std::vector<TCoeff> series_mul(const std::vector<TCoeff>& a, const std::vector<TCoeff>& b, size_t n) {
  std::vector<TCoeff> out(n + 1, TCoeff(0));
  for (size_t i = 0; i < a.size() && i <= n; ++i)
    for (size_t j = 0; j < b.size() && i + j <= n; ++j) out[i + j] += a[i] * b[j];
  return out;
}

ScatteringDiagram complete(const CompatibleSeed& s, Side side, unsigned order, bool quantum, bool parallel = true) {
  return consistent_complete(initial_diagram(s, side, order, quantum), order, parallel);
}

}  // namespace

TEST_CASE("quantum dilogarithm action series") {
  CHECK(quantum_dilog(1) == WallFunction{1, TCoeff::t_power(1)});
  CHECK(quantum_dilog(0) == WallFunction{1, 1});
}

TEST_CASE("crossing a wall and crossing back is the identity") {
  for (int64_t c : {-3, -1, 0, 2}) {
    for (const auto& g : {quantum_dilog(1), WallFunction{1, 2, 3}}) {
      mpq_class d = g == quantum_dilog(1) ? mpq_class(1) : mpq_class(0);
      auto fwd = crossing_series(g, c, 1, d, 6), back = crossing_series(g, c, -1, d, 6);
      auto prod = series_mul(fwd, back, 6);
      CHECK(prod[0] == TCoeff(1));
      for (size_t k = 1; k <= 6; ++k) CHECK(prod[k].is_zero());
    }
  }
}

TEST_CASE("A2 completion adds exactly one outgoing wall") {
  for (unsigned order : {2u, 4u, 7u}) {
    auto d = complete(examples::a2(1), Side::A, order, true);
    auto out = outgoing(d);
    REQUIRE(out.size() == 1);
    CHECK(out[0]->normal == IVec{1, 1});
    CHECK_FALSE(out[0]->full);
    CHECK(out[0]->g == quantum_dilog(1));
    CHECK(d.exponent(Exp{0, 0}, out[0]->normal) == Exp{-1, 1});
    CHECK(d.dump().find("support=ray(1,-1)") != std::string::npos);
  }
  SUBCASE("the X side gives the same pentagon") {
    auto x = complete(examples::a2(1), Side::X, 4, true);
    REQUIRE(outgoing(x).size() == 1);
    CHECK(outgoing(x)[0]->normal == IVec{1, 1});
  }
}

TEST_CASE("cyclic A3 with principal coefficients has six walls") {
  auto seed = examples::cyclic_a3_prin();
  auto d = complete(seed, Side::A, 4, false);
  REQUIRE(d.walls().size() == 6);
  auto out = outgoing(d);
  REQUIRE(out.size() == 3);
  for (const auto* w : out) {
    CHECK(w->g == WallFunction{1, 1});
    int64_t ones = 0;
    for (auto x : w->normal) ones += x;
    CHECK(ones == 2);
    // The exponent is u = v_j + v_k for the two indices in the normal.
    Exp u(6, 0);
    for (size_t i = 0; i < 3; ++i)
      if (w->normal[i]) {
        auto v = seed.omega1_basis(i);
        for (size_t k = 0; k < 6; ++k) u[k] += v[k];
      }
    CHECK(d.exponent(Exp(6, 0), w->normal) == u);
  }
}

TEST_CASE("Kronecker limiting ray carries (1 - x)^{-2}") {
  auto d = complete(examples::kronecker_prin(), Side::A, 8, false);
  const Wall* limit = nullptr;
  for (const auto& w : d.walls())
    if (w.normal == IVec{1, 1}) limit = &w;
  REQUIRE(limit != nullptr);
  REQUIRE(limit->g.size() >= 5);
  for (size_t k = 0; k < 5; ++k) CHECK(limit->g[k] == TCoeff(static_cast<long>(k + 1)));
  // Walls off the limit ray carry the classical dilogarithm.
  for (const auto* w : outgoing(d))
    if (w != limit) CHECK(w->g == WallFunction{1, 1});
}

TEST_CASE("parallel and serial completion agree") {
  for (const auto& [seed, order, quantum] :
       {std::tuple{examples::markov(), 4u, false}, std::tuple{examples::kronecker_prin(), 6u, false},
        std::tuple{examples::annulus(), 5u, true}}) {
    CompletionStats a, b;
    auto par = consistent_complete(initial_diagram(seed, Side::A, order, quantum), order, true, &a);
    auto ser = consistent_complete(initial_diagram(seed, Side::A, order, quantum), order, false, &b);
    CHECK(par.dump() == ser.dump());
    CHECK(a.walls_added == b.walls_added);
  }
}

TEST_CASE("consistency certificates") {
  auto d = complete(examples::a2(1), Side::A, 5, true);
  auto ok = consistency_certificate(d, 40, 3);
  CHECK(ok.loops == 40);
  CHECK(ok.failures == 0);
  auto bad = consistency_certificate(initial_diagram(examples::a2(1), Side::A, 5, true), 40, 3);
  CHECK(bad.failures > 0);
  CHECK_FALSE(bad.first_failure.empty());
}

TEST_CASE("path-ordered product around the origin") {
  auto init = initial_diagram(examples::a2(1), Side::A, 5, true);
  auto d = consistent_complete(init, 5);
  std::vector<QVec> loop{{1, 2}, {-2, 1}, {-1, -2}, {2, -1}, {1, 2}};
  auto images = path_ordered_product(d, loop, 5);
  REQUIRE(images.size() == 2);
  CHECK(images[0] == TorusElement::monomial({1, 0}));
  CHECK(images[1] == TorusElement::monomial({0, 1}));
  auto raw = path_ordered_product(init, loop, 5);
  CHECK((raw[0] != TorusElement::monomial({1, 0}) || raw[1] != TorusElement::monomial({0, 1})));
}

TEST_CASE("segment crossings and genericity") {
  auto d = complete(examples::a2(1), Side::A, 3, true);
  auto cr = segment_crossings(d, {1, 2}, {-2, -1});
  REQUIRE(cr.size() == 2);
  CHECK(cr[0].time < cr[1].time);
  CHECK_THROWS_AS(segment_crossings(d, {0, 1}, {-1, -1}), NonGenericError);
  CHECK_FALSE(is_generic(d, {1, -1}));
  CHECK(is_generic(d, {1, 2}));
  CHECK(is_generic(d, point_near(d, {1, -1}, default_perturbation(2))));
}

TEST_CASE("quantum A side needs a compatible Lambda") {
  CHECK_THROWS_AS(initial_diagram(examples::markov(), Side::A, 3, true), ComputationError);
  CHECK_NOTHROW(initial_diagram(examples::markov(), Side::A, 3, false));
}

TEST_CASE("diagram dump is deterministic") {
  auto a = complete(examples::cyclic_a3_prin(), Side::A, 4, false).dump();
  auto b = complete(examples::cyclic_a3_prin(), Side::A, 4, false).dump();
  CHECK(a == b);
  CHECK(a.rfind("# side=A order=4 rank=3 walls=6", 0) == 0);
}
