#include "cs/skein.hpp"

#include <array>

#include "cs/errors.hpp"

namespace cs {

namespace {

using Mat2 = std::array<TorusElement, 4>;  // row-major

Mat2 mat_mul(const Mat2& a, const Mat2& b, const Twist& form) {
  Mat2 c;
  for (size_t i = 0; i < 2; ++i)
    for (size_t j = 0; j < 2; ++j) {
      TorusElement s(a[0].dim());
      for (size_t k = 0; k < 2; ++k) s += t_multiply(a[2 * i + k], b[2 * k + j], form);
      c[2 * i + j] = s;
    }
  return c;
}

// Monodromy factor for one crossing, exponents doubled:
// left  X^{-1/2} [[X, X], [0, 1]],  right X^{-1/2} [[X, 0], [1, 1]].
Mat2 crossing_matrix(size_t n, size_t arc, Turn t) {
  Exp up(n, 0), down(n, 0);
  up[arc] = 1;
  down[arc] = -1;
  TorusElement zero(n);
  if (t == Turn::L) return {TorusElement::monomial(up), TorusElement::monomial(up), zero, TorusElement::monomial(down)};
  return {TorusElement::monomial(up), zero, TorusElement::monomial(down), TorusElement::monomial(down)};
}

CompatibleSeed without_lambda(const CompatibleSeed& s) {
  return CompatibleSeed(s.labels(), s.frozen(), s.omega_matrix(), std::nullopt, s.symmetrizers());
}

}  // namespace

bool ScaledElement::integral() const {
  for (const auto& [e, c] : scaled.terms())
    for (auto v : e)
      if (v % scale != 0) return false;
  return true;
}

TorusElement ScaledElement::value() const {
  if (!integral()) throw ComputationError("exponents are not integral: " + str());
  TorusElement out(scaled.dim());
  for (const auto& [e, c] : scaled.terms()) {
    Exp f(e.size());
    for (size_t i = 0; i < e.size(); ++i) f[i] = e[i] / scale;
    out.add_term(f, c);
  }
  return out;
}

std::string ScaledElement::str() const {
  if (scale == 1) return scaled.str();
  return "[exponents/" + std::to_string(scale) + "] " + scaled.str();
}

ScaledElement trace_monodromy(const TriangulatedSurface& surf, const CurveWord& loop, unsigned weight) {
  if (loop.kind != CurveKind::Loop) throw ComputationError("trace_monodromy needs a closed loop");
  if (weight == 0) throw ComputationError("loop weight must be positive");
  if (surf.has_self_folded()) throw UnsupportedError("flip away self-folded triangles before taking traces");
  locate(surf, loop);
  size_t n = surf.arc_count();
  if (is_peripheral(loop)) {
    Exp e(n, 0);
    for (size_t a : loop.arcs) e[a] -= static_cast<int64_t>(weight);
    return ScaledElement{TorusElement::monomial(e), 2};
  }
  Twist form = Twist::zero(n);
  Mat2 m = crossing_matrix(n, loop.arcs[0], loop.turns[0]);
  for (size_t k = 1; k < loop.arcs.size(); ++k) m = mat_mul(m, crossing_matrix(n, loop.arcs[k], loop.turns[k]), form);
  Mat2 p = m;
  for (unsigned w = 1; w < weight; ++w) p = mat_mul(p, m, form);
  TorusElement tr = p[0] + p[3];
  for (const auto& [e, c] : tr.terms())
    if (!c.nonnegative()) throw ComputationError("negative coefficient in a trace: " + tr.str());
  return ScaledElement{tr, 2};
}

void check_seed_matches(const TriangulatedSurface& surf, const CompatibleSeed& seed) {
  size_t n = surf.arc_count();
  if (seed.size() < n) throw ComputationError("seed is smaller than the triangulation");
  IMat b = b_matrix(surf);
  const auto& om = seed.omega_matrix();
  for (size_t i = 0; i < n; ++i) {
    if (seed.is_frozen(i) != surf.is_boundary(i)) throw ComputationError("seed and surface disagree on frozen arcs");
    for (size_t j = 0; j < n; ++j)
      if (om[i][j] != b[j][i]) throw ComputationError("seed exchange matrix does not match the triangulation");
  }
}

TorusElement pstar(const ScaledElement& x, const CompatibleSeed& seed) {
  size_t n = seed.size();
  if (x.scaled.dim() > n) throw ComputationError("X-element has more variables than the seed");
  TorusElement out(n);
  for (const auto& [e, c] : x.scaled.terms()) {
    IVec v(n, 0);
    for (size_t i = 0; i < e.size(); ++i) v[i] = e[i];
    QVec m = seed.omega1(v);
    Exp f(n);
    for (size_t k = 0; k < n; ++k) {
      mpq_class q = m[k] / static_cast<long>(x.scale);
      if (q.get_den() != 1) throw ComputationError("pullback has a non-integral exponent");
      f[k] = q.get_num().get_si();
    }
    out.add_term(f, c);
  }
  return out;
}

TorusElement constant_lift(const TorusElement& classical) {
  for (const auto& [e, c] : classical.terms())
    if (!c.is_constant()) throw ComputationError("constant lift needs a classical element");
  return classical;
}

TorusElement bracelet_expand(const TriangulatedSurface& surf, const Bracelet& b, const CompatibleSeed& seed,
                             bool quantum) {
  check_seed_matches(surf, seed);
  if (quantum && !seed.has_lambda()) throw ComputationError("quantum bracelets need a compatible Lambda");
  Twist form = quantum ? seed.a_twist() : Twist::zero(seed.size());
  CompatibleSeed arcs_seed = quantum ? seed : without_lambda(seed);
  TorusElement result = TorusElement::constant(seed.size(), 1);
  for (const auto& c : b.components) {
    TorusElement v(seed.size());
    if (c.kind == BraceletComponent::Kind::Loop) {
      if (c.weight < 1) throw ComputationError("loop weights must be positive");
      auto w = static_cast<unsigned>(c.weight);
      if (!quantum || is_peripheral(c.loop)) {
        v = constant_lift(pstar(trace_monodromy(surf, c.loop, w), seed));
      } else {
        TorusElement one = constant_lift(pstar(trace_monodromy(surf, c.loop, 1), seed));
        v = eval_poly(chebyshev_T(w), one, form);
      }
    } else {
      bool boundary = c.path.empty() && c.index < seed.size() && seed.is_frozen(c.index);
      if (c.weight < 1 && !boundary) throw ComputationError("interior arc weights must be positive");
      if (c.weight == 0) continue;
      TorusElement x = cluster_variable(arcs_seed, c.path, c.index);
      if (c.weight > 0) {
        v = t_power(x, static_cast<unsigned>(c.weight), form);
      } else {
        Exp e = x.terms().begin()->first;
        for (auto& k : e) k *= c.weight;
        v = TorusElement::monomial(e);
      }
    }
    result = t_multiply(result, v, form);
  }
  if (quantum && result.bar() != result) throw ComputationError("bracelet components do not commute");
  return result;
}

IdentityCheck noose_relation(const TriangulatedSurface& surf, size_t arc) {
  TriangulatedSurface f = flip(surf, arc);
  std::optional<size_t> inner;
  for (size_t a = 0; a < f.arc_count(); ++a)
    if (f.noose_of(a) == arc) inner = a;
  if (!inner) throw ComputationError("flipping '" + surf.labels()[arc] + "' does not create a noose");
  size_t n = surf.arc_count();
  std::vector<TorusElement> vals;
  for (size_t i = 0; i < n; ++i) {
    Exp e(n, 0);
    e[i] = 1;
    vals.push_back(TorusElement::monomial(e));
  }
  Twist form = Twist::zero(n);
  TorusElement noose = ptolemy_flip_value(surf, arc, vals, form);
  CompatibleSeed seed = without_lambda(seed_of(surf));
  TorusElement notched = cluster_variable(seed, {arc}, arc);
  TorusElement product = t_multiply(vals[*inner], notched, form);
  IdentityCheck r;
  r.name = "noose = plain * notched";
  r.lhs = noose.str();
  r.rhs = product.str();
  r.pass = noose == product;
  return r;
}

}  // namespace cs
