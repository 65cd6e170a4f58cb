#pragma once
// Laurent expansions of loops and bracelets on triangulated surfaces.
//
// Loop expansions come from the trace of the monodromy matrix product in
// the X-torus of the triangulation.  Exponents there may be half-integral,
// so they are carried scaled by 2 until the pullback to the A-side clears
// the denominators.

#include <string>
#include <vector>

#include "cs/qtorus.hpp"
#include "cs/seed.hpp"
#include "cs/surface.hpp"

namespace cs {

/// Torus element whose true exponents are `scaled` exponents divided by
/// `scale`.
struct ScaledElement {
  TorusElement scaled;
  int64_t scale = 1;

  bool integral() const;
  /// The element with integral exponents; throws ComputationError otherwise.
  TorusElement value() const;
  std::string str() const;
};

/// Tr(rho(loop)^weight) in X-variables indexed by arcs.  Peripheral loops
/// give X^{-weight * pi(loop)}.  Throws UnsupportedError when the
/// triangulation has self-folded triangles and ComputationError when the
/// word is not a closed curve on the triangulation.
ScaledElement trace_monodromy(const TriangulatedSurface& surf, const CurveWord& loop, unsigned weight = 1);

/// Exponentwise omega_1 from the X-torus of the arcs to the A-torus of
/// `seed`.  The first arc_count indices of the seed are the arcs; further
/// indices (principal coefficients) are allowed.  Throws ComputationError
/// if an exponent of the result is not integral.
TorusElement pstar(const ScaledElement& x, const CompatibleSeed& seed);

/// Checks that the seed's exchange data restricted to the arcs is the
/// surface's B.  Throws ComputationError otherwise.
void check_seed_matches(const TriangulatedSurface& surf, const CompatibleSeed& seed);

/// One component of a bracelet.  Loops carry a word; arcs are cluster
/// variables reached from the root cluster along `path`.
struct BraceletComponent {
  enum class Kind { Loop, Arc } kind = Kind::Loop;
  CurveWord loop;
  MutationPath path;
  size_t index = 0;
  int64_t weight = 1;
};

struct Bracelet {
  std::vector<BraceletComponent> components;
};

/// Expansion in the root cluster of `seed`.  Loop components of weight w
/// are T_w of the loop expansion; in the quantum case the classical loop
/// expansion is lifted with constant coefficients.  The product of the
/// (commuting) components is checked to be bar-invariant.
TorusElement bracelet_expand(const TriangulatedSurface& surf, const Bracelet& b, const CompatibleSeed& seed,
                             bool quantum);

/// Quantum lift of a classical Laurent polynomial with bar-invariant
/// monomials: coefficients are kept as constants.
TorusElement constant_lift(const TorusElement& classical);

struct IdentityCheck {
  std::string name;
  bool pass = false;
  std::string lhs, rhs;
};

/// Noose relation: flipping `arc` must create a self-folded triangle.  The
/// value of the new noose from the Ptolemy relation is compared with the
/// plain arc inside it times the mutated cluster variable (its notched
/// partner).  Throws ComputationError when the flip creates no self-folded
/// triangle.
IdentityCheck noose_relation(const TriangulatedSurface& surf, size_t arc);

}  // namespace cs
