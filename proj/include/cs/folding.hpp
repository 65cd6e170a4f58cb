#pragma once
// Coverings of seeds by partitions of the index set, the folded seed they
// define, and the comparison of theta functions of the folded seed with
// those obtained from the big seed's scattering diagram.

#include <string>
#include <vector>

#include "cs/linalg.hpp"
#include "cs/qtorus.hpp"
#include "cs/scattering.hpp"
#include "cs/seed.hpp"

namespace cs {

struct SeedCovering {
  CompatibleSeed big;
  std::vector<std::vector<size_t>> parts;
  std::vector<size_t> part_of;
  QMat omega_bar;             ///< omega_bar(e_P, e_Q) = sum over j in Q of omega(e_i, e_j), i in P
  std::vector<mpq_class> d_bar;  ///< d_i / |P|
  QMat omega_bar_circ;        ///< omega_bar(e_P, e_Q) / d_bar(Q)
  IMat iota;                  ///< N_bar -> N, rows indexed by big indices
  IMat iota_star;             ///< M -> M_bar, rows indexed by parts
  QMat kappa;                 ///< M_bar -> M, rows indexed by big indices
  CompatibleSeed folded;
};

/// Validate a covering and build the folded data.  Throws ComputationError
/// naming the first violated condition.  With `require_symmetry` the cyclic
/// shift of every part (in the listed order) must preserve omega.
SeedCovering check_covering(const CompatibleSeed& seed, const std::vector<std::vector<size_t>>& parts,
                            bool require_symmetry = false);

/// True when cycling each part preserves omega.
bool has_cyclic_symmetry(const CompatibleSeed& seed, const std::vector<std::vector<size_t>>& parts);

struct UnfoldingVerdict {
  bool ok = false;
  size_t seeds_checked = 0;  ///< distinct exchange matrices visited
  std::string failure;  ///< empty when ok
};

/// Sign condition (omega(e_i,e_j) > 0 forces omega(e_i,e_j') >= 0 for j' in
/// the part of j) on the seed and on every seed reached by composite
/// mutations at whole unfrozen parts, up to `depth` steps.  Parts with an
/// internal arrow cannot be mutated, which makes the verdict negative.
UnfoldingVerdict check_unfolding(const SeedCovering& cov, size_t depth);

/// Folded slice of a completed classical A-side diagram of `cov.big`, as a
/// diagram for the folded seed.  Supported when the folded seed has a single
/// unfrozen part P: the slice then carries one wall, the origin, whose
/// function f satisfies iota^*(theta_m) = z^{iota^* m} f^{|P|} for
/// m = -sum_{i in P} e_i^*.  Theta is evaluated at kappa of the folded
/// positive point moved off the slice by a small random vector (seeded by
/// `rand_seed`).  Throws UnsupportedError for more unfrozen parts and
/// ComputationError when the covering lacks the cyclic symmetry or f has
/// no integral root.
ScatteringDiagram project_diagram(const ScatteringDiagram& big, const SeedCovering& cov, unsigned order,
                                  unsigned rand_seed = 1);

/// Apply iota^* to an element of the big A-torus.
TorusElement apply_iota_star(const SeedCovering& cov, const TorusElement& x);

struct FoldedThetaReport {
  TorusElement folded;      ///< from the folded seed's own diagram
  bool has_lift = false;    ///< kappa(m_bar) is integral
  TorusElement lifted;      ///< iota^* of the big theta at kappa(m_bar)
  TorusElement projected;   ///< from the projected diagram
  bool folded_equals_projected = false;
  bool lifted_equals_projected = false;
};

/// Compare the three theta functions at the folded positive chamber.  Only
/// one unfrozen part is supported.
FoldedThetaReport folded_theta_compare(const SeedCovering& cov, const Exp& m_bar, unsigned order);

}  // namespace cs
