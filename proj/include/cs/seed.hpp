#pragma once
/// @file seed.hpp
/// Seeds, compatible pairs, mutation of seeds and of torus elements,
/// cluster variables and g-vectors.
///
/// All seeds in a mutation class share one lattice N = Z^I (and its dual M).
/// A seed records its basis e_i and dual basis f_i as integer rows in the
/// coordinates of the root seed, so torus elements of every seed in the class
/// live in the same Laurent ring k_t[M].

#include <optional>
#include <string>
#include <vector>

#include "cs/linalg.hpp"
#include "cs/qtorus.hpp"

namespace cs {

using MutationPath = std::vector<size_t>;

class CompatibleSeed {
 public:
  CompatibleSeed() = default;
  /// Build a root seed from matrices in its own basis.  `lambda` may be
  /// omitted; then only classical (t = 1) computations are available.
  CompatibleSeed(std::vector<std::string> labels, std::vector<bool> frozen, QMat omega,
                 std::optional<QMat> lambda = std::nullopt,
                 std::vector<mpq_class> d_i = {});

  size_t size() const { return labels_.size(); }
  size_t rank() const;  ///< number of unfrozen indices
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<bool>& frozen() const { return frozen_; }
  bool is_frozen(size_t i) const { return frozen_.at(i); }
  std::vector<size_t> unfrozen() const;
  size_t index_of(const std::string& label) const;
  const std::vector<mpq_class>& symmetrizers() const { return d_i_; }

  bool has_lambda() const { return root_lambda_.has_value(); }
  /// omega(e_i, e_j) in this seed's basis.
  mpq_class omega(size_t i, size_t j) const { return omega_.at(i).at(j); }
  const QMat& omega_matrix() const { return omega_; }
  /// B = omega^T in this seed's basis.
  QMat b_matrix() const { return q_transpose(omega_); }
  /// Lambda(f_i, f_j) in this seed's dual basis.
  QMat lambda_matrix() const;

  const QMat& root_omega() const { return root_omega_; }
  const std::optional<QMat>& root_lambda() const { return root_lambda_; }
  /// e_i and f_i in root coordinates.
  const IMat& basis() const { return basis_; }
  const IMat& dual_basis() const { return dual_; }
  const MutationPath& path() const { return path_; }

  /// omega_1(n) = omega(n, .) for n in root N coordinates, as a root M vector.
  QVec omega1(const IVec& n) const;
  /// omega_1(e_i) of this seed, as an integer root M vector (i unfrozen).
  IVec omega1_basis(size_t i) const;

  /// Twist for the A-side torus k_t^Lambda[M] in root coordinates (zero when
  /// no Lambda is present).
  Twist a_twist() const;
  /// Twist for the X-side torus k_t^omega[N] in root coordinates.
  Twist x_twist() const;

  /// Multiplier d'_i with Lambda_2(omega_1(e_i)) = d'_i e_i (0 if no Lambda).
  mpq_class multiplier(size_t i) const;

 private:
  friend CompatibleSeed mutate_seed(const CompatibleSeed&, size_t);
  void refresh();

  std::vector<std::string> labels_;
  std::vector<bool> frozen_;
  std::vector<mpq_class> d_i_;
  QMat root_omega_;
  std::optional<QMat> root_lambda_;
  IMat basis_, dual_;
  MutationPath path_;
  QMat omega_;
  std::vector<mpq_class> multipliers_;
};

struct CompatibilityReport {
  bool ok = false;
  mpq_class d;           ///< common multiplier when ok
  std::string message;   ///< names the violating column otherwise
};

/// Find d with Lambda_2(omega_1(e_i)) = d e_i for every unfrozen i.
CompatibilityReport check_compatible(const CompatibleSeed& seed);

/// Principal-coefficient extension with Lambda^prin = (B^prin)^{-1}.
CompatibleSeed principal_extend(const CompatibleSeed& seed);

CompatibleSeed mutate_seed(const CompatibleSeed& seed, size_t j);
CompatibleSeed mutate_along(const CompatibleSeed& seed, const MutationPath& path);

/// T_j(m) = m + max(0, <e_j, m>) omega_1(e_j), with m in root M coordinates.
QVec tropical_mutate(const QVec& m, size_t j, const CompatibleSeed& seed);
/// Compose tropical mutations along a path starting at `seed`.
QVec tropical_mutate_path(const QVec& m, const CompatibleSeed& seed, const MutationPath& path);

enum class Direction { Forward, Inverse };

/// Outcome of substituting a mutation into a Laurent polynomial.  When the
/// image is not Laurent it equals numerator * denominator(x)^{-1} where x is
/// z^{x_exponent} and denominator lists polynomial coefficients in x.
struct MutationResult {
  bool laurent = false;
  TorusElement value;
  TorusElement numerator;
  std::vector<TCoeff> denominator;
  Exp x_exponent;
};

/// (mu_j^A)^{+-1} on k_t[M] (root coordinates).  Without Lambda the seed is
/// treated classically.
MutationResult mutate_A(const TorusElement& x, size_t j, const CompatibleSeed& seed, Direction dir);
/// (mu_j^X)^{+-1} on k_t[N] (root coordinates).
MutationResult mutate_X(const TorusElement& x, size_t j, const CompatibleSeed& seed, Direction dir,
                        bool classical = false);
/// As mutate_A but throws NonLaurentError when the image is not Laurent.
TorusElement mutate_A_laurent(const TorusElement& x, size_t j, const CompatibleSeed& seed,
                              Direction dir);

/// A_{path, i} expressed in the root cluster.
TorusElement cluster_variable(const CompatibleSeed& root, const MutationPath& path, size_t i);

/// Unique maximal exponent for the dominance order of `seed`
/// (m' below m iff m' - m lies in omega_1(N_uf^+)); throws if none exists.
Exp g_vector(const TorusElement& x, const CompatibleSeed& seed);

/// Seed file I/O (JSON text).
CompatibleSeed seed_from_json_text(const std::string& text);
std::string seed_to_json_text(const CompatibleSeed& seed);

/// Standard examples used throughout the tests and the CLI.
namespace examples {
/// Type A2 seed with Lambda(e1*, e2*) = d.
CompatibleSeed a2(long d = 1);
/// Coefficient-free A2 without Lambda.
CompatibleSeed a2_classical();
/// Annulus seed (two unfrozen arcs, two boundary arcs) with its d = 4 Lambda.
CompatibleSeed annulus();
/// Kronecker quiver with principal coefficients.
CompatibleSeed kronecker_prin();
/// Once-punctured torus (Markov quiver), coefficient-free, no Lambda.
CompatibleSeed markov();
/// Cyclic A3 quiver with principal coefficients.
CompatibleSeed cyclic_a3_prin();
}  // namespace examples

}  // namespace cs
