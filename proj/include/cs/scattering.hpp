#pragma once
/// @file scattering.hpp
/// Walls, wall crossing, path-ordered products and order-by-order consistent
/// completion of cluster scattering diagrams.
///
/// Geometry lives in the quotient of M_R by the frozen directions, i.e. in
/// R^r with coordinates indexed by the unfrozen indices (r <= 3; smaller
/// ranks are padded with zeros into R^3).  Monomials attached to a fixed
/// base exponent p are keyed by n in N_uf^+, standing for z^{p + omega_1(n)}
/// on the A-side and z^{p + n} on the X-side.  Keeping n instead of the
/// exponent is what makes non-injective seeds work: it is the principal
/// coefficient computation followed by forgetting the coefficients.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cs/linalg.hpp"
#include "cs/qtorus.hpp"
#include "cs/seed.hpp"

namespace cs {

using V3 = std::array<mpq_class, 3>;

V3 v3_cross(const V3& a, const V3& b);
mpq_class v3_dot(const V3& a, const V3& b);
/// Pad an r-vector (r <= 3) with zeros.
V3 v3_pad(const QVec& v);
/// Positive rescaling to a primitive integral vector.
V3 v3_primitive(const V3& v);
std::string v3_str(const V3& v);

enum class Side { A, X };

/// Coefficients g_0 = 1, g_1, ... of R_{-1}(x), the factor picked up by z^p
/// with <n_0, p> = -1 when crossing in the direction of increasing n_0.
/// Here x = z^{omega_1(n_0)} (A-side) or z^{n_0} (X-side).
using WallFunction = std::vector<TCoeff>;

/// Action series for the quantum dilogarithm Psi_{t^d}: R_{-1} = 1 + t^d x.
/// With d = 0 this is the classical (1 + x).
WallFunction quantum_dilog(const mpq_class& d);

struct Wall {
  IVec normal;         ///< primitive, nonnegative, in unfrozen coordinates
  bool full = false;   ///< support is the whole hyperplane normal^perp
  V3 start{}, end{};   ///< sector boundary rays, counterclockwise about normal
  WallFunction g;
  bool initial = false;

  /// Inequalities h with support = {x : <normal,x> = 0, <h,x> >= 0}.
  std::vector<V3> inequalities() const;
  /// 1 strictly inside, 0 on the relative boundary, -1 outside (x must lie
  /// on the hyperplane).
  int locate(const V3& x) const;
  bool contains(const V3& x) const { return locate(x) >= 0; }
};

/// A keyed element: sum of coeff * z^{base + gen(n)} over keys n.
struct Keyed {
  Exp base;
  std::map<IVec, TCoeff> terms;
};

class ScatteringDiagram {
 public:
  ScatteringDiagram() = default;
  /// Initial (incoming) diagram.  `quantum` selects Psi_{t^d}; otherwise the
  /// classical limit.  Throws if a quantum A-side diagram is requested for a
  /// seed without a compatible Lambda.
  ScatteringDiagram(const CompatibleSeed& seed, Side side, unsigned order, bool quantum);

  const CompatibleSeed& seed() const { return seed_; }
  Side side() const { return side_; }
  unsigned order() const { return order_; }
  size_t rank() const { return uf_.size(); }
  const std::vector<size_t>& unfrozen() const { return uf_; }
  /// Twist multiplier: z^m x^j = t^{j d c} z^{m + j v} with c = <n_0, m>.
  const mpq_class& twist() const { return d_; }
  bool quantum() const { return d_ != 0; }
  const std::vector<Wall>& walls() const { return walls_; }
  /// Joint directions at which a nonzero defect was found but no wall could
  /// be added because the direction of the wall was parallel to the joint.
  size_t skipped_parallel() const { return skipped_; }

  /// Position of a key relative to base position 0, i.e. the projection of
  /// omega_1(n) to unfrozen coordinates.
  QVec key_position(const IVec& n) const;
  /// Projection of a base exponent (length = seed size) to position space.
  QVec base_position(const Exp& p) const;
  /// Full exponent of key n over base p.
  Exp exponent(const Exp& base, const IVec& n) const;
  /// Degree of a key (sum of entries).
  static int64_t degree(const IVec& n);

  /// Insert a wall; walls with the same normal and support are merged and
  /// adjacent sectors with equal functions are joined.
  void add_wall(Wall w);
  void set_walls(std::vector<Wall> ws);
  void set_order(unsigned l) { order_ = l; }
  void note_skipped(size_t k) { skipped_ += k; }

  /// Deterministic text dump, one wall per line.
  std::string dump() const;

 private:
  void canonicalize();

  CompatibleSeed seed_;
  Side side_ = Side::A;
  unsigned order_ = 1;
  std::vector<size_t> uf_;
  QMat w_;               // omega(e_{u_i}, e_{u_k}) on unfrozen indices
  std::vector<Exp> gen_; // full exponent of each generator
  mpq_class d_ = 0;
  std::vector<Wall> walls_;
  size_t skipped_ = 0;
};

/// Series R_c(x)^{sign} truncated to powers <= max_power, for crossing a
/// wall with function g by a monomial with pairing c = <n_0, m>.
std::vector<TCoeff> crossing_series(const WallFunction& g, int64_t c, int sign, const mpq_class& d,
                                    size_t max_power);

/// Cross a wall with a keyed element (sign +1: towards increasing <n_0,.>).
/// Terms are truncated at key degree `order`.
Keyed cross_keyed(const ScatteringDiagram& d, const Keyed& x, const Wall& w, int sign, unsigned order);

/// Cross a wall with an arbitrary torus element (exponents in the full
/// lattice of the diagram's side).  Truncated at `order` powers of the wall
/// generator's degree.
TorusElement cross_wall(const ScatteringDiagram& d, const TorusElement& x, const Wall& w, int sign,
                        unsigned order);

ScatteringDiagram initial_diagram(const CompatibleSeed& seed, Side side, unsigned order, bool quantum);

struct CompletionStats {
  size_t joints_visited = 0;
  size_t walls_added = 0;
  size_t parallel_skipped = 0;
};

/// Order-by-order completion; `parallel` spreads joint repairs over OpenMP
/// threads.  Results are identical either way.
ScatteringDiagram consistent_complete(const ScatteringDiagram& d_in, unsigned order, bool parallel = true,
                                      CompletionStats* stats = nullptr);

/// Crossing record of a straight segment.
struct Crossing {
  mpq_class time;
  std::vector<size_t> walls;  ///< parallel walls crossed simultaneously
  int sign;
};

/// Walls crossed by the segment a -> b (positions, length r).  Throws
/// NonGenericError if an endpoint lies on a wall, the segment meets a wall
/// boundary or crosses non-parallel walls at the same time.
std::vector<Crossing> segment_crossings(const ScatteringDiagram& d, const QVec& a, const QVec& b);

/// Apply the path-ordered product along a polygonal path to a keyed element.
Keyed transport_keyed(const ScatteringDiagram& d, const Keyed& x, const std::vector<QVec>& path,
                      unsigned order);

/// Path-ordered product as the images of the basis monomials z^{e_i}
/// (i over the full lattice), truncated at `order`.
std::vector<TorusElement> path_ordered_product(const ScatteringDiagram& d, const std::vector<QVec>& path,
                                               unsigned order);

/// Apply a path-ordered product along a path to a torus element.
TorusElement transport_element(const ScatteringDiagram& d, const TorusElement& x,
                               const std::vector<QVec>& path, unsigned order);

/// True when a point (position coordinates) lies on no wall.
bool is_generic(const ScatteringDiagram& d, const QVec& q);

/// A generic point x + eps * dir such that no wall avoiding x separates the
/// two; eps is halved until this holds.
QVec point_near(const ScatteringDiagram& d, const QVec& x, const QVec& dir);

/// Default direction used to perturb points off walls.
QVec default_perturbation(size_t r);

/// Result of checking random closed loops.
struct ConsistencyReport {
  size_t loops = 0;
  size_t failures = 0;
  std::string first_failure;
};
ConsistencyReport consistency_certificate(const ScatteringDiagram& d, size_t loops, unsigned seed_value);

/// Breadth-first search over mutation paths (length <= depth) for a cluster
/// chamber containing Q (position coordinates).
std::optional<MutationPath> chamber_locate(const CompatibleSeed& seed, const QVec& q, size_t depth);

}  // namespace cs
