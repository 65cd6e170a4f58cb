#pragma once
// Broken lines and theta functions on a (completed) scattering diagram.
//
// A broken line is traced backwards from its endpoint Q: each segment runs
// along the projected exponent, and at every wall it may either pass or
// come from an earlier monomial with a smaller key.  Only finitely many
// keys of bounded degree exist, so the search terminates.

#include <map>
#include <optional>
#include <vector>

#include "cs/scattering.hpp"

namespace cs {

struct BrokenSegment {
  Exp exponent;                ///< c_i z^{v_i}: the exponent v_i
  TCoeff coeff;                ///< c_i
  std::optional<size_t> wall;  ///< wall index where this segment starts (bend), none for the first
  QVec start;                  ///< bend point (empty for the first segment)
};

struct BrokenLine {
  Exp initial;
  QVec end;
  std::vector<BrokenSegment> segments;
  const BrokenSegment& last() const { return segments.back(); }
};

/// All broken lines with initial exponent p ending at Q whose final key has
/// degree <= order.  Deterministic order (by final key, then bends).
std::vector<BrokenLine> broken_lines(const ScatteringDiagram& d, const Exp& p, const QVec& q, unsigned order);

/// Theta function as a keyed element over base p.
Keyed theta_keyed(const ScatteringDiagram& d, const Exp& p, const QVec& q, unsigned order, bool parallel = true);

/// theta_{p,Q} truncated at key degree `order`.
TorusElement theta(const ScatteringDiagram& d, const Exp& p, const QVec& q, unsigned order, bool parallel = true);

/// Single-threaded reference used to validate the parallel enumeration.
TorusElement theta_serial(const ScatteringDiagram& d, const Exp& p, const QVec& q, unsigned order);

/// Transport an expansion at Q1 to Q2 along the straight segment.
TorusElement transport(const ScatteringDiagram& d, const TorusElement& x, const QVec& q1, const QVec& q2,
                       unsigned order);

/// Twisted product form for the diagram's torus (zero classically).
Twist product_form(const ScatteringDiagram& d);

/// Structure constant alpha(p_1,...,p_s; p), computed at a generic point
/// near p.  Throws ComputationError if `order` cannot certify the result.
TCoeff structure_constant(const ScatteringDiagram& d, const std::vector<Exp>& ps, const Exp& p, unsigned order);

/// Expansion of the product theta_{p_1} ... theta_{p_s} in theta functions,
/// read off at generic points near each candidate label.
std::map<Exp, TCoeff> theta_product(const ScatteringDiagram& d, const std::vector<Exp>& ps, unsigned order);

/// Key vector n >= 0 with exponent(top, n) == m, if any.
std::optional<IVec> solve_key(const ScatteringDiagram& d, const Exp& top, const Exp& m);

/// Decompose a pointed element (given at Q) into theta functions at the
/// same Q.  Terms whose key relative to the top exceeds `order` are
/// ignored.  Throws ComputationError when x is not pointed.
std::map<Exp, TCoeff> theta_decompose(const ScatteringDiagram& d, const TorusElement& x, const QVec& q,
                                      unsigned order);

/// A generic point in the interior of the positive chamber C^+.
QVec positive_point(const ScatteringDiagram& d);

/// Donaldson-Thomas transformation: negate exponents and transport from
/// -Q to Q with Q = positive_point(d).  `order` bounds the key degree above
/// the lowest monomial of the negated input.
TorusElement dt_transform(const ScatteringDiagram& d, const TorusElement& x, unsigned order);

/// Mutation path whose positive chamber equals C^- (green-to-red), if one
/// exists within `depth` steps.
std::optional<MutationPath> green_to_red(const CompatibleSeed& seed, size_t depth);

}  // namespace cs
