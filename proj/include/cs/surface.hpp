#pragma once
/// @file surface.hpp
/// Combinatorial triangulated marked surfaces, curves drawn on them and the
/// lamination coordinates attached to curves.
///
/// A triangulation is a list of triangles, each a counterclockwise triple of
/// arc labels.  Interior arcs occur on exactly two triangle sides and
/// boundary arcs on one; the side gluings, marked points and the rotation
/// of arc ends around each marked point are all recovered from this list.
///
/// Curves are recorded as the sequence of arcs they cross together with the
/// turn (L or R) taken inside the triangle entered after each crossing.  A
/// right turn leaves through the side following the entry side in the
/// counterclockwise order of the triangle.

#include <array>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cs/linalg.hpp"
#include "cs/seed.hpp"

namespace cs {

enum class Turn { L, R };
inline Turn mirror(Turn t) { return t == Turn::L ? Turn::R : Turn::L; }

enum class Tag { Plain, Notched };

/// A side occurrence: side k (0..2) of triangle t, from vertex k to k+1.
struct SideRef {
  size_t tri = 0;
  int pos = 0;
  bool operator==(const SideRef&) const = default;
  auto operator<=>(const SideRef&) const = default;
};

/// Corner k of triangle t sits at vertex k, between side k-1 (before it in
/// the clockwise rotation about the vertex) and side k (after it).
using CornerRef = SideRef;

/// One end of an arc: the arc index and which end (0 or 1).
struct ArcEnd {
  size_t arc = 0;
  int end = 0;
  bool operator==(const ArcEnd&) const = default;
};

struct MarkedPoint {
  bool puncture = false;
  /// Corners in clockwise order.  For boundary points the first corner
  /// follows a boundary side and the last one precedes a boundary side.
  std::vector<CornerRef> corners;
  /// Arc ends met in clockwise order (corners.size() + 1 entries for
  /// boundary points, corners.size() for punctures).
  std::vector<ArcEnd> ends;
};

class TriangulatedSurface {
 public:
  TriangulatedSurface() = default;
  /// Throws ParseError on inconsistent gluing data or a non-triangulable
  /// surface.
  TriangulatedSurface(std::vector<std::string> labels, std::vector<bool> boundary,
                      std::vector<std::array<size_t, 3>> triangles, std::vector<Tag> puncture_tags = {});

  size_t arc_count() const { return labels_.size(); }
  size_t triangle_count() const { return tris_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  size_t arc_index(const std::string& label) const;
  bool is_boundary(size_t arc) const { return boundary_.at(arc); }
  const std::vector<std::array<size_t, 3>>& triangles() const { return tris_; }
  size_t arc_at(SideRef s) const { return tris_.at(s.tri)[static_cast<size_t>(s.pos)]; }

  /// The other occurrence of the side's arc (none for boundary arcs).
  std::optional<SideRef> glued(SideRef s) const;
  /// Occurrences of an arc; the first one defines the arc's direction.
  const std::vector<SideRef>& sides_of(size_t arc) const { return occ_.at(arc); }

  size_t mark_count() const { return marks_.size(); }
  const MarkedPoint& mark(size_t m) const { return marks_.at(m); }
  size_t puncture_count() const;
  /// Marked point at corner (t, k).
  size_t mark_at(CornerRef c) const { return corner_mark_.at(c.tri)[static_cast<size_t>(c.pos)]; }
  /// Marks at the two ends of an arc.
  std::pair<size_t, size_t> endpoints(size_t arc) const;
  /// Arc end at the start (or end) vertex of a side occurrence.
  ArcEnd end_at(SideRef s, bool at_start) const;

  /// Euler characteristic of the closed-up surface (punctures filled in).
  int64_t euler_characteristic() const;
  /// Self-folded triangles contain one arc twice.
  bool is_self_folded(size_t tri) const;
  /// For an arc inside a self-folded triangle, the surrounding noose.
  std::optional<size_t> noose_of(size_t arc) const;
  /// Puncture enclosed by a self-folded triangle containing `arc`.
  std::optional<size_t> enclosed_puncture(size_t arc) const;
  bool has_self_folded() const;

  const std::vector<Tag>& puncture_tags() const { return tags_; }
  /// Tag at a mark (always plain for boundary marks).
  Tag tag_at(size_t mark) const;

  std::string to_json_text() const;

 private:
  void build();

  std::vector<std::string> labels_;
  std::vector<bool> boundary_;
  std::vector<std::array<size_t, 3>> tris_;
  std::vector<Tag> tags_;  // indexed by mark
  std::vector<std::vector<SideRef>> occ_;
  std::vector<std::array<size_t, 3>> corner_mark_;
  std::vector<MarkedPoint> marks_;
};

TriangulatedSurface surface_from_json_text(const std::string& text);

/// Signed adjacency matrix B with B(e_i, e_j) summed over non-self-folded
/// triangles (arcs inside self-folded triangles are replaced by their
/// nooses).
IMat b_matrix(const TriangulatedSurface& surf);
/// Orientation form Lambda(e_i*, e_j*) from the local order of arc ends at
/// shared marked points.  Throws UnsupportedError for punctured surfaces.
QMat orientation_lambda(const TriangulatedSurface& surf);
/// Seed with omega = B^T, boundary arcs frozen, and Lambda when the surface
/// has no punctures.
CompatibleSeed seed_of(const TriangulatedSurface& surf);

/// Flip at an interior arc; the new arc keeps the old label.  Throws
/// ComputationError for boundary arcs and arcs inside self-folded triangles.
TriangulatedSurface flip(const TriangulatedSurface& surf, size_t arc);
/// Ptolemy relation for a flip: value of the new diagonal from the values of
/// the arcs, [i][i'] = [a][c] + [b][d] over the quadrilateral's opposite
/// sides.  `values` is indexed by arc.
TorusElement ptolemy_flip_value(const TriangulatedSurface& surf, size_t arc, const std::vector<TorusElement>& values,
                                const Twist& form);

// ---------------------------------------------------------------------------
// Curves

enum class CurveKind { Loop, Arc };

/// How an arc-shaped curve ends.  Boundary ends leave the surface through
/// the boundary arc listed first (or last) in the word; spiralling ends keep
/// turning the same way around a puncture forever.
enum class EndKind { Boundary, SpiralCW, SpiralCCW };

struct CurveWord {
  CurveKind kind = CurveKind::Loop;
  std::vector<size_t> arcs;  ///< arcs crossed, in order
  /// turns[k] is taken after crossing arcs[k]; loops have one turn per
  /// letter, arcs one fewer.
  std::vector<Turn> turns;
  EndKind start = EndKind::Boundary;
  EndKind finish = EndKind::Boundary;

  bool operator==(const CurveWord&) const = default;
};

/// Render as `loop: [(g1,R),(g2,L)]` or `arc: start{..} [...] end{..}`.
std::string curve_str(const TriangulatedSurface& surf, const CurveWord& w);
/// Parse the rendering above.  Arc labels refer to `surf`.
CurveWord curve_from_text(const TriangulatedSurface& surf, const std::string& text);

/// A directed crossing of an arc: leave triangle `from.tri` through side
/// `from` and enter through side `into`.  Boundary crossings have one of the
/// two missing.
struct DirCross {
  std::optional<SideRef> from, into;
  bool operator==(const DirCross&) const = default;
  DirCross reversed() const { return {into, from}; }
};

/// Locate a word on the surface.  Throws ComputationError when the letters
/// do not describe a path (wrong turns, broken adjacency, loop not closing).
std::vector<DirCross> locate(const TriangulatedSurface& surf, const CurveWord& w);
/// Word of a located path.
CurveWord word_of(const TriangulatedSurface& surf, const std::vector<DirCross>& path, CurveKind kind,
                  EndKind start = EndKind::Boundary, EndKind finish = EndKind::Boundary);
/// Loop word from the arcs crossed, deducing turns.  Throws when the
/// sequence does not close up.
CurveWord loop_from_arcs(const TriangulatedSurface& surf, const std::vector<size_t>& arcs);
/// Rotate a loop word to its lexicographically least form (either
/// direction).
CurveWord canonical_loop(const CurveWord& w);
/// True when every turn of a loop is the same, i.e. the loop encircles a
/// single marked point.
bool is_peripheral(const CurveWord& w);

/// Shear coordinates over all arcs: interior crossings contribute +-1
/// (zig-zags), boundary ends +-1/2 on their boundary arc.  Arcs inside
/// self-folded triangles use the noose with spirals at the enclosed puncture
/// reversed.
QVec shear_coords(const TriangulatedSurface& surf, const CurveWord& l);
/// Intersection coordinates pi(l) = 1/2 * (number of crossings) per arc,
/// boundary ends included.  Spiralling curves are rejected.
QVec intersection_coords(const TriangulatedSurface& surf, const CurveWord& l);

struct TaggedArc {
  size_t arc = 0;  ///< arc of the triangulation
  Tag tag0 = Tag::Plain, tag1 = Tag::Plain;
};

/// Elementary laminate of an arc of the triangulation: ends moved
/// clockwise along the boundary, plain ends spiral clockwise and notched
/// ends counterclockwise into their puncture.
CurveWord elementary_laminate(const TriangulatedSurface& surf, const TaggedArc& a);

/// Dehn twist of a loop or boundary-ended curve about a simple loop c,
/// applied m times (m < 0 twists the other way).
CurveWord dehn_twist(const TriangulatedSurface& surf, const CurveWord& l, const CurveWord& c, int m);
/// Number of crossings with a given arc.
size_t crossings_with(const CurveWord& l, size_t arc);
/// Number of intersection points of a curve with a simple loop (found as
/// crossing parallel runs).
size_t intersection_number(const TriangulatedSurface& surf, const CurveWord& l, const CurveWord& c);

// ---------------------------------------------------------------------------
// Cutting and gluing

/// Seed obtained by identifying groups of frozen indices; `proj` receives
/// the map pi_M on dual bases (rows: new indices, columns: old ones).
CompatibleSeed glue_frozen(const CompatibleSeed& seed, const std::vector<std::vector<size_t>>& groups,
                           IMat* proj = nullptr);
/// The same seed with the given frozen indices made mutable.
CompatibleSeed unfreeze(const CompatibleSeed& seed, const std::vector<size_t>& indices);

struct CutResult {
  TriangulatedSurface surface;
  /// For each cut arc, the two new boundary arcs.
  std::vector<std::pair<size_t, size_t>> halves;
  /// B of the original equals B of unfreeze(glue(seed_of(cut))) after
  /// matching labels.
  bool seed_relation_holds = false;
};
CutResult cut_along(const TriangulatedSurface& surf, const std::vector<size_t>& arcs);

// ---------------------------------------------------------------------------
// Sampling, for randomized checks

/// Interior arcs that are not inside a self-folded triangle.
std::vector<size_t> flippable_arcs(const TriangulatedSurface& surf);
/// `count` flips at arcs drawn from `rng`.
TriangulatedSurface random_flips(TriangulatedSurface surf, std::mt19937& rng, int count);
/// All boundary-to-boundary normal curves with at most `max_letters`
/// letters (both directions of each curve are listed).
std::vector<CurveWord> boundary_curves(const TriangulatedSurface& surf, size_t max_letters);
/// Up to `want` closed normal loops of at most 12 letters, found by random
/// walks that return to their starting side.  Repeats are possible.
std::vector<CurveWord> random_loops(const TriangulatedSurface& surf, std::mt19937& rng, size_t want);

namespace surfaces {
/// Annulus with one marked point per boundary component: arcs g1, g2 and
/// boundary arcs b1, b2.
TriangulatedSurface annulus();
/// Once-punctured torus with arcs g1, g2, g3.
TriangulatedSurface punctured_torus();
/// Disk with n >= 3 boundary marks, fan triangulation from mark 0.
TriangulatedSurface polygon(size_t n);
/// Disk with two boundary marks and one puncture; arcs r1, r2 join the
/// puncture to the marks.
TriangulatedSurface punctured_digon();
/// Annulus with p marks on the outer and q on the inner boundary.
TriangulatedSurface annulus_pq(size_t p, size_t q);
}  // namespace surfaces

}  // namespace cs
