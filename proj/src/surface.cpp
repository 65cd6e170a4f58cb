#include "cs/surface.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cs/errors.hpp"

namespace cs {

namespace {

int mod3(int k) { return ((k % 3) + 3) % 3; }

SideRef side(size_t t, int k) { return SideRef{t, mod3(k)}; }

}  // namespace

// ---------------------------------------------------------------------------
// TriangulatedSurface

TriangulatedSurface::TriangulatedSurface(std::vector<std::string> labels, std::vector<bool> boundary,
                                         std::vector<std::array<size_t, 3>> triangles,
                                         std::vector<Tag> puncture_tags)
    : labels_(std::move(labels)), boundary_(std::move(boundary)), tris_(std::move(triangles)) {
  if (boundary_.size() != labels_.size()) throw ParseError("boundary flags do not match arc labels");
  build();
  size_t np = puncture_count();
  if (!puncture_tags.empty() && puncture_tags.size() != np)
    throw ParseError("expected one tag per puncture");
  tags_.assign(marks_.size(), Tag::Plain);
  size_t k = 0;
  for (size_t m = 0; m < marks_.size(); ++m)
    if (marks_[m].puncture && !puncture_tags.empty()) tags_[m] = puncture_tags[k++];
}

void TriangulatedSurface::build() {
  size_t n = labels_.size();
  {
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != n) throw ParseError("arc labels must be distinct");
  }
  occ_.assign(n, {});
  for (size_t t = 0; t < tris_.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      size_t a = tris_[t][static_cast<size_t>(k)];
      if (a >= n) throw ParseError("triangle refers to an unknown arc");
      occ_[a].push_back(SideRef{t, k});
    }
  for (size_t a = 0; a < n; ++a) {
    size_t want = boundary_[a] ? 1 : 2;
    if (occ_[a].size() != want)
      throw ParseError("arc '" + labels_[a] + "' occurs on " + std::to_string(occ_[a].size()) +
                       " triangle sides, expected " + std::to_string(want));
  }

  // Marked points as orbits of corners under rotation about their vertex.
  corner_mark_.assign(tris_.size(), {SIZE_MAX, SIZE_MAX, SIZE_MAX});
  marks_.clear();
  auto next_cw = [&](CornerRef c) -> std::optional<CornerRef> {
    auto g = glued(side(c.tri, c.pos));
    if (!g) return std::nullopt;
    return side(g->tri, g->pos + 1);
  };
  auto prev_cw = [&](CornerRef c) -> std::optional<CornerRef> {
    auto g = glued(side(c.tri, c.pos - 1));
    if (!g) return std::nullopt;
    return *g;
  };
  for (size_t t = 0; t < tris_.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      if (corner_mark_[t][static_cast<size_t>(k)] != SIZE_MAX) continue;
      CornerRef start{t, k};
      bool puncture = true;
      CornerRef c = start;
      for (size_t guard = 0; guard < 3 * tris_.size() + 1; ++guard) {
        auto p = prev_cw(c);
        if (!p) {
          puncture = false;
          break;
        }
        c = *p;
        if (c == start) break;
      }
      MarkedPoint mp;
      mp.puncture = puncture;
      if (puncture) {
        // Start the cyclic order at the least corner for determinism.
        CornerRef least = start;
        CornerRef d = start;
        do {
          least = std::min(least, d);
          d = *next_cw(d);
        } while (d != start);
        c = least;
      }
      CornerRef first = c;
      size_t id = marks_.size();
      if (!puncture) mp.ends.push_back(end_at(side(c.tri, c.pos - 1), false));
      while (true) {
        corner_mark_[c.tri][static_cast<size_t>(c.pos)] = id;
        mp.corners.push_back(c);
        mp.ends.push_back(end_at(side(c.tri, c.pos), true));
        auto nx = next_cw(c);
        if (!nx || *nx == first) break;
        c = *nx;
      }
      marks_.push_back(std::move(mp));
    }

  // Each connected component must be triangulable.
  std::vector<size_t> comp(tris_.size());
  std::iota(comp.begin(), comp.end(), 0);
  std::function<size_t(size_t)> find = [&](size_t x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
  for (size_t a = 0; a < n; ++a)
    if (occ_[a].size() == 2) comp[find(occ_[a][0].tri)] = find(occ_[a][1].tri);
  std::map<size_t, std::array<int64_t, 4>> data;  // V, E, F, has boundary
  for (size_t t = 0; t < tris_.size(); ++t) data[find(t)][2] += 1;
  for (size_t a = 0; a < n; ++a) {
    data[find(occ_[a][0].tri)][1] += 1;
    if (boundary_[a]) data[find(occ_[a][0].tri)][3] = 1;
  }
  for (auto& m : marks_) data[find(m.corners[0].tri)][0] += 1;
  for (auto& [root, d] : data) {
    int64_t chi = d[0] - d[1] + d[2];
    if (d[3] == 0 && chi == 2 && d[0] <= 3) throw ParseError("sphere with at most three punctures is excluded");
    if (d[3] == 1 && chi == 1 && d[0] <= 2 && d[2] < 2) throw ParseError("disk with too few marked points");
    (void)root;
  }
}

size_t TriangulatedSurface::arc_index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw ParseError("unknown arc '" + label + "'");
  return static_cast<size_t>(it - labels_.begin());
}

std::optional<SideRef> TriangulatedSurface::glued(SideRef s) const {
  const auto& o = occ_.at(arc_at(s));
  if (o.size() < 2) return std::nullopt;
  return o[0] == s ? o[1] : o[0];
}

size_t TriangulatedSurface::puncture_count() const {
  return static_cast<size_t>(std::count_if(marks_.begin(), marks_.end(), [](const MarkedPoint& m) { return m.puncture; }));
}

ArcEnd TriangulatedSurface::end_at(SideRef s, bool at_start) const {
  size_t a = arc_at(s);
  bool first = occ_[a][0] == s;
  return ArcEnd{a, (first == at_start) ? 0 : 1};
}

std::pair<size_t, size_t> TriangulatedSurface::endpoints(size_t arc) const {
  SideRef s = occ_.at(arc)[0];
  return {mark_at(side(s.tri, s.pos)), mark_at(side(s.tri, s.pos + 1))};
}

int64_t TriangulatedSurface::euler_characteristic() const {
  return static_cast<int64_t>(marks_.size()) - static_cast<int64_t>(labels_.size()) +
         static_cast<int64_t>(tris_.size());
}

bool TriangulatedSurface::is_self_folded(size_t t) const {
  const auto& a = tris_.at(t);
  return a[0] == a[1] || a[1] == a[2] || a[0] == a[2];
}

bool TriangulatedSurface::has_self_folded() const {
  for (size_t t = 0; t < tris_.size(); ++t)
    if (is_self_folded(t)) return true;
  return false;
}

std::optional<size_t> TriangulatedSurface::noose_of(size_t arc) const {
  const auto& o = occ_.at(arc);
  if (o.size() != 2 || o[0].tri != o[1].tri) return std::nullopt;
  const auto& a = tris_[o[0].tri];
  for (size_t k = 0; k < 3; ++k)
    if (a[k] != arc) return a[k];
  return std::nullopt;
}

std::optional<size_t> TriangulatedSurface::enclosed_puncture(size_t arc) const {
  const auto& o = occ_.at(arc);
  if (o.size() != 2 || o[0].tri != o[1].tri) return std::nullopt;
  // The two copies are adjacent sides; the shared corner is the puncture.
  int p = o[0].pos, q = o[1].pos;
  int second = (mod3(p + 1) == q) ? q : p;
  return mark_at(side(o[0].tri, second));
}

Tag TriangulatedSurface::tag_at(size_t mark) const { return tags_.empty() ? Tag::Plain : tags_.at(mark); }

std::string TriangulatedSurface::to_json_text() const {
  nlohmann::json j;
  nlohmann::json arcs = nlohmann::json::array();
  for (size_t a = 0; a < labels_.size(); ++a) arcs.push_back({{"label", labels_[a]}, {"boundary", bool(boundary_[a])}});
  j["arcs"] = arcs;
  nlohmann::json tris = nlohmann::json::array();
  for (auto& t : tris_) tris.push_back({labels_[t[0]], labels_[t[1]], labels_[t[2]]});
  j["triangles"] = tris;
  nlohmann::json notched = nlohmann::json::array();
  size_t k = 0;
  for (size_t m = 0; m < marks_.size(); ++m)
    if (marks_[m].puncture) {
      if (tag_at(m) == Tag::Notched) notched.push_back(k);
      ++k;
    }
  j["notched"] = notched;
  return j.dump();
}

TriangulatedSurface surface_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("arcs") || !j.contains("triangles")) throw ParseError("surface needs 'arcs' and 'triangles'");
  std::vector<std::string> labels;
  std::vector<bool> boundary;
  try {
    for (auto& a : j["arcs"]) {
      if (a.is_string()) {
        labels.push_back(a.get<std::string>());
        boundary.push_back(false);
      } else {
        labels.push_back(a.at("label").get<std::string>());
        boundary.push_back(a.value("boundary", false));
      }
    }
    std::vector<std::array<size_t, 3>> tris;
    for (auto& t : j["triangles"]) {
      if (t.size() != 3) throw ParseError("triangles must list three arcs");
      std::array<size_t, 3> tri{};
      for (size_t k = 0; k < 3; ++k) {
        auto lab = t[k].get<std::string>();
        auto it = std::find(labels.begin(), labels.end(), lab);
        if (it == labels.end()) throw ParseError("triangle refers to unknown arc '" + lab + "'");
        tri[k] = static_cast<size_t>(it - labels.begin());
      }
      tris.push_back(tri);
    }
    TriangulatedSurface probe(labels, boundary, tris);
    std::vector<Tag> tags;
    if (j.contains("notched")) {
      tags.assign(probe.puncture_count(), Tag::Plain);
      for (auto& k : j["notched"]) {
        auto idx = k.get<size_t>();
        if (idx >= tags.size()) throw ParseError("notched puncture index out of range");
        tags[idx] = Tag::Notched;
      }
    }
    return TriangulatedSurface(labels, boundary, tris, tags);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed surface: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Matrices and seeds

IMat b_matrix(const TriangulatedSurface& surf) {
  size_t n = surf.arc_count();
  IMat b(n, IVec(n, 0));
  std::vector<size_t> prime(n);
  for (size_t a = 0; a < n; ++a) prime[a] = surf.noose_of(a).value_or(a);
  for (size_t t = 0; t < surf.triangle_count(); ++t) {
    if (surf.is_self_folded(t)) continue;
    const auto& tri = surf.triangles()[t];
    for (size_t p = 0; p < 3; ++p) {
      size_t ip = tri[p], jp = tri[(p + 1) % 3];  // jp immediately counterclockwise of ip
      for (size_t i = 0; i < n; ++i) {
        if (prime[i] != ip) continue;
        for (size_t j = 0; j < n; ++j) {
          if (prime[j] != jp) continue;
          b[i][j] -= 1;
          b[j][i] += 1;
        }
      }
    }
  }
  return b;
}

QMat orientation_lambda(const TriangulatedSurface& surf) {
  if (surf.puncture_count() > 0) throw UnsupportedError("orientation form is only defined without punctures");
  size_t n = surf.arc_count();
  QMat lam = q_zero(n, n);
  for (size_t m = 0; m < surf.mark_count(); ++m) {
    const auto& ends = surf.mark(m).ends;
    // ends are listed clockwise: a later end is clockwise of an earlier one.
    for (size_t u = 0; u < ends.size(); ++u)
      for (size_t v = u + 1; v < ends.size(); ++v) {
        size_t i = ends[u].arc, j = ends[v].arc;
        lam[j][i] -= 1;
        lam[i][j] += 1;
      }
  }
  return lam;
}

CompatibleSeed seed_of(const TriangulatedSurface& surf) {
  IMat b = b_matrix(surf);
  QMat omega = q_transpose(q_from_int(b));
  std::vector<bool> frozen(surf.arc_count());
  for (size_t a = 0; a < surf.arc_count(); ++a) frozen[a] = surf.is_boundary(a);
  std::optional<QMat> lam;
  if (surf.puncture_count() == 0) lam = orientation_lambda(surf);
  return CompatibleSeed(surf.labels(), frozen, omega, lam);
}

TriangulatedSurface flip(const TriangulatedSurface& surf, size_t arc) {
  if (surf.is_boundary(arc)) throw ComputationError("cannot flip boundary arc '" + surf.labels()[arc] + "'");
  const auto& o = surf.sides_of(arc);
  if (o[0].tri == o[1].tri)
    throw ComputationError("arc '" + surf.labels()[arc] + "' lies inside a self-folded triangle");
  auto tris = surf.triangles();
  const auto& t1 = tris[o[0].tri];
  const auto& t2 = tris[o[1].tri];
  size_t a = t1[static_cast<size_t>(mod3(o[0].pos + 1))], b = t1[static_cast<size_t>(mod3(o[0].pos + 2))];
  size_t c = t2[static_cast<size_t>(mod3(o[1].pos + 1))], d = t2[static_cast<size_t>(mod3(o[1].pos + 2))];
  tris[o[0].tri] = {arc, b, c};
  tris[o[1].tri] = {arc, d, a};
  std::vector<bool> bd(surf.arc_count());
  for (size_t i = 0; i < bd.size(); ++i) bd[i] = surf.is_boundary(i);
  std::vector<Tag> tags;
  for (size_t m = 0; m < surf.mark_count(); ++m)
    if (surf.mark(m).puncture) tags.push_back(surf.tag_at(m));
  TriangulatedSurface out(surf.labels(), bd, tris);
  // Flips keep the set of punctures; carry the tags over by position.
  if (out.puncture_count() == tags.size()) return TriangulatedSurface(surf.labels(), bd, tris, tags);
  return out;
}

TorusElement ptolemy_flip_value(const TriangulatedSurface& surf, size_t arc, const std::vector<TorusElement>& values,
                                const Twist& form) {
  if (surf.is_boundary(arc)) throw ComputationError("cannot flip a boundary arc");
  const auto& o = surf.sides_of(arc);
  if (o[0].tri == o[1].tri) throw ComputationError("arc lies inside a self-folded triangle");
  const auto& t1 = surf.triangles()[o[0].tri];
  const auto& t2 = surf.triangles()[o[1].tri];
  size_t a = t1[static_cast<size_t>(mod3(o[0].pos + 1))], b = t1[static_cast<size_t>(mod3(o[0].pos + 2))];
  size_t c = t2[static_cast<size_t>(mod3(o[1].pos + 1))], d = t2[static_cast<size_t>(mod3(o[1].pos + 2))];
  TorusElement num = t_multiply(values.at(a), values.at(c), form) + t_multiply(values.at(b), values.at(d), form);
  const TorusElement& x = values.at(arc);
  if (x.size() != 1) throw ComputationError("Ptolemy division needs a monomial value on the flipped arc");
  auto [e, coef] = *x.terms().begin();
  if (!coef.is_one()) throw ComputationError("Ptolemy division needs a unit coefficient");
  Exp inv(e.size());
  for (size_t i = 0; i < e.size(); ++i) inv[i] = -e[i];
  return t_multiply(num, TorusElement::monomial(inv), form);
}

// ---------------------------------------------------------------------------
// Curves

namespace {

Turn turn_between(SideRef into, SideRef exit) {
  return mod3(exit.pos - into.pos) == 1 ? Turn::R : Turn::L;
}

SideRef exit_for(SideRef into, Turn t) { return side(into.tri, into.pos + (t == Turn::R ? 1 : 2)); }

char turn_char(Turn t) { return t == Turn::L ? 'L' : 'R'; }

std::string end_str(EndKind e) {
  switch (e) {
    case EndKind::Boundary:
      return "boundary";
    case EndKind::SpiralCW:
      return "cw";
    case EndKind::SpiralCCW:
      return "ccw";
  }
  return "?";
}

// Start turn before the first crossing / finish turn after the last one for
// spiralling ends.
Turn start_turn(EndKind e) { return e == EndKind::SpiralCW ? Turn::L : Turn::R; }
Turn finish_turn(EndKind e) { return e == EndKind::SpiralCW ? Turn::R : Turn::L; }

}  // namespace

std::string curve_str(const TriangulatedSurface& surf, const CurveWord& w) {
  std::ostringstream os;
  auto letters = [&]() {
    os << "[";
    for (size_t k = 0; k < w.arcs.size(); ++k) {
      if (k) os << ",";
      os << "(" << surf.labels()[w.arcs[k]];
      if (k < w.turns.size()) os << "," << turn_char(w.turns[k]);
      os << ")";
    }
    os << "]";
  };
  if (w.kind == CurveKind::Loop) {
    os << "loop: ";
    letters();
  } else {
    os << "arc: start{" << end_str(w.start) << "} ";
    letters();
    os << " end{" << end_str(w.finish) << "}";
  }
  return os.str();
}

CurveWord curve_from_text(const TriangulatedSurface& surf, const std::string& text) {
  CurveWord w;
  std::string s = text;
  auto parse_end = [&](const std::string& name) {
    if (name == "boundary") return EndKind::Boundary;
    if (name == "cw") return EndKind::SpiralCW;
    if (name == "ccw") return EndKind::SpiralCCW;
    throw ParseError("unknown curve end '" + name + "'");
  };
  std::smatch m;
  std::string body;
  static const std::regex loop_re(R"(^\s*loop\s*:\s*(\[.*\])\s*$)");
  static const std::regex arc_re(R"(^\s*arc\s*:\s*start\{(\w+)\}\s*(\[.*\])\s*end\{(\w+)\}\s*$)");
  if (std::regex_match(s, m, loop_re)) {
    w.kind = CurveKind::Loop;
    body = m[1];
  } else if (std::regex_match(s, m, arc_re)) {
    w.kind = CurveKind::Arc;
    w.start = parse_end(m[1]);
    body = m[2];
    w.finish = parse_end(m[3]);
  } else {
    throw ParseError("curve must look like 'loop: [(a,L),...]' or 'arc: start{..} [...] end{..}'");
  }
  static const std::regex letter_re(R"(\(\s*([^,()\s]+)\s*(?:,\s*([LR])\s*)?\))");
  for (auto it = std::sregex_iterator(body.begin(), body.end(), letter_re); it != std::sregex_iterator(); ++it) {
    w.arcs.push_back(surf.arc_index((*it)[1]));
    if ((*it)[2].matched) w.turns.push_back((*it)[2].str() == "L" ? Turn::L : Turn::R);
  }
  size_t want = w.kind == CurveKind::Loop ? w.arcs.size() : (w.arcs.empty() ? 0 : w.arcs.size() - 1);
  if (w.arcs.empty()) throw ParseError("curve has no letters");
  if (w.turns.size() != want) throw ParseError("wrong number of turns in curve");
  return w;
}

std::vector<DirCross> locate(const TriangulatedSurface& surf, const CurveWord& w) {
  size_t n = w.arcs.size();
  if (n == 0) throw ComputationError("empty curve");
  size_t want_turns = w.kind == CurveKind::Loop ? n : n - 1;
  if (w.turns.size() != want_turns) throw ComputationError("wrong number of turns in curve");
  bool bstart = w.kind == CurveKind::Arc && w.start == EndKind::Boundary;
  bool bfinish = w.kind == CurveKind::Arc && w.finish == EndKind::Boundary;
  if (bstart && !surf.is_boundary(w.arcs.front())) throw ComputationError("curve must start on a boundary arc");
  if (bfinish && !surf.is_boundary(w.arcs.back())) throw ComputationError("curve must end on a boundary arc");
  if (bstart && bfinish && n < 2) throw ComputationError("curve between boundary arcs needs two letters");

  std::vector<SideRef> starts;
  if (bstart)
    starts.push_back(surf.sides_of(w.arcs[0])[0]);
  else
    starts = surf.sides_of(w.arcs[0]);
  for (SideRef s0 : starts) {
    std::vector<DirCross> path;
    path.push_back(DirCross{bstart ? std::nullopt : surf.glued(s0), s0});
    SideRef into = s0;
    bool ok = true;
    for (size_t k = 0; k + 1 < n || (w.kind == CurveKind::Loop && k < n); ++k) {
      SideRef ex = exit_for(into, w.turns[k]);
      size_t next_arc = w.arcs[(k + 1) % n];
      if (surf.arc_at(ex) != next_arc) {
        ok = false;
        break;
      }
      if (w.kind == CurveKind::Loop && k + 1 == n) {
        if (surf.glued(ex) != std::optional<SideRef>(s0)) ok = false;
        break;
      }
      if (bfinish && k + 2 == n) {
        path.push_back(DirCross{ex, std::nullopt});
        break;
      }
      auto g = surf.glued(ex);
      if (!g) {
        ok = false;
        break;
      }
      path.push_back(DirCross{ex, *g});
      into = *g;
    }
    if (ok) return path;
  }
  throw ComputationError("word does not describe a curve on this triangulation");
}

CurveWord word_of(const TriangulatedSurface& surf, const std::vector<DirCross>& path, CurveKind kind, EndKind start,
                  EndKind finish) {
  CurveWord w;
  w.kind = kind;
  w.start = start;
  w.finish = finish;
  size_t n = path.size();
  for (size_t k = 0; k < n; ++k) {
    const auto& c = path[k];
    w.arcs.push_back(surf.arc_at(c.into ? *c.into : *c.from));
  }
  size_t nt = kind == CurveKind::Loop ? n : (n ? n - 1 : 0);
  for (size_t k = 0; k < nt; ++k) {
    const auto& a = path[k];
    const auto& b = path[(k + 1) % n];
    if (!a.into || !b.from || a.into->tri != b.from->tri || a.into->pos == b.from->pos)
      throw ComputationError("path is not a curve");
    w.turns.push_back(turn_between(*a.into, *b.from));
  }
  return w;
}

CurveWord loop_from_arcs(const TriangulatedSurface& surf, const std::vector<size_t>& arcs) {
  size_t n = arcs.size();
  if (n == 0) throw ComputationError("empty loop");
  for (SideRef s0 : surf.sides_of(arcs[0])) {
    if (surf.is_boundary(arcs[0])) break;
    std::vector<Turn> turns;
    std::function<bool(SideRef, size_t)> dfs = [&](SideRef into, size_t k) -> bool {
      for (Turn t : {Turn::R, Turn::L}) {
        SideRef ex = exit_for(into, t);
        if (surf.arc_at(ex) != arcs[(k + 1) % n]) continue;
        auto g = surf.glued(ex);
        if (!g) continue;
        turns.push_back(t);
        if (k + 1 == n) {
          if (*g == s0) return true;
        } else if (dfs(*g, k + 1)) {
          return true;
        }
        turns.pop_back();
      }
      return false;
    };
    if (dfs(s0, 0)) return CurveWord{CurveKind::Loop, arcs, turns};
  }
  throw ComputationError("arc sequence does not close up to a loop");
}

namespace {

std::vector<std::pair<size_t, int>> letters_of(const CurveWord& w) {
  std::vector<std::pair<size_t, int>> v;
  for (size_t k = 0; k < w.arcs.size(); ++k) v.emplace_back(w.arcs[k], w.turns[k] == Turn::L ? 0 : 1);
  return v;
}

CurveWord reversed_loop(const CurveWord& w) {
  size_t n = w.arcs.size();
  CurveWord r = w;
  for (size_t j = 0; j < n; ++j) {
    r.arcs[j] = w.arcs[n - 1 - j];
    r.turns[j] = mirror(w.turns[(2 * n - 2 - j) % n]);
  }
  return r;
}

}  // namespace

CurveWord canonical_loop(const CurveWord& w) {
  if (w.kind != CurveKind::Loop) return w;
  CurveWord best = w;
  auto best_letters = letters_of(w);
  for (const CurveWord& base : {w, reversed_loop(w)}) {
    size_t n = base.arcs.size();
    for (size_t r = 0; r < n; ++r) {
      CurveWord c = base;
      std::rotate(c.arcs.begin(), c.arcs.begin() + static_cast<long>(r), c.arcs.end());
      std::rotate(c.turns.begin(), c.turns.begin() + static_cast<long>(r), c.turns.end());
      auto l = letters_of(c);
      if (l < best_letters) {
        best_letters = l;
        best = c;
      }
    }
  }
  return best;
}

bool is_peripheral(const CurveWord& w) {
  if (w.kind != CurveKind::Loop || w.turns.empty()) return false;
  return std::all_of(w.turns.begin(), w.turns.end(), [&](Turn t) { return t == w.turns[0]; });
}

namespace {

// Shear contributions of a single curve (no self-folded substitution).
QVec raw_shear(const TriangulatedSurface& surf, const CurveWord& l) {
  QVec b(surf.arc_count(), 0);
  size_t n = l.arcs.size();
  auto zig = [](Turn before, Turn after) -> int {
    if (before == after) return 0;
    return before == Turn::R ? 1 : -1;
  };
  for (size_t k = 0; k < n; ++k) {
    size_t a = l.arcs[k];
    if (l.kind == CurveKind::Loop) {
      b[a] += zig(l.turns[(k + n - 1) % n], l.turns[k]);
      continue;
    }
    bool first = k == 0, last = k + 1 == n;
    if (first && l.start == EndKind::Boundary) {
      if (n >= 2) b[a] += mpq_class(l.turns[0] == Turn::L ? 1 : -1, 2);
      continue;
    }
    if (last && l.finish == EndKind::Boundary) {
      if (n >= 2) b[a] += mpq_class(l.turns[n - 2] == Turn::R ? 1 : -1, 2);
      continue;
    }
    Turn before = first ? start_turn(l.start) : l.turns[k - 1];
    Turn after = last ? finish_turn(l.finish) : l.turns[k];
    b[a] += zig(before, after);
  }
  for (auto& x : b) x.canonicalize();
  return b;
}

// Punctures at the start and finish of a spiralling curve.
std::pair<std::optional<size_t>, std::optional<size_t>> spiral_punctures(const TriangulatedSurface& surf,
                                                                        const CurveWord& l) {
  std::optional<size_t> ps, pf;
  if (l.kind != CurveKind::Arc) return {ps, pf};
  auto path = locate(surf, l);
  if (l.start != EndKind::Boundary) {
    SideRef from = *path.front().from;
    Turn t = start_turn(l.start);
    ps = surf.mark_at(side(from.tri, t == Turn::R ? from.pos : from.pos + 1));
  }
  if (l.finish != EndKind::Boundary) {
    SideRef into = *path.back().into;
    Turn t = finish_turn(l.finish);
    pf = surf.mark_at(side(into.tri, t == Turn::R ? into.pos + 1 : into.pos));
  }
  return {ps, pf};
}

EndKind reverse_spiral(EndKind e) {
  if (e == EndKind::SpiralCW) return EndKind::SpiralCCW;
  if (e == EndKind::SpiralCCW) return EndKind::SpiralCW;
  return e;
}

CurveWord reversed_arc(const CurveWord& w) {
  CurveWord r = w;
  std::reverse(r.arcs.begin(), r.arcs.end());
  std::reverse(r.turns.begin(), r.turns.end());
  for (auto& t : r.turns) t = mirror(t);
  std::swap(r.start, r.finish);
  return r;
}

// Reverse the final spiral of a curve that ends inside the self-folded
// triangle with inner arc `inner` and noose `noose`.  The spiral is cut back
// to the crossing of the noose and redrawn the other way round.
CurveWord respiral_finish(const CurveWord& w, size_t inner, size_t noose) {
  CurveWord r = w;
  while (!r.arcs.empty() && r.arcs.back() == inner) {
    r.arcs.pop_back();
    if (!r.turns.empty()) r.turns.pop_back();
  }
  if (r.arcs.empty() || r.arcs.back() != noose)
    throw UnsupportedError("curve lies entirely inside a self-folded triangle");
  r.finish = reverse_spiral(w.finish);
  // The puncture is opposite the noose, so the first turn goes against the
  // spiral.
  r.turns.push_back(mirror(finish_turn(r.finish)));
  r.arcs.push_back(inner);
  return r;
}

}  // namespace

QVec shear_coords(const TriangulatedSurface& surf, const CurveWord& l) {
  locate(surf, l);
  QVec b = raw_shear(surf, l);
  for (size_t a = 0; a < surf.arc_count(); ++a) {
    auto noose = surf.noose_of(a);
    if (!noose) continue;
    size_t p = *surf.enclosed_puncture(a);
    CurveWord lp = l;
    auto [ps, pf] = spiral_punctures(surf, l);
    if (pf == p) lp = respiral_finish(lp, a, *noose);
    if (ps == p) lp = reversed_arc(respiral_finish(reversed_arc(lp), a, *noose));
    locate(surf, lp);
    b[a] = raw_shear(surf, lp)[*noose];
  }
  return b;
}

QVec intersection_coords(const TriangulatedSurface& surf, const CurveWord& l) {
  if (l.kind == CurveKind::Arc && (l.start != EndKind::Boundary || l.finish != EndKind::Boundary))
    throw ComputationError("intersection coordinates need a bounded lamination");
  locate(surf, l);
  QVec pi(surf.arc_count(), 0);
  for (size_t a : l.arcs) pi[a] += mpq_class(1, 2);
  for (auto& x : pi) x.canonicalize();
  return pi;
}

CurveWord elementary_laminate(const TriangulatedSurface& surf, const TaggedArc& ta) {
  size_t g = ta.arc;
  if (surf.is_boundary(g)) throw UnsupportedError("elementary laminates of boundary arcs are special");
  auto [mx, my] = surf.endpoints(g);
  auto end_kind = [&](size_t mark, Tag tag) {
    if (!surf.mark(mark).puncture) {
      if (tag == Tag::Notched) throw ComputationError("boundary ends cannot be notched");
      return EndKind::Boundary;
    }
    return tag == Tag::Plain ? EndKind::SpiralCW : EndKind::SpiralCCW;
  };
  EndKind kx = end_kind(mx, ta.tag0), ky = end_kind(my, ta.tag1);
  // Turn taken while heading into each end: clockwise about the vertex is a
  // right turn.
  auto heading = [](EndKind k) { return k == EndKind::SpiralCCW ? Turn::L : Turn::R; };

  // Exits while moving around a vertex from corner c.
  auto walk = [&](CornerRef c, Turn t, EndKind k, size_t mark) {
    std::vector<SideRef> exits;
    size_t steps = k == EndKind::Boundary ? SIZE_MAX : surf.mark(mark).corners.size();
    while (exits.size() < steps) {
      SideRef ex = t == Turn::R ? side(c.tri, c.pos) : side(c.tri, c.pos - 1);
      exits.push_back(ex);
      auto gl = surf.glued(ex);
      if (!gl) break;
      c = t == Turn::R ? side(gl->tri, gl->pos + 1) : *gl;
    }
    return exits;
  };

  for (SideRef o : surf.sides_of(g)) {
    // In this triangle g runs from vertex o.pos to o.pos + 1; orient so x is
    // end 0 of the arc.
    bool forward = surf.end_at(o, true).end == 0;
    CornerRef cx = side(o.tri, forward ? o.pos : o.pos + 1);
    CornerRef cy = side(o.tri, forward ? o.pos + 1 : o.pos);
    auto xs = walk(cx, heading(kx), kx, mx);
    auto ys = walk(cy, heading(ky), ky, my);
    if (xs.empty() || ys.empty() || xs.front() == ys.front()) continue;
    std::vector<DirCross> path;
    for (size_t k = xs.size(); k-- > 0;) path.push_back(DirCross{surf.glued(xs[k]), xs[k]});
    for (SideRef f : ys) path.push_back(DirCross{f, surf.glued(f)});
    return word_of(surf, path, CurveKind::Arc, kx, ky);
  }
  throw ComputationError("could not build the elementary laminate");
}

size_t crossings_with(const CurveWord& l, size_t arc) {
  return static_cast<size_t>(std::count(l.arcs.begin(), l.arcs.end(), arc));
}

namespace {

struct Run {
  size_t end;       // index in l just after the run
  size_t c_end;     // index in c just after the run
  bool reversed;    // run follows c backwards
  bool right_to_left;
};

// Crossing runs of l (linear or cyclic) with the cyclic path c.
std::vector<Run> crossing_runs(const std::vector<DirCross>& l, bool l_cyclic,
                               const std::vector<DirCross>& c) {
  std::vector<Run> runs;
  size_t n = l.size(), k = c.size();
  auto turn_at = [&](const std::vector<DirCross>& p, size_t a, size_t b) { return turn_between(*p[a].into, *p[b].from); };
  for (bool rev : {false, true}) {
    std::vector<DirCross> cc;
    if (!rev)
      cc = c;
    else
      for (size_t j = k; j-- > 0;) cc.push_back(c[j].reversed());
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < k; ++j) {
        if (!(l[i] == cc[j])) continue;
        bool has_prev = l_cyclic || i > 0;
        if (has_prev && l[(i + n - 1) % n] == cc[(j + k - 1) % k]) continue;
        size_t s = 0;
        while (s < n && (l_cyclic || i + s < n) && l[(i + s) % n] == cc[(j + s) % k]) ++s;
        if (l_cyclic && s == n) continue;  // parallel copies
        if (!has_prev || (!l_cyclic && i + s >= n)) continue;
        size_t last = (i + s - 1) % n, after = (i + s) % n;
        Turn before_l = turn_at(l, (i + n - 1) % n, i);
        Turn after_l = turn_at(l, last, after);
        if (before_l == after_l) continue;
        runs.push_back(Run{(i + s) % n, (j + s) % k, rev, before_l == Turn::R});
      }
  }
  return runs;
}

std::vector<DirCross> free_reduce(std::vector<DirCross> p, bool cyclic) {
  std::vector<DirCross> st;
  for (auto& x : p) {
    if (!st.empty() && st.back() == x.reversed())
      st.pop_back();
    else
      st.push_back(x);
  }
  if (cyclic)
    while (st.size() >= 2 && st.front() == st.back().reversed()) {
      st.pop_back();
      st.erase(st.begin());
    }
  return st;
}

}  // namespace

size_t intersection_number(const TriangulatedSurface& surf, const CurveWord& l, const CurveWord& c) {
  if (c.kind != CurveKind::Loop) throw ComputationError("intersection_number needs a loop");
  auto lp = locate(surf, l);
  auto cp = locate(surf, c);
  return crossing_runs(lp, l.kind == CurveKind::Loop, cp).size();
}

CurveWord dehn_twist(const TriangulatedSurface& surf, const CurveWord& l, const CurveWord& c, int m) {
  if (c.kind != CurveKind::Loop) throw ComputationError("Dehn twists need a loop");
  if (is_peripheral(c)) return l;
  bool cyc = l.kind == CurveKind::Loop;
  auto cp = locate(surf, c);
  size_t k = cp.size();
  auto lp = locate(surf, l);
  for (int step = 0; step < std::abs(m); ++step) {
    auto runs = crossing_runs(lp, cyc, cp);
    if (runs.empty()) break;
    std::vector<DirCross> ccf = cp, ccr;
    for (size_t j = k; j-- > 0;) ccr.push_back(cp[j].reversed());
    std::multimap<size_t, std::vector<DirCross>> inserts;
    for (const auto& r : runs) {
      const auto& cc = r.reversed ? ccr : ccf;
      bool forward = r.right_to_left == (m > 0);
      std::vector<DirCross> loop;
      for (size_t s = 0; s < k; ++s) {
        if (forward)
          loop.push_back(cc[(r.c_end + s) % k]);
        else
          loop.push_back(cc[(r.c_end + 2 * k - 1 - s) % k].reversed());
      }
      inserts.emplace(r.end, loop);
    }
    std::vector<DirCross> out;
    for (size_t i = 0; i < lp.size(); ++i) {
      auto range = inserts.equal_range(i);
      for (auto it = range.first; it != range.second; ++it) out.insert(out.end(), it->second.begin(), it->second.end());
      out.push_back(lp[i]);
    }
    lp = free_reduce(out, cyc);
  }
  return word_of(surf, lp, l.kind, l.start, l.finish);
}

// ---------------------------------------------------------------------------
// Cutting and gluing

CompatibleSeed glue_frozen(const CompatibleSeed& seed, const std::vector<std::vector<size_t>>& groups, IMat* proj) {
  size_t n = seed.size();
  std::vector<long> target(n, -1);
  for (const auto& g : groups) {
    if (g.empty()) continue;
    for (size_t i : g) {
      if (i >= n || !seed.is_frozen(i)) throw ComputationError("only frozen indices can be glued");
      if (target[i] != -1) throw ComputationError("index glued twice");
      target[i] = static_cast<long>(g[0]);
    }
  }
  std::vector<size_t> keep;
  for (size_t i = 0; i < n; ++i)
    if (target[i] == -1 || target[i] == static_cast<long>(i)) keep.push_back(i);
  std::map<size_t, size_t> pos;
  for (size_t a = 0; a < keep.size(); ++a) pos[keep[a]] = a;
  IMat p(keep.size(), IVec(n, 0));
  for (size_t i = 0; i < n; ++i) {
    size_t t = target[i] == -1 ? i : static_cast<size_t>(target[i]);
    p[pos[t]][i] = 1;
  }
  QMat pq = q_from_int(p);
  QMat om = q_mul(q_mul(pq, seed.omega_matrix()), q_transpose(pq));
  std::vector<std::string> labels;
  std::vector<bool> frozen;
  std::vector<mpq_class> d;
  for (size_t i : keep) {
    labels.push_back(seed.labels()[i]);
    frozen.push_back(seed.is_frozen(i));
    d.push_back(seed.symmetrizers()[i]);
  }
  if (proj) *proj = p;
  return CompatibleSeed(labels, frozen, om, std::nullopt, d);
}

CompatibleSeed unfreeze(const CompatibleSeed& seed, const std::vector<size_t>& indices) {
  std::vector<bool> frozen = seed.frozen();
  for (size_t i : indices) frozen.at(i) = false;
  return CompatibleSeed(seed.labels(), frozen, seed.omega_matrix(), std::nullopt, seed.symmetrizers());
}

CutResult cut_along(const TriangulatedSurface& surf, const std::vector<size_t>& arcs) {
  auto labels = surf.labels();
  std::vector<bool> bd(surf.arc_count());
  for (size_t i = 0; i < bd.size(); ++i) bd[i] = surf.is_boundary(i);
  auto tris = surf.triangles();
  CutResult res;
  std::set<size_t> seen;
  for (size_t a : arcs) {
    if (surf.is_boundary(a)) throw ComputationError("cannot cut along a boundary arc");
    if (!seen.insert(a).second) throw ComputationError("arc listed twice");
    if (surf.noose_of(a)) throw ComputationError("cannot cut along an arc inside a self-folded triangle");
    SideRef second = surf.sides_of(a)[1];
    size_t na = labels.size();
    labels.push_back(labels[a] + "''");
    labels[a] += "'";
    bd[a] = true;
    bd.push_back(true);
    tris[second.tri][static_cast<size_t>(second.pos)] = na;
    res.halves.emplace_back(a, na);
  }
  try {
    res.surface = TriangulatedSurface(labels, bd, tris);
  } catch (const ParseError& e) {
    throw ComputationError(std::string("cutting produces a non-triangulable surface: ") + e.what());
  }
  std::vector<std::vector<size_t>> groups;
  std::vector<size_t> glued_idx;
  for (auto [a, b] : res.halves) {
    groups.push_back({a, b});
    glued_idx.push_back(a);
  }
  CompatibleSeed glued = unfreeze(glue_frozen(seed_of(res.surface), groups), glued_idx);
  res.seed_relation_holds = glued.omega_matrix() == seed_of(surf).omega_matrix();
  return res;
}

// ---------------------------------------------------------------------------
// Standard surfaces

std::vector<size_t> flippable_arcs(const TriangulatedSurface& s) {
  std::vector<size_t> out;
  for (size_t a = 0; a < s.arc_count(); ++a) {
    if (s.is_boundary(a)) continue;
    const auto& o = s.sides_of(a);
    if (o[0].tri != o[1].tri) out.push_back(a);
  }
  return out;
}

TriangulatedSurface random_flips(TriangulatedSurface s, std::mt19937& rng, int count) {
  for (int k = 0; k < count; ++k) {
    auto f = flippable_arcs(s);
    if (f.empty()) break;
    s = flip(s, f[rng() % f.size()]);
  }
  return s;
}

std::vector<CurveWord> boundary_curves(const TriangulatedSurface& s, size_t max_letters) {
  std::vector<CurveWord> out;
  std::function<void(SideRef, CurveWord)> grow = [&](SideRef into, CurveWord w) {
    if (w.arcs.size() >= max_letters) return;
    for (Turn t : {Turn::L, Turn::R}) {
      SideRef ex{into.tri, (into.pos + (t == Turn::R ? 1 : 2)) % 3};
      CurveWord next = w;
      next.turns.push_back(t);
      next.arcs.push_back(s.arc_at(ex));
      if (s.is_boundary(next.arcs.back()))
        out.push_back(next);
      else
        grow(*s.glued(ex), next);
    }
  };
  for (size_t a = 0; a < s.arc_count(); ++a) {
    if (!s.is_boundary(a)) continue;
    CurveWord w;
    w.kind = CurveKind::Arc;
    w.arcs = {a};
    grow(s.sides_of(a)[0], w);
  }
  return out;
}

std::vector<CurveWord> random_loops(const TriangulatedSurface& s, std::mt19937& rng, size_t want) {
  std::vector<CurveWord> out;
  std::vector<SideRef> interior;
  for (size_t a = 0; a < s.arc_count(); ++a)
    if (!s.is_boundary(a))
      for (auto sd : s.sides_of(a)) interior.push_back(sd);
  if (interior.empty()) return out;
  for (size_t attempt = 0; attempt < 200 * want && out.size() < want; ++attempt) {
    SideRef s0 = interior[rng() % interior.size()];
    SideRef into = s0;
    CurveWord w;
    w.kind = CurveKind::Loop;
    for (int step = 0; step < 12; ++step) {
      Turn t = rng() % 2 ? Turn::L : Turn::R;
      SideRef ex{into.tri, (into.pos + (t == Turn::R ? 1 : 2)) % 3};
      if (s.is_boundary(s.arc_at(ex))) break;
      w.arcs.push_back(s.arc_at(into));
      w.turns.push_back(t);
      into = *s.glued(ex);
      if (into == s0) {
        out.push_back(w);
        break;
      }
    }
  }
  return out;
}

namespace surfaces {

TriangulatedSurface annulus() {
  return TriangulatedSurface({"g1", "g2", "b1", "b2"}, {false, false, true, true}, {{{0, 1, 2}}, {{0, 1, 3}}});
}

TriangulatedSurface punctured_torus() {
  return TriangulatedSurface({"g1", "g2", "g3"}, {false, false, false}, {{{0, 1, 2}}, {{0, 1, 2}}});
}

TriangulatedSurface polygon(size_t n) {
  if (n < 3) throw ComputationError("polygon needs at least three marks");
  std::vector<std::string> labels;
  std::vector<bool> bd;
  for (size_t i = 0; i < n; ++i) {
    labels.push_back("s" + std::to_string(i));
    bd.push_back(true);
  }
  std::map<size_t, size_t> diag;  // diagonal from mark 0 to mark j
  for (size_t j = 2; j + 1 < n; ++j) {
    diag[j] = labels.size();
    labels.push_back("d" + std::to_string(j));
    bd.push_back(false);
  }
  auto edge0 = [&](size_t j) { return j == 1 ? size_t{0} : (j == n - 1 ? n - 1 : diag[j]); };
  std::vector<std::array<size_t, 3>> tris;
  for (size_t j = 1; j + 1 < n; ++j) tris.push_back({edge0(j), j, edge0(j + 1)});
  return TriangulatedSurface(labels, bd, tris);
}

TriangulatedSurface punctured_digon() {
  return TriangulatedSurface({"r1", "r2", "b1", "b2"}, {false, false, true, true}, {{{2, 1, 0}}, {{3, 0, 1}}});
}

TriangulatedSurface annulus_pq(size_t p, size_t q) {
  if (p == 0 || q == 0) throw ComputationError("both boundary components need a mark");
  std::vector<std::string> labels;
  std::vector<bool> bd;
  for (size_t k = 0; k < p + q; ++k) {
    labels.push_back("c" + std::to_string(k));
    bd.push_back(false);
  }
  for (size_t k = 0; k < p; ++k) {
    labels.push_back("O" + std::to_string(k));
    bd.push_back(true);
  }
  for (size_t k = 0; k < q; ++k) {
    labels.push_back("I" + std::to_string(k));
    bd.push_back(true);
  }
  std::vector<std::array<size_t, 3>> tris;
  size_t a = 0, b = 0;
  for (size_t s = 0; s < p + q; ++s) {
    size_t cur = s, nxt = (s + 1) % (p + q);
    bool outer = a < p && (b == q || s % 2 == 0);
    if (outer) {
      tris.push_back({p + q + a, nxt, cur});
      ++a;
    } else {
      tris.push_back({nxt, p + q + p + b, cur});
      ++b;
    }
  }
  return TriangulatedSurface(labels, bd, tris);
}

}  // namespace surfaces

}  // namespace cs
