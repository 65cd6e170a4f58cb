#include "cs/scattering.hpp"

#include <omp.h>

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <sstream>

#include "cs/errors.hpp"

namespace cs {

// ---------------------------------------------------------------------------
// Small exact 3-vector helpers.

V3 v3_cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

mpq_class v3_dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

V3 v3_pad(const QVec& v) {
  if (v.size() > 3) throw UnsupportedError("positions of dimension > 3 are not supported");
  V3 out{0, 0, 0};
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

static bool v3_zero(const V3& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

V3 v3_primitive(const V3& v) {
  if (v3_zero(v)) return v;
  mpz_class l = 1;
  for (const auto& x : v) l = lcm(l, mpz_class(x.get_den()));
  mpz_class g = 0;
  std::array<mpz_class, 3> z;
  for (size_t i = 0; i < 3; ++i) {
    z[i] = mpz_class(v[i] * l);
    g = gcd(g, z[i]);
  }
  V3 out;
  for (size_t i = 0; i < 3; ++i) out[i] = mpq_class(z[i] / g);
  return out;
}

std::string v3_str(const V3& v) {
  return "(" + v[0].get_str() + "," + v[1].get_str() + "," + v[2].get_str() + ")";
}

static V3 v3_scale(const V3& v, const mpq_class& s) { return {v[0] * s, v[1] * s, v[2] * s}; }
static V3 v3_add(const V3& a, const V3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
static V3 v3_sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
static V3 v3_neg(const V3& a) { return {-a[0], -a[1], -a[2]}; }

static V3 v3_from_ivec(const IVec& n) {
  QVec q(n.begin(), n.end());
  return v3_pad(q);
}

static int sgn(const mpq_class& q) { return q > 0 ? 1 : (q < 0 ? -1 : 0); }

// Positive multiple test for nonzero vectors.
static bool same_ray(const V3& a, const V3& b) {
  return v3_zero(v3_cross(a, b)) && v3_dot(a, b) > 0;
}

// ---------------------------------------------------------------------------
// Walls.

WallFunction quantum_dilog(const mpq_class& d) { return {TCoeff(1), TCoeff::t_power(d)}; }

std::vector<V3> Wall::inequalities() const {
  if (full) return {};
  V3 n = v3_from_ivec(normal);
  return {v3_cross(n, start), v3_cross(end, n)};
}

int Wall::locate(const V3& x) const {
  if (full) return 1;
  V3 n = v3_from_ivec(normal);
  mpq_class a = v3_dot(x, v3_cross(n, start));
  mpq_class b = v3_dot(x, v3_cross(end, n));
  if (a < 0 || b < 0) return -1;
  if (v3_zero(x)) return 0;
  if (a == 0 || b == 0) {
    // For a half-plane both inequalities coincide; points on the boundary
    // line are on the relative boundary.
    return 0;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Truncated series arithmetic in one variable.

using Series = std::vector<TCoeff>;

static Series series_mul(const Series& a, const Series& b, size_t maxp) {
  Series out(std::min(maxp + 1, a.size() + b.size() - 1));
  for (size_t i = 0; i < a.size() && i <= maxp; ++i) {
    if (a[i].is_zero()) continue;
    for (size_t j = 0; j < b.size() && i + j <= maxp; ++j)
      if (!b[j].is_zero()) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Inverse of a series with constant term 1.
static Series series_inv(const Series& a, size_t maxp) {
  Series out(maxp + 1);
  out[0] = 1;
  for (size_t k = 1; k <= maxp; ++k) {
    TCoeff s;
    for (size_t i = 1; i <= k && i < a.size(); ++i)
      if (!a[i].is_zero() && !out[k - i].is_zero()) s += a[i] * out[k - i];
    out[k] = -s;
  }
  return out;
}

// g(t^alpha x).
static Series series_rescale(const Series& g, const mpq_class& alpha, size_t maxp) {
  Series out(std::min(g.size(), maxp + 1));
  for (size_t j = 0; j < out.size(); ++j) out[j] = g[j].shifted(alpha * static_cast<long>(j));
  return out;
}

std::vector<TCoeff> crossing_series(const WallFunction& g, int64_t c, int sign, const mpq_class& d,
                                    size_t max_power) {
  Series one{TCoeff(1)};
  if (c == 0 || max_power == 0) return one;
  Series gt(g.begin(), g.begin() + static_cast<long>(std::min(g.size(), max_power + 1)));
  int64_t k = c < 0 ? -c : c;
  // Polynomial factor: prod_{i in range} g(t^{shift_i} x).
  bool polynomial = (c < 0) == (sign > 0);
  Series acc = one;
  for (int64_t i = 0; i < k; ++i) {
    mpq_class shift = c < 0 ? mpq_class(2 * i) * d : mpq_class(-2 * (i + 1)) * d;
    acc = series_mul(acc, series_rescale(gt, shift, max_power), max_power);
  }
  if (polynomial) return acc;
  return series_inv(acc, max_power);
}

// ---------------------------------------------------------------------------
// Diagram.

ScatteringDiagram::ScatteringDiagram(const CompatibleSeed& seed, Side side, unsigned order, bool quantum)
    : seed_(seed), side_(side), order_(order), uf_(seed.unfrozen()) {
  size_t r = uf_.size(), n = seed.size();
  if (r > 3) throw UnsupportedError("scattering diagrams are supported for at most 3 unfrozen indices");
  const QMat& om = seed.root_omega();
  w_ = q_zero(r, r);
  for (size_t i = 0; i < r; ++i)
    for (size_t k = 0; k < r; ++k) w_[i][k] = om[uf_[i]][uf_[k]];
  for (size_t i = 0; i < r; ++i) {
    Exp e(n, 0);
    if (side == Side::A) {
      for (size_t j = 0; j < n; ++j) {
        if (om[uf_[i]][j].get_den() != 1) throw ComputationError("omega_1(e_i) is not integral");
        e[j] = om[uf_[i]][j].get_num().get_si();
      }
    } else {
      e[uf_[i]] = 1;
    }
    gen_.push_back(e);
  }
  if (quantum) {
    if (side == Side::A) {
      if (!seed.has_lambda()) throw ComputationError("the quantum A-side diagram needs a compatible Lambda");
      auto rep = check_compatible(seed);
      if (!rep.ok) throw ComputationError("Lambda is not compatible: " + rep.message);
      for (size_t u : uf_)
        if (seed.multiplier(u) != seed.multiplier(uf_[0]))
          throw UnsupportedError("quantum diagrams need a common multiplier on all unfrozen indices");
      d_ = r ? seed.multiplier(uf_[0]) : mpq_class(0);
    } else {
      d_ = 1;
    }
  }
  for (size_t i = 0; i < r; ++i) {
    Wall w;
    w.normal.assign(r, 0);
    w.normal[i] = 1;
    w.full = true;
    w.g = quantum_dilog(d_);
    w.initial = true;
    walls_.push_back(w);
  }
  canonicalize();
}

int64_t ScatteringDiagram::degree(const IVec& n) {
  int64_t s = 0;
  for (auto x : n) s += x;
  return s;
}

QVec ScatteringDiagram::key_position(const IVec& n) const {
  size_t r = uf_.size();
  QVec out(r, 0);
  for (size_t i = 0; i < r; ++i)
    if (n[i] != 0)
      for (size_t k = 0; k < r; ++k) out[k] += w_[i][k] * static_cast<long>(n[i]);
  return out;
}

QVec ScatteringDiagram::base_position(const Exp& p) const {
  size_t r = uf_.size();
  QVec out(r, 0);
  if (side_ == Side::A) {
    for (size_t k = 0; k < r; ++k) out[k] = static_cast<long>(p.at(uf_[k]));
  } else {
    const QMat& om = seed_.root_omega();
    for (size_t k = 0; k < r; ++k)
      for (size_t j = 0; j < p.size(); ++j)
        if (p[j] != 0) out[k] += om[j][uf_[k]] * static_cast<long>(p[j]);
  }
  return out;
}

Exp ScatteringDiagram::exponent(const Exp& base, const IVec& n) const {
  Exp e = base;
  for (size_t i = 0; i < n.size(); ++i)
    if (n[i] != 0)
      for (size_t j = 0; j < e.size(); ++j) e[j] += n[i] * gen_[i][j];
  return e;
}

void ScatteringDiagram::add_wall(Wall w) {
  walls_.push_back(std::move(w));
  canonicalize();
}

void ScatteringDiagram::set_walls(std::vector<Wall> ws) {
  walls_ = std::move(ws);
  canonicalize();
}

namespace {

bool series_trivial(const WallFunction& g) {
  for (size_t j = 1; j < g.size(); ++j)
    if (!g[j].is_zero()) return false;
  return true;
}

std::vector<std::string> series_key(const WallFunction& g) {
  std::vector<std::string> k;
  for (const auto& c : g) k.push_back(c.str());
  while (!k.empty() && k.back() == "0") k.pop_back();
  return k;
}

std::string v3_key(const V3& v) { return v3_str(v); }

// Sort key: normal, full-first, rays.
bool wall_less(const Wall& a, const Wall& b) {
  if (a.normal != b.normal) return a.normal < b.normal;
  if (a.full != b.full) return a.full;
  if (!a.full) {
    for (size_t i = 0; i < 3; ++i) {
      if (a.start[i] != b.start[i]) return a.start[i] < b.start[i];
    }
    for (size_t i = 0; i < 3; ++i) {
      if (a.end[i] != b.end[i]) return a.end[i] < b.end[i];
    }
  }
  return series_key(a.g) < series_key(b.g);
}

bool same_support(const Wall& a, const Wall& b) {
  if (a.normal != b.normal || a.full != b.full) return false;
  return a.full || (a.start == b.start && a.end == b.end);
}

}  // namespace

void ScatteringDiagram::canonicalize() {
  for (auto& w : walls_) {
    int64_t deg = degree(w.normal);
    size_t maxp = deg > 0 ? static_cast<size_t>(order_ / static_cast<unsigned>(deg)) : 0;
    if (w.g.size() > maxp + 1) w.g.resize(maxp + 1);
    if (!w.full) {
      w.start = v3_primitive(w.start);
      w.end = v3_primitive(w.end);
      if (w.start == v3_neg(w.end)) {
        // canonical half-plane: keep whichever representation is given; the
        // direction pair fixes which half is meant.
      }
    }
  }
  walls_.erase(std::remove_if(walls_.begin(), walls_.end(), [](const Wall& w) { return series_trivial(w.g); }),
               walls_.end());
  bool changed = true;
  while (changed) {
    changed = false;
    std::sort(walls_.begin(), walls_.end(), wall_less);
    // identical supports: multiply functions
    for (size_t i = 0; i + 1 < walls_.size() && !changed; ++i)
      for (size_t j = i + 1; j < walls_.size() && !changed; ++j)
        if (same_support(walls_[i], walls_[j])) {
          int64_t deg = degree(walls_[i].normal);
          size_t maxp = static_cast<size_t>(order_ / static_cast<unsigned>(deg));
          walls_[i].g = series_mul(walls_[i].g, walls_[j].g, maxp);
          walls_[i].initial = walls_[i].initial && walls_[j].initial;
          walls_.erase(walls_.begin() + static_cast<long>(j));
          if (series_trivial(walls_[i].g)) walls_.erase(walls_.begin() + static_cast<long>(i));
          changed = true;
        }
    // adjacent sectors with equal functions: join when the union is convex
    for (size_t i = 0; i < walls_.size() && !changed; ++i)
      for (size_t j = 0; j < walls_.size() && !changed; ++j) {
        if (i == j) continue;
        Wall& a = walls_[i];
        const Wall& b = walls_[j];
        if (a.full || b.full || a.normal != b.normal || a.end != b.start) continue;
        if (series_key(a.g) != series_key(b.g)) continue;
        V3 n = v3_from_ivec(a.normal);
        V3 s = a.start, e = b.end;
        bool ok;
        if (s == e) {
          ok = true;  // union is the whole plane
        } else if (s == v3_neg(e)) {
          ok = true;
        } else {
          ok = v3_dot(n, v3_cross(s, e)) > 0;
        }
        if (!ok) continue;
        if (s == e) {
          a.full = true;
          a.start = a.end = V3{0, 0, 0};
        } else {
          a.end = e;
        }
        walls_.erase(walls_.begin() + static_cast<long>(j));
        changed = true;
      }
  }
}

std::string ScatteringDiagram::dump() const {
  std::ostringstream os;
  size_t r = rank();
  os << "# side=" << (side_ == Side::A ? "A" : "X") << " order=" << order_ << " rank=" << r
     << " walls=" << walls_.size() << " coordinates=unfrozen\n";
  for (const auto& w : walls_) {
    os << "normal=" << exp_str(Exp(w.normal.begin(), w.normal.end()));
    Exp v(gen_.empty() ? 0 : gen_[0].size(), 0);
    v = exponent(v, w.normal);
    os << " v=" << exp_str(v);
    auto trunc = [r](const V3& x) {
      std::string s = "(";
      for (size_t i = 0; i < r; ++i) s += (i ? "," : "") + x[i].get_str();
      return s + ")";
    };
    if (w.full) {
      os << " support=hyperplane";
    } else if (r <= 2) {
      // In the plane the support is a single ray.
      V3 dir = v3_primitive(v3_cross(v3_from_ivec(w.normal), w.start));
      os << " support=ray" << trunc(dir);
    } else {
      os << " support=rays{" << trunc(w.start) << "," << trunc(w.end) << "}";
      os << " ineq{";
      auto in = w.inequalities();
      for (size_t i = 0; i < in.size(); ++i) os << (i ? "," : "") << trunc(v3_primitive(in[i]));
      os << "}";
    }
    os << " f=1";
    for (size_t j = 1; j < w.g.size(); ++j)
      if (!w.g[j].is_zero()) os << " + (" << w.g[j].str() << ")x^" << j;
    os << (w.initial ? " incoming" : "") << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Crossing.

namespace {

int64_t as_int(const mpq_class& q) {
  if (q.get_den() != 1) throw ComputationError("non-integral pairing " + q.get_str() + " in wall crossing");
  return q.get_num().get_si();
}

mpq_class dotq(const IVec& n, const QVec& x) {
  mpq_class s = 0;
  for (size_t i = 0; i < n.size(); ++i)
    if (n[i] != 0) s += x[i] * static_cast<long>(n[i]);
  return s;
}

// Keyed terms crossing: base position `pos`.
std::map<IVec, TCoeff> cross_terms(const ScatteringDiagram& d, const QVec& pos, const std::map<IVec, TCoeff>& in,
                                   const Wall& w, int sign, unsigned order) {
  std::map<IVec, TCoeff> out;
  int64_t wdeg = ScatteringDiagram::degree(w.normal);
  mpq_class npos = dotq(w.normal, pos);
  for (const auto& [n, coef] : in) {
    int64_t deg = ScatteringDiagram::degree(n);
    mpq_class cq = npos + dotq(w.normal, d.key_position(n));
    int64_t c = as_int(cq);
    size_t maxj = deg >= static_cast<int64_t>(order) ? 0 : static_cast<size_t>((order - deg) / wdeg);
    auto s = crossing_series(w.g, c, sign, d.twist(), maxj);
    for (size_t j = 0; j < s.size(); ++j) {
      if (s[j].is_zero()) continue;
      IVec key = n;
      for (size_t i = 0; i < key.size(); ++i) key[i] += static_cast<int64_t>(j) * w.normal[i];
      TCoeff add = coef * s[j];
      if (d.quantum() && j > 0) add = add.shifted(d.twist() * c * static_cast<long>(j));
      auto it = out.find(key);
      if (it == out.end()) {
        out.emplace(key, add);
      } else {
        it->second += add;
        if (it->second.is_zero()) out.erase(it);
      }
    }
  }
  return out;
}

}  // namespace

Keyed cross_keyed(const ScatteringDiagram& d, const Keyed& x, const Wall& w, int sign, unsigned order) {
  Keyed out;
  out.base = x.base;
  out.terms = cross_terms(d, d.base_position(x.base), x.terms, w, sign, order);
  return out;
}

TorusElement cross_wall(const ScatteringDiagram& d, const TorusElement& x, const Wall& w, int sign, unsigned order) {
  TorusElement out(x.dim());
  IVec zero(d.rank(), 0);
  for (const auto& [e, c] : x.terms()) {
    Keyed k{e, {{zero, c}}};
    Keyed y = cross_keyed(d, k, w, sign, order);
    for (const auto& [n, cc] : y.terms) out.add_term(d.exponent(e, n), cc);
  }
  return out;
}

ScatteringDiagram initial_diagram(const CompatibleSeed& seed, Side side, unsigned order, bool quantum) {
  return ScatteringDiagram(seed, side, order, quantum);
}

// ---------------------------------------------------------------------------
// Completion.

namespace {

struct HalfWall {
  V3 dir;
  size_t wall;
  int sign;
};

// Angular comparison of vectors in the plane orthogonal to rho, measured
// counterclockwise about rho starting at axis a.
struct AngleFrame {
  V3 a, b;
  explicit AngleFrame(const V3& rho) {
    V3 axis{1, 0, 0};
    if (v3_zero(v3_cross(rho, axis))) axis = V3{0, 1, 0};
    a = v3_cross(rho, axis);
    b = v3_cross(rho, a);
  }
  bool less(const V3& u, const V3& v) const {
    mpq_class ux = v3_dot(u, a), uy = v3_dot(u, b), vx = v3_dot(v, a), vy = v3_dot(v, b);
    int hu = (uy > 0 || (uy == 0 && ux > 0)) ? 0 : 1;
    int hv = (vy > 0 || (vy == 0 && vx > 0)) ? 0 : 1;
    if (hu != hv) return hu < hv;
    return ux * vy - uy * vx > 0;
  }
};

std::vector<HalfWall> half_walls(const ScatteringDiagram& D, const V3& rho) {
  std::vector<HalfWall> hw;
  const auto& ws = D.walls();
  for (size_t i = 0; i < ws.size(); ++i) {
    const Wall& w = ws[i];
    V3 n = v3_from_ivec(w.normal);
    if (v3_dot(n, rho) != 0) continue;
    int loc = w.locate(rho);
    if (loc < 0) continue;
    V3 t = v3_cross(n, rho);
    std::vector<V3> dirs;
    if (loc == 1) {
      dirs = {t, v3_neg(t)};
    } else {
      bool at_start = same_ray(rho, w.start), at_end = same_ray(rho, w.end);
      if (at_start) dirs.push_back(t);
      if (at_end) dirs.push_back(v3_neg(t));
    }
    for (const auto& u : dirs) {
      int s = sgn(v3_dot(n, v3_cross(rho, u)));
      hw.push_back({u, i, s});
    }
  }
  AngleFrame fr(rho);
  std::stable_sort(hw.begin(), hw.end(), [&](const HalfWall& x, const HalfWall& y) { return fr.less(x.dir, y.dir); });
  return hw;
}

void enumerate_keys(size_t r, int64_t deg, IVec& cur, size_t pos, std::vector<IVec>& out) {
  if (pos + 1 == r) {
    cur[pos] = deg;
    out.push_back(cur);
    return;
  }
  for (int64_t v = 0; v <= deg; ++v) {
    cur[pos] = v;
    enumerate_keys(r, deg - v, cur, pos + 1, out);
  }
}

std::vector<IVec> keys_of_degree(size_t r, int64_t deg) {
  std::vector<IVec> out;
  if (r == 0) return out;
  IVec cur(r, 0);
  enumerate_keys(r, deg, cur, 0, out);
  return out;
}

std::vector<V3> find_joints(const ScatteringDiagram& D) {
  const auto& ws = D.walls();
  std::set<std::string> seen;
  std::vector<V3> out;
  auto add = [&](V3 v) {
    if (v3_zero(v)) return;
    v = v3_primitive(v);
    if (seen.insert(v3_key(v)).second) out.push_back(v);
  };
  for (const auto& w : ws)
    if (!w.full) {
      add(w.start);
      add(w.end);
    }
  for (size_t i = 0; i < ws.size(); ++i)
    for (size_t j = i + 1; j < ws.size(); ++j) {
      V3 l = v3_cross(v3_from_ivec(ws[i].normal), v3_from_ivec(ws[j].normal));
      if (v3_zero(l)) continue;
      for (const V3& rho : {l, v3_neg(l)})
        if (ws[i].contains(rho) && ws[j].contains(rho)) add(rho);
    }
  return out;
}

// Repairs at one joint for keys of degree k.
std::vector<Wall> repair_joint(const ScatteringDiagram& D, const V3& rho, unsigned k, size_t& skipped) {
  std::vector<Wall> out;
  auto hw = half_walls(D, rho);
  size_t r = D.rank();
  for (const IVec& n : keys_of_degree(r, k)) {
    V3 nv = v3_from_ivec(n);
    if (v3_dot(nv, rho) != 0) continue;
    IVec n0 = primitive(n);
    int64_t j = gcd_vec(n);
    IVec b = bezout(n0);
    QVec p(r);
    for (size_t i = 0; i < r; ++i) p[i] = -b[i];  // <n0, p> = -1
    std::map<IVec, TCoeff> terms{{IVec(r, 0), TCoeff(1)}};
    for (const auto& h : hw) terms = cross_terms(D, p, terms, D.walls()[h.wall], h.sign, k);
    auto it = terms.find(n);
    if (it == terms.end() || it->second.is_zero()) continue;
    TCoeff delta = it->second;
    V3 mbar = v3_pad(D.key_position(n0));
    if (v3_zero(mbar) || v3_zero(v3_cross(mbar, rho))) {
      ++skipped;
      continue;
    }
    V3 u = v3_neg(mbar);
    V3 n0v = v3_from_ivec(n0);
    int s = sgn(v3_dot(n0v, v3_cross(rho, u)));
    Wall w;
    w.normal = n0;
    w.full = false;
    if (s > 0) {
      w.start = rho;
      w.end = u;
    } else {
      w.start = u;
      w.end = rho;
    }
    TCoeff a = -delta;
    if (D.quantum()) a = a.shifted(D.twist() * j);
    if (s < 0) a = -a;
    w.g.assign(static_cast<size_t>(j) + 1, TCoeff());
    w.g[0] = 1;
    w.g[static_cast<size_t>(j)] = a;
    out.push_back(w);
  }
  return out;
}

}  // namespace

ScatteringDiagram consistent_complete(const ScatteringDiagram& d_in, unsigned order, bool parallel,
                                      CompletionStats* stats) {
  ScatteringDiagram D = d_in;
  D.set_order(order);
  D.set_walls(D.walls());
  CompletionStats st;
  for (unsigned k = 2; k <= order; ++k) {
    auto joints = find_joints(D);
    std::vector<std::vector<Wall>> found(joints.size());
    std::vector<size_t> skipped(joints.size(), 0);
    long nj = static_cast<long>(joints.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long i = 0; i < nj; ++i) found[i] = repair_joint(D, joints[i], k, skipped[i]);
    std::vector<Wall> all = D.walls();
    for (size_t i = 0; i < joints.size(); ++i) {
      st.parallel_skipped += skipped[i];
      st.walls_added += found[i].size();
      for (auto& w : found[i]) all.push_back(std::move(w));
    }
    st.joints_visited += joints.size();
    D.set_walls(std::move(all));
  }
  D.note_skipped(st.parallel_skipped);
  if (stats) *stats = st;
  return D;
}

// ---------------------------------------------------------------------------
// Paths.

std::vector<Crossing> segment_crossings(const ScatteringDiagram& d, const QVec& a, const QVec& b) {
  V3 A = v3_pad(a), B = v3_pad(b), dir = v3_sub(B, A);
  std::map<mpq_class, std::vector<size_t>> hits;
  const auto& ws = d.walls();
  for (size_t i = 0; i < ws.size(); ++i) {
    V3 n = v3_from_ivec(ws[i].normal);
    mpq_class na = v3_dot(n, A), nd = v3_dot(n, dir);
    if (na == 0 || na + nd == 0) {
      // endpoint on the hyperplane: only a problem inside the support
      const V3& P = na == 0 ? A : B;
      if (ws[i].contains(P)) throw NonGenericError("path endpoint lies on a wall");
      if (nd == 0) continue;
      continue;
    }
    if (nd == 0) continue;
    mpq_class tau = -na / nd;
    if (tau <= 0 || tau >= 1) continue;
    V3 P = v3_add(A, v3_scale(dir, tau));
    int loc = ws[i].locate(P);
    if (loc < 0) continue;
    if (loc == 0) throw NonGenericError("path meets the boundary of a wall at " + v3_str(P));
    hits[tau].push_back(i);
  }
  std::vector<Crossing> out;
  for (auto& [tau, idx] : hits) {
    for (size_t i : idx)
      if (ws[i].normal != ws[idx[0]].normal) throw NonGenericError("path crosses non-parallel walls simultaneously");
    V3 n = v3_from_ivec(ws[idx[0]].normal);
    out.push_back({tau, idx, sgn(v3_dot(n, dir))});
  }
  return out;
}

Keyed transport_keyed(const ScatteringDiagram& d, const Keyed& x, const std::vector<QVec>& path, unsigned order) {
  Keyed cur = x;
  QVec pos = d.base_position(x.base);
  for (size_t s = 0; s + 1 < path.size(); ++s)
    for (const auto& c : segment_crossings(d, path[s], path[s + 1]))
      for (size_t i : c.walls) cur.terms = cross_terms(d, pos, cur.terms, d.walls()[i], c.sign, order);
  return cur;
}

TorusElement transport_element(const ScatteringDiagram& d, const TorusElement& x, const std::vector<QVec>& path,
                               unsigned order) {
  TorusElement out(x.dim());
  IVec zero(d.rank(), 0);
  for (const auto& [e, c] : x.terms()) {
    Keyed y = transport_keyed(d, Keyed{e, {{zero, c}}}, path, order);
    for (const auto& [n, cc] : y.terms) out.add_term(d.exponent(e, n), cc);
  }
  return out;
}

std::vector<TorusElement> path_ordered_product(const ScatteringDiagram& d, const std::vector<QVec>& path,
                                               unsigned order) {
  size_t n = d.seed().size();
  std::vector<TorusElement> out;
  for (size_t i = 0; i < n; ++i) {
    Exp e(n, 0);
    e[i] = 1;
    out.push_back(transport_element(d, TorusElement::monomial(e), path, order));
  }
  return out;
}

bool is_generic(const ScatteringDiagram& d, const QVec& q) {
  V3 Q = v3_pad(q);
  for (const auto& w : d.walls())
    if (v3_dot(v3_from_ivec(w.normal), Q) == 0) return false;
  return true;
}

QVec default_perturbation(size_t r) {
  QVec v{mpq_class(5, 37), mpq_class(3, 29), mpq_class(2, 31)};
  v.resize(r);
  return v;
}

QVec point_near(const ScatteringDiagram& d, const QVec& x, const QVec& dir) {
  V3 X = v3_pad(x), Dv = v3_pad(dir);
  mpq_class eps = 1;
  for (int iter = 0; iter < 400; ++iter, eps /= 2) {
    V3 Q = v3_add(X, v3_scale(Dv, eps));
    QVec q(x.size());
    for (size_t i = 0; i < q.size(); ++i) q[i] = Q[i];
    if (!is_generic(d, q)) continue;
    bool ok = true;
    for (const auto& w : d.walls()) {
      V3 n = v3_from_ivec(w.normal);
      mpq_class nx = v3_dot(n, X), nq = v3_dot(n, Q);
      if (nx == 0 && w.contains(X)) continue;
      if (nx == 0 || (nx > 0) != (nq > 0)) {
        mpq_class tau = nx / (nx - nq);
        V3 P = v3_add(X, v3_scale(v3_sub(Q, X), tau));
        if (w.contains(P)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return q;
  }
  throw NonGenericError("could not find a generic point near the requested position");
}

// ---------------------------------------------------------------------------
// Consistency certificate.

ConsistencyReport consistency_certificate(const ScatteringDiagram& d, size_t loops, unsigned seed_value) {
  ConsistencyReport rep;
  size_t r = d.rank();
  if (r == 0) {
    rep.loops = loops;
    return rep;
  }
  std::mt19937 rng(seed_value);
  std::uniform_int_distribution<int> coord(-40, 40);
  std::uniform_int_distribution<int> pd(-3, 3);
  size_t attempts = 0;
  while (rep.loops < loops && attempts < loops * 50) {
    ++attempts;
    std::vector<QVec> tri(3, QVec(r));
    for (auto& v : tri)
      for (auto& c : v) c = mpq_class(coord(rng), 7);
    std::vector<QVec> path = {tri[0], tri[1], tri[2], tri[0]};
    // random base exponent
    Exp base(d.seed().size(), 0);
    for (size_t u : d.unfrozen()) base[u] = pd(rng);
    Keyed k{base, {{IVec(r, 0), TCoeff(1)}}};
    try {
      Keyed out = transport_keyed(d, k, path, d.order());
      ++rep.loops;
      if (out.terms != k.terms) {
        if (rep.failures == 0) {
          std::ostringstream os;
          os << "loop through";
          for (const auto& v : tri) {
            os << " (";
            for (size_t i = 0; i < r; ++i) os << (i ? "," : "") << v[i].get_str();
            os << ")";
          }
          os << " acting on z^" << exp_str(base) << " gives " << out.terms.size() << " terms";
          rep.first_failure = os.str();
        }
        ++rep.failures;
      }
    } catch (const NonGenericError&) {
      // resample
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Chambers.

std::optional<MutationPath> chamber_locate(const CompatibleSeed& seed, const QVec& q, size_t depth) {
  auto uf = seed.unfrozen();
  auto inside = [&](const CompatibleSeed& s) {
    for (size_t i : uf) {
      mpq_class v = 0;
      for (size_t k = 0; k < uf.size(); ++k) v += q[k] * static_cast<long>(s.basis()[i][uf[k]]);
      if (v <= 0) return false;
    }
    return true;
  };
  std::deque<CompatibleSeed> frontier{seed};
  std::set<IMat> seen;
  auto sig = [&](const CompatibleSeed& s) {
    IMat m;
    for (size_t i : uf) m.push_back(s.basis()[i]);
    std::sort(m.begin(), m.end());
    return m;
  };
  seen.insert(sig(seed));
  for (size_t level = 0; level <= depth; ++level) {
    std::deque<CompatibleSeed> next;
    for (const auto& s : frontier) {
      if (inside(s)) return s.path();
      if (level == depth) continue;
      for (size_t j : uf) {
        if (!s.path().empty() && s.path().back() == j) continue;
        CompatibleSeed m = mutate_seed(s, j);
        if (seen.insert(sig(m)).second) next.push_back(std::move(m));
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

}  // namespace cs
