#include "cs/theta.hpp"

#include <omp.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "cs/errors.hpp"

namespace cs {

namespace {

V3 padv(const QVec& v) { return v3_pad(v); }

V3 ivec3(const IVec& n) { return v3_pad(QVec(n.begin(), n.end())); }

QVec add(const QVec& a, const QVec& b) {
  QVec out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

QVec unpad(const V3& v, size_t r) {
  QVec out(r);
  for (size_t i = 0; i < r; ++i) out[i] = v[i];
  return out;
}

struct Bend {
  V3 point;
  size_t wall;
  TCoeff factor;
  IVec before, after;
};

struct Tracer {
  const ScatteringDiagram& d;
  QVec ppos;  // position of the initial exponent
  unsigned order;
  std::vector<std::vector<Bend>> found;  // bends recorded from the end backwards

  V3 direction(const IVec& n) const { return padv(add(ppos, d.key_position(n))); }

  void trace(const V3& X, const IVec& n, std::vector<Bend>& bends) {
    bool zero_key = std::all_of(n.begin(), n.end(), [](int64_t v) { return v == 0; });
    if (zero_key) {
      found.push_back(bends);
      return;
    }
    V3 w = direction(n);
    if (w[0] == 0 && w[1] == 0 && w[2] == 0) return;
    const auto& ws = d.walls();
    std::optional<mpq_class> best;
    std::vector<size_t> group;
    for (size_t i = 0; i < ws.size(); ++i) {
      V3 nn = ivec3(ws[i].normal);
      mpq_class nd = v3_dot(nn, w);
      if (nd == 0) continue;
      mpq_class tau = -v3_dot(nn, X) / nd;
      if (tau <= 0) continue;
      if (best && tau > *best) continue;
      V3 P{X[0] + tau * w[0], X[1] + tau * w[1], X[2] + tau * w[2]};
      int loc = ws[i].locate(P);
      if (loc < 0) continue;
      if (loc == 0) throw NonGenericError("broken line meets the boundary of a wall");
      if (!best || tau < *best) {
        best = tau;
        group.clear();
      }
      group.push_back(i);
    }
    if (!best) return;
    const IVec& n0 = ws[group[0]].normal;
    for (size_t i : group)
      if (ws[i].normal != n0) throw NonGenericError("broken line passes through a joint");
    V3 P{X[0] + *best * w[0], X[1] + *best * w[1], X[2] + *best * w[2]};
    // Combined function of the parallel walls met here.
    int64_t deg0 = ScatteringDiagram::degree(n0);
    size_t maxk = static_cast<size_t>(ScatteringDiagram::degree(n) / deg0);
    WallFunction g{TCoeff(1)};
    for (size_t i : group) {
      WallFunction h = ws[i].g;
      WallFunction prod(std::min(maxk + 1, g.size() + h.size() - 1));
      for (size_t a = 0; a < g.size(); ++a)
        for (size_t b = 0; b < h.size() && a + b < prod.size(); ++b)
          if (!g[a].is_zero() && !h[b].is_zero()) prod[a + b] += g[a] * h[b];
      g = prod;
    }
    mpq_class cq = v3_dot(ivec3(n0), w);
    if (cq.get_den() != 1) throw ComputationError("non-integral pairing on a broken line");
    int64_t c = cq.get_num().get_si();
    int fsign = c > 0 ? -1 : 1;
    // no bend
    trace(P, n, bends);
    auto series = crossing_series(g, c, fsign, d.twist(), maxk);
    for (size_t k = 1; k < series.size(); ++k) {
      if (series[k].is_zero()) continue;
      IVec prev = n;
      bool ok = true;
      for (size_t i = 0; i < prev.size(); ++i) {
        prev[i] -= static_cast<int64_t>(k) * n0[i];
        if (prev[i] < 0) ok = false;
      }
      if (!ok) break;
      TCoeff f = series[k];
      if (d.quantum()) f = f.shifted(d.twist() * c * static_cast<long>(k));
      bends.push_back({P, group[0], f, prev, n});
      trace(P, prev, bends);
      bends.pop_back();
    }
  }
};

std::vector<IVec> keys_up_to(size_t r, unsigned order) {
  std::vector<IVec> out;
  IVec cur(r, 0);
  std::function<void(size_t, int64_t)> rec = [&](size_t pos, int64_t left) {
    if (pos == r) {
      out.push_back(cur);
      return;
    }
    for (int64_t v = 0; v <= left; ++v) {
      cur[pos] = v;
      rec(pos + 1, left - v);
    }
    cur[pos] = 0;
  };
  rec(0, order);
  std::sort(out.begin(), out.end(), [](const IVec& a, const IVec& b) {
    int64_t da = ScatteringDiagram::degree(a), db = ScatteringDiagram::degree(b);
    return da != db ? da < db : a < b;
  });
  return out;
}

BrokenLine assemble(const ScatteringDiagram& d, const Exp& p, const QVec& q, const std::vector<Bend>& back) {
  BrokenLine bl;
  bl.initial = p;
  bl.end = q;
  size_t r = d.rank();
  TCoeff c = 1;
  bl.segments.push_back({p, c, std::nullopt, {}});
  for (auto it = back.rbegin(); it != back.rend(); ++it) {
    c = c * it->factor;
    bl.segments.push_back({d.exponent(p, it->after), c, it->wall, unpad(it->point, r)});
  }
  return bl;
}

std::vector<std::vector<Bend>> lines_for_key(const ScatteringDiagram& d, const Exp& p, const QVec& q,
                                             unsigned order, const IVec& n) {
  Tracer tr{d, d.base_position(p), order, {}};
  std::vector<Bend> bends;
  tr.trace(padv(q), n, bends);
  return tr.found;
}

void check_point(const ScatteringDiagram& d, const QVec& q) {
  if (q.size() != d.rank()) throw ComputationError("base point has the wrong dimension");
  if (!is_generic(d, q)) throw NonGenericError("base point lies on a wall hyperplane");
}

}  // namespace

std::vector<BrokenLine> broken_lines(const ScatteringDiagram& d, const Exp& p, const QVec& q, unsigned order) {
  check_point(d, q);
  std::vector<BrokenLine> out;
  for (const IVec& n : keys_up_to(d.rank(), order))
    for (const auto& back : lines_for_key(d, p, q, order, n)) out.push_back(assemble(d, p, q, back));
  return out;
}

Keyed theta_keyed(const ScatteringDiagram& d, const Exp& p, const QVec& q, unsigned order, bool parallel) {
  check_point(d, q);
  auto keys = keys_up_to(d.rank(), order);
  std::vector<TCoeff> sums(keys.size());
  std::vector<std::string> errors(keys.size());
  long nk = static_cast<long>(keys.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < nk; ++i) {
    try {
      TCoeff s;
      for (const auto& back : lines_for_key(d, p, q, order, keys[i])) {
        TCoeff c = 1;
        for (const auto& b : back) c = c * b.factor;
        s += c;
      }
      sums[i] = s;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw NonGenericError(e);
  Keyed out;
  out.base = p;
  for (size_t i = 0; i < keys.size(); ++i)
    if (!sums[i].is_zero()) out.terms.emplace(keys[i], sums[i]);
  return out;
}

static TorusElement expand(const ScatteringDiagram& d, const Keyed& k) {
  TorusElement out(k.base.size());
  for (const auto& [n, c] : k.terms) out.add_term(d.exponent(k.base, n), c);
  return out;
}

TorusElement theta(const ScatteringDiagram& d, const Exp& p, const QVec& q, unsigned order, bool parallel) {
  return expand(d, theta_keyed(d, p, q, order, parallel));
}

TorusElement theta_serial(const ScatteringDiagram& d, const Exp& p, const QVec& q, unsigned order) {
  return theta(d, p, q, order, false);
}

TorusElement transport(const ScatteringDiagram& d, const TorusElement& x, const QVec& q1, const QVec& q2,
                       unsigned order) {
  return transport_element(d, x, {q1, q2}, order);
}

Twist product_form(const ScatteringDiagram& d) {
  if (!d.quantum()) return Twist::zero(d.seed().size());
  return d.side() == Side::A ? d.seed().a_twist() : d.seed().x_twist();
}

std::optional<IVec> solve_key(const ScatteringDiagram& d, const Exp& top, const Exp& m) {
  size_t r = d.rank(), n = top.size();
  QMat G = q_zero(n, r);
  for (size_t i = 0; i < r; ++i) {
    IVec e(r, 0);
    e[i] = 1;
    Exp g = d.exponent(Exp(n, 0), e);
    for (size_t j = 0; j < n; ++j) G[j][i] = static_cast<long>(g[j]);
  }
  auto L = q_left_inverse(G);
  if (!L) throw UnsupportedError("key recovery needs injective exponents; use principal coefficients");
  QVec diff(n);
  for (size_t j = 0; j < n; ++j) diff[j] = static_cast<long>(m[j] - top[j]);
  QVec sol = q_mul(*L, diff);
  IVec key(r);
  for (size_t i = 0; i < r; ++i) {
    if (sol[i].get_den() != 1 || sol[i] < 0) return std::nullopt;
    key[i] = sol[i].get_num().get_si();
  }
  if (d.exponent(top, key) != m) return std::nullopt;
  return key;
}

TCoeff structure_constant(const ScatteringDiagram& d, const std::vector<Exp>& ps, const Exp& p, unsigned order) {
  size_t n = p.size();
  Exp sum(n, 0);
  for (const auto& x : ps)
    for (size_t j = 0; j < n; ++j) sum[j] += x[j];
  auto key = solve_key(d, sum, p);
  if (!key) return TCoeff();
  if (ScatteringDiagram::degree(*key) > static_cast<int64_t>(order))
    throw ComputationError("order " + std::to_string(order) + " is too small to certify this structure constant");
  QVec q = point_near(d, d.base_position(p), default_perturbation(d.rank()));
  Twist form = product_form(d);
  TorusElement prod = TorusElement::constant(n, 1);
  for (const auto& x : ps) prod = t_multiply(prod, theta(d, x, q, order), form);
  return prod.coeff(p);
}

std::map<Exp, TCoeff> theta_product(const ScatteringDiagram& d, const std::vector<Exp>& ps, unsigned order) {
  size_t n = d.seed().size();
  Exp sum(n, 0);
  for (const auto& x : ps)
    for (size_t j = 0; j < n; ++j) sum[j] += x[j];
  std::map<Exp, TCoeff> out;
  for (const IVec& k : keys_up_to(d.rank(), order)) {
    Exp p = d.exponent(sum, k);
    if (out.count(p)) continue;
    TCoeff c = structure_constant(d, ps, p, order);
    if (!c.is_zero()) out.emplace(p, c);
  }
  return out;
}

std::map<Exp, TCoeff> theta_decompose(const ScatteringDiagram& d, const TorusElement& x, const QVec& q,
                                      unsigned order) {
  std::map<Exp, TCoeff> out;
  if (x.is_zero()) return out;
  // find the unique top term
  std::optional<Exp> top;
  for (const auto& [m, c] : x.terms()) {
    bool dominates = true;
    for (const auto& [m2, c2] : x.terms())
      if (m2 != m && !solve_key(d, m, m2)) {
        dominates = false;
        break;
      }
    if (dominates) {
      top = m;
      break;
    }
  }
  if (!top) throw ComputationError("element is not pointed; no dominance-maximal term");
  std::map<IVec, TCoeff> rem;
  for (const auto& [m, c] : x.terms()) {
    IVec k = *solve_key(d, *top, m);
    if (ScatteringDiagram::degree(k) <= static_cast<int64_t>(order)) rem.emplace(k, c);
  }
  auto cmp = [](const IVec& a, const IVec& b) {
    int64_t da = ScatteringDiagram::degree(a), db = ScatteringDiagram::degree(b);
    return da != db ? da < db : a < b;
  };
  while (!rem.empty()) {
    auto it = std::min_element(rem.begin(), rem.end(), [&](const auto& a, const auto& b) { return cmp(a.first, b.first); });
    IVec K = it->first;
    TCoeff c = it->second;
    Exp label = d.exponent(*top, K);
    out[label] += c;
    unsigned left = static_cast<unsigned>(static_cast<int64_t>(order) - ScatteringDiagram::degree(K));
    Keyed th = theta_keyed(d, label, q, left);
    for (const auto& [n, cc] : th.terms) {
      IVec key = K;
      for (size_t i = 0; i < key.size(); ++i) key[i] += n[i];
      auto jt = rem.find(key);
      TCoeff v = (jt == rem.end() ? TCoeff() : jt->second) - c * cc;
      if (v.is_zero()) {
        if (jt != rem.end()) rem.erase(jt);
      } else {
        rem[key] = v;
      }
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

QVec positive_point(const ScatteringDiagram& d) {
  size_t r = d.rank();
  QVec q = default_perturbation(r);
  for (auto& v : q) v += 1;
  if (!is_generic(d, q)) {
    for (size_t i = 0; i < r; ++i) q[i] += mpq_class(static_cast<long>(i + 1), 101);
    if (!is_generic(d, q)) throw NonGenericError("could not find a generic point in the positive chamber");
  }
  return q;
}

TorusElement dt_transform(const ScatteringDiagram& d, const TorusElement& x, unsigned order) {
  size_t r = d.rank(), n = d.seed().size();
  if (x.is_zero()) return x;
  // nu: negate exponents, then express everything over a common base.
  std::vector<std::pair<Exp, TCoeff>> terms;
  for (const auto& [m, c] : x.terms()) {
    Exp e(m.size());
    for (size_t j = 0; j < m.size(); ++j) e[j] = -m[j];
    terms.emplace_back(e, c);
  }
  // keys relative to the first term, allowing negative entries
  size_t nn = n;
  QMat G = q_zero(nn, r);
  for (size_t i = 0; i < r; ++i) {
    IVec e(r, 0);
    e[i] = 1;
    Exp g = d.exponent(Exp(nn, 0), e);
    for (size_t j = 0; j < nn; ++j) G[j][i] = static_cast<long>(g[j]);
  }
  auto L = q_left_inverse(G);
  if (!L) throw UnsupportedError("DT needs injective exponents");
  const Exp& ref = terms[0].first;
  std::vector<IVec> keys;
  IVec lo(r, 0);
  for (const auto& [e, c] : terms) {
    QVec diff(nn);
    for (size_t j = 0; j < nn; ++j) diff[j] = static_cast<long>(e[j] - ref[j]);
    QVec s = q_mul(*L, diff);
    IVec k(r);
    for (size_t i = 0; i < r; ++i) {
      if (s[i].get_den() != 1) throw ComputationError("input exponents are not in one key lattice");
      k[i] = s[i].get_num().get_si();
      lo[i] = std::min(lo[i], k[i]);
    }
    if (d.exponent(ref, k) != e) throw ComputationError("input exponents are not in one key lattice");
    keys.push_back(k);
  }
  IVec neg(r);
  for (size_t i = 0; i < r; ++i) neg[i] = lo[i];
  Exp base = ref;
  {
    // base = ref + gen(lo)
    Exp shift = d.exponent(Exp(nn, 0), neg);
    for (size_t j = 0; j < nn; ++j) base[j] += shift[j];
  }
  Keyed k;
  k.base = base;
  int64_t maxdeg = 0;
  for (size_t t = 0; t < terms.size(); ++t) {
    IVec key(r);
    for (size_t i = 0; i < r; ++i) key[i] = keys[t][i] - lo[i];
    maxdeg = std::max(maxdeg, ScatteringDiagram::degree(key));
    k.terms[key] += terms[t].second;
  }
  QVec qp = positive_point(d);
  QVec qm(r);
  for (size_t i = 0; i < r; ++i) qm[i] = -qp[i];
  unsigned total = static_cast<unsigned>(maxdeg) + order;
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coord(-30, 30);
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<QVec> path{qm};
    if (r >= 2) {
      QVec w(r);
      if (attempt == 0) {
        w = qp;
        std::swap(w[0], w[1]);
        w[0] = -w[0];
      } else {
        for (auto& v : w) v = mpq_class(coord(rng), 7);
      }
      path.push_back(w);
    }
    path.push_back(qp);
    try {
      Keyed out = transport_keyed(d, k, path, total);
      return expand(d, out);
    } catch (const NonGenericError&) {
    }
  }
  throw NonGenericError("no generic path from the negative to the positive chamber was found");
}

std::optional<MutationPath> green_to_red(const CompatibleSeed& seed, size_t depth) {
  auto uf = seed.unfrozen();
  std::vector<std::vector<int64_t>> target;
  for (size_t i : uf) {
    IVec v = seed.basis()[i];
    for (auto& x : v) x = -x;
    target.push_back(v);
  }
  std::sort(target.begin(), target.end());
  // breadth-first over mutation sequences
  std::vector<CompatibleSeed> frontier{seed};
  std::set<IMat> seen;
  for (size_t level = 0; level <= depth; ++level) {
    std::vector<CompatibleSeed> next;
    for (const auto& s : frontier) {
      IMat b;
      for (size_t i : uf) b.push_back(s.basis()[i]);
      IMat sorted = b;
      std::sort(sorted.begin(), sorted.end());
      if (sorted == target) return s.path();
      if (!seen.insert(sorted).second && level > 0) continue;
      if (level == depth) continue;
      for (size_t j : uf)
        if (s.path().empty() || s.path().back() != j) next.push_back(mutate_seed(s, j));
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

}  // namespace cs
