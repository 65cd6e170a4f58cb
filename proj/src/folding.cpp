#include "cs/folding.hpp"

#include <deque>
#include <random>
#include <set>

#include "cs/errors.hpp"
#include "cs/theta.hpp"

namespace cs {

namespace {

std::string idx_name(const CompatibleSeed& s, size_t i) { return "'" + s.labels()[i] + "'"; }

std::string part_name(const CompatibleSeed& s, const std::vector<size_t>& p) {
  std::string out = "{";
  for (size_t k = 0; k < p.size(); ++k) out += (k ? "," : "") + s.labels()[p[k]];
  return out + "}";
}

// First violation of the sign condition, or empty.
std::string sign_violation(const CompatibleSeed& s, const std::vector<std::vector<size_t>>& parts) {
  const QMat& om = s.omega_matrix();
  for (size_t i = 0; i < s.size(); ++i)
    for (const auto& p : parts) {
      if (s.is_frozen(p[0])) continue;
      bool pos = false, neg = false;
      for (size_t j : p) {
        pos = pos || om[i][j] > 0;
        neg = neg || om[i][j] < 0;
      }
      if (pos && neg)
        return "sign condition fails for " + idx_name(s, i) + " against part " + part_name(s, p);
    }
  return {};
}

std::string internal_arrow(const CompatibleSeed& s, const std::vector<std::vector<size_t>>& parts) {
  const QMat& om = s.omega_matrix();
  for (const auto& p : parts) {
    if (s.is_frozen(p[0])) continue;
    for (size_t a : p)
      for (size_t b : p)
        if (om[a][b] != 0)
          return "part " + part_name(s, p) + " has an arrow between " + idx_name(s, a) + " and " + idx_name(s, b) +
                 ", so it cannot be mutated";
  }
  return {};
}

}  // namespace

bool has_cyclic_symmetry(const CompatibleSeed& seed, const std::vector<std::vector<size_t>>& parts) {
  size_t n = seed.size();
  std::vector<size_t> g(n);
  for (size_t i = 0; i < n; ++i) g[i] = i;
  for (const auto& p : parts)
    for (size_t k = 0; k < p.size(); ++k) g.at(p[k]) = p[(k + 1) % p.size()];
  const QMat& om = seed.omega_matrix();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (om[g[i]][g[j]] != om[i][j]) return false;
  return true;
}

SeedCovering check_covering(const CompatibleSeed& seed, const std::vector<std::vector<size_t>>& parts,
                            bool require_symmetry) {
  size_t n = seed.size(), k = parts.size();
  SeedCovering c;
  c.big = seed;
  c.parts = parts;
  c.part_of.assign(n, k);
  for (size_t p = 0; p < k; ++p) {
    if (parts[p].empty()) throw ComputationError("partition has an empty part");
    for (size_t i : parts[p]) {
      if (i >= n) throw ComputationError("partition refers to index " + std::to_string(i) + " outside the seed");
      if (c.part_of[i] != k) throw ComputationError("index " + idx_name(seed, i) + " lies in two parts");
      c.part_of[i] = p;
    }
  }
  for (size_t i = 0; i < n; ++i)
    if (c.part_of[i] == k) throw ComputationError("index " + idx_name(seed, i) + " lies in no part");

  const auto& d = seed.symmetrizers();
  const QMat& om = seed.omega_matrix();
  for (const auto& p : parts)
    for (size_t i : p) {
      if (d[i] != d[p[0]])
        throw ComputationError("symmetrizers differ on " + idx_name(seed, p[0]) + " and " + idx_name(seed, i));
      if (seed.is_frozen(i) != seed.is_frozen(p[0]))
        throw ComputationError("part mixes frozen " + idx_name(seed, seed.is_frozen(i) ? i : p[0]) +
                               " and unfrozen " + idx_name(seed, seed.is_frozen(i) ? p[0] : i));
    }

  // Row sums over each part must not depend on the representative.
  c.omega_bar = q_zero(k, k);
  for (size_t a = 0; a < k; ++a)
    for (size_t b = 0; b < k; ++b) {
      mpq_class ref = 0;
      for (size_t j : parts[b]) ref += om[parts[a][0]][j];
      for (size_t i : parts[a]) {
        mpq_class s = 0;
        for (size_t j : parts[b]) s += om[i][j];
        if (s != ref)
          throw ComputationError("omega row sums over part " + part_name(seed, parts[b]) + " differ for " +
                                 idx_name(seed, parts[a][0]) + " and " + idx_name(seed, i));
      }
      c.omega_bar[a][b] = ref;
    }
  if (require_symmetry && !has_cyclic_symmetry(seed, parts))
    throw ComputationError("cycling the parts does not preserve omega");

  c.d_bar.resize(k);
  for (size_t a = 0; a < k; ++a) c.d_bar[a] = d[parts[a][0]] / static_cast<long>(parts[a].size());
  c.omega_bar_circ = q_zero(k, k);
  for (size_t a = 0; a < k; ++a)
    for (size_t b = 0; b < k; ++b) c.omega_bar_circ[a][b] = c.omega_bar[a][b] / c.d_bar[b];

  c.iota.assign(n, IVec(k, 0));
  c.iota_star.assign(k, IVec(n, 0));
  c.kappa = q_zero(n, k);
  for (size_t i = 0; i < n; ++i) {
    size_t p = c.part_of[i];
    c.iota[i][p] = 1;
    c.iota_star[p][i] = 1;
    c.kappa[i][p] = mpq_class(1, static_cast<long>(parts[p].size()));
  }
  if (q_mul(q_from_int(c.iota_star), c.kappa) != q_identity(k))
    throw ComputationError("iota^* kappa is not the identity");

  std::vector<std::string> labels(k);
  std::vector<bool> frozen(k);
  for (size_t a = 0; a < k; ++a) {
    labels[a] = parts[a].size() == 1 ? seed.labels()[parts[a][0]] : part_name(seed, parts[a]);
    frozen[a] = seed.is_frozen(parts[a][0]);
  }
  c.folded = CompatibleSeed(labels, frozen, c.omega_bar, std::nullopt, c.d_bar);
  return c;
}

UnfoldingVerdict check_unfolding(const SeedCovering& cov, size_t depth) {
  UnfoldingVerdict v;
  std::set<QMat> seen;
  std::deque<std::pair<CompatibleSeed, size_t>> queue{{cov.big, 0}};
  seen.insert(cov.big.omega_matrix());
  while (!queue.empty()) {
    auto [s, level] = queue.front();
    queue.pop_front();
    ++v.seeds_checked;
    std::string why = internal_arrow(s, cov.parts);
    if (why.empty()) why = sign_violation(s, cov.parts);
    if (!why.empty()) {
      if (level > 0) {
        why += " after mutating along";
        for (size_t j : s.path()) why += " " + cov.big.labels()[j];
      }
      v.failure = why;
      return v;
    }
    if (level == depth) continue;
    for (const auto& p : cov.parts) {
      if (s.is_frozen(p[0])) continue;
      CompatibleSeed t = s;
      for (size_t j : p) t = mutate_seed(t, j);
      if (seen.insert(t.omega_matrix()).second) queue.emplace_back(t, level + 1);
    }
  }
  v.ok = true;
  return v;
}

TorusElement apply_iota_star(const SeedCovering& cov, const TorusElement& x) {
  return x.map_exponents(cov.iota_star);
}

namespace {

size_t single_unfrozen_part(const SeedCovering& cov) {
  std::optional<size_t> part;
  for (size_t a = 0; a < cov.parts.size(); ++a)
    if (!cov.folded.is_frozen(a)) {
      if (part) throw UnsupportedError("projection is implemented for a single unfrozen part only");
      part = a;
    }
  if (!part) throw UnsupportedError("the folded seed has no unfrozen part");
  return *part;
}

// kappa of a folded position, moved off the slice by a small random vector.
QVec lifted_point(const ScatteringDiagram& big, const SeedCovering& cov, const QVec& q_bar, unsigned rand_seed) {
  const auto& uf = big.unfrozen();
  const auto& fuf = cov.folded.unfrozen();
  std::vector<size_t> pos_of(cov.parts.size(), 0);
  for (size_t a = 0; a < fuf.size(); ++a) pos_of[fuf[a]] = a;
  QVec base(uf.size()), dir(uf.size());
  std::mt19937 rng(rand_seed);
  std::uniform_int_distribution<int> pick(-50, 50);
  for (size_t u = 0; u < uf.size(); ++u) {
    size_t p = cov.part_of[uf[u]];
    base[u] = q_bar[pos_of[p]] / static_cast<long>(cov.parts[p].size());
    dir[u] = mpq_class(pick(rng), 997);
  }
  // Remove the component along the slice, part by part.
  for (size_t a : fuf) {
    mpq_class mean = 0;
    size_t cnt = 0;
    for (size_t u = 0; u < uf.size(); ++u)
      if (cov.part_of[uf[u]] == a) mean += dir[u], ++cnt;
    mean /= static_cast<long>(cnt);
    for (size_t u = 0; u < uf.size(); ++u)
      if (cov.part_of[uf[u]] == a) dir[u] -= mean;
  }
  if (is_generic(big, base) && std::all_of(dir.begin(), dir.end(), [](const mpq_class& x) { return x == 0; }))
    return base;
  QVec q = point_near(big, base, dir);
  if (!is_generic(big, q)) throw NonGenericError("lifted point lies on a wall");
  return q;
}

// n-th root of a power series with constant term 1, through degree `deg`.
std::vector<mpq_class> series_root(const std::vector<mpq_class>& F, long n, size_t deg) {
  std::vector<mpq_class> g(deg + 1, 0);
  g[0] = 1;
  mpq_class alpha(1, n);
  for (size_t m = 1; m <= deg; ++m) {
    mpq_class s = 0;
    for (size_t k = 1; k <= m && k < F.size(); ++k)
      s += ((alpha + 1) * static_cast<long>(k) - static_cast<long>(m)) * F[k] * g[m - k];
    g[m] = s / static_cast<long>(m);
  }
  return g;
}

}  // namespace

ScatteringDiagram project_diagram(const ScatteringDiagram& big, const SeedCovering& cov, unsigned order,
                                  unsigned rand_seed) {
  if (big.side() != Side::A || big.quantum()) throw UnsupportedError("folding is classical and A-side only");
  if (big.seed().omega_matrix() != cov.big.omega_matrix()) throw ComputationError("diagram is not for the big seed");
  if (!has_cyclic_symmetry(cov.big, cov.parts)) throw ComputationError("cycling the parts does not preserve omega");
  size_t part = single_unfrozen_part(cov);
  const auto& P = cov.parts[part];
  size_t n = cov.big.size(), k = cov.parts.size();

  ScatteringDiagram out(cov.folded, Side::A, order, false);
  QVec q = lifted_point(big, cov, positive_point(out), rand_seed);
  Exp m(n, 0);
  for (size_t i : P) m[i] = -1;
  TorusElement th = apply_iota_star(cov, theta(big, m, q, order));
  Exp m_bar(k, 0);
  m_bar[part] = -static_cast<int64_t>(P.size());

  // Read off F(x) with x = z^v, v = omega_bar_1(e_P).
  Exp v(k);
  for (size_t b = 0; b < k; ++b) v[b] = cov.omega_bar[part][b].get_num().get_si();
  std::vector<mpq_class> F(order + 1, 0);
  for (const auto& [e, c] : th.terms()) {
    if (!c.is_constant()) throw ComputationError("classical theta has a t-dependent coefficient");
    std::optional<int64_t> deg;
    bool ok = true;
    for (size_t b = 0; b < k && ok; ++b) {
      int64_t diff = e[b] - m_bar[b];
      if (v[b] == 0) {
        ok = diff == 0;
      } else if (diff % v[b] != 0) {
        ok = false;
      } else if (!deg) {
        deg = diff / v[b];
      } else {
        ok = *deg == diff / v[b];
      }
    }
    if (!ok || !deg || *deg < 0) throw ComputationError("folded theta is not a series in z^v: " + th.str());
    if (static_cast<size_t>(*deg) <= order) F[static_cast<size_t>(*deg)] = mpq_class(c.constant());
  }
  if (F[0] != 1) throw ComputationError("folded theta is not pointed at the expected exponent");
  auto f = series_root(F, static_cast<long>(P.size()), order);
  Wall w;
  w.normal.assign(1, 1);
  w.full = true;
  for (const auto& c : f) {
    if (c.get_den() != 1) throw ComputationError("wall function has a non-integral coefficient");
    w.g.emplace_back(mpz_class(c.get_num()));
  }
  while (w.g.size() > 1 && w.g.back().is_zero()) w.g.pop_back();
  out.set_walls({w});
  return out;
}

FoldedThetaReport folded_theta_compare(const SeedCovering& cov, const Exp& m_bar, unsigned order) {
  size_t k = cov.parts.size(), n = cov.big.size();
  if (m_bar.size() != k) throw ComputationError("folded exponent has the wrong length");
  single_unfrozen_part(cov);
  FoldedThetaReport r;
  auto folded_d = consistent_complete(initial_diagram(cov.folded, Side::A, order, false), order);
  QVec q_bar = positive_point(folded_d);
  r.folded = theta(folded_d, m_bar, q_bar, order);

  auto big_d = consistent_complete(initial_diagram(cov.big, Side::A, order, false), order);
  auto proj = project_diagram(big_d, cov, order);
  r.projected = theta(proj, m_bar, q_bar, order);

  Exp m(n, 0);
  r.has_lift = true;
  for (size_t i = 0; i < n; ++i) {
    size_t p = cov.part_of[i];
    auto sz = static_cast<int64_t>(cov.parts[p].size());
    if (m_bar[p] % sz != 0) r.has_lift = false;
    m[i] = m_bar[p] / sz;
  }
  if (r.has_lift) {
    QVec q = lifted_point(big_d, cov, q_bar, 1);
    r.lifted = apply_iota_star(cov, theta(big_d, m, q, order));
    r.lifted_equals_projected = r.lifted == r.projected;
  }
  r.folded_equals_projected = r.folded == r.projected;
  return r;
}

}  // namespace cs
