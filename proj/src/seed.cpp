#include "cs/seed.hpp"

#include <algorithm>
#include <functional>
#include <json.hpp>

#include "cs/errors.hpp"

namespace cs {

namespace {

IMat identity_int(size_t n) {
  IMat m(n, IVec(n, 0));
  for (size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

mpq_class pair(const IVec& a, const QMat& form, const IVec& b) {
  mpq_class s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      if (b[j] != 0) s += form[i][j] * static_cast<long>(a[i] * b[j]);
  }
  return s;
}

int64_t to_int(const mpq_class& q, const char* what) {
  if (q.get_den() != 1 || !q.get_num().fits_slong_p())
    throw ComputationError(std::string("expected an integer for ") + what + ", got " + q.get_str());
  return q.get_num().get_si();
}

}  // namespace

CompatibleSeed::CompatibleSeed(std::vector<std::string> labels, std::vector<bool> frozen, QMat omega,
                               std::optional<QMat> lambda, std::vector<mpq_class> d_i)
    : labels_(std::move(labels)),
      frozen_(std::move(frozen)),
      d_i_(std::move(d_i)),
      root_omega_(std::move(omega)),
      root_lambda_(std::move(lambda)) {
  size_t n = labels_.size();
  if (frozen_.size() != n) throw ParseError("frozen flags do not match labels");
  if (root_omega_.size() != n || !q_is_skew(root_omega_)) throw ParseError("omega must be a skew n x n matrix");
  if (root_lambda_ && (root_lambda_->size() != n || !q_is_skew(*root_lambda_)))
    throw ParseError("lambda must be a skew n x n matrix");
  if (d_i_.empty()) d_i_.assign(n, 1);
  if (d_i_.size() != n) throw ParseError("symmetrizers do not match labels");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if ((!frozen_[i] || !frozen_[j]) && root_omega_[i][j].get_den() != 1)
        throw ParseError("omega(e_i,e_j) must be integral when i or j is unfrozen");
  basis_ = identity_int(n);
  dual_ = identity_int(n);
  refresh();
}

void CompatibleSeed::refresh() {
  size_t n = size();
  omega_ = q_zero(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) omega_[i][j] = pair(basis_[i], root_omega_, basis_[j]);
  multipliers_.assign(n, 0);
  if (!root_lambda_) return;
  for (size_t i : unfrozen()) {
    QVec v = omega1(basis_[i]);
    // Lambda(f_k, v) for the current dual basis; should equal d'_i delta_{ik}.
    mpq_class s = 0;
    for (size_t a = 0; a < n; ++a)
      for (size_t b = 0; b < n; ++b) s += static_cast<long>(dual_[i][a]) * (*root_lambda_)[a][b] * v[b];
    multipliers_[i] = s;
  }
}

size_t CompatibleSeed::rank() const {
  return static_cast<size_t>(std::count(frozen_.begin(), frozen_.end(), false));
}

std::vector<size_t> CompatibleSeed::unfrozen() const {
  std::vector<size_t> r;
  for (size_t i = 0; i < size(); ++i)
    if (!frozen_[i]) r.push_back(i);
  return r;
}

size_t CompatibleSeed::index_of(const std::string& label) const {
  for (size_t i = 0; i < size(); ++i)
    if (labels_[i] == label) return i;
  throw ParseError("unknown label '" + label + "'");
}

QMat CompatibleSeed::lambda_matrix() const {
  if (!root_lambda_) throw ComputationError("seed has no Lambda");
  size_t n = size();
  QMat m = q_zero(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) m[i][j] = pair(dual_[i], *root_lambda_, dual_[j]);
  return m;
}

QVec CompatibleSeed::omega1(const IVec& n) const {
  QVec r(size(), 0);
  for (size_t i = 0; i < size(); ++i) {
    if (n[i] == 0) continue;
    for (size_t k = 0; k < size(); ++k) r[k] += root_omega_[i][k] * static_cast<long>(n[i]);
  }
  return r;
}

IVec CompatibleSeed::omega1_basis(size_t i) const {
  QVec q = omega1(basis_.at(i));
  IVec r;
  for (auto& x : q) r.push_back(to_int(x, "omega_1(e_i)"));
  return r;
}

Twist CompatibleSeed::a_twist() const {
  return root_lambda_ ? Twist::from_rationals(*root_lambda_) : Twist::zero(size());
}

Twist CompatibleSeed::x_twist() const { return Twist::from_rationals(root_omega_); }

mpq_class CompatibleSeed::multiplier(size_t i) const { return multipliers_.at(i); }

// ---------------------------------------------------------------- compatibility

CompatibilityReport check_compatible(const CompatibleSeed& seed) {
  CompatibilityReport rep;
  if (!seed.has_lambda()) {
    rep.message = "seed carries no Lambda";
    return rep;
  }
  QMat lam = seed.lambda_matrix();
  QMat om = seed.omega_matrix();
  size_t n = seed.size();
  bool have_d = false;
  for (size_t i : seed.unfrozen()) {
    // Column i of Lambda * B is Lambda(f_k, omega_1(e_i)).
    for (size_t k = 0; k < n; ++k) {
      mpq_class s = 0;
      for (size_t l = 0; l < n; ++l) s += lam[k][l] * om[i][l];
      mpq_class expect = (k == i) ? s : mpq_class(0);
      if (k != i && s != 0) {
        rep.message = "column " + seed.labels()[i] + " has off-diagonal entry at " + seed.labels()[k];
        return rep;
      }
      if (k == i) {
        mpq_class di = s / seed.symmetrizers()[i];
        if (!have_d) {
          rep.d = di;
          have_d = true;
        } else if (di != rep.d) {
          rep.message = "column " + seed.labels()[i] + " has multiplier " + s.get_str() +
                        " inconsistent with " + rep.d.get_str();
          return rep;
        }
        (void)expect;
      }
    }
  }
  if (!have_d) {
    rep.ok = true;
    rep.d = 0;
    return rep;
  }
  if (rep.d <= 0) {
    rep.message = "multiplier is not positive";
    return rep;
  }
  rep.ok = true;
  return rep;
}

CompatibleSeed principal_extend(const CompatibleSeed& seed) {
  size_t n = seed.size();
  const QMat& om = seed.omega_matrix();
  QMat big = q_zero(2 * n, 2 * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) big[i][j] = om[i][j];
    big[i][n + i] = 1;
    big[n + i][i] = -1;
  }
  QMat lam = q_inverse(q_transpose(big));
  std::vector<std::string> labels = seed.labels();
  std::vector<bool> frozen = seed.frozen();
  std::vector<mpq_class> d = seed.symmetrizers();
  for (size_t i = 0; i < n; ++i) {
    labels.push_back(seed.labels()[i] + "'");
    frozen.push_back(true);
    d.push_back(seed.symmetrizers()[i]);
  }
  return CompatibleSeed(labels, frozen, big, lam, d);
}

// ---------------------------------------------------------------- seed mutation

CompatibleSeed mutate_seed(const CompatibleSeed& seed, size_t j) {
  if (j >= seed.size()) throw ComputationError("mutation index out of range");
  if (seed.is_frozen(j)) throw ComputationError("cannot mutate at frozen index " + seed.labels()[j]);
  CompatibleSeed r = seed;
  size_t n = seed.size();
  for (size_t i = 0; i < n; ++i) {
    if (i == j) continue;
    int64_t w = to_int(seed.omega(i, j), "omega(e_i,e_j)");
    if (w > 0)
      for (size_t k = 0; k < n; ++k) r.basis_[i][k] += w * seed.basis_[j][k];
  }
  for (size_t k = 0; k < n; ++k) r.basis_[j][k] = -seed.basis_[j][k];
  // Dual basis: inverse transpose of the basis matrix.
  QMat inv = q_inverse(q_transpose(q_from_int(r.basis_)));
  auto dual = q_to_int(inv);
  if (!dual) throw ComputationError("mutated basis is not unimodular");
  r.dual_ = *dual;
  r.path_.push_back(j);
  r.refresh();
  return r;
}

CompatibleSeed mutate_along(const CompatibleSeed& seed, const MutationPath& path) {
  CompatibleSeed s = seed;
  for (size_t j : path) s = mutate_seed(s, j);
  return s;
}

QVec tropical_mutate(const QVec& m, size_t j, const CompatibleSeed& seed) {
  if (seed.is_frozen(j)) throw ComputationError("tropical mutation at a frozen index");
  const IVec& e = seed.basis()[j];
  mpq_class c = 0;
  for (size_t k = 0; k < m.size(); ++k) c += m[k] * static_cast<long>(e[k]);
  if (c <= 0) return m;
  QVec v = seed.omega1(e);
  QVec r = m;
  for (size_t k = 0; k < r.size(); ++k) r[k] += c * v[k];
  return r;
}

QVec tropical_mutate_path(const QVec& m, const CompatibleSeed& seed, const MutationPath& path) {
  QVec x = m;
  CompatibleSeed s = seed;
  for (size_t j : path) {
    x = tropical_mutate(x, j, s);
    s = mutate_seed(s, j);
  }
  return x;
}

// ---------------------------------------------------------------- substitution engine

namespace {

// Polynomial in x with TCoeff coefficients, index = power.
using XPoly = std::vector<TCoeff>;

XPoly poly_mul(const XPoly& a, const XPoly& b) {
  if (a.empty() || b.empty()) return {};
  XPoly r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

XPoly linear_factor(const mpq_class& a) { return XPoly{TCoeff(1), TCoeff::t_power(a)}; }

// Exponent of the t-power in the i-th factor of the numerator / denominator
// chains.  `scale` is the multiplier d (zero classically).
mpq_class chain_exponent(bool positive_c, int64_t i, const mpq_class& scale) {
  // c < 0 chain: 1 + t^{d(2i+1)} x for i = 0..|c|-1.
  // c > 0 chain: 1 + t^{-d(2i-1)} x for i = 1..c.
  return positive_c ? mpq_class(-scale * (2 * i - 1)) : mpq_class(scale * (2 * i + 1));
}

XPoly chain(bool positive_c, int64_t from, int64_t to, const mpq_class& scale) {
  XPoly r{TCoeff(1)};
  for (int64_t i = from; i <= to; ++i) r = poly_mul(r, linear_factor(chain_exponent(positive_c, i, scale)));
  return r;
}

struct Substitution {
  Exp v;                                     // exponent of x
  std::function<int64_t(const Exp&)> c;      // pairing that sets the exponent of R
  std::function<mpq_class(const Exp&)> lam;  // z^p x = t^{lam(p)} z^{p+v}
  mpq_class scale;                           // d, or 0 classically
  bool inverse;                              // true: z^p R_c ; false: z^p R_c^{-1}
};

MutationResult substitute(const TorusElement& x, const Substitution& s) {
  size_t dim = x.dim();
  MutationResult res;
  res.x_exponent = s.v;
  // Terms whose R-factor is a polynomial use positive_c == !inverse for c<0...
  // Inverse: c<0 numerator chain(false), c>0 denominator chain(true) i=1..c.
  // Forward: c<0 denominator chain(false) i=0..|c|-1, c>0 numerator chain(true).
  bool den_positive = s.inverse;  // sign of c that produces denominators
  int64_t depth = 0;
  for (auto& [p, coef] : x.terms()) {
    int64_t c = s.c(p);
    if ((c > 0) == den_positive && c != 0) depth = std::max<int64_t>(depth, c > 0 ? c : -c);
  }
  auto den_range = [&](int64_t k) {
    // Factors of the denominator chain of depth k: indices lo..lo+k-1.
    int64_t lo = den_positive ? 1 : 0;
    return std::make_pair(lo, lo + k - 1);
  };
  TorusElement numerator(dim);
  for (auto& [p, coef] : x.terms()) {
    int64_t c = s.c(p);
    XPoly poly{TCoeff(1)};
    if (c != 0) {
      bool pos = c > 0;
      int64_t k = pos ? c : -c;
      if (pos != den_positive) {
        int64_t lo = pos ? 1 : 0;
        poly = chain(pos, lo, lo + k - 1, s.scale);
        if (depth > 0) {
          auto [dlo, dhi] = den_range(depth);
          poly = poly_mul(poly, chain(den_positive, dlo, dhi, s.scale));
        }
      } else {
        // Denominator of depth k; pad to the common depth.
        auto [lo, hi] = den_range(depth);
        poly = chain(pos, lo + k, hi, s.scale);
      }
    } else if (depth > 0) {
      auto [lo, hi] = den_range(depth);
      poly = chain(den_positive, lo, hi, s.scale);
    }
    mpq_class lam = s.lam(p);
    Exp q = p;
    for (size_t k = 0; k < poly.size(); ++k) {
      if (!poly[k].is_zero()) numerator.add_term(q, coef * poly[k].shifted(lam * static_cast<long>(k)));
      for (size_t i = 0; i < dim; ++i) q[i] += s.v[i];
    }
  }
  if (depth == 0) {
    res.laurent = true;
    res.value = numerator;
    return res;
  }
  auto [lo, hi] = den_range(depth);
  XPoly den = chain(den_positive, lo, hi, s.scale);
  // Group by cosets p0 + Z v and divide exactly.
  size_t pivot = 0;
  while (pivot < dim && s.v[pivot] == 0) ++pivot;
  if (pivot == dim) throw ComputationError("mutation direction is zero; substitution is degenerate");
  std::map<Exp, std::map<int64_t, TCoeff>> groups;
  for (auto& [p, coef] : numerator.terms()) {
    int64_t a = p[pivot], b = s.v[pivot];
    int64_t k = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --k;  // floor division
    Exp p0 = p;
    for (size_t i = 0; i < dim; ++i) p0[i] -= k * s.v[i];
    // z^{p0 + k v} = t^{-k lam(p0)} z^{p0} x^k
    groups[p0][k] += coef.shifted(-s.lam(p0) * k);
  }
  TorusElement value(dim);
  bool ok = true;
  int64_t dd = static_cast<int64_t>(den.size()) - 1;
  for (auto& [p0, ys] : groups) {
    int64_t a = ys.begin()->first, b = ys.rbegin()->first;
    std::map<int64_t, TCoeff> q;
    auto y_at = [&](int64_t k) {
      auto it = ys.find(k);
      return it == ys.end() ? TCoeff() : it->second;
    };
    for (int64_t k = a; k <= b; ++k) {
      TCoeff r = y_at(k);
      for (int64_t i = 1; i <= dd; ++i) {
        auto it = q.find(k - i);
        if (it != q.end()) r -= den[static_cast<size_t>(i)] * it->second;
      }
      if (k <= b - dd) {
        if (!r.is_zero()) q[k] = r;
      } else if (!r.is_zero()) {
        ok = false;
      }
    }
    if (!ok) break;
    mpq_class lam0 = s.lam(p0);
    for (auto& [k, coef] : q) {
      Exp e = p0;
      for (size_t i = 0; i < dim; ++i) e[i] += k * s.v[i];
      value.add_term(e, coef.shifted(lam0 * k));
    }
  }
  if (ok) {
    res.laurent = true;
    res.value = value;
  } else {
    res.numerator = numerator;
    res.denominator = den;
  }
  return res;
}

}  // namespace

MutationResult mutate_A(const TorusElement& x, size_t j, const CompatibleSeed& seed, Direction dir) {
  if (seed.is_frozen(j)) throw ComputationError("cannot mutate at frozen index");
  if (x.dim() != seed.size()) throw ComputationError("torus element has the wrong rank");
  const IVec e = seed.basis()[j];
  Substitution s;
  s.v = seed.omega1_basis(j);
  s.c = [e](const Exp& p) { return dot(e, p); };
  Twist tw = seed.a_twist();
  bool classical = !seed.has_lambda();
  Exp v = s.v;
  s.lam = [tw, v, classical](const Exp& p) { return classical ? mpq_class(0) : tw(p, v); };
  s.scale = classical ? mpq_class(0) : seed.multiplier(j);
  s.inverse = dir == Direction::Inverse;
  return substitute(x, s);
}

TorusElement mutate_A_laurent(const TorusElement& x, size_t j, const CompatibleSeed& seed, Direction dir) {
  MutationResult r = mutate_A(x, j, seed, dir);
  if (!r.laurent) throw NonLaurentError("mutation image is not a Laurent polynomial");
  return r.value;
}

MutationResult mutate_X(const TorusElement& x, size_t j, const CompatibleSeed& seed, Direction dir,
                        bool classical) {
  if (seed.is_frozen(j)) throw ComputationError("cannot mutate at frozen index");
  if (x.dim() != seed.size()) throw ComputationError("torus element has the wrong rank");
  const IVec e = seed.basis()[j];
  QMat om = seed.root_omega();
  Substitution s;
  s.v = e;
  s.c = [om, e](const Exp& n) {
    mpq_class w = 0;
    for (size_t a = 0; a < n.size(); ++a)
      for (size_t b = 0; b < e.size(); ++b) w += om[a][b] * static_cast<long>(n[a] * e[b]);
    return to_int(w, "omega(n,e_j)");
  };
  Twist tw = seed.x_twist();
  s.lam = [tw, e, classical](const Exp& n) { return classical ? mpq_class(0) : tw(n, e); };
  s.scale = classical ? 0 : 1;
  s.inverse = dir == Direction::Inverse;
  return substitute(x, s);
}

TorusElement cluster_variable(const CompatibleSeed& root, const MutationPath& path, size_t i) {
  std::vector<CompatibleSeed> seeds{root};
  for (size_t j : path) seeds.push_back(mutate_seed(seeds.back(), j));
  const IVec& f = seeds.back().dual_basis().at(i);
  TorusElement x = TorusElement::monomial(Exp(f.begin(), f.end()));
  for (size_t s = path.size(); s-- > 0;) x = mutate_A_laurent(x, path[s], seeds[s], Direction::Inverse);
  return x;
}

Exp g_vector(const TorusElement& x, const CompatibleSeed& seed) {
  if (x.is_zero()) throw ComputationError("zero element has no g-vector");
  auto uf = seed.unfrozen();
  size_t n = seed.size();
  // Columns: omega_1(e_i) for unfrozen i of this seed.
  QMat a = q_zero(n, uf.size());
  for (size_t c = 0; c < uf.size(); ++c) {
    QVec v = seed.omega1(seed.basis()[uf[c]]);
    for (size_t r = 0; r < n; ++r) a[r][c] = v[r];
  }
  auto left = q_left_inverse(a);
  if (!left) throw UnsupportedError("omega_1 is not injective on N_uf; use principal coefficients");
  auto below = [&](const Exp& lo, const Exp& hi) {
    QVec d(n);
    for (size_t i = 0; i < n; ++i) d[i] = static_cast<long>(lo[i] - hi[i]);
    QVec coeffs = q_mul(*left, d);
    QVec back = q_mul(a, coeffs);
    if (back != d) return false;
    for (auto& c : coeffs)
      if (c < 0 || c.get_den() != 1) return false;
    return true;
  };
  for (auto& [cand, c] : x.terms()) {
    bool top = true;
    for (auto& [other, oc] : x.terms())
      if (other != cand && !below(other, cand)) {
        top = false;
        break;
      }
    if (top) return cand;
  }
  throw ComputationError("element is not pointed");
}

// ---------------------------------------------------------------- JSON

namespace {

QMat parse_matrix(const nlohmann::json& j, size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) throw ParseError(std::string(what) + " must be an n x n array");
  QMat m;
  for (auto& row : j) {
    if (!row.is_array() || row.size() != n) throw ParseError(std::string(what) + " has a malformed row");
    QVec r;
    for (auto& v : row) {
      if (v.is_number_integer()) r.emplace_back(v.get<long>());
      else if (v.is_string()) r.push_back(parse_rational(v.get<std::string>()));
      else throw ParseError(std::string(what) + " entries must be integers or \"p/q\" strings");
    }
    m.push_back(std::move(r));
  }
  return m;
}

nlohmann::json matrix_json(const QMat& m) {
  nlohmann::json out = nlohmann::json::array();
  for (auto& row : m) {
    nlohmann::json r = nlohmann::json::array();
    for (auto& q : row) {
      if (q.get_den() == 1 && q.get_num().fits_slong_p()) r.push_back(q.get_num().get_si());
      else r.push_back(q.get_str());
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace

CompatibleSeed seed_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("labels") || !j.contains("omega")) throw ParseError("seed needs 'labels' and 'omega'");
  std::vector<std::string> labels = j["labels"].get<std::vector<std::string>>();
  size_t n = labels.size();
  std::vector<bool> frozen(n, false);
  if (j.contains("frozen")) {
    for (auto& f : j["frozen"]) {
      auto it = std::find(labels.begin(), labels.end(), f.get<std::string>());
      if (it == labels.end()) throw ParseError("frozen label not among labels");
      frozen[static_cast<size_t>(it - labels.begin())] = true;
    }
  }
  QMat omega = parse_matrix(j["omega"], n, "omega");
  std::optional<QMat> lambda;
  if (j.contains("lambda")) lambda = parse_matrix(j["lambda"], n, "lambda");
  std::vector<mpq_class> d;
  if (j.contains("d_i")) {
    for (auto& v : j["d_i"]) d.push_back(v.is_string() ? parse_rational(v.get<std::string>()) : mpq_class(v.get<long>()));
  }
  return CompatibleSeed(labels, frozen, omega, lambda, d);
}

std::string seed_to_json_text(const CompatibleSeed& seed) {
  nlohmann::json j;
  j["labels"] = seed.labels();
  nlohmann::json fr = nlohmann::json::array();
  for (size_t i = 0; i < seed.size(); ++i)
    if (seed.is_frozen(i)) fr.push_back(seed.labels()[i]);
  j["frozen"] = fr;
  j["omega"] = matrix_json(seed.omega_matrix());
  if (seed.has_lambda()) j["lambda"] = matrix_json(seed.lambda_matrix());
  nlohmann::json d = nlohmann::json::array();
  for (auto& q : seed.symmetrizers()) d.push_back(q.get_str());
  j["d_i"] = d;
  return j.dump();
}

// ---------------------------------------------------------------- examples

namespace examples {

CompatibleSeed a2(long d) {
  QMat om = q_from_int({{0, 1}, {-1, 0}});
  QMat lam = q_from_int({{0, d}, {-d, 0}});
  return CompatibleSeed({"1", "2"}, {false, false}, om, lam);
}

CompatibleSeed a2_classical() {
  return CompatibleSeed({"1", "2"}, {false, false}, q_from_int({{0, 1}, {-1, 0}}));
}

CompatibleSeed annulus() {
  QMat b = q_from_int({{0, -2, 1, 1}, {2, 0, -1, -1}, {-1, 1, 0, 0}, {-1, 1, 0, 0}});
  QMat lam = q_from_int({{0, 2, 0, 0}, {-2, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  return CompatibleSeed({"g1", "g2", "b1", "b2"}, {false, false, true, true}, q_transpose(b), lam);
}

CompatibleSeed kronecker_prin() {
  CompatibleSeed k({"1", "2"}, {false, false}, q_from_int({{0, 2}, {-2, 0}}));
  return principal_extend(k);
}

CompatibleSeed markov() {
  QMat b = q_from_int({{0, 2, -2}, {-2, 0, 2}, {2, -2, 0}});
  return CompatibleSeed({"g1", "g2", "g3"}, {false, false, false}, q_transpose(b));
}

CompatibleSeed cyclic_a3_prin() {
  CompatibleSeed c({"1", "2", "3"}, {false, false, false},
                   q_from_int({{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}}));
  return principal_extend(c);
}

}  // namespace examples

}  // namespace cs
