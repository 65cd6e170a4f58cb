#include "cs/linalg.hpp"

#include <numeric>
#include <sstream>

#include "cs/errors.hpp"

namespace cs {

QMat q_zero(size_t rows, size_t cols) { return QMat(rows, QVec(cols, 0)); }

QMat q_identity(size_t n) {
  QMat m = q_zero(n, n);
  for (size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

QMat q_mul(const QMat& a, const QMat& b) {
  if (a.empty()) return {};
  size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  if (a[0].size() != k) throw ComputationError("matrix shapes do not match");
  QMat r = q_zero(n, m);
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
    }
  return r;
}

QVec q_mul(const QMat& a, const QVec& v) {
  QVec r(a.size(), 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != v.size()) throw ComputationError("matrix-vector shapes do not match");
    for (size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  }
  return r;
}

QMat q_transpose(const QMat& a) {
  if (a.empty()) return {};
  QMat r = q_zero(a[0].size(), a.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) r[j][i] = a[i][j];
  return r;
}

namespace {

// Row-reduces in place; returns the pivot columns.
std::vector<size_t> row_reduce(QMat& a, mpq_class* det = nullptr) {
  std::vector<size_t> pivots;
  size_t rows = a.size(), cols = rows ? a[0].size() : 0, r = 0;
  if (det) *det = 1;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) {
      if (det) *det = 0;
      continue;
    }
    if (p != r) {
      std::swap(a[p], a[r]);
      if (det) *det = -*det;
    }
    mpq_class piv = a[r][c];
    if (det) *det *= piv;
    for (size_t j = c; j < cols; ++j) a[r][j] /= piv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      mpq_class f = a[i][c];
      for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

size_t q_rank(QMat a) { return row_reduce(a).size(); }

mpq_class q_det(QMat a) {
  if (a.empty()) return 1;
  if (a.size() != a[0].size()) throw ComputationError("determinant of non-square matrix");
  mpq_class d;
  auto piv = row_reduce(a, &d);
  return piv.size() == a.size() ? d : mpq_class(0);
}

QMat q_inverse(const QMat& a) {
  size_t n = a.size();
  QMat aug = q_zero(n, 2 * n);
  for (size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw ComputationError("inverse of non-square matrix");
    for (size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = 1;
  }
  auto piv = row_reduce(aug);
  if (piv.size() < n || (n > 0 && piv[n - 1] != n - 1)) throw ComputationError("matrix is singular");
  QMat inv = q_zero(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

std::optional<QMat> q_left_inverse(const QMat& a) {
  if (a.empty()) return QMat{};
  size_t cols = a[0].size();
  QMat at = q_transpose(a);
  QMat gram = q_mul(at, a);
  if (q_rank(gram) < cols) return std::nullopt;
  return q_mul(q_inverse(gram), at);
}

bool q_is_skew(const QMat& a) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != a.size()) return false;
    for (size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != -a[j][i]) return false;
  }
  return true;
}

QMat q_from_int(const IMat& m) {
  QMat r;
  for (auto& row : m) {
    QVec q;
    for (auto v : row) q.emplace_back(static_cast<long>(v));
    r.push_back(std::move(q));
  }
  return r;
}

std::optional<IMat> q_to_int(const QMat& m) {
  IMat r;
  for (auto& row : m) {
    IVec v;
    for (auto& q : row) {
      if (q.get_den() != 1 || !q.get_num().fits_slong_p()) return std::nullopt;
      v.push_back(q.get_num().get_si());
    }
    r.push_back(std::move(v));
  }
  return r;
}

std::string q_str(const QMat& m) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < m.size(); ++i) {
    if (i) os << ",";
    os << "[";
    for (size_t j = 0; j < m[i].size(); ++j) {
      if (j) os << ",";
      os << m[i][j].get_str();
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  std::string t;
  for (char c : s)
    if (c != ' ') t += c;
  if (t.empty() || q.set_str(t, 10) != 0 || q.get_den() == 0)
    throw ParseError("not a rational number: '" + s + "'");
  q.canonicalize();
  return q;
}

int64_t dot(const IVec& a, const IVec& b) {
  if (a.size() != b.size()) throw ComputationError("dot product of vectors of different length");
  int64_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

int64_t gcd_vec(const IVec& v) {
  int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x);
  return g;
}

IVec primitive(const IVec& v) {
  int64_t g = gcd_vec(v);
  if (g <= 1) return v;
  IVec r(v);
  for (auto& x : r) x /= g;
  return r;
}

IVec bezout(const IVec& a) {
  // Iterated extended Euclid: maintain x with <a[0..i], x> = g.
  IVec x(a.size(), 0);
  int64_t g = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    if (g == 0) {
      g = a[i] < 0 ? -a[i] : a[i];
      x[i] = a[i] < 0 ? -1 : 1;
      continue;
    }
    // Solve u*g + w*a[i] = gcd(g, a[i]).
    int64_t r0 = g, r1 = a[i], s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
      int64_t q = r0 / r1;
      std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
      std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
      std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    if (r0 < 0) {
      r0 = -r0;
      s0 = -s0;
      t0 = -t0;
    }
    for (size_t j = 0; j < i; ++j) x[j] *= s0;
    x[i] = t0;
    g = r0;
  }
  return x;
}

}  // namespace cs
