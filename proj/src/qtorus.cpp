#include "cs/qtorus.hpp"

#include <omp.h>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cs/errors.hpp"

namespace cs {

namespace {

int64_t to_i64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw ComputationError("exponent overflow");
  return z.get_si();
}

}  // namespace

// ---------------------------------------------------------------- TCoeff

TCoeff::TCoeff(long c) {
  if (c != 0) terms_[0] = c;
}

TCoeff::TCoeff(const mpz_class& c) {
  if (c != 0) terms_[0] = c;
}

TCoeff TCoeff::t_power(const mpq_class& e, const mpz_class& c) {
  TCoeff r;
  if (c == 0) return r;
  r.den_ = to_i64(e.get_den());
  r.terms_[to_i64(e.get_num())] = c;
  return r;
}

bool TCoeff::is_one() const {
  return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second == 1;
}

mpz_class TCoeff::coeff(const mpq_class& e) const {
  mpq_class scaled = e * den_;
  if (scaled.get_den() != 1) return 0;
  auto it = terms_.find(to_i64(scaled.get_num()));
  return it == terms_.end() ? mpz_class(0) : it->second;
}

bool TCoeff::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0);
}

mpz_class TCoeff::constant() const {
  auto it = terms_.find(0);
  return it == terms_.end() ? mpz_class(0) : it->second;
}

void TCoeff::rescale(int64_t den) {
  if (den == den_) return;
  int64_t f = den / den_;
  std::map<int64_t, mpz_class> out;
  for (auto& [e, c] : terms_) out.emplace(e * f, c);
  terms_.swap(out);
  den_ = den;
}

void TCoeff::normalize() {
  if (terms_.empty()) {
    den_ = 1;
    return;
  }
  int64_t g = den_;
  for (auto& [e, c] : terms_) g = std::gcd(g, e);
  if (g <= 1) return;
  std::map<int64_t, mpz_class> out;
  for (auto& [e, c] : terms_) out.emplace(e / g, c);
  terms_.swap(out);
  den_ /= g;
}

TCoeff& TCoeff::operator+=(const TCoeff& o) {
  if (o.terms_.empty()) return *this;
  int64_t l = std::lcm(den_, o.den_);
  rescale(l);
  int64_t f = l / o.den_;
  for (auto& [e, c] : o.terms_) {
    auto& slot = terms_[e * f];
    slot += c;
    if (slot == 0) terms_.erase(e * f);
  }
  normalize();
  return *this;
}

TCoeff& TCoeff::operator-=(const TCoeff& o) { return *this += -o; }

TCoeff operator*(const TCoeff& a, const TCoeff& b) {
  TCoeff r;
  if (a.terms_.empty() || b.terms_.empty()) return r;
  int64_t l = std::lcm(a.den_, b.den_);
  int64_t fa = l / a.den_, fb = l / b.den_;
  r.den_ = l;
  for (auto& [ea, ca] : a.terms_)
    for (auto& [eb, cb] : b.terms_) {
      auto& slot = r.terms_[ea * fa + eb * fb];
      slot += ca * cb;
    }
  for (auto it = r.terms_.begin(); it != r.terms_.end();)
    it = it->second == 0 ? r.terms_.erase(it) : std::next(it);
  r.normalize();
  return r;
}

TCoeff& TCoeff::operator*=(const TCoeff& o) { return *this = *this * o; }

TCoeff TCoeff::operator-() const {
  TCoeff r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

TCoeff TCoeff::shifted(const mpq_class& e) const {
  if (terms_.empty()) return *this;
  return *this * t_power(e);
}

TCoeff TCoeff::bar() const {
  TCoeff r;
  r.den_ = den_;
  for (auto& [e, c] : terms_) r.terms_.emplace(-e, c);
  return r;
}

TCoeff TCoeff::substitute_power(const mpq_class& s) const {
  TCoeff r;
  for (auto& [e, c] : terms_) r += t_power(mpq_class(e, den_) * s, c);
  return r;
}

mpz_class TCoeff::at_one() const {
  mpz_class s = 0;
  for (auto& [e, c] : terms_) s += c;
  return s;
}

bool TCoeff::nonnegative() const {
  for (auto& [e, c] : terms_)
    if (c < 0) return false;
  return true;
}

TCoeff TCoeff::divexact(const mpz_class& k) const {
  TCoeff r = *this;
  for (auto& [e, c] : r.terms_) {
    if (!mpz_divisible_p(c.get_mpz_t(), k.get_mpz_t()))
      throw ComputationError("inexact integer division of coefficient");
    mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), k.get_mpz_t());
  }
  return r;
}

std::string TCoeff::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Descending powers read most naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    mpz_class a = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (e == 0) {
      os << a.get_str();
      continue;
    }
    if (a != 1) os << a.get_str() << "*";
    os << "t";
    if (den_ == 1) {
      if (e != 1) os << "^" << (e < 0 ? "(" + std::to_string(e) + ")" : std::to_string(e));
    } else {
      os << "^(" << e << "/" << den_ << ")";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- Twist

Twist::Twist(size_t n, std::vector<int64_t> num, int64_t den)
    : n_(n), num_(std::move(num)), den_(den) {
  if (num_.size() != n * n) throw std::invalid_argument("twist matrix has wrong size");
  if (den_ <= 0) throw std::invalid_argument("twist denominator must be positive");
}

Twist Twist::zero(size_t n) { return Twist(n, std::vector<int64_t>(n * n, 0), 1); }

Twist Twist::from_rationals(const std::vector<std::vector<mpq_class>>& m) {
  size_t n = m.size();
  mpz_class l = 1;
  for (auto& row : m) {
    if (row.size() != n) throw std::invalid_argument("twist matrix is not square");
    for (auto& q : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  }
  std::vector<int64_t> num(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      mpq_class v = m[i][j] * l;
      num[i * n + j] = to_i64(v.get_num());
    }
  return Twist(n, std::move(num), to_i64(l));
}

bool Twist::is_zero() const {
  for (auto v : num_)
    if (v != 0) return false;
  return true;
}

mpq_class Twist::entry(size_t i, size_t j) const { return mpq_class(num_[i * n_ + j], den_); }

mpq_class Twist::operator()(const Exp& u, const Exp& v) const {
  if (u.size() != n_ || v.size() != n_) throw ComputationError("exponent dimension mismatch in twist");
  mpz_class s = 0;
  for (size_t i = 0; i < n_; ++i) {
    if (u[i] == 0) continue;
    int64_t acc = 0;
    for (size_t j = 0; j < n_; ++j) acc += num_[i * n_ + j] * v[j];
    s += mpz_class(static_cast<long>(u[i])) * static_cast<long>(acc);
  }
  mpq_class r(s, den_);
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------- TorusElement

TorusElement TorusElement::monomial(const Exp& e, const TCoeff& c) {
  TorusElement r(e.size());
  r.add_term(e, c);
  return r;
}

TorusElement TorusElement::constant(size_t dim, const TCoeff& c) {
  return monomial(Exp(dim, 0), c);
}

TCoeff TorusElement::coeff(const Exp& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? TCoeff() : it->second;
}

void TorusElement::add_term(const Exp& e, const TCoeff& c) {
  if (c.is_zero()) return;
  if (e.size() != dim_) throw ComputationError("exponent dimension mismatch");
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TorusElement& TorusElement::operator+=(const TorusElement& o) {
  if (o.dim_ != dim_) throw ComputationError("ambient lattices differ");
  for (auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

TorusElement& TorusElement::operator-=(const TorusElement& o) {
  if (o.dim_ != dim_) throw ComputationError("ambient lattices differ");
  for (auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

TorusElement TorusElement::scaled(const TCoeff& c) const {
  TorusElement r(dim_);
  if (c.is_zero()) return r;
  for (auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
  return r;
}

TorusElement TorusElement::bar() const {
  TorusElement r(dim_);
  for (auto& [e, c] : terms_) r.terms_.emplace(e, c.bar());
  return r;
}

TorusElement TorusElement::at_one() const {
  TorusElement r(dim_);
  for (auto& [e, c] : terms_) r.add_term(e, TCoeff(c.at_one()));
  return r;
}

TorusElement TorusElement::map_exponents(const std::vector<std::vector<int64_t>>& m) const {
  size_t out = m.size();
  TorusElement r(out);
  for (auto& [e, c] : terms_) {
    Exp x(out, 0);
    for (size_t i = 0; i < out; ++i) {
      if (m[i].size() != dim_) throw ComputationError("exponent map has wrong width");
      for (size_t j = 0; j < dim_; ++j) x[i] += m[i][j] * e[j];
    }
    r.add_term(x, c);
  }
  return r;
}

std::string exp_str(const Exp& e) {
  std::string s = "(";
  for (size_t i = 0; i < e.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e[i]);
  }
  return s + ")";
}

std::string TorusElement::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (auto& [e, c] : terms_) {
    if (!first) s += " + ";
    first = false;
    bool zero_exp = std::all_of(e.begin(), e.end(), [](int64_t x) { return x == 0; });
    if (c.is_one() && !zero_exp) {
      s += "z^" + exp_str(e);
    } else {
      s += "(" + c.str() + ")";
      if (!zero_exp) s += "*z^" + exp_str(e);
    }
  }
  return s;
}

// ---------------------------------------------------------------- products

namespace {

void accumulate_product(const Exp& ea, const TCoeff& ca, const TorusElement& b, const Twist& form,
                        bool classical, std::map<Exp, TCoeff>& out) {
  Exp sum(ea.size());
  for (auto& [eb, cb] : b.terms()) {
    for (size_t i = 0; i < ea.size(); ++i) sum[i] = ea[i] + eb[i];
    TCoeff c = ca * cb;
    if (!classical) c = c.shifted(form(ea, eb));
    auto [it, inserted] = out.try_emplace(sum, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) out.erase(it);
    }
  }
}

void check_operands(const TorusElement& a, const TorusElement& b, const Twist& form) {
  if (a.dim() != b.dim()) throw ComputationError("ambient lattices differ");
  if (form.dim() != a.dim()) throw ComputationError("twist form has the wrong rank");
}

TorusElement from_map(size_t dim, std::map<Exp, TCoeff>&& m) {
  TorusElement r(dim);
  for (auto& [e, c] : m) r.add_term(e, c);
  return r;
}

}  // namespace

TorusElement t_multiply_serial(const TorusElement& a, const TorusElement& b, const Twist& form) {
  check_operands(a, b, form);
  bool classical = form.is_zero();
  std::map<Exp, TCoeff> out;
  for (auto& [ea, ca] : a.terms()) accumulate_product(ea, ca, b, form, classical, out);
  return from_map(a.dim(), std::move(out));
}

TorusElement t_multiply_parallel(const TorusElement& a, const TorusElement& b, const Twist& form) {
  check_operands(a, b, form);
  bool classical = form.is_zero();
  std::vector<std::pair<Exp, TCoeff>> left(a.terms().begin(), a.terms().end());
  int nthreads = omp_get_max_threads();
  std::vector<std::map<Exp, TCoeff>> partial(static_cast<size_t>(nthreads));
#pragma omp parallel num_threads(nthreads)
  {
    auto& mine = partial[static_cast<size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 4)
    for (long i = 0; i < static_cast<long>(left.size()); ++i)
      accumulate_product(left[static_cast<size_t>(i)].first, left[static_cast<size_t>(i)].second, b,
                         form, classical, mine);
  }
  std::map<Exp, TCoeff> out;
  for (auto& part : partial)
    for (auto& [e, c] : part) {
      auto [it, inserted] = out.try_emplace(e, c);
      if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) out.erase(it);
      }
    }
  return from_map(a.dim(), std::move(out));
}

TorusElement t_multiply(const TorusElement& a, const TorusElement& b, const Twist& form) {
  constexpr size_t kParallelThreshold = 4096;
  if (a.size() * b.size() >= kParallelThreshold && omp_get_max_threads() > 1)
    return t_multiply_parallel(a, b, form);
  return t_multiply_serial(a, b, form);
}

TorusElement t_power(const TorusElement& a, unsigned k, const Twist& form) {
  TorusElement r = TorusElement::constant(a.dim(), 1);
  for (unsigned i = 0; i < k; ++i) r = t_multiply(r, a, form);
  return r;
}

// ---------------------------------------------------------------- qbinom, Chebyshev

TCoeff qbinom(int64_t a, int64_t k) {
  if (k < 0 || a < 0 || k > a) throw std::invalid_argument("qbinom requires a >= k >= 0");
  // Pascal rule [a,k] = t^{-k}[a-1,k] + t^{a-k}[a-1,k-1].
  std::vector<TCoeff> row{TCoeff(1)};
  for (int64_t n = 1; n <= a; ++n) {
    std::vector<TCoeff> next(static_cast<size_t>(n + 1));
    for (int64_t j = 0; j <= n; ++j) {
      TCoeff v;
      if (j < n) v += row[static_cast<size_t>(j)].shifted(-j);
      if (j > 0) v += row[static_cast<size_t>(j - 1)].shifted(n - j);
      next[static_cast<size_t>(j)] = v;
    }
    row.swap(next);
  }
  return row[static_cast<size_t>(k)];
}

namespace {

IntPoly chebyshev(unsigned k, mpz_class c0) {
  IntPoly prev{c0};            // degree 0
  IntPoly cur{0, 1};           // z
  if (k == 0) return prev;
  for (unsigned i = 1; i < k; ++i) {
    IntPoly next(cur.size() + 1, 0);
    for (size_t j = 0; j < cur.size(); ++j) next[j + 1] += cur[j];
    for (size_t j = 0; j < prev.size(); ++j) next[j] -= prev[j];
    prev.swap(cur);
    cur.swap(next);
  }
  return cur;
}

}  // namespace

IntPoly chebyshev_T(unsigned k) { return chebyshev(k, 2); }
IntPoly chebyshev_U(unsigned k) { return chebyshev(k, 1); }

TorusElement eval_poly(const IntPoly& p, const TorusElement& x, const Twist& form) {
  TorusElement result(x.dim());
  TorusElement power = TorusElement::constant(x.dim(), 1);
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] != 0) result += power.scaled(TCoeff(p[i]));
    if (i + 1 < p.size()) power = t_multiply(power, x, form);
  }
  return result;
}

std::string poly_str(const IntPoly& p) {
  std::string s;
  for (size_t i = p.size(); i-- > 0;) {
    if (p[i] == 0) continue;
    mpz_class a = abs(p[i]);
    if (s.empty()) {
      if (p[i] < 0) s += "-";
    } else {
      s += p[i] < 0 ? " - " : " + ";
    }
    if (i == 0 || a != 1) s += a.get_str();
    if (i > 0) s += (i == 0 || a != 1 ? "*z" : "z");
    if (i > 1) s += "^" + std::to_string(i);
  }
  return s.empty() ? "0" : s;
}

}  // namespace cs
