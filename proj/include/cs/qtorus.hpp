#pragma once
/// @file qtorus.hpp
/// Exact scalars in Z[t^{±1/D}] and elements of twisted quantum tori.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cs {

/// Laurent polynomial in t^{1/D} with arbitrary precision integer
/// coefficients.  Exponents are stored as numerators over a shared
/// denominator which is kept minimal, so equal values compare equal.
class TCoeff {
 public:
  TCoeff() = default;
  TCoeff(long c);  // NOLINT: integers embed as constants
  explicit TCoeff(const mpz_class& c);

  /// c * t^e for rational e.
  static TCoeff t_power(const mpq_class& e, const mpz_class& c = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_one() const;
  /// Denominator D of the exponent grid.
  int64_t denominator() const { return den_; }
  /// Map from exponent numerator (over denominator()) to coefficient.
  const std::map<int64_t, mpz_class>& terms() const { return terms_; }

  /// Coefficient of t^e (zero when absent).
  mpz_class coeff(const mpq_class& e) const;
  /// Constant value when the polynomial is a pure integer.
  bool is_constant() const;
  mpz_class constant() const;

  TCoeff& operator+=(const TCoeff& o);
  TCoeff& operator-=(const TCoeff& o);
  TCoeff& operator*=(const TCoeff& o);
  friend TCoeff operator+(TCoeff a, const TCoeff& b) { return a += b; }
  friend TCoeff operator-(TCoeff a, const TCoeff& b) { return a -= b; }
  friend TCoeff operator*(const TCoeff& a, const TCoeff& b);
  TCoeff operator-() const;
  bool operator==(const TCoeff& o) const { return den_ == o.den_ && terms_ == o.terms_; }
  bool operator!=(const TCoeff& o) const { return !(*this == o); }

  /// Multiply by t^e.
  TCoeff shifted(const mpq_class& e) const;
  /// Bar involution t -> t^{-1}.
  TCoeff bar() const;
  /// Substitution t -> t^s for a positive rational s.
  TCoeff substitute_power(const mpq_class& s) const;
  /// Classical limit t = 1.
  mpz_class at_one() const;
  /// True when every coefficient is nonnegative.
  bool nonnegative() const;
  /// Exact division by an integer; throws if not divisible.
  TCoeff divexact(const mpz_class& k) const;

  std::string str() const;

 private:
  void rescale(int64_t den);
  void normalize();

  int64_t den_ = 1;
  std::map<int64_t, mpz_class> terms_;
};

using Exp = std::vector<int64_t>;

/// Skew form on a lattice Z^n with rational values, stored as an integer
/// matrix over a common denominator.
class Twist {
 public:
  Twist() = default;
  Twist(size_t n, std::vector<int64_t> num, int64_t den);
  static Twist zero(size_t n);
  static Twist from_rationals(const std::vector<std::vector<mpq_class>>& m);

  size_t dim() const { return n_; }
  bool is_zero() const;
  /// Value of the form on (u, v).
  mpq_class operator()(const Exp& u, const Exp& v) const;
  mpq_class entry(size_t i, size_t j) const;

 private:
  size_t n_ = 0;
  std::vector<int64_t> num_;
  int64_t den_ = 1;
};

/// Finite sum of monomials c * z^e in a quantum torus of rank dim().
class TorusElement {
 public:
  explicit TorusElement(size_t dim = 0) : dim_(dim) {}
  static TorusElement monomial(const Exp& e, const TCoeff& c = 1);
  static TorusElement constant(size_t dim, const TCoeff& c);

  size_t dim() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  const std::map<Exp, TCoeff>& terms() const { return terms_; }
  TCoeff coeff(const Exp& e) const;

  /// Add c * z^e, dropping the entry if it cancels.
  void add_term(const Exp& e, const TCoeff& c);

  TorusElement& operator+=(const TorusElement& o);
  TorusElement& operator-=(const TorusElement& o);
  friend TorusElement operator+(TorusElement a, const TorusElement& b) { return a += b; }
  friend TorusElement operator-(TorusElement a, const TorusElement& b) { return a -= b; }
  TorusElement scaled(const TCoeff& c) const;
  bool operator==(const TorusElement& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }
  bool operator!=(const TorusElement& o) const { return !(*this == o); }

  TorusElement bar() const;
  /// Classical limit: every coefficient evaluated at t = 1.
  TorusElement at_one() const;
  /// Apply a linear map to exponents (rows of `m` give the image coordinates).
  TorusElement map_exponents(const std::vector<std::vector<int64_t>>& m) const;

  std::string str() const;

 private:
  size_t dim_;
  std::map<Exp, TCoeff> terms_;
};

/// Twisted product: z^u z^v = t^{form(u,v)} z^{u+v}.  Uses OpenMP when the
/// operands are large enough to benefit.
TorusElement t_multiply(const TorusElement& a, const TorusElement& b, const Twist& form);
/// Single-threaded reference implementation of t_multiply.
TorusElement t_multiply_serial(const TorusElement& a, const TorusElement& b, const Twist& form);
/// Always-parallel variant (used by benchmarks and equivalence tests).
TorusElement t_multiply_parallel(const TorusElement& a, const TorusElement& b, const Twist& form);

/// k-th power under the twisted product.
TorusElement t_power(const TorusElement& a, unsigned k, const Twist& form);

/// Bar-invariant quantum binomial [a choose k]_t.
TCoeff qbinom(int64_t a, int64_t k);

/// Univariate integer polynomial, coefficient i multiplies z^i.
using IntPoly = std::vector<mpz_class>;

/// Chebyshev polynomials with T_0 = 2, T_1 = z, T_{k+1} = z T_k - T_{k-1}.
IntPoly chebyshev_T(unsigned k);
/// U_0 = 1, U_1 = z, same recursion.
IntPoly chebyshev_U(unsigned k);
/// Evaluate an integer polynomial on a torus element.
TorusElement eval_poly(const IntPoly& p, const TorusElement& x, const Twist& form);
std::string poly_str(const IntPoly& p);

std::string exp_str(const Exp& e);

}  // namespace cs
