#pragma once
// Small dense matrices over Q (gmp rationals) and helpers for integer vectors.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cs {

using QMat = std::vector<std::vector<mpq_class>>;
using QVec = std::vector<mpq_class>;
using IVec = std::vector<int64_t>;
using IMat = std::vector<std::vector<int64_t>>;

QMat q_zero(size_t rows, size_t cols);
QMat q_identity(size_t n);
QMat q_mul(const QMat& a, const QMat& b);
QVec q_mul(const QMat& a, const QVec& v);
QMat q_transpose(const QMat& a);
size_t q_rank(QMat a);
mpq_class q_det(QMat a);
// Throws ComputationError when singular.
QMat q_inverse(const QMat& a);
// A left inverse L with L*a = Id for a of full column rank; nullopt otherwise.
std::optional<QMat> q_left_inverse(const QMat& a);
bool q_is_skew(const QMat& a);
QMat q_from_int(const IMat& m);
// Returns nullopt if some entry is not an integer (or does not fit int64).
std::optional<IMat> q_to_int(const QMat& m);
std::string q_str(const QMat& m);

mpq_class parse_rational(const std::string& s);

int64_t dot(const IVec& a, const IVec& b);
int64_t gcd_vec(const IVec& v);
// Divide by the gcd of the entries (zero vector unchanged).
IVec primitive(const IVec& v);
// Solve <a, x> = g where g = gcd(a); returns x.
IVec bezout(const IVec& a);

}  // namespace cs
