#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace toricwf {

using Integer = mpz_class;
using Rational = mpq_class;
using LatticeVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;
using IntMatrix = std::vector<LatticeVector>;  // row-major

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// A resource bound (subdivision count or deadline) was reached.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

class NotCollapsibleError : public Error {
 public:
  using Error::Error;
};

inline LatticeVector vec(std::initializer_list<long> xs) {
  LatticeVector v;
  v.reserve(xs.size());
  for (long x : xs) v.emplace_back(x);
  return v;
}

inline LatticeVector unit_vector(std::size_t rank, std::size_t i) {
  LatticeVector v(rank, 0);
  v.at(i) = 1;
  return v;
}

inline bool is_zero(const LatticeVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

inline void require_same_rank(const LatticeVector& a, const LatticeVector& b) {
  if (a.size() != b.size()) throw DimensionError("vector ranks differ");
}

inline LatticeVector operator+(const LatticeVector& a, const LatticeVector& b) {
  require_same_rank(a, b);
  LatticeVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline LatticeVector operator-(const LatticeVector& a, const LatticeVector& b) {
  require_same_rank(a, b);
  LatticeVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline LatticeVector operator-(const LatticeVector& a) {
  LatticeVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

inline LatticeVector operator*(const Integer& s, const LatticeVector& a) {
  LatticeVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline Integer dot(const LatticeVector& a, const LatticeVector& b) {
  require_same_rank(a, b);
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rational dot(const RatVector& a, const LatticeVector& b) {
  if (a.size() != b.size()) throw DimensionError("vector ranks differ");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * Rational(b[i]);
  return s;
}

inline LatticeVector sum(const std::vector<LatticeVector>& vs, std::size_t rank) {
  LatticeVector r(rank, 0);
  for (const auto& v : vs) r = r + v;
  return r;
}

inline std::string to_string(const LatticeVector& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i].get_str();
  }
  os << ')';
  return os.str();
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace toricwf
