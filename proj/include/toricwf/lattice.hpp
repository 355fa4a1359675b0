#pragma once

#include <optional>
#include <utility>

#include "core.hpp"

namespace toricwf {

// Bareiss elimination; sign follows the row order.
inline Integer determinant(const std::vector<LatticeVector>& rows) {
  const std::size_t k = rows.size();
  for (const auto& r : rows)
    if (r.size() != k) throw DimensionError("determinant needs k vectors of rank k");
  if (k == 0) return 1;
  IntMatrix a = rows;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i][i] == 0) {
      std::size_t p = i + 1;
      while (p < k && a[p][i] == 0) ++p;
      if (p == k) return 0;
      std::swap(a[i], a[p]);
      sign = -sign;
    }
    for (std::size_t j = i + 1; j < k; ++j) {
      for (std::size_t l = i + 1; l < k; ++l) {
        Integer t = a[j][l] * a[i][i] - a[j][i] * a[i][l];
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        a[j][l] = t;
      }
      a[j][i] = 0;
    }
    prev = a[i][i];
  }
  return sign * a[k - 1][k - 1];
}

inline Integer content(const LatticeVector& v) {
  Integer g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

inline LatticeVector primitive(const LatticeVector& v) {
  Integer g = content(v);
  if (g == 0) throw DomainError("primitive of the zero vector");
  LatticeVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mpz_divexact(r[i].get_mpz_t(), v[i].get_mpz_t(), g.get_mpz_t());
  return r;
}

inline bool is_primitive(const LatticeVector& v) { return content(v) == 1; }

// Integral vector on the ray of a nonzero rational vector.
inline LatticeVector primitive(const RatVector& v) {
  Integer l = 1;
  for (const auto& q : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  LatticeVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational t = v[i] * Rational(l);
    r[i] = t.get_num();
  }
  return primitive(r);
}

inline RatVector to_rational(const LatticeVector& v) {
  RatVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i];
  return r;
}

inline IntMatrix transpose(const IntMatrix& a, std::size_t ncols) {
  IntMatrix t(ncols, LatticeVector(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < ncols; ++j) t[j][i] = a[i][j];
  return t;
}

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

namespace detail {

inline void row_axpy(LatticeVector& dst, const Integer& q, const LatticeVector& src) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] -= q * src[j];
}

}  // namespace detail

// Row Hermite normal form over the first `pivot_cols` columns; the remaining
// columns ride along (used to track the unimodular transform).  Returns the
// number of pivot rows.
inline std::size_t hermite_reduce(IntMatrix& a, std::size_t pivot_cols) {
  std::size_t row = 0;
  for (std::size_t col = 0; col < pivot_cols && row < a.size(); ++col) {
    while (true) {
      std::size_t best = a.size();
      for (std::size_t i = row; i < a.size(); ++i) {
        if (a[i][col] == 0) continue;
        if (best == a.size() || abs(a[i][col]) < abs(a[best][col])) best = i;
      }
      if (best == a.size()) break;
      std::swap(a[row], a[best]);
      bool clean = true;
      for (std::size_t i = row + 1; i < a.size(); ++i) {
        if (a[i][col] == 0) continue;
        Integer q = floor_div(a[i][col], a[row][col]);
        detail::row_axpy(a[i], q, a[row]);
        if (a[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (row < a.size() && a[row][col] != 0) {
      if (a[row][col] < 0)
        for (auto& x : a[row]) x = -x;
      for (std::size_t i = 0; i < row; ++i) {
        Integer q = floor_div(a[i][col], a[row][col]);
        if (q != 0) detail::row_axpy(a[i], q, a[row]);
      }
      ++row;
    }
  }
  return row;
}

// Nonzero rows of the row Hermite normal form.
inline IntMatrix hermite_normal_form(IntMatrix rows) {
  if (rows.empty()) return rows;
  const std::size_t n = rows.front().size();
  std::size_t r = hermite_reduce(rows, n);
  rows.resize(r);
  return rows;
}

inline std::size_t rank(const std::vector<LatticeVector>& vs) {
  if (vs.empty()) return 0;
  IntMatrix a = vs;
  return hermite_reduce(a, a.front().size());
}

inline bool independent(const std::vector<LatticeVector>& vs) { return rank(vs) == vs.size(); }

// Basis (in Hermite form) of {x in Z^n : A x = 0} for a row-major m x n matrix A.
inline std::vector<LatticeVector> kernel(const IntMatrix& a, std::size_t n) {
  const std::size_t m = a.size();
  IntMatrix aug(n, LatticeVector(m + n, 0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) aug[j][i] = a[i][j];
    aug[j][m + j] = 1;
  }
  std::size_t r = hermite_reduce(aug, m);
  std::vector<LatticeVector> basis;
  for (std::size_t j = r; j < n; ++j) basis.emplace_back(aug[j].begin() + static_cast<long>(m), aug[j].end());
  return hermite_normal_form(basis);
}

// Integer kernel of the matrix whose columns are the given vectors.
inline std::vector<LatticeVector> integral_nullspace(const std::vector<LatticeVector>& columns) {
  if (columns.empty()) return {};
  const std::size_t d = columns.front().size();
  for (const auto& c : columns)
    if (c.size() != d) throw DimensionError("integral_nullspace: ranks differ");
  IntMatrix a(d, LatticeVector(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t i = 0; i < d; ++i) a[i][j] = columns[j][i];
  return kernel(a, columns.size());
}

// Nonzero invariant factors of the Smith normal form.
inline std::vector<Integer> smith_invariants(IntMatrix a) {
  std::vector<Integer> out;
  if (a.empty()) return out;
  const std::size_t m = a.size(), n = a.front().size();
  std::size_t t = 0;
  while (t < m && t < n) {
    std::size_t pi = m, pj = n;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (a[i][j] != 0 && (pi == m || abs(a[i][j]) < abs(a[pi][pj]))) pi = i, pj = j;
    if (pi == m) break;
    std::swap(a[t], a[pi]);
    for (auto& row : a) std::swap(row[t], row[pj]);
    bool done = false;
    while (!done) {
      done = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (a[i][t] == 0) continue;
        Integer q = floor_div(a[i][t], a[t][t]);
        detail::row_axpy(a[i], q, a[t]);
        if (a[i][t] != 0) {
          std::swap(a[t], a[i]);
          done = false;
        }
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (a[t][j] == 0) continue;
        Integer q = floor_div(a[t][j], a[t][t]);
        for (std::size_t i = 0; i < m; ++i) a[i][j] -= q * a[i][t];
        if (a[t][j] != 0) {
          for (auto& row : a) std::swap(row[t], row[j]);
          done = false;
        }
      }
      if (done) {
        for (std::size_t i = t + 1; i < m && done; ++i)
          for (std::size_t j = t + 1; j < n; ++j)
            if (a[i][j] % a[t][t] != 0) {
              for (std::size_t l = 0; l < n; ++l) a[t][l] += a[i][l];
              done = false;
              break;
            }
      }
    }
    out.push_back(abs(a[t][t]));
    ++t;
  }
  return out;
}

// Index of the subgroup generated by independent vectors inside the
// saturation of their span (the product of the Smith invariants).
inline Integer multiplicity(const std::vector<LatticeVector>& gens) {
  if (gens.empty()) return 1;
  if (!independent(gens)) throw PreconditionError("multiplicity: dependent generators");
  Integer p = 1;
  for (const auto& d : smith_invariants(gens)) p *= d;
  return p;
}

// Rational coordinates of p with respect to independent generators, or
// nothing when p is outside their span.
inline std::optional<RatVector> coordinates(const std::vector<LatticeVector>& gens, const LatticeVector& p) {
  const std::size_t k = gens.size(), d = p.size();
  std::vector<RatVector> a(d, RatVector(k + 1));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (gens[j].size() != d) throw DimensionError("coordinates: ranks differ");
      a[i][j] = gens[j][i];
    }
    a[i][k] = p[i];
  }
  std::vector<std::size_t> pivcol;
  std::size_t row = 0;
  for (std::size_t col = 0; col < k && row < d; ++col) {
    std::size_t piv = row;
    while (piv < d && a[piv][col] == 0) ++piv;
    if (piv == d) continue;
    std::swap(a[row], a[piv]);
    Rational inv = 1 / a[row][col];
    for (auto& x : a[row]) x *= inv;
    for (std::size_t i = 0; i < d; ++i) {
      if (i == row || a[i][col] == 0) continue;
      Rational f = a[i][col];
      for (std::size_t j = col; j <= k; ++j) a[i][j] -= f * a[row][j];
    }
    pivcol.push_back(col);
    ++row;
  }
  if (pivcol.size() != k) throw PreconditionError("coordinates: dependent generators");
  for (std::size_t i = row; i < d; ++i)
    if (a[i][k] != 0) return std::nullopt;
  RatVector x(k);
  for (std::size_t i = 0; i < k; ++i) x[pivcol[i]] = a[i][k];
  return x;
}

// Basis of span(gens) ∩ Z^d.
inline std::vector<LatticeVector> saturation_basis(const std::vector<LatticeVector>& gens, std::size_t d) {
  std::vector<LatticeVector> nonzero;
  for (const auto& g : gens)
    if (!is_zero(g)) nonzero.push_back(g);
  if (nonzero.empty()) return {};
  auto ann = kernel(nonzero, d);
  if (ann.empty()) {
    std::vector<LatticeVector> id;
    for (std::size_t i = 0; i < d; ++i) id.push_back(unit_vector(d, i));
    return id;
  }
  return kernel(ann, d);
}

struct QuotientMap {
  std::size_t source_rank = 0;
  std::size_t target_rank = 0;
  IntMatrix matrix;
  LatticeVector kernel_vector;

  LatticeVector apply(const LatticeVector& v) const {
    if (v.size() != source_rank) throw DimensionError("quotient map: rank mismatch");
    LatticeVector r(target_rank);
    for (std::size_t i = 0; i < target_rank; ++i) r[i] = dot(matrix[i], v);
    return r;
  }
};

// Rows: the Hermite basis of v0^⊥ ∩ Z^n.  Since that lattice is saturated the
// map is onto, and its kernel is Z·v0.
inline QuotientMap quotient_map(const LatticeVector& v0) {
  if (v0.empty()) throw DimensionError("quotient_map: empty vector");
  if (!is_primitive(v0)) throw PreconditionError("quotient_map: v0 must be primitive");
  QuotientMap q;
  q.source_rank = v0.size();
  q.target_rank = v0.size() - 1;
  q.matrix = kernel(IntMatrix{v0}, v0.size());
  q.kernel_vector = v0;
  return q;
}

// Lattice points p = Σ α_i g_i with 0 ≤ α_i < 1 (or ≤ 1 when closed), sorted.
// Open points are one per class of (span ∩ Z^d) / ⟨gens⟩; the classes are read
// off the Hermite form of the generators in a saturated basis.
inline std::vector<LatticeVector> enumerate_par(const std::vector<LatticeVector>& gens, bool closed) {
  if (gens.empty()) throw PreconditionError("enumerate_par: no generators");
  if (!independent(gens)) throw PreconditionError("enumerate_par: dependent generators");
  const std::size_t k = gens.size(), d = gens.front().size();
  const auto basis = saturation_basis(gens, d);
  IntMatrix h;
  for (const auto& g : gens) {
    auto c = *coordinates(basis, g);
    LatticeVector row(k);
    for (std::size_t i = 0; i < k; ++i) row[i] = c[i].get_num();
    h.push_back(std::move(row));
  }
  h = hermite_normal_form(std::move(h));
  std::vector<RatVector> basis_coords;
  for (const auto& b : basis) basis_coords.push_back(*coordinates(gens, b));

  std::vector<LatticeVector> out;
  LatticeVector x(k, 0);
  while (true) {
    RatVector alpha(k, 0);
    for (std::size_t i = 0; i < k; ++i)
      if (x[i] != 0)
        for (std::size_t j = 0; j < k; ++j) alpha[j] += Rational(x[i]) * basis_coords[i][j];
    std::vector<std::size_t> zero;
    RatVector pr(d, 0);
    for (std::size_t j = 0; j < k; ++j) {
      Integer fl;
      mpz_fdiv_q(fl.get_mpz_t(), alpha[j].get_num_mpz_t(), alpha[j].get_den_mpz_t());
      Rational f = alpha[j] - Rational(fl);
      if (f == 0) zero.push_back(j);
      for (std::size_t c = 0; c < d; ++c) pr[c] += f * Rational(gens[j][c]);
    }
    LatticeVector p(d);
    for (std::size_t c = 0; c < d; ++c) p[c] = pr[c].get_num();
    out.push_back(p);
    if (closed)
      for (unsigned long mask = 1; mask < (1UL << zero.size()); ++mask) {
        LatticeVector q = p;
        for (std::size_t t = 0; t < zero.size(); ++t)
          if (mask & (1UL << t))
            for (std::size_t c = 0; c < d; ++c) q[c] += gens[zero[t]][c];
        out.push_back(std::move(q));
      }
    std::size_t i = 0;
    while (i < k) {
      if (++x[i] < h[i][i]) break;
      x[i] = 0;
      ++i;
    }
    if (i == k) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace toricwf
