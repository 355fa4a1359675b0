#pragma once

#include "core.hpp"

namespace toricwf {

// Is {x ≥ 0 : A x = b} nonempty?  Exact phase-one simplex with Bland's rule.
inline bool feasible(std::vector<RatVector> a, RatVector b) {
  const std::size_t m = a.size();
  if (m == 0) return true;
  const std::size_t n = a.front().size();
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw DimensionError("feasible: ragged matrix");
    if (b[i] < 0) {
      for (auto& x : a[i]) x = -x;
      b[i] = -b[i];
    }
  }
  const std::size_t cols = n + m;
  std::vector<RatVector> t(m, RatVector(cols + 1, 0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1;
    t[i][cols] = b[i];
  }
  RatVector obj(cols + 1, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) obj[j] -= t[i][j];
    obj[cols] -= t[i][cols];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
  while (true) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (obj[j] < 0) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][cols] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen in phase one
    Rational p = t[leave][enter];
    for (auto& x : t[leave]) x /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      Rational f = t[i][enter];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
    }
    if (obj[enter] != 0) {
      Rational f = obj[enter];
      for (std::size_t j = 0; j <= cols; ++j) obj[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  return obj[cols] == 0;
}

// Do the cones spanned by `a` and `b` meet outside the cone spanned by their
// shared generators?  Both generator lists must be independent.
inline bool cones_overlap_badly(const std::vector<LatticeVector>& a, const std::vector<LatticeVector>& b,
                                const std::vector<bool>& a_shared, const std::vector<bool>& b_shared) {
  const std::size_t d = a.empty() ? (b.empty() ? 0 : b.front().size()) : a.front().size();
  const std::size_t n = a.size() + b.size();
  std::vector<RatVector> rows(d + 1, RatVector(n, 0));
  RatVector rhs(d + 1, 0);
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (std::size_t i = 0; i < d; ++i) rows[i][j] = a[j][i];
    if (!a_shared[j]) rows[d][j] = 1;
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (std::size_t i = 0; i < d; ++i) rows[i][a.size() + j] = -b[j][i];
    if (!b_shared[j]) rows[d][a.size() + j] = 1;
  }
  rhs[d] = 1;
  return feasible(rows, rhs);
}

// A cone is strictly convex iff no nontrivial nonnegative combination of its
// generators vanishes.
inline bool strictly_convex(const std::vector<LatticeVector>& gens) {
  if (gens.empty()) return true;
  const std::size_t d = gens.front().size();
  std::vector<RatVector> rows(d + 1, RatVector(gens.size(), 0));
  RatVector rhs(d + 1, 0);
  for (std::size_t j = 0; j < gens.size(); ++j) {
    for (std::size_t i = 0; i < d; ++i) rows[i][j] = gens[j][i];
    rows[d][j] = 1;
  }
  rhs[d] = 1;
  return !feasible(rows, rhs);
}

}  // namespace toricwf
