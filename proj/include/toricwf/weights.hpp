#pragma once

#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "core.hpp"

namespace toricwf {

// A linear K*-action on P^k: distinct weights a_1 < ... < a_r, each with the
// dimension of its eigenspace.
struct WeightDecomposition {
  std::vector<std::pair<long, std::size_t>> classes;

  static WeightDecomposition from_weights(const std::vector<long>& weights) {
    if (weights.empty()) throw PreconditionError("weights: need at least one coordinate");
    std::map<long, std::size_t> m;
    for (long w : weights) ++m[w];
    return {{m.begin(), m.end()}};
  }

  std::vector<long> values() const {
    std::vector<long> out;
    for (const auto& [a, n] : classes) out.push_back(a);
    return out;
  }

  std::size_t dimension() const {
    std::size_t n = 0;
    for (const auto& [a, m] : classes) n += m;
    return n - 1;
  }

  bool has_class(long a) const {
    return std::any_of(classes.begin(), classes.end(), [a](const auto& c) { return c.first == a; });
  }
};

inline void validate(const WeightDecomposition& w) {
  if (w.classes.empty()) throw PreconditionError("weights: no classes");
  for (std::size_t i = 0; i < w.classes.size(); ++i) {
    if (w.classes[i].second == 0) throw PreconditionError("weights: zero multiplicity");
    if (i > 0 && w.classes[i - 1].first >= w.classes[i].first) throw PreconditionError("weights: classes not sorted");
  }
}

// The classes a with x̄_a ≠ 0 for a point of P^k.
using SupportPattern = std::set<long>;

// x ∈ P(A_S) for a union of classes S.
inline bool supported_in(const SupportPattern& p, const std::function<bool(long)>& s) {
  return std::all_of(p.begin(), p.end(), s);
}

inline std::vector<SupportPattern> all_patterns(const WeightDecomposition& w) {
  validate(w);
  const auto vals = w.values();
  if (vals.size() > 20) throw DimensionError("weights: too many classes to enumerate");
  std::vector<SupportPattern> out;
  for (unsigned long mask = 1; mask < (1UL << vals.size()); ++mask) {
    SupportPattern p;
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (mask & (1UL << i)) p.insert(vals[i]);
    out.push_back(std::move(p));
  }
  return out;
}

struct FixedComponent {
  long weight;
  std::size_t multiplicity;  // dim A_a; the component is P^{multiplicity - 1}
  long chi;
};

inline std::vector<FixedComponent> fixed_components(const WeightDecomposition& w) {
  validate(w);
  std::vector<FixedComponent> out;
  for (const auto& [a, m] : w.classes) out.push_back({a, m, a});
  return out;
}

// Classes of lim_{t→0} t·x and lim_{t→∞} t·x.
inline std::pair<long, long> limits(const SupportPattern& p) {
  if (p.empty()) throw PreconditionError("limits: empty support pattern");
  return {*p.begin(), *p.rbegin()};
}

// A twist r, an integer or a half-integer, stored as 2r.
struct Twist {
  long doubled;
  static Twist at(long a) { return {2 * a}; }
  static Twist below(long a) { return {2 * a - 1}; }
  static Twist above(long a) { return {2 * a + 1}; }
};

inline void check_twist(const WeightDecomposition& w, Twist r) {
  for (long a : w.values())
    if (std::abs(r.doubled - 2 * a) <= 1) return;
  throw PreconditionError("semistable: twist must be a class or a class ± 1/2");
}

// For an arbitrary half-integer r, the sanctioned twist with the same
// semistable locus: between two neighbouring classes nothing changes.
inline Twist canonical_twist(const WeightDecomposition& w, Twist r) {
  validate(w);
  const auto vals = w.values();
  for (long a : vals)
    if (std::abs(r.doubled - 2 * a) <= 1) return r;
  if (r.doubled < 2 * vals.front()) return Twist::below(vals.front());
  long last = vals.front();
  for (long a : vals)
    if (2 * a < r.doubled) last = a;
  return Twist::above(last);
}

// Semistable for t_r: some nonzero coordinate has twisted weight zero, or two
// have twisted weights of opposite signs.
inline bool semistable(const WeightDecomposition& w, Twist r, const SupportPattern& p) {
  check_twist(w, r);
  if (p.empty()) throw PreconditionError("semistable: empty support pattern");
  bool below = false, above = false;
  for (long a : p) {
    if (!w.has_class(a)) throw PreconditionError("semistable: pattern uses an unknown class");
    long t = 2 * a - r.doubled;
    if (t == 0) return true;
    below = below || t < 0;
    above = above || t > 0;
  }
  return below && above;
}

inline std::vector<SupportPattern> semistable_patterns(const WeightDecomposition& w, Twist r) {
  std::vector<SupportPattern> out;
  for (auto& p : all_patterns(w))
    if (semistable(w, r, p)) out.push_back(std::move(p));
  return out;
}

// F⁺ = P(A_{≥a}) and F⁻ = P(A_{≤a}) for the fixed component P(A_a).
struct FixedPlusMinus {
  long a;
  std::vector<long> plus;
  std::vector<long> minus;
  bool in_plus(const SupportPattern& p) const {
    return supported_in(p, [this](long b) { return b >= a; });
  }
  bool in_minus(const SupportPattern& p) const {
    return supported_in(p, [this](long b) { return b <= a; });
  }
};

inline FixedPlusMinus fixed_plus_minus(const WeightDecomposition& w, long a) {
  validate(w);
  if (!w.has_class(a)) throw PreconditionError("fixed_plus_minus: not a class");
  FixedPlusMinus out{a, {}, {}};
  for (long b : w.values()) {
    if (b >= a) out.plus.push_back(b);
    if (b <= a) out.minus.push_back(b);
  }
  return out;
}

enum class PieceSide { Whole, Minus, Plus };

// P_a and its two open pieces as semistable loci: t_a, t_{a-1/2}, t_{a+1/2}.
inline bool in_piece(const WeightDecomposition& w, long a, PieceSide side, const SupportPattern& p) {
  if (!w.has_class(a)) throw PreconditionError("piece: not a class");
  switch (side) {
    case PieceSide::Whole: return semistable(w, Twist::at(a), p);
    case PieceSide::Minus: return semistable(w, Twist::below(a), p);
    case PieceSide::Plus: return semistable(w, Twist::above(a), p);
  }
  return false;
}

// The complement formulas P^k \ P(A_S) \ P(A_T) read literally.  For the two
// open pieces these come out as the semistable loci with the sides exchanged.
inline bool in_piece_by_sets(const WeightDecomposition& w, long a, PieceSide side, const SupportPattern& p) {
  if (!w.has_class(a)) throw PreconditionError("piece: not a class");
  auto outside = [&](auto s, auto t) { return !supported_in(p, s) && !supported_in(p, t); };
  switch (side) {
    case PieceSide::Whole: return outside([a](long b) { return b > a; }, [a](long b) { return b < a; });
    case PieceSide::Plus: return outside([a](long b) { return b >= a; }, [a](long b) { return b < a; });
    case PieceSide::Minus: return outside([a](long b) { return b > a; }, [a](long b) { return b <= a; });
  }
  return false;
}

// P^k minus the F⁺ (Minus) or F⁻ (Plus) of every fixed component.
inline bool in_global_side(const WeightDecomposition& w, PieceSide side, const SupportPattern& p) {
  for (long a : w.values()) {
    auto f = fixed_plus_minus(w, a);
    if (side == PieceSide::Minus && f.in_plus(p)) return false;
    if (side == PieceSide::Plus && f.in_minus(p)) return false;
  }
  return true;
}

}  // namespace toricwf
