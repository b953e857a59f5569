#pragma once

// Which quasi-linear utilities represent, or positively represent, a type.
//
// A valuation v pos-represents u exactly when the curves agree with a single
// increasing profile on the region above v: u(a, v(a) - q) is the same function
// of q >= 0 for every alternative a. Everything in this header decides that
// (and the related parallel-utility property) by exact breakpoint analysis.

#include "posvcg/error.hpp"
#include "posvcg/pwl.hpp"
#include "posvcg/rational.hpp"
#include "posvcg/utility.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace posvcg {

struct Classification {
  enum class Kind { RepresentedQL, PosRepresentedQL, NotPosRepresentable };

  Kind kind = Kind::NotPosRepresentable;
  std::optional<Valuation> valuation;
  /// Utility level at which the canonical valuation is anchored; present only
  /// for PosRepresentedQL.
  std::optional<Rational> threshold_level;

  bool pos_representable() const noexcept { return kind != Kind::NotPosRepresentable; }
};

inline std::string_view kind_name(Classification::Kind kind) {
  switch (kind) {
    case Classification::Kind::RepresentedQL: return "represented";
    case Classification::Kind::PosRepresentedQL: return "pos_represented";
    case Classification::Kind::NotPosRepresentable: return "not_pos_representable";
  }
  return "unknown";
}

/// Canonical classification. For PosRepresentedQL the valuation is the maximal
/// pos-representation: v(a) is the payment at which alternative a reaches the
/// minimal common alignment level.
inline Classification classify(const UtilityFunction& u) {
  const std::size_t m = u.size();
  std::optional<Rational> lambda0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const auto aligned = alignment_level(u.curve(a), u.curve(b));
      switch (aligned.kind) {
        case AlignmentResult::Kind::NeverConstant:
          return {Classification::Kind::NotPosRepresentable, std::nullopt, std::nullopt};
        case AlignmentResult::Kind::ConstantFrom:
          if (!lambda0 || *aligned.level > *lambda0) lambda0 = *aligned.level;
          break;
        case AlignmentResult::Kind::EverywhereConstant:
          break;
      }
    }
  }
  const Rational anchor = lambda0.value_or(Rational(0));
  std::vector<Rational> values;
  values.reserve(m);
  for (const auto& curve : u.curves()) values.push_back(curve.inverse(anchor));
  Valuation v(u.alternatives(), std::move(values));
  if (!lambda0) return {Classification::Kind::RepresentedQL, std::move(v), std::nullopt};
  return {Classification::Kind::PosRepresentedQL, std::move(v), lambda0};
}

/// Valuation shifted so that its minimum is zero.
inline Valuation normalize_min_zero(const Valuation& v) { return v.shifted(-v.min()); }

// ---------------------------------------------------------------------------
// Positive representation

struct PosRepWitness {
  std::size_t alternative_a = 0;
  Rational payment_a;
  std::size_t alternative_b = 0;
  Rational payment_b;
  std::strong_ordering quasi_linear_order = std::strong_ordering::equal;  // a vs b under v
  std::strong_ordering utility_order = std::strong_ordering::equal;       // a vs b under u
  /// Set when every alternative is compared at one payment; the value
  /// vectors then list v(x) - z and u(x, z) for all x.
  std::optional<Rational> common_payment;
  std::vector<Rational> quasi_linear_values;
  std::vector<Rational> utility_values;
};

struct PosRepCheck {
  bool holds = false;
  std::optional<PosRepWitness> witness;

  explicit operator bool() const noexcept { return holds; }
};

namespace detail {

inline std::vector<Rational> sorted_unique(std::vector<Rational> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

/// Representative points of every piece of the real line cut at `cuts`
/// (sorted, unique): the cut points themselves plus one interior point of each
/// gap. Each entry is (point, lower cut, upper cut); a cut point has lo == hi.
struct Piece {
  Rational sample;
  std::optional<Rational> lo;
  std::optional<Rational> hi;
  bool is_point = false;
};

inline std::vector<Piece> pieces_of(const std::vector<Rational>& cuts) {
  std::vector<Piece> out;
  if (cuts.empty()) {
    out.push_back({Rational(0), std::nullopt, std::nullopt, false});
    return out;
  }
  out.push_back({cuts.front() - 1, std::nullopt, cuts.front(), false});
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    out.push_back({cuts[k], cuts[k], cuts[k], true});
    if (k + 1 < cuts.size()) {
      out.push_back({(cuts[k] + cuts[k + 1]) / 2, cuts[k], cuts[k + 1], false});
    }
  }
  out.push_back({cuts.back() + 1, cuts.back(), std::nullopt, false});
  return out;
}

inline Rational simplest_in_piece(const Piece& piece) {
  if (piece.is_point) return piece.sample;
  return simplest_between(piece.lo, piece.hi);
}

// Smaller denominator first, then smaller magnitude, then smaller value.
inline bool simpler(const Rational& x, const Rational& y) {
  const Integer dx = boost::multiprecision::denominator(x);
  const Integer dy = boost::multiprecision::denominator(y);
  if (dx != dy) return dx < dy;
  const Rational ax = abs(x);
  const Rational ay = abs(y);
  if (ax != ay) return ax < ay;
  return x < y;
}

/// Zeros of u(a, .) - u(b, .) together with every breakpoint of either curve.
inline std::vector<Rational> difference_cuts(const PiecewiseLinearCurve& ca,
                                             const PiecewiseLinearCurve& cb) {
  auto zs = ca.breakpoint_payments();
  const auto more = cb.breakpoint_payments();
  zs.insert(zs.end(), more.begin(), more.end());
  zs = sorted_unique(std::move(zs));
  auto diff = [&](const Rational& z) { return ca.eval(z) - cb.eval(z); };

  std::vector<Rational> cuts = zs;
  for (std::size_t k = 0; k + 1 < zs.size(); ++k) {
    const Rational d0 = diff(zs[k]);
    const Rational d1 = diff(zs[k + 1]);
    if (d0.sign() * d1.sign() < 0) cuts.push_back(zs[k] + d0 * (zs[k + 1] - zs[k]) / (d0 - d1));
  }
  const Rational left_slope = ca.left_slope() - cb.left_slope();
  if (left_slope != 0) {
    const Rational zero = zs.front() - diff(zs.front()) / left_slope;
    if (zero < zs.front()) cuts.push_back(zero);
  }
  const Rational right_slope = ca.right_slope() - cb.right_slope();
  if (right_slope != 0) {
    const Rational zero = zs.back() - diff(zs.back()) / right_slope;
    if (zero > zs.back()) cuts.push_back(zero);
  }
  return cuts;
}

/// Searches for a single payment at which the quasi-linear and the actual
/// orders disagree on as many pairs as possible (strict reversals first) and
/// returns the simplest such payment.
inline std::optional<PosRepWitness> common_payment_witness(const Valuation& v,
                                                           const UtilityFunction& u) {
  const std::size_t m = u.size();
  std::vector<Rational> cuts;
  for (std::size_t a = 0; a < m; ++a) {
    cuts.push_back(v[a]);
    for (std::size_t b = a + 1; b < m; ++b) {
      auto more = difference_cuts(u.curve(a), u.curve(b));
      cuts.insert(cuts.end(), more.begin(), more.end());
    }
  }
  cuts = sorted_unique(std::move(cuts));

  // (strict reversals, all disagreements) at payment z.
  auto score = [&](const Rational& z) {
    int strict = 0;
    int total = 0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        if (v[a] - z < 0 && v[b] - z < 0) continue;
        const int ql = sign(Rational(v[a] - v[b]));
        const int ut = sign(Rational(u.eval(a, z) - u.eval(b, z)));
        if (ql == ut) continue;
        ++total;
        if (ql * ut < 0) ++strict;
      }
    }
    return std::pair{strict, total};
  };

  std::pair<int, int> best{0, 0};
  std::optional<Rational> best_z;
  for (const auto& piece : pieces_of(cuts)) {
    const auto s = score(piece.sample);
    if (s == std::pair{0, 0}) continue;
    const Rational z = simplest_in_piece(piece);
    if (s > best || (s == best && best_z && simpler(z, *best_z))) {
      best = s;
      best_z = z;
    }
  }
  if (!best_z) return std::nullopt;

  const Rational& z = *best_z;
  PosRepWitness w;
  w.common_payment = z;
  for (std::size_t a = 0; a < m; ++a) {
    w.quasi_linear_values.push_back(v[a] - z);
    w.utility_values.push_back(u.eval(a, z));
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (v[a] - z < 0 && v[b] - z < 0) continue;
      const auto ql = compare(w.quasi_linear_values[a], w.quasi_linear_values[b]);
      const auto ut = compare(w.utility_values[a], w.utility_values[b]);
      if (ql == ut) continue;
      w.alternative_a = a;
      w.alternative_b = b;
      w.payment_a = z;
      w.payment_b = z;
      w.quasi_linear_order = ql;
      w.utility_order = ut;
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Exact test of whether v pos-represents the preference induced by u.
inline PosRepCheck is_posrep_of(const Valuation& v, const UtilityFunction& u) {
  if (v.alternatives() != u.alternatives()) {
    throw Error(ErrorCode::AlternativeMismatch, "valuation and utility use different alternatives");
  }
  const std::size_t m = u.size();

  // g_a(q) = u(a, v(a) - q) must be one function on q >= 0. Candidate q values
  // are 0 and every breakpoint mapped into q coordinates.
  std::vector<Rational> qs{Rational(0)};
  for (std::size_t a = 0; a < m; ++a) {
    for (const auto& z : u.curve(a).breakpoint_payments()) {
      if (v[a] - z > 0) qs.push_back(v[a] - z);
    }
  }
  qs = detail::sorted_unique(std::move(qs));

  std::optional<std::pair<std::size_t, Rational>> failure;  // (b, q) against a = 0
  auto g = [&](std::size_t a, const Rational& q) { return u.eval(a, v[a] - q); };
  for (const auto& q : qs) {
    for (std::size_t b = 1; b < m && !failure; ++b) {
      if (g(0, q) != g(b, q)) failure = {b, q};
    }
    if (failure) break;
  }
  if (!failure) {
    // Beyond the last candidate every g follows its curve's left tail.
    for (std::size_t b = 1; b < m; ++b) {
      if (u.curve(b).left_slope() != u.curve(0).left_slope()) {
        failure = {b, qs.back() + 1};
        break;
      }
    }
  }
  if (!failure) return {true, std::nullopt};

  if (auto w = detail::common_payment_witness(v, u)) return {false, std::move(w)};

  // Equal quasi-linear values, different actual utilities.
  const auto& [b, q] = *failure;
  PosRepWitness w;
  w.alternative_a = 0;
  w.payment_a = v[0] - q;
  w.alternative_b = b;
  w.payment_b = v[b] - q;
  w.quasi_linear_order = std::strong_ordering::equal;
  w.utility_order = compare(u.eval(0, w.payment_a), u.eval(b, w.payment_b));
  return {false, std::move(w)};
}

// ---------------------------------------------------------------------------
// Parallel utilities

struct ParallelWitness {
  std::size_t alternative_a = 0;
  std::size_t alternative_b = 0;
  Rational payment;  // z
  Rational lhs;      // u(a, z + W_a - W_b)
  Rational rhs;      // u(b, z)
};

struct ParallelReport {
  bool is_parallel = false;
  Valuation wtp;  // willingness to pay W_a per alternative
  std::optional<ParallelWitness> witness;
};

inline ParallelReport is_parallel(const UtilityFunction& u) {
  const std::size_t m = u.size();
  std::vector<Rational> at_zero;
  at_zero.reserve(m);
  for (std::size_t a = 0; a < m; ++a) at_zero.push_back(u.eval(a, Rational(0)));
  const Rational worst = *std::min_element(at_zero.begin(), at_zero.end());

  std::vector<Rational> wtp;
  wtp.reserve(m);
  for (const auto& curve : u.curves()) wtp.push_back(curve.inverse(worst));

  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b || at_zero[a] < at_zero[b]) continue;
      // z ranges over [0, W_b]: there u(b, z) >= worst.
      const Rational offset = wtp[a] - wtp[b];
      std::vector<Rational> zs{Rational(0), wtp[b]};
      for (const auto& z : u.curve(b).breakpoint_payments()) zs.push_back(z);
      for (const auto& z : u.curve(a).breakpoint_payments()) zs.push_back(z - offset);
      zs = detail::sorted_unique(std::move(zs));
      for (const auto& z : zs) {
        if (z < 0 || z > wtp[b]) continue;
        Rational lhs = u.eval(a, z + offset);
        Rational rhs = u.eval(b, z);
        if (lhs != rhs) {
          return {false, Valuation(u.alternatives(), std::move(wtp)),
                  ParallelWitness{a, b, z, std::move(lhs), std::move(rhs)}};
        }
      }
    }
  }
  return {true, Valuation(u.alternatives(), std::move(wtp)), std::nullopt};
}

// ---------------------------------------------------------------------------
// Preference-level conditions on a finite payment grid

enum class ConditionMode { Full, Positive };

struct ShiftWitness {
  std::size_t x = 0;
  std::size_t y = 0;
  Rational z_x;
  Rational z_y;
  Rational alpha;
  std::strong_ordering before = std::strong_ordering::equal;  // (x, z_x) vs (y, z_y)
  std::strong_ordering after = std::strong_ordering::equal;   // shifted by -alpha

  friend bool operator==(const ShiftWitness&, const ShiftWitness&) = default;
};

struct ConditionResult {
  std::string name;
  bool passed = true;
  bool vacuous = false;
  std::string note;
  std::vector<std::size_t> unbounded_failures;  // alternatives lacking a grid payment
  std::vector<ShiftWitness> shift_witnesses;
};

struct ConditionReport {
  ConditionMode mode = ConditionMode::Full;
  std::optional<Bundle> reference;
  std::vector<ConditionResult> conditions;

  bool all_passed() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const ConditionResult& c) { return c.passed; });
  }
};

namespace detail {

inline ConditionResult check_unbounded(const UtilityFunction& u, const std::vector<Rational>& grid,
                                       const Bundle& ref) {
  ConditionResult r{"unbounded", true, false, {}, {}, {}};
  const Rational ref_level = u.eval(ref);
  for (std::size_t x = 0; x < u.size(); ++x) {
    bool below = false;
    bool above = false;
    for (const auto& z : grid) {
      const Rational level = u.eval(x, z);
      below = below || level < ref_level;
      above = above || level > ref_level;
    }
    if (!below || !above) {
      r.passed = false;
      r.unbounded_failures.push_back(x);
    }
  }
  return r;
}

inline ConditionResult check_shifts(const UtilityFunction& u, const std::vector<Rational>& grid,
                                    const std::optional<Bundle>& floor_ref, bool nonnegative_only) {
  ConditionResult r{nonnegative_only ? "positive_shift_invariance" : "shift_invariance",
                    true, false, {}, {}, {}};
  std::vector<Rational> alphas;
  for (const auto& g1 : grid) {
    for (const auto& g2 : grid) {
      if (!nonnegative_only || g1 - g2 >= 0) alphas.push_back(g1 - g2);
    }
  }
  alphas = sorted_unique(std::move(alphas));
  std::optional<Rational> floor_level;
  if (floor_ref) floor_level = u.eval(*floor_ref);

  const std::size_t m = u.size();
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      for (const auto& zx : grid) {
        const Rational ux = u.eval(x, zx);
        if (floor_level && ux < *floor_level) continue;
        for (const auto& zy : grid) {
          const auto before = compare(ux, u.eval(y, zy));
          if (before == std::strong_ordering::less) continue;
          for (const auto& alpha : alphas) {
            const auto after = compare(u.eval(x, zx - alpha), u.eval(y, zy - alpha));
            if (after == std::strong_ordering::less) {
              r.passed = false;
              r.shift_witnesses.push_back({x, y, zx, zy, alpha, before, after});
            }
          }
        }
      }
    }
  }
  return r;
}

}  // namespace detail

/// Reference anchor taken from the canonical classification: the alternative
/// with the smallest canonical value, at that value.
inline std::optional<Bundle> classification_anchor(const UtilityFunction& u) {
  const auto cls = classify(u);
  if (!cls.valuation) return std::nullopt;
  const auto& values = cls.valuation->values();
  const auto it = std::min_element(values.begin(), values.end());
  return Bundle{static_cast<std::size_t>(it - values.begin()), *it};
}

/// Grid-restricted check of the preference-level characterization. Full mode
/// reports continuity, unboundedness around a reference outcome and invariance
/// of comparisons under common payment shifts; Positive mode reports
/// unboundedness and invariance under nonnegative shifts for comparisons whose
/// better side is at least as good as the reference. The reference is the
/// caller's, else the classification anchor, else the first grid outcome that
/// satisfies every reference-dependent condition.
inline ConditionReport check_type_conditions(const UtilityFunction& u,
                                             const std::vector<Rational>& grid_in,
                                             ConditionMode mode,
                                             std::optional<Bundle> reference = std::nullopt) {
  if (grid_in.empty()) throw Error(ErrorCode::EmptyGrid, "payment grid is empty");
  const auto grid = detail::sorted_unique(grid_in);

  auto evaluate = [&](const Bundle& ref) {
    ConditionReport report;
    report.mode = mode;
    report.reference = ref;
    if (mode == ConditionMode::Full) {
      report.conditions.push_back({"continuity", true, true,
                                   "piecewise-linear curves are continuous by construction", {}, {}});
      report.conditions.push_back(detail::check_unbounded(u, grid, ref));
      report.conditions.push_back(detail::check_shifts(u, grid, std::nullopt, false));
    } else {
      report.conditions.push_back(detail::check_unbounded(u, grid, ref));
      report.conditions.push_back(detail::check_shifts(u, grid, ref, true));
    }
    return report;
  };

  if (!reference) reference = classification_anchor(u);
  if (reference) return evaluate(*reference);

  std::optional<ConditionReport> first;
  for (std::size_t a = 0; a < u.size(); ++a) {
    for (const auto& z : grid) {
      auto report = evaluate(Bundle{a, z});
      if (report.all_passed()) return report;
      if (!first) first = std::move(report);
    }
  }
  return *first;
}

}  // namespace posvcg
