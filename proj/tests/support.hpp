#pragma once

// Seeded generators and independent oracles shared by the test suites.
// Oracles here never call the library routine they are used to check.

#include "posvcg/mechanism.hpp"
#include "posvcg/pwl.hpp"
#include "posvcg/rational.hpp"
#include "posvcg/utility.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using posvcg::AlternativeSet;
using posvcg::CurvePoint;
using posvcg::IncreasingMap;
using posvcg::PiecewiseLinearCurve;
using posvcg::Rational;
using posvcg::UtilityFunction;
using posvcg::Valuation;

inline Rational R(long long n, long long d = 1) { return posvcg::make_rational(n, d); }

inline AlternativeSet abc() { return AlternativeSet({"a", "b", "c"}); }

inline AlternativeSet alternatives(std::size_t m) {
  std::vector<std::string> names;
  for (std::size_t a = 0; a < m; ++a) names.push_back(std::string(1, static_cast<char>('a' + a)));
  return AlternativeSet(std::move(names));
}

inline Valuation val(const AlternativeSet& alts, std::vector<Rational> values) {
  return Valuation(alts, std::move(values));
}

inline PiecewiseLinearCurve kink(Rational z, Rational left, Rational right) {
  return PiecewiseLinearCurve({{std::move(z), Rational(0)}}, std::move(left), std::move(right));
}

// Kinked tails: not parallel, yet pos-represented by (-3,-2,-1).
inline UtilityFunction kinked() {
  return UtilityFunction(abc(), {kink(R(-3), R(-1), R(-1, 3)), kink(R(-2), R(-1), R(-1)),
                                 kink(R(-1), R(-1), R(-3))});
}

// The counterexample utility w, pos-represented by (1,2,3).
inline UtilityFunction w_example() {
  return UtilityFunction(abc(), {kink(R(1), R(-1), R(-1)), kink(R(2), R(-1), R(-2)),
                                 kink(R(3), R(-1), R(-3))});
}

// Closed forms, written out branch by branch.
namespace closed_form {

inline Rational kinked(char alt, const Rational& z) {
  switch (alt) {
    case 'a': return z <= -3 ? Rational(-3 - z) : Rational(-(z + 3) / 3);
    case 'b': return -2 - z;
    default: return z <= -1 ? Rational(-1 - z) : Rational(-3 * (z + 1));
  }
}

inline Rational w(char alt, const Rational& z) {
  switch (alt) {
    case 'a': return 1 - z;
    case 'b': return z <= 2 ? Rational(2 - z) : Rational(-2 * (z - 2));
    default: return z <= 3 ? Rational(3 - z) : Rational(-3 * (z - 3));
  }
}

}  // namespace closed_form

/// Evaluates a curve from its raw data by scanning segments linearly.
inline Rational naive_eval(const PiecewiseLinearCurve& c, const Rational& z) {
  const auto& pts = c.points();
  if (z <= pts.front().z) return pts.front().u + c.left_slope() * (z - pts.front().z);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    if (z <= pts[k + 1].z) {
      const Rational slope = (pts[k + 1].u - pts[k].u) / (pts[k + 1].z - pts[k].z);
      return pts[k].u + slope * (z - pts[k].z);
    }
  }
  return pts.back().u + c.right_slope() * (z - pts.back().z);
}

/// Payment with curve value `level`, found by walking the raw segments
/// (tails included) and solving the one whose value range contains it.
inline Rational scan_inverse(const PiecewiseLinearCurve& c, const Rational& level) {
  const auto& pts = c.points();
  if (level >= pts.front().u) return pts.front().z + (level - pts.front().u) / c.left_slope();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    if (level >= pts[k + 1].u) {
      const Rational t = (pts[k].u - level) / (pts[k].u - pts[k + 1].u);
      return pts[k].z + t * (pts[k + 1].z - pts[k].z);
    }
  }
  return pts.back().z + (level - pts.back().u) / c.right_slope();
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  long long integer(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(engine_);
  }
  bool coin() { return integer(0, 1) == 1; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(integer(0, static_cast<long long>(n) - 1)); }

  /// Rational in [lo, hi] with denominator at most max_den.
  Rational rational(long long lo, long long hi, long long max_den = 4) {
    const long long den = integer(1, max_den);
    return R(integer(lo * den, hi * den), den);
  }
  Rational positive(long long hi = 3, long long max_den = 4) {
    const long long den = integer(1, max_den);
    return R(integer(1, hi * den), den);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline PiecewiseLinearCurve random_curve(Rng& rng, std::size_t max_points = 4) {
  const std::size_t n = 1 + rng.index(max_points);
  std::vector<CurvePoint> pts;
  Rational z = rng.rational(-5, 5);
  Rational u = rng.rational(-5, 5);
  for (std::size_t k = 0; k < n; ++k) {
    pts.push_back({z, u});
    z += rng.positive();
    u -= rng.positive();
  }
  return PiecewiseLinearCurve(std::move(pts), -rng.positive(), -rng.positive());
}

inline Valuation random_valuation(Rng& rng, const AlternativeSet& alts, long long lo = -5, long long hi = 5) {
  std::vector<Rational> values;
  for (std::size_t a = 0; a < alts.size(); ++a) values.push_back(rng.rational(lo, hi));
  return Valuation(alts, std::move(values));
}

inline IncreasingMap random_increasing_map(Rng& rng) {
  const std::size_t n = 1 + rng.index(4);
  std::vector<CurvePoint> pts;
  Rational x = rng.rational(-6, 2);
  Rational y = rng.rational(-6, 6);
  for (std::size_t k = 0; k < n; ++k) {
    pts.push_back({x, y});
    x += rng.positive();
    y += rng.positive();
  }
  return IncreasingMap(std::move(pts), rng.positive(), rng.positive());
}

/// A type pos-represented by `v` at threshold `level` by construction: above
/// the threshold every curve is the common increasing map phi applied to
/// v(a) - z; below it each alternative gets its own random tail. The tails
/// differ unless `represented` is set.
inline UtilityFunction random_posrep_type(Rng& rng, const Valuation& v, const Rational& level,
                                          bool represented = false) {
  // phi on quasi-linear values q >= 0: phi(0) = level, increasing.
  std::vector<std::pair<Rational, Rational>> phi{{Rational(0), level}};
  const std::size_t knots = rng.index(3);
  for (std::size_t k = 0; k < knots; ++k) {
    phi.push_back({phi.back().first + rng.positive(), phi.back().second + rng.positive()});
  }
  const Rational top_slope = rng.positive();

  // Shared tail for the represented case.
  std::vector<std::pair<Rational, Rational>> shared_tail;
  Rational shared_right;
  auto make_tail = [&](std::vector<std::pair<Rational, Rational>>& tail, Rational& right) {
    tail.clear();
    const std::size_t n = rng.index(3);
    Rational dz(0), du(0);
    for (std::size_t k = 0; k < n; ++k) {
      dz += rng.positive();
      du += rng.positive();
      tail.push_back({dz, du});
    }
    right = -rng.positive();
  };
  if (represented) make_tail(shared_tail, shared_right);

  std::vector<PiecewiseLinearCurve> curves;
  for (std::size_t a = 0; a < v.size(); ++a) {
    std::vector<CurvePoint> pts;
    for (std::size_t k = phi.size(); k-- > 0;) pts.push_back({v[a] - phi[k].first, phi[k].second});
    std::vector<std::pair<Rational, Rational>> tail = shared_tail;
    Rational right = shared_right;
    if (!represented) make_tail(tail, right);
    for (const auto& [dz, du] : tail) pts.push_back({v[a] + dz, level - du});
    curves.emplace_back(std::move(pts), -top_slope, right);
  }
  return UtilityFunction(v.alternatives(), std::move(curves));
}

/// Brute-force check of the pos-representation definition on a payment mesh:
/// every pair of outcomes with at least one nonnegative quasi-linear value
/// must be ordered the same way by v and by u.
inline bool mesh_posrep(const Valuation& v, const UtilityFunction& u, const std::vector<Rational>& mesh) {
  const std::size_t m = v.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      for (const auto& za : mesh) {
        for (const auto& zb : mesh) {
          const Rational qa = v[a] - za;
          const Rational qb = v[b] - zb;
          if (qa < 0 && qb < 0) continue;
          const auto ql = posvcg::compare(qa, qb);
          const auto ut = posvcg::compare(naive_eval(u.curve(a), za), naive_eval(u.curve(b), zb));
          if (ql != ut) return false;
        }
      }
    }
  }
  return true;
}

inline std::vector<Rational> mesh(long long lo, long long hi, long long den) {
  std::vector<Rational> out;
  for (long long k = lo * den; k <= hi * den; ++k) out.push_back(R(k, den));
  return out;
}

/// All permutations of (0, 1, ..., m-1) as valuations.
inline std::vector<Valuation> strict_rankings(const AlternativeSet& alts) {
  std::vector<long long> perm(alts.size());
  for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<long long>(k);
  std::vector<Valuation> out;
  do {
    std::vector<Rational> values;
    for (auto x : perm) values.push_back(R(x));
    out.emplace_back(alts, std::move(values));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// c_a + sum_i w_i v_i(a), first maximizer over `allowed`, computed directly.
inline std::size_t oracle_affine_argmax(const std::vector<Rational>& w, const std::vector<Rational>& c,
                                        const std::vector<Valuation>& profile,
                                        const std::vector<std::size_t>& allowed) {
  std::size_t best = allowed.front();
  Rational best_score;
  bool first = true;
  for (auto a : allowed) {
    Rational s = c[a];
    for (std::size_t i = 0; i < profile.size(); ++i) s += w[i] * profile[i][a];
    if (first || s > best_score) {
      best = a;
      best_score = s;
      first = false;
    }
  }
  return best;
}

}  // namespace testing_support
