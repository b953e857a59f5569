#pragma once

// Strictly decreasing, unbounded piecewise-linear curves mapping a payment z
// to a utility level. Each curve is a continuous bijection of the rationals'
// closure onto itself: breakpoints are interpolated linearly and the two tails
// extend with negative slopes.

#include "posvcg/error.hpp"
#include "posvcg/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace posvcg {

struct CurvePoint {
  Rational z;  // payment
  Rational u;  // utility level

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

class PiecewiseLinearCurve {
 public:
  PiecewiseLinearCurve(std::vector<CurvePoint> points, Rational left_slope,
                       Rational right_slope)
      : points_(std::move(points)),
        left_slope_(std::move(left_slope)),
        right_slope_(std::move(right_slope)) {
    validate();
  }

  /// u(z) = value - z.
  static PiecewiseLinearCurve quasi_linear(const Rational& value) {
    return PiecewiseLinearCurve({{value, Rational(0)}}, Rational(-1), Rational(-1));
  }

  const std::vector<CurvePoint>& points() const noexcept { return points_; }
  const Rational& left_slope() const noexcept { return left_slope_; }
  const Rational& right_slope() const noexcept { return right_slope_; }

  Rational eval(const Rational& z) const {
    const auto& first = points_.front();
    const auto& last = points_.back();
    if (z <= first.z) return first.u + left_slope_ * (z - first.z);
    if (z >= last.z) return last.u + right_slope_ * (z - last.z);
    auto hi = std::upper_bound(points_.begin(), points_.end(), z,
                               [](const Rational& x, const CurvePoint& p) { return x < p.z; });
    auto lo = std::prev(hi);
    return lo->u + (hi->u - lo->u) * (z - lo->z) / (hi->z - lo->z);
  }

  /// The unique payment z with eval(z) == level.
  Rational inverse(const Rational& level) const {
    const auto& first = points_.front();
    const auto& last = points_.back();
    if (level >= first.u) return first.z + (level - first.u) / left_slope_;
    if (level <= last.u) return last.z + (level - last.u) / right_slope_;
    // u is strictly decreasing along points_.
    auto hi = std::lower_bound(points_.begin(), points_.end(), level,
                               [](const CurvePoint& p, const Rational& y) { return p.u > y; });
    auto lo = std::prev(hi);
    if (hi->u == level) return hi->z;
    return lo->z + (hi->z - lo->z) * (level - lo->u) / (hi->u - lo->u);
  }

  /// Curve with every payment coordinate moved by `shift`:
  /// result.eval(z + shift) == eval(z).
  PiecewiseLinearCurve shifted(const Rational& shift) const {
    std::vector<CurvePoint> moved = points_;
    for (auto& p : moved) p.z += shift;
    return PiecewiseLinearCurve(std::move(moved), left_slope_, right_slope_);
  }

  std::vector<Rational> breakpoint_payments() const {
    std::vector<Rational> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.z);
    return out;
  }

  std::vector<Rational> breakpoint_levels() const {
    std::vector<Rational> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.u);
    return out;
  }

  friend bool operator==(const PiecewiseLinearCurve&, const PiecewiseLinearCurve&) = default;

 private:
  void validate() const {
    if (points_.empty()) throw Error(ErrorCode::InvalidCurve, "curve has no points");
    if (left_slope_ >= 0 || right_slope_ >= 0) {
      throw Error(ErrorCode::InvalidCurve, "not strictly decreasing: tail slopes must be negative");
    }
    for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
      if (points_[k].z >= points_[k + 1].z) {
        throw Error(ErrorCode::InvalidCurve, "payments must be strictly increasing");
      }
      if (points_[k].u <= points_[k + 1].u) {
        throw Error(ErrorCode::InvalidCurve, "not strictly decreasing");
      }
    }
  }

  std::vector<CurvePoint> points_;
  Rational left_slope_;
  Rational right_slope_;
};

inline Rational pwl_eval(const PiecewiseLinearCurve& curve, const Rational& z) {
  return curve.eval(z);
}

inline Rational pwl_inverse(const PiecewiseLinearCurve& curve, const Rational& level) {
  return curve.inverse(level);
}

/// Where the payment-at-level difference of two curves becomes constant.
struct AlignmentResult {
  enum class Kind { EverywhereConstant, ConstantFrom, NeverConstant };

  Kind kind = Kind::NeverConstant;
  std::optional<Rational> level;       // ConstantFrom only
  std::optional<Rational> difference;  // absent for NeverConstant

  static AlignmentResult everywhere(Rational d) {
    return {Kind::EverywhereConstant, std::nullopt, std::move(d)};
  }
  static AlignmentResult from(Rational lambda0, Rational d) {
    return {Kind::ConstantFrom, std::move(lambda0), std::move(d)};
  }
  static AlignmentResult never() { return {}; }

  friend bool operator==(const AlignmentResult&, const AlignmentResult&) = default;
};

/// Scans the breakpoint levels of both curves from the top down and reports
/// the minimal level above which z_a(level) - z_b(level) is constant.
inline AlignmentResult alignment_level(const PiecewiseLinearCurve& a,
                                       const PiecewiseLinearCurve& b) {
  // Above every breakpoint both inverses follow their left tails.
  if (a.left_slope() != b.left_slope()) return AlignmentResult::never();

  std::vector<Rational> levels = a.breakpoint_levels();
  const auto more = b.breakpoint_levels();
  levels.insert(levels.end(), more.begin(), more.end());
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  auto diff = [&](const Rational& level) { return a.inverse(level) - b.inverse(level); };
  const Rational d = diff(levels.front());
  std::size_t last_equal = 0;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (diff(levels[k]) != d) return AlignmentResult::from(levels[last_equal], d);
    last_equal = k;
  }
  if (a.right_slope() == b.right_slope()) return AlignmentResult::everywhere(d);
  return AlignmentResult::from(levels.back(), d);
}

/// A strictly increasing piecewise-linear bijection, used to reparameterize the
/// utility axis without changing the induced preference.
class IncreasingMap {
 public:
  IncreasingMap(std::vector<CurvePoint> points, Rational left_slope, Rational right_slope)
      : points_(std::move(points)),
        left_slope_(std::move(left_slope)),
        right_slope_(std::move(right_slope)) {
    if (points_.empty() || left_slope_ <= 0 || right_slope_ <= 0) {
      throw Error(ErrorCode::InvalidCurve, "increasing map needs points and positive tail slopes");
    }
    for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
      if (points_[k].z >= points_[k + 1].z || points_[k].u >= points_[k + 1].u) {
        throw Error(ErrorCode::InvalidCurve, "increasing map is not strictly increasing");
      }
    }
  }

  static IncreasingMap identity() {
    return IncreasingMap({{Rational(0), Rational(0)}}, Rational(1), Rational(1));
  }

  // Points are (input, output) pairs stored in CurvePoint{z = input, u = output}.
  const std::vector<CurvePoint>& points() const noexcept { return points_; }
  const Rational& left_slope() const noexcept { return left_slope_; }
  const Rational& right_slope() const noexcept { return right_slope_; }

  Rational operator()(const Rational& x) const {
    const auto& first = points_.front();
    const auto& last = points_.back();
    if (x <= first.z) return first.u + left_slope_ * (x - first.z);
    if (x >= last.z) return last.u + right_slope_ * (x - last.z);
    auto hi = std::upper_bound(points_.begin(), points_.end(), x,
                               [](const Rational& v, const CurvePoint& p) { return v < p.z; });
    auto lo = std::prev(hi);
    return lo->u + (hi->u - lo->u) * (x - lo->z) / (hi->z - lo->z);
  }

 private:
  std::vector<CurvePoint> points_;
  Rational left_slope_;
  Rational right_slope_;
};

/// psi composed with the curve: z -> psi(curve(z)). Still strictly decreasing.
inline PiecewiseLinearCurve reparameterize(const PiecewiseLinearCurve& curve,
                                           const IncreasingMap& psi) {
  std::vector<Rational> zs = curve.breakpoint_payments();
  for (const auto& p : psi.points()) zs.push_back(curve.inverse(p.z));
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

  std::vector<CurvePoint> points;
  points.reserve(zs.size());
  for (const auto& z : zs) points.push_back({z, psi(curve.eval(z))});
  // z -> -inf pushes the level to +inf, where psi follows its right tail.
  return PiecewiseLinearCurve(std::move(points), psi.right_slope() * curve.left_slope(),
                              psi.left_slope() * curve.right_slope());
}

}  // namespace posvcg
