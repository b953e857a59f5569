#pragma once

// Agent types: one payment-to-utility curve per alternative.

#include "posvcg/error.hpp"
#include "posvcg/pwl.hpp"
#include "posvcg/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace posvcg {

/// Ordered, duplicate-free alternative names. The order is the tie-break order.
class AlternativeSet {
 public:
  AlternativeSet() = default;
  explicit AlternativeSet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw Error(ErrorCode::InvalidSpec, "alternative set is empty");
    auto sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::InvalidSpec, "duplicate alternative name");
    }
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  }

  std::size_t index_of(const std::string& name) const {
    if (auto idx = find(name)) return *idx;
    throw Error(ErrorCode::UnknownAlternative, "unknown alternative '" + name + "'");
  }

  friend bool operator==(const AlternativeSet&, const AlternativeSet&) = default;

 private:
  std::vector<std::string> names_;
};

/// Quasi-linear valuation: u(a, z) = value(a) - z.
class Valuation {
 public:
  Valuation(AlternativeSet alternatives, std::vector<Rational> values)
      : alternatives_(std::move(alternatives)), values_(std::move(values)) {
    if (values_.size() != alternatives_.size()) {
      throw Error(ErrorCode::AlternativeMismatch, "valuation needs one value per alternative");
    }
  }

  const AlternativeSet& alternatives() const noexcept { return alternatives_; }
  const std::vector<Rational>& values() const noexcept { return values_; }
  const Rational& operator[](std::size_t index) const { return values_.at(index); }
  const Rational& at(const std::string& name) const {
    return values_[alternatives_.index_of(name)];
  }
  std::size_t size() const noexcept { return values_.size(); }

  /// Every value plus `constant`.
  Valuation shifted(const Rational& constant) const {
    auto moved = values_;
    for (auto& v : moved) v += constant;
    return Valuation(alternatives_, std::move(moved));
  }

  Rational min() const { return *std::min_element(values_.begin(), values_.end()); }
  Rational max() const { return *std::max_element(values_.begin(), values_.end()); }

  friend bool operator==(const Valuation&, const Valuation&) = default;

 private:
  AlternativeSet alternatives_;
  std::vector<Rational> values_;
};

/// An (alternative, payment) pair.
struct Bundle {
  std::size_t alternative = 0;
  Rational payment;
};

class UtilityFunction {
 public:
  UtilityFunction(AlternativeSet alternatives, std::vector<PiecewiseLinearCurve> curves)
      : alternatives_(std::move(alternatives)), curves_(std::move(curves)) {
    if (curves_.size() != alternatives_.size()) {
      throw Error(ErrorCode::AlternativeMismatch, "utility needs one curve per alternative");
    }
  }

  const AlternativeSet& alternatives() const noexcept { return alternatives_; }
  const std::vector<PiecewiseLinearCurve>& curves() const noexcept { return curves_; }
  const PiecewiseLinearCurve& curve(std::size_t index) const { return curves_.at(index); }
  std::size_t size() const noexcept { return curves_.size(); }

  Rational eval(std::size_t alternative, const Rational& z) const {
    if (alternative >= curves_.size()) {
      throw Error(ErrorCode::UnknownAlternative, "alternative index out of range");
    }
    return curves_[alternative].eval(z);
  }

  Rational eval(const std::string& alternative, const Rational& z) const {
    return curves_[alternatives_.index_of(alternative)].eval(z);
  }

  Rational eval(const Bundle& outcome) const { return eval(outcome.alternative, outcome.payment); }

  friend bool operator==(const UtilityFunction&, const UtilityFunction&) = default;

 private:
  AlternativeSet alternatives_;
  std::vector<PiecewiseLinearCurve> curves_;
};

inline Rational utility_eval(const UtilityFunction& u, const std::string& alternative,
                             const Rational& z) {
  return u.eval(alternative, z);
}

inline UtilityFunction ql_from_valuation(const Valuation& v) {
  std::vector<PiecewiseLinearCurve> curves;
  curves.reserve(v.size());
  for (const auto& value : v.values()) curves.push_back(PiecewiseLinearCurve::quasi_linear(value));
  return UtilityFunction(v.alternatives(), std::move(curves));
}

/// Three-way comparison of two outcomes under the preference u induces.
inline std::strong_ordering prefers(const UtilityFunction& u, const Bundle& first,
                                    const Bundle& second) {
  return compare(u.eval(first), u.eval(second));
}

inline std::strong_ordering prefers(const UtilityFunction& u,
                                    const std::pair<std::string, Rational>& first,
                                    const std::pair<std::string, Rational>& second) {
  const auto& alts = u.alternatives();
  return prefers(u, Bundle{alts.index_of(first.first), first.second},
                 Bundle{alts.index_of(second.first), second.second});
}

/// Applies the same increasing map to every curve; the induced preference is
/// unchanged.
inline UtilityFunction reparameterize(const UtilityFunction& u, const IncreasingMap& psi) {
  std::vector<PiecewiseLinearCurve> curves;
  curves.reserve(u.size());
  for (const auto& c : u.curves()) curves.push_back(reparameterize(c, psi));
  return UtilityFunction(u.alternatives(), std::move(curves));
}

}  // namespace posvcg
