#pragma once

// Affine VCG mechanism over types that are (pos-)represented by quasi-linear
// utilities. Reports are full utility functions; the mechanism extracts each
// report's canonical quasi-linear valuation and runs the affine maximizer on
// those valuations.

#include "posvcg/error.hpp"
#include "posvcg/rational.hpp"
#include "posvcg/representation.hpp"
#include "posvcg/utility.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace posvcg {

struct ZeroPivot {
  friend bool operator==(const ZeroPivot&, const ZeroPivot&) = default;
};
struct ClarkePivot {
  friend bool operator==(const ClarkePivot&, const ClarkePivot&) = default;
};
struct ConstantPivot {
  std::vector<Rational> values;  // one per agent
  friend bool operator==(const ConstantPivot&, const ConstantPivot&) = default;
};
using PivotRule = std::variant<ZeroPivot, ClarkePivot, ConstantPivot>;

/// Pos: every report needs a quasi-linear pos-representation. Full: every
/// report must be represented outright.
enum class RepresentationMode { Pos, Full };

class MechanismSpec {
 public:
  MechanismSpec(AlternativeSet alternatives, std::vector<std::size_t> allowed,
                std::vector<Rational> weights, std::vector<Rational> costs, PivotRule pivot,
                RepresentationMode mode = RepresentationMode::Pos)
      : alternatives_(std::move(alternatives)),
        allowed_(std::move(allowed)),
        weights_(std::move(weights)),
        costs_(std::move(costs)),
        pivot_(std::move(pivot)),
        mode_(mode) {
    validate();
  }

  /// Every alternative allowed, zero costs.
  static MechanismSpec unrestricted(AlternativeSet alternatives, std::vector<Rational> weights,
                                    PivotRule pivot,
                                    RepresentationMode mode = RepresentationMode::Pos) {
    std::vector<std::size_t> all(alternatives.size());
    for (std::size_t a = 0; a < all.size(); ++a) all[a] = a;
    std::vector<Rational> costs(alternatives.size(), Rational(0));
    return MechanismSpec(std::move(alternatives), std::move(all), std::move(weights),
                         std::move(costs), std::move(pivot), mode);
  }

  const AlternativeSet& alternatives() const noexcept { return alternatives_; }
  const std::vector<std::size_t>& allowed() const noexcept { return allowed_; }
  const std::vector<Rational>& weights() const noexcept { return weights_; }
  const std::vector<Rational>& costs() const noexcept { return costs_; }
  const PivotRule& pivot() const noexcept { return pivot_; }
  RepresentationMode mode() const noexcept { return mode_; }
  std::size_t agent_count() const noexcept { return weights_.size(); }

  MechanismSpec with_pivot(PivotRule pivot) const {
    MechanismSpec copy = *this;
    copy.pivot_ = std::move(pivot);
    copy.validate();
    return copy;
  }

  MechanismSpec with_mode(RepresentationMode mode) const {
    MechanismSpec copy = *this;
    copy.mode_ = mode;
    return copy;
  }

 private:
  void validate() const {
    if (allowed_.empty()) throw Error(ErrorCode::InvalidSpec, "allowed alternative set is empty");
    for (std::size_t k = 0; k < allowed_.size(); ++k) {
      if (allowed_[k] >= alternatives_.size()) {
        throw Error(ErrorCode::InvalidSpec, "allowed alternative out of range");
      }
      if (k > 0 && allowed_[k] <= allowed_[k - 1]) {
        throw Error(ErrorCode::InvalidSpec, "allowed alternatives must be distinct and in order");
      }
    }
    if (weights_.empty()) throw Error(ErrorCode::InvalidSpec, "mechanism has no agents");
    Rational total(0);
    for (const auto& w : weights_) {
      if (w < 0) throw Error(ErrorCode::InvalidSpec, "agent weights must be nonnegative");
      total += w;
    }
    if (total != 1) throw Error(ErrorCode::InvalidSpec, "agent weights must sum to 1");
    if (costs_.size() != alternatives_.size()) {
      throw Error(ErrorCode::InvalidSpec, "need one cost per alternative");
    }
    if (const auto* constant = std::get_if<ConstantPivot>(&pivot_)) {
      if (constant->values.size() != weights_.size()) {
        throw Error(ErrorCode::InvalidSpec, "constant pivot needs one value per agent");
      }
    }
  }

  AlternativeSet alternatives_;
  std::vector<std::size_t> allowed_;
  std::vector<Rational> weights_;
  std::vector<Rational> costs_;
  PivotRule pivot_;
  RepresentationMode mode_;
};

struct Outcome {
  std::size_t chosen = 0;
  std::vector<Rational> payments;
  std::vector<Valuation> canonical_valuations;
};

namespace detail {

inline void check_profile(const MechanismSpec& spec, std::span<const Valuation> profile) {
  if (profile.size() != spec.agent_count()) {
    throw Error(ErrorCode::InvalidSpec, "profile size does not match the number of agents");
  }
  for (const auto& v : profile) {
    if (v.alternatives() != spec.alternatives()) {
      throw Error(ErrorCode::AlternativeMismatch, "valuation alternatives differ from the mechanism's");
    }
  }
}

/// c_a + sum_{j != skip} w_j v_j(a); skip == npos includes everyone.
inline Rational partial_score(const MechanismSpec& spec, std::span<const Valuation> profile,
                              std::size_t a, std::size_t skip) {
  Rational s = spec.costs()[a];
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (j == skip || spec.weights()[j] == 0) continue;
    s += spec.weights()[j] * profile[j][a];
  }
  return s;
}

inline constexpr std::size_t kEveryone = static_cast<std::size_t>(-1);

}  // namespace detail

/// c_a + sum_i w_i v_i(a).
inline Rational affine_score(const MechanismSpec& spec, std::span<const Valuation> profile,
                             std::size_t alternative) {
  return detail::partial_score(spec, profile, alternative, detail::kEveryone);
}

/// First (in alternative order) maximizer of the affine score over the
/// allowed set.
inline std::size_t choose_alternative(const MechanismSpec& spec,
                                      std::span<const Valuation> profile) {
  detail::check_profile(spec, profile);
  std::size_t best = spec.allowed().front();
  Rational best_score = affine_score(spec, profile, best);
  for (std::size_t k = 1; k < spec.allowed().size(); ++k) {
    const std::size_t a = spec.allowed()[k];
    Rational s = affine_score(spec, profile, a);
    if (s > best_score) {
      best = a;
      best_score = std::move(s);
    }
  }
  return best;
}

/// (1 / w_i) * max over allowed a of (c_a + sum_{j != i} w_j v_j(a)).
/// profile[agent] is ignored.
inline Rational clarke_pivot(const MechanismSpec& spec, std::size_t agent,
                             std::span<const Valuation> profile) {
  detail::check_profile(spec, profile);
  const Rational& w = spec.weights().at(agent);
  if (w == 0) {
    throw TypeError(ErrorCode::ZeroWeightAgent, "Clarke pivot is undefined for a zero-weight agent",
                    agent);
  }
  std::optional<Rational> best;
  for (const std::size_t a : spec.allowed()) {
    Rational s = detail::partial_score(spec, profile, a, agent);
    if (!best || s > *best) best = std::move(s);
  }
  return *best / w;
}

/// h_i evaluated on the others' valuations.
inline Rational pivot_value(const MechanismSpec& spec, std::size_t agent,
                            std::span<const Valuation> profile) {
  return std::visit(
      [&](const auto& rule) -> Rational {
        using Rule = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<Rule, ZeroPivot>) {
          return Rational(0);
        } else if constexpr (std::is_same_v<Rule, ClarkePivot>) {
          return clarke_pivot(spec, agent, profile);
        } else {
          return rule.values.at(agent);
        }
      },
      spec.pivot());
}

/// Runs the mechanism on already-extracted valuations.
inline Outcome run_on_valuations(const MechanismSpec& spec, std::vector<Valuation> profile) {
  Outcome out;
  out.chosen = choose_alternative(spec, profile);
  out.payments.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    Rational h = pivot_value(spec, i, profile);
    const Rational& w = spec.weights()[i];
    if (w > 0) h -= detail::partial_score(spec, profile, out.chosen, i) / w;
    out.payments.push_back(std::move(h));
  }
  out.canonical_valuations = std::move(profile);
  return out;
}

/// Classification of a report, enforcing the mechanism's representation mode.
inline Classification admit_type(const MechanismSpec& spec, const UtilityFunction& type,
                                 std::size_t agent, std::size_t type_index = 0) {
  if (type.alternatives() != spec.alternatives()) {
    throw Error(ErrorCode::AlternativeMismatch, "type alternatives differ from the mechanism's");
  }
  Classification cls = classify(type);
  if (spec.mode() == RepresentationMode::Full) {
    if (cls.kind != Classification::Kind::RepresentedQL) {
      throw TypeError(ErrorCode::TypeNotRepresentable,
                      "type is not represented by a quasi-linear utility", agent, type_index);
    }
  } else if (!cls.pos_representable()) {
    throw TypeError(ErrorCode::TypeNotPosRepresentable,
                    "type is not pos-represented by a quasi-linear utility", agent, type_index);
  }
  return cls;
}

inline Outcome run(const MechanismSpec& spec, std::span<const UtilityFunction> types) {
  if (types.size() != spec.agent_count()) {
    throw Error(ErrorCode::InvalidSpec, "number of types does not match the number of agents");
  }
  std::vector<Valuation> profile;
  profile.reserve(types.size());
  for (std::size_t i = 0; i < types.size(); ++i) {
    profile.push_back(*admit_type(spec, types[i], i).valuation);
  }
  return run_on_valuations(spec, std::move(profile));
}

/// Pivot bound h_i <= (1 / w_i) * max_a [c_a + sum_j w_j v_j(a)] per agent,
/// on canonical valuations. An agent whose own type is represented outright
/// passes: any upward shift of its valuation still represents it, so the
/// right-hand side is unbounded. Zero-weight agents pass vacuously.
inline std::vector<bool> verify_pivot_bound_on(const MechanismSpec& spec,
                                               std::span<const Valuation> profile,
                                               std::span<const Classification::Kind> kinds) {
  detail::check_profile(spec, profile);
  std::optional<Rational> best;
  for (const std::size_t a : spec.allowed()) {
    Rational s = affine_score(spec, profile, a);
    if (!best || s > *best) best = std::move(s);
  }
  std::vector<bool> ok(profile.size(), true);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Rational& w = spec.weights()[i];
    if (w == 0 || kinds[i] == Classification::Kind::RepresentedQL) continue;
    ok[i] = pivot_value(spec, i, profile) <= *best / w;
  }
  return ok;
}

inline std::vector<bool> verify_pivot_bound(const MechanismSpec& spec,
                                            std::span<const UtilityFunction> types) {
  if (types.size() != spec.agent_count()) {
    throw Error(ErrorCode::InvalidSpec, "number of types does not match the number of agents");
  }
  std::vector<Valuation> profile;
  std::vector<Classification::Kind> kinds;
  for (std::size_t i = 0; i < types.size(); ++i) {
    auto cls = admit_type(spec, types[i], i);
    kinds.push_back(cls.kind);
    profile.push_back(std::move(*cls.valuation));
  }
  return verify_pivot_bound_on(spec, profile, kinds);
}

}  // namespace posvcg
