#pragma once

// Recovering affine-maximizer parameters (w, c) from an observed allocation
// table by exact linear feasibility.
//
// Unknowns: w_1..w_{n-1} (w_n = 1 - sum) and c_2..c_m (c_1 = 0 fixes the
// common shift of all costs). Every observation contributes
// score(chosen) >= score(b) for each other alternative b. Fourier-Motzkin
// projects the variables out one at a time; back substitution then takes the
// midpoint of each interval, so a full-dimensional feasible region yields an
// interior point where every strict preference stays strict.

#include "posvcg/error.hpp"
#include "posvcg/rational.hpp"
#include "posvcg/utility.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace posvcg {

struct Observation {
  std::vector<Valuation> profile;
  std::size_t chosen = 0;
};

class AllocationTable {
 public:
  AllocationTable(AlternativeSet alternatives, std::vector<Observation> observations)
      : alternatives_(std::move(alternatives)), observations_(std::move(observations)) {
    if (observations_.empty()) throw Error(ErrorCode::EmptyTable, "allocation table has no observations");
    const std::size_t n = observations_.front().profile.size();
    if (n == 0) throw Error(ErrorCode::InvalidSpec, "observation has no agents");
    for (const auto& row : observations_) {
      if (row.profile.size() != n) throw Error(ErrorCode::InvalidSpec, "observations disagree on the number of agents");
      if (row.chosen >= alternatives_.size()) throw Error(ErrorCode::UnknownAlternative, "chosen alternative out of range");
      for (const auto& v : row.profile) {
        if (v.alternatives() != alternatives_) {
          throw Error(ErrorCode::AlternativeMismatch, "observation valuation uses different alternatives");
        }
      }
    }
  }

  const AlternativeSet& alternatives() const noexcept { return alternatives_; }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  std::size_t agent_count() const { return observations_.front().profile.size(); }

 private:
  AlternativeSet alternatives_;
  std::vector<Observation> observations_;
};

struct AffineFit {
  AlternativeSet alternatives;
  std::vector<Rational> weights;
  std::vector<Rational> costs;
  Rational agreement;
};

inline Rational affine_score(const std::vector<Rational>& weights, const std::vector<Rational>& costs,
                             const std::vector<Valuation>& profile, std::size_t a) {
  Rational s = costs[a];
  for (std::size_t i = 0; i < profile.size(); ++i) s += weights[i] * profile[i][a];
  return s;
}

/// Fraction of rows whose observed choice lies in the fitted argmax set.
inline Rational predict(const AffineFit& fit, const AllocationTable& table) {
  if (fit.alternatives != table.alternatives()) {
    throw Error(ErrorCode::AlternativeMismatch, "fit and table use different alternatives");
  }
  if (fit.weights.size() != table.agent_count()) {
    throw Error(ErrorCode::AlternativeMismatch, "fit and table have different numbers of agents");
  }
  std::size_t hits = 0;
  for (const auto& row : table.observations()) {
    const Rational chosen = affine_score(fit.weights, fit.costs, row.profile, row.chosen);
    bool in_argmax = true;
    for (std::size_t b = 0; b < table.alternatives().size() && in_argmax; ++b) {
      in_argmax = affine_score(fit.weights, fit.costs, row.profile, b) <= chosen;
    }
    if (in_argmax) ++hits;
  }
  return Rational(Integer(hits), Integer(table.observations().size()));
}

namespace fm {

/// sum_k coeffs[k] * x_k + constant >= 0, tagged with the originating input rows.
struct Constraint {
  std::vector<Rational> coeffs;
  Rational constant;
  boost::dynamic_bitset<> origin;
  boost::dynamic_bitset<> touched;  // variables appearing in any origin row
};

using System = std::vector<Constraint>;

// Scale so the first nonzero coefficient has magnitude one.
inline void normalize(Constraint& c) {
  auto it = std::find_if(c.coeffs.begin(), c.coeffs.end(), [](const Rational& r) { return r != 0; });
  if (it == c.coeffs.end()) return;
  const Rational scale = abs(*it);
  if (scale == 1) return;
  for (auto& r : c.coeffs) r /= scale;
  c.constant /= scale;
}

/// Drops tautologies and duplicate directions (keeping the tightest).
/// Returns false when a constant constraint is violated.
inline bool tidy(System& system) {
  std::map<std::vector<Rational>, std::size_t> seen;
  System kept;
  for (auto& c : system) {
    normalize(c);
    const bool all_zero = std::all_of(c.coeffs.begin(), c.coeffs.end(),
                                      [](const Rational& r) { return r == 0; });
    if (all_zero) {
      if (c.constant < 0) return false;
      continue;
    }
    auto [it, inserted] = seen.try_emplace(c.coeffs, kept.size());
    if (inserted) {
      kept.push_back(std::move(c));
    } else if (c.constant < kept[it->second].constant) {
      kept[it->second] = std::move(c);
    }
  }
  system = std::move(kept);
  return true;
}

inline boost::dynamic_bitset<> support(const Constraint& c) {
  boost::dynamic_bitset<> s(c.coeffs.size());
  for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
    if (c.coeffs[k] != 0) s.set(k);
  }
  return s;
}

// Drops rows whose origin strictly contains another row's origin.
inline void drop_origin_supersets(System& system) {
  std::sort(system.begin(), system.end(),
            [](const Constraint& a, const Constraint& b) { return a.origin.count() < b.origin.count(); });
  System kept;
  for (auto& c : system) {
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](const Constraint& k) {
      return k.origin != c.origin && k.origin.is_subset_of(c.origin);
    });
    if (!dominated) kept.push_back(std::move(c));
  }
  system = std::move(kept);
}

/// Projects out variable `var`. A combined row built from more input rows
/// than one plus the number of variables it has effectively eliminated is
/// redundant (Imbert), as is one whose origin contains another's (Kohler).
inline System eliminate(const System& system, std::size_t var) {
  System pos, neg, out;
  for (const auto& c : system) {
    const int s = c.coeffs[var].sign();
    if (s > 0) pos.push_back(c);
    else if (s < 0) neg.push_back(c);
    else out.push_back(c);
  }
  for (const auto& p : pos) {
    for (const auto& q : neg) {
      auto origin = p.origin | q.origin;
      auto touched = p.touched | q.touched;
      const Rational a = p.coeffs[var];
      const Rational b = -q.coeffs[var];
      Constraint c;
      c.coeffs.resize(p.coeffs.size());
      for (std::size_t k = 0; k < p.coeffs.size(); ++k) c.coeffs[k] = b * p.coeffs[k] + a * q.coeffs[k];
      c.coeffs[var] = 0;
      const std::size_t gone = (touched - support(c)).count();
      if (origin.count() > gone + 1) continue;
      c.constant = b * p.constant + a * q.constant;
      c.origin = std::move(origin);
      c.touched = std::move(touched);
      out.push_back(std::move(c));
    }
  }
  drop_origin_supersets(out);
  return out;
}

/// Bounds on `var` implied by `system` once every other variable that appears
/// is fixed in `values`.
inline std::pair<std::optional<Rational>, std::optional<Rational>> bounds(
    const System& system, std::size_t var, const std::vector<std::optional<Rational>>& values) {
  std::optional<Rational> lo, hi;
  for (const auto& c : system) {
    const Rational& a = c.coeffs[var];
    if (a == 0) continue;
    Rational rest = c.constant;
    for (std::size_t k = 0; k < c.coeffs.size(); ++k) {
      if (k == var || c.coeffs[k] == 0) continue;
      rest += c.coeffs[k] * *values[k];
    }
    Rational bound = -rest / a;
    if (a > 0) {
      if (!lo || bound > *lo) lo = std::move(bound);
    } else {
      if (!hi || bound < *hi) hi = std::move(bound);
    }
  }
  return {lo, hi};
}

}  // namespace fm

struct FitOptions {
  std::size_t max_variables = 12;  // guard on n + m
};

/// Any (w, c) under which every observed choice is an affine maximizer, or
/// nullopt when no such parameters exist.
inline std::optional<AffineFit> fit_affine_maximizer(const AllocationTable& table,
                                                     FitOptions options = {}) {
  const std::size_t n = table.agent_count();
  const std::size_t m = table.alternatives().size();
  if (n + m > options.max_variables) {
    throw Error(ErrorCode::TooManyVariables, "n + m = " + std::to_string(n + m) +
                                                 " exceeds the elimination guard of " +
                                                 std::to_string(options.max_variables));
  }
  // Layout: [w_0 .. w_{n-2}] [c_1 .. c_{m-1}]
  const std::size_t nw = n - 1;
  const std::size_t nc = m - 1;
  const std::size_t nvars = nw + nc;
  auto c_var = [&](std::size_t a) -> std::optional<std::size_t> {
    if (a == 0) return std::nullopt;
    return nw + a - 1;
  };

  std::vector<fm::Constraint> rows;
  auto add = [&](std::vector<Rational> coeffs, Rational constant) {
    rows.push_back({std::move(coeffs), std::move(constant), {}, {}});
  };
  for (std::size_t i = 0; i < nw; ++i) {
    std::vector<Rational> coeffs(nvars, Rational(0));
    coeffs[i] = 1;
    add(std::move(coeffs), Rational(0));
  }
  if (nw > 0) {
    std::vector<Rational> coeffs(nvars, Rational(0));
    for (std::size_t i = 0; i < nw; ++i) coeffs[i] = -1;
    add(std::move(coeffs), Rational(1));
  }
  for (const auto& row : table.observations()) {
    const std::size_t a = row.chosen;
    for (std::size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      std::vector<Rational> coeffs(nvars, Rational(0));
      const Rational last = row.profile[n - 1][a] - row.profile[n - 1][b];
      for (std::size_t i = 0; i < nw; ++i) {
        coeffs[i] = row.profile[i][a] - row.profile[i][b] - last;
      }
      if (auto k = c_var(a)) coeffs[*k] += 1;
      if (auto k = c_var(b)) coeffs[*k] -= 1;
      add(std::move(coeffs), last);
    }
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r].origin.resize(rows.size());
    rows[r].origin.set(r);
    rows[r].touched = fm::support(rows[r]);
  }

  std::vector<fm::System> stages;
  stages.push_back(std::move(rows));
  if (!fm::tidy(stages.back())) return std::nullopt;

  std::vector<std::size_t> order;
  std::vector<bool> remaining(nvars, true);
  for (std::size_t step = 0; step < nvars; ++step) {
    // Cheapest variable: fewest new combinations.
    std::size_t best_var = 0;
    std::optional<long long> best_cost;
    for (std::size_t v = 0; v < nvars; ++v) {
      if (!remaining[v]) continue;
      long long pos = 0, neg = 0;
      for (const auto& c : stages.back()) {
        const int s = c.coeffs[v].sign();
        pos += s > 0;
        neg += s < 0;
      }
      const long long cost = pos * neg - pos - neg;
      if (!best_cost || cost < *best_cost) {
        best_cost = cost;
        best_var = v;
      }
    }
    remaining[best_var] = false;
    order.push_back(best_var);
    auto next = fm::eliminate(stages.back(), best_var);
    if (!fm::tidy(next)) return std::nullopt;
    stages.push_back(std::move(next));
  }

  std::vector<std::optional<Rational>> values(nvars);
  for (std::size_t k = order.size(); k-- > 0;) {
    const std::size_t var = order[k];
    auto [lo, hi] = fm::bounds(stages[k], var, values);
    if (lo && hi) {
      values[var] = (*lo + *hi) / 2;
    } else if (lo) {
      values[var] = *lo + 1;
    } else if (hi) {
      values[var] = *hi - 1;
    } else {
      values[var] = Rational(0);
    }
  }

  AffineFit fit{table.alternatives(), {}, {}, Rational(0)};
  Rational last_weight(1);
  for (std::size_t i = 0; i < nw; ++i) {
    fit.weights.push_back(*values[i]);
    last_weight -= *values[i];
  }
  fit.weights.push_back(last_weight);
  fit.costs.push_back(Rational(0));
  for (std::size_t a = 1; a < m; ++a) fit.costs.push_back(*values[*c_var(a)]);
  fit.agreement = predict(fit, table);
  return fit;
}

}  // namespace posvcg
