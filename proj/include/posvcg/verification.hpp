#pragma once

// Exhaustive desk-scale verification of mechanisms over finite type domains.

#include "posvcg/error.hpp"
#include "posvcg/mechanism.hpp"
#include "posvcg/rational.hpp"
#include "posvcg/representation.hpp"
#include "posvcg/utility.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace posvcg {

struct AgentDomain {
  std::string name;
  std::vector<UtilityFunction> types;
  std::size_t true_type = 0;
};

struct Scenario {
  AlternativeSet alternatives;
  std::vector<AgentDomain> agents;
  MechanismSpec spec;

  void validate() const {
    if (agents.size() != spec.agent_count()) {
      throw Error(ErrorCode::InvalidSpec, "scenario agents do not match the mechanism weights");
    }
    if (alternatives != spec.alternatives()) {
      throw Error(ErrorCode::AlternativeMismatch, "scenario and mechanism alternatives differ");
    }
    for (const auto& agent : agents) {
      if (agent.types.empty()) throw Error(ErrorCode::InvalidSpec, "agent '" + agent.name + "' has an empty type domain");
      if (agent.true_type >= agent.types.size()) {
        throw Error(ErrorCode::InvalidSpec, "agent '" + agent.name + "' true_type out of range");
      }
    }
  }
};

/// Monotonic evaluation counter shared by a verification pass.
class Budget {
 public:
  static constexpr std::uint64_t kDefaultCap = 1'000'000;

  explicit Budget(std::uint64_t cap = kDefaultCap) : cap_(cap) {}

  void charge(std::uint64_t amount = 1) {
    const auto used = used_.fetch_add(amount, std::memory_order_relaxed) + amount;
    if (used > cap_) {
      throw Error(ErrorCode::BudgetExceeded,
                  "evaluation budget of " + std::to_string(cap_) + " exceeded");
    }
  }

  std::uint64_t used() const noexcept { return used_.load(std::memory_order_relaxed); }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t cap_;
  std::atomic<std::uint64_t> used_{0};
};

/// Mixed-radix enumeration of type-index profiles; agent 0 varies fastest.
class ProfileGrid {
 public:
  explicit ProfileGrid(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    count_ = 1;
    for (const auto s : sizes_) count_ *= s;
  }

  std::size_t count() const noexcept { return count_; }
  std::size_t agents() const noexcept { return sizes_.size(); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  std::vector<std::size_t> decode(std::size_t index) const {
    std::vector<std::size_t> profile(sizes_.size());
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      profile[i] = index % sizes_[i];
      index /= sizes_[i];
    }
    return profile;
  }

  std::size_t encode(std::span<const std::size_t> profile) const {
    std::size_t index = 0;
    for (std::size_t i = sizes_.size(); i-- > 0;) index = index * sizes_[i] + profile[i];
    return index;
  }

  /// Index of `index` with agent i's type replaced.
  std::size_t replace(std::size_t index, std::size_t agent, std::size_t type) const {
    auto profile = decode(index);
    profile[agent] = type;
    return encode(profile);
  }

 private:
  std::vector<std::size_t> sizes_;
  std::size_t count_ = 0;
};

/// Outcome of a mechanism on every profile of a scenario.
struct OutcomeTable {
  ProfileGrid grid;
  std::vector<std::size_t> chosen;
  std::vector<std::vector<Rational>> payments;
};

namespace detail {

struct AdmittedDomain {
  std::vector<Valuation> valuations;
  std::vector<Classification::Kind> kinds;
};

inline std::vector<AdmittedDomain> admit_scenario(const Scenario& sc) {
  sc.validate();
  std::vector<AdmittedDomain> out(sc.agents.size());
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    for (std::size_t t = 0; t < sc.agents[i].types.size(); ++t) {
      auto cls = admit_type(sc.spec, sc.agents[i].types[t], i, t);
      out[i].kinds.push_back(cls.kind);
      out[i].valuations.push_back(std::move(*cls.valuation));
    }
  }
  return out;
}

inline ProfileGrid grid_of(const Scenario& sc) {
  std::vector<std::size_t> sizes;
  for (const auto& a : sc.agents) sizes.push_back(a.types.size());
  return ProfileGrid(std::move(sizes));
}

inline std::vector<Valuation> valuations_at(const std::vector<AdmittedDomain>& admitted,
                                            std::span<const std::size_t> profile) {
  std::vector<Valuation> out;
  out.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) out.push_back(admitted[i].valuations[profile[i]]);
  return out;
}

}  // namespace detail

inline OutcomeTable tabulate(const Scenario& sc, Budget& budget) {
  const auto admitted = detail::admit_scenario(sc);
  OutcomeTable table{detail::grid_of(sc), {}, {}};
  table.chosen.reserve(table.grid.count());
  table.payments.reserve(table.grid.count());
  for (std::size_t p = 0; p < table.grid.count(); ++p) {
    budget.charge();
    auto out = run_on_valuations(sc.spec, detail::valuations_at(admitted, table.grid.decode(p)));
    table.chosen.push_back(out.chosen);
    table.payments.push_back(std::move(out.payments));
  }
  return table;
}

/// Pivot bound on every profile: (profile, per-agent result) pairs.
struct PivotBoundSweep {
  bool all_hold = true;
  std::vector<std::pair<std::vector<std::size_t>, std::vector<bool>>> failures;
};

inline PivotBoundSweep verify_pivot_bound_all(const Scenario& sc, Budget& budget) {
  const auto admitted = detail::admit_scenario(sc);
  const auto grid = detail::grid_of(sc);
  PivotBoundSweep sweep;
  for (std::size_t p = 0; p < grid.count(); ++p) {
    budget.charge();
    const auto profile = grid.decode(p);
    std::vector<Classification::Kind> kinds;
    for (std::size_t i = 0; i < profile.size(); ++i) kinds.push_back(admitted[i].kinds[profile[i]]);
    auto ok = verify_pivot_bound_on(sc.spec, detail::valuations_at(admitted, profile), kinds);
    if (std::find(ok.begin(), ok.end(), false) != ok.end()) {
      sweep.all_hold = false;
      sweep.failures.emplace_back(profile, std::move(ok));
    }
  }
  return sweep;
}

struct ICViolation {
  std::size_t agent = 0;
  std::size_t true_type = 0;
  std::size_t misreport = 0;
  std::vector<std::size_t> profile;  // truthful type indices of everyone
  Bundle truthful;                   // (chosen, agent's payment)
  Bundle deviating;
};

struct ICReport {
  bool holds = true;
  std::vector<ICViolation> violations;
};

/// Every agent, every true type, every opponent profile, every misreport,
/// compared under the true type's own preference.
inline ICReport verify_ic(const Scenario& sc, Budget& budget) {
  const auto table = tabulate(sc, budget);
  const auto& grid = table.grid;
  ICReport report;
  for (std::size_t p = 0; p < grid.count(); ++p) {
    const auto profile = grid.decode(p);
    for (std::size_t i = 0; i < profile.size(); ++i) {
      const auto& truth_type = sc.agents[i].types[profile[i]];
      const Bundle truthful{table.chosen[p], table.payments[p][i]};
      for (std::size_t lie = 0; lie < grid.sizes()[i]; ++lie) {
        if (lie == profile[i]) continue;
        budget.charge();
        const std::size_t q = grid.replace(p, i, lie);
        const Bundle deviating{table.chosen[q], table.payments[q][i]};
        if (prefers(truth_type, deviating, truthful) == std::strong_ordering::greater) {
          report.violations.push_back({i, profile[i], lie, profile, truthful, deviating});
        }
      }
    }
  }
  report.holds = report.violations.empty();
  return report;
}

inline ICReport verify_ic(const Scenario& sc) {
  Budget budget;
  return verify_ic(sc, budget);
}

struct OntoReport {
  bool onto = true;
  /// First profile (canonical order) choosing each alternative, if any.
  std::vector<std::optional<std::vector<std::size_t>>> witnesses;
};

inline OntoReport verify_onto(const Scenario& sc, Budget& budget) {
  const auto table = tabulate(sc, budget);
  OntoReport report;
  report.witnesses.resize(sc.alternatives.size());
  for (std::size_t p = 0; p < table.grid.count(); ++p) {
    auto& slot = report.witnesses[table.chosen[p]];
    if (!slot) slot = table.grid.decode(p);
  }
  report.onto = std::all_of(report.witnesses.begin(), report.witnesses.end(),
                            [](const auto& w) { return w.has_value(); });
  return report;
}

inline OntoReport verify_onto(const Scenario& sc) {
  Budget budget;
  return verify_onto(sc, budget);
}

// ---------------------------------------------------------------------------
// Rules without transfers

/// Allocation rule over a finite profile grid: chosen alternative per profile
/// in ProfileGrid order.
struct AllocationGrid {
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> chosen;

  friend bool operator==(const AllocationGrid&, const AllocationGrid&) = default;
};

using ValuationDomains = std::vector<std::vector<Valuation>>;

/// Agents d whose valuation's argmax contains the chosen alternative on every
/// profile.
inline std::vector<std::size_t> is_dictatorial(const AllocationGrid& table,
                                               const ValuationDomains& domains) {
  ProfileGrid grid(table.sizes);
  bool shape_ok = table.sizes.size() == domains.size() && table.chosen.size() == grid.count();
  for (std::size_t i = 0; shape_ok && i < domains.size(); ++i) {
    shape_ok = domains[i].size() == table.sizes[i];
  }
  if (!shape_ok) throw Error(ErrorCode::IncompleteTable, "table does not cover the profile grid");

  std::vector<std::size_t> dictators;
  for (std::size_t d = 0; d < domains.size(); ++d) {
    bool always_top = true;
    for (std::size_t p = 0; p < grid.count() && always_top; ++p) {
      const auto& v = domains[d][grid.decode(p)[d]];
      always_top = v[table.chosen[p]] == v.max();
    }
    if (always_top) dictators.push_back(d);
  }
  return dictators;
}

/// Allocation grid of a mechanism run directly on valuation domains.
inline AllocationGrid allocation_of(const MechanismSpec& spec, const ValuationDomains& domains) {
  AllocationGrid table;
  for (const auto& d : domains) table.sizes.push_back(d.size());
  ProfileGrid grid(table.sizes);
  for (std::size_t p = 0; p < grid.count(); ++p) {
    const auto profile = grid.decode(p);
    std::vector<Valuation> vals;
    for (std::size_t i = 0; i < profile.size(); ++i) vals.push_back(domains[i][profile[i]]);
    table.chosen.push_back(choose_alternative(spec, vals));
  }
  return table;
}

struct EnumerationLimits {
  std::size_t max_profiles = 40;
  std::uint64_t node_cap = 50'000'000;
};

/// Every allocation table that is onto and incentive compatible at zero
/// payments: v_t(x(t, rest)) >= v_t(x(t', rest)) for every agent, true type t
/// and misreport t'. Depth-first over profiles with each new cell checked
/// against all assigned cells that differ from it in one agent's type.
inline std::vector<AllocationGrid> enumerate_ic_onto_no_transfer(
    const AlternativeSet& alternatives, const ValuationDomains& domains,
    EnumerationLimits limits = {}) {
  std::vector<std::size_t> sizes;
  for (const auto& d : domains) {
    if (d.empty()) throw Error(ErrorCode::InvalidSpec, "empty valuation domain");
    for (const auto& v : d) {
      if (v.alternatives() != alternatives) {
        throw Error(ErrorCode::AlternativeMismatch, "domain valuation uses different alternatives");
      }
    }
    sizes.push_back(d.size());
  }
  const ProfileGrid grid(sizes);
  if (grid.count() > limits.max_profiles) {
    throw Error(ErrorCode::BudgetExceeded, "profile grid of " + std::to_string(grid.count()) +
                                               " exceeds the enumeration guard of " +
                                               std::to_string(limits.max_profiles));
  }
  const std::size_t m = alternatives.size();
  const std::size_t cells = grid.count();

  // neighbours[p]: (agent, q) for assigned-earlier cells q differing from p in
  // exactly that agent's coordinate.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> neighbours(cells);
  for (std::size_t p = 0; p < cells; ++p) {
    const auto profile = grid.decode(p);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      for (std::size_t t = 0; t < sizes[i]; ++t) {
        if (t == profile[i]) continue;
        const std::size_t q = grid.replace(p, i, t);
        if (q < p) neighbours[p].emplace_back(i, q);
      }
    }
  }
  std::vector<std::vector<std::size_t>> profiles(cells);
  for (std::size_t p = 0; p < cells; ++p) profiles[p] = grid.decode(p);

  std::vector<std::size_t> assignment(cells, 0);
  std::vector<std::size_t> used(m, 0);
  std::size_t distinct = 0;
  std::uint64_t nodes = 0;
  std::vector<AllocationGrid> found;

  auto consistent = [&](std::size_t p, std::size_t x) {
    for (const auto& [i, q] : neighbours[p]) {
      const auto& truth = domains[i][profiles[p][i]];
      const auto& other = domains[i][profiles[q][i]];
      const std::size_t y = assignment[q];
      if (truth[x] < truth[y]) return false;  // at p, reporting q's type pays off
      if (other[y] < other[x]) return false;  // at q, reporting p's type pays off
    }
    return true;
  };

  auto dfs = [&](auto&& self, std::size_t p) -> void {
    if (++nodes > limits.node_cap) {
      throw Error(ErrorCode::BudgetExceeded, "enumeration node cap exceeded");
    }
    if (m - distinct > cells - p) return;  // onto is out of reach
    if (p == cells) {
      found.push_back({sizes, assignment});
      return;
    }
    for (std::size_t x = 0; x < m; ++x) {
      if (!consistent(p, x)) continue;
      assignment[p] = x;
      if (used[x]++ == 0) ++distinct;
      self(self, p + 1);
      if (--used[x] == 0) --distinct;
    }
  };
  dfs(dfs, 0);
  return found;
}

}  // namespace posvcg
