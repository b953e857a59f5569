#include "posvcg/roberts_fit.hpp"
#include "posvcg/verification.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace posvcg;
using namespace testing_support;

namespace {

UtilityFunction ql(const AlternativeSet& alts, std::vector<Rational> v) { return ql_from_valuation(Valuation(alts, std::move(v))); }

Scenario clarke_3x3() {
  const auto alts = abc();
  std::vector<AgentDomain> agents{
      {"agent1", {ql(alts, {R(3), R(1), R(0)}), ql(alts, {R(0), R(2), R(1)}), ql(alts, {R(1), R(0), R(5, 2)})}, 0},
      {"agent2", {ql(alts, {R(0), R(1), R(2)}), ql(alts, {R(2), R(0), R(1)}), ql(alts, {R(1), R(3), R(0)})}, 1}};
  return {alts, agents, MechanismSpec::unrestricted(alts, {R(1, 2), R(1, 2)}, ClarkePivot{})};
}

// Bound-violating single-agent scenario over pos-only types: the constant
// pivot 6 exceeds max v = 3 for w, pushing w's outcome below its threshold.
Scenario bound_violation() {
  const auto alts = abc();
  std::vector<AgentDomain> agents{{"agent1", {w_example(), ql(alts, {R(3), R(0), R(0)})}, 0}};
  return {alts, agents, MechanismSpec::unrestricted(alts, {R(1)}, ConstantPivot{{R(6)}})};
}

// Independent IC oracle: re-run the mechanism from full types for every
// profile and compare with prefers() under the true type.
std::size_t oracle_violation_count(const Scenario& sc) {
  std::vector<std::size_t> sizes;
  for (const auto& a : sc.agents) sizes.push_back(a.types.size());
  std::size_t total = 1;
  for (auto s : sizes) total *= s;
  auto decode = [&](std::size_t idx) {
    std::vector<std::size_t> p;
    for (auto s : sizes) {
      p.push_back(idx % s);
      idx /= s;
    }
    return p;
  };
  auto outcome = [&](const std::vector<std::size_t>& p) {
    std::vector<UtilityFunction> types;
    for (std::size_t i = 0; i < p.size(); ++i) types.push_back(sc.agents[i].types[p[i]]);
    return run(sc.spec, types);
  };
  std::size_t count = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto p = decode(idx);
    const auto truth = outcome(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t lie = 0; lie < sizes[i]; ++lie) {
        if (lie == p[i]) continue;
        auto q = p;
        q[i] = lie;
        const auto dev = outcome(q);
        const auto& u = sc.agents[i].types[p[i]];
        if (prefers(u, Bundle{dev.chosen, dev.payments[i]}, Bundle{truth.chosen, truth.payments[i]}) ==
            std::strong_ordering::greater) {
          ++count;
        }
      }
    }
  }
  return count;
}

}  // namespace

TEST(ProfileGridTest, MixedRadixAgentZeroFastest) {
  const ProfileGrid g({2, 3});
  EXPECT_EQ(g.count(), 6u);
  EXPECT_EQ(g.decode(1), (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(g.decode(2), (std::vector<std::size_t>{0, 1}));
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(g.encode(g.decode(i)), i);
  EXPECT_EQ(g.replace(5, 0, 0), 4u);
}

TEST(VerifyIc, ClarkeQuasiLinearHolds) {
  const auto rep = verify_ic(clarke_3x3());
  EXPECT_TRUE(rep.holds);
  EXPECT_TRUE(rep.violations.empty());
}

TEST(VerifyIc, ConstantPivotAboveBoundFails) {
  const auto sc = bound_violation();
  Budget b;
  EXPECT_FALSE(verify_pivot_bound_all(sc, b).all_hold);
  const auto rep = verify_ic(sc);
  EXPECT_FALSE(rep.holds);
  ASSERT_FALSE(rep.violations.empty());
  EXPECT_EQ(rep.violations.size(), oracle_violation_count(sc));
  for (const auto& v : rep.violations) {
    const auto& truth = sc.agents[v.agent].types[v.true_type];
    EXPECT_EQ(prefers(truth, v.deviating, v.truthful), std::strong_ordering::greater);
    // Re-run both sides from full types.
    std::vector<UtilityFunction> honest, lying;
    for (std::size_t i = 0; i < v.profile.size(); ++i) {
      honest.push_back(sc.agents[i].types[v.profile[i]]);
      lying.push_back(sc.agents[i].types[i == v.agent ? v.misreport : v.profile[i]]);
    }
    const auto a = run(sc.spec, honest);
    const auto d = run(sc.spec, lying);
    EXPECT_EQ(a.chosen, v.truthful.alternative);
    EXPECT_EQ(a.payments[v.agent], v.truthful.payment);
    EXPECT_EQ(d.chosen, v.deviating.alternative);
    EXPECT_EQ(d.payments[v.agent], v.deviating.payment);
  }
}

TEST(VerifyIc, QuasiLinearSurvivesAnyConstantPivot) {
  // Groves payments keep quasi-linear agents truthful whatever h is.
  auto sc = clarke_3x3();
  sc.spec = sc.spec.with_pivot(ConstantPivot{{R(100), R(-7)}});
  EXPECT_TRUE(verify_ic(sc).holds);
}

TEST(VerifyIc, SingleAgentZeroPivot) {
  const auto alts = abc();
  std::vector<AgentDomain> agents{
      {"solo", {ql(alts, {R(0), R(1), R(2)}), ql(alts, {R(2), R(0), R(1)}), w_example()}, 0}};
  const Scenario sc{alts, agents, MechanismSpec::unrestricted(alts, {R(1)}, ZeroPivot{})};
  EXPECT_TRUE(verify_ic(sc).holds);
  EXPECT_EQ(oracle_violation_count(sc), 0u);
}

TEST(VerifyIc, BudgetExceeded) {
  Budget tiny(3);
  try {
    (void)verify_ic(clarke_3x3(), tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
  }
}

TEST(VerifyIc, InvalidScenarioTypeReportsAgentAndIndex) {
  auto sc = clarke_3x3();
  sc.spec = sc.spec.with_mode(RepresentationMode::Full);
  sc.agents[1].types.push_back(w_example());
  try {
    (void)verify_ic(sc);
    FAIL();
  } catch (const TypeError& e) {
    EXPECT_EQ(e.code(), ErrorCode::TypeNotRepresentable);
    EXPECT_EQ(e.agent(), 1u);
    EXPECT_EQ(e.type_index(), 3u);
  }
}

TEST(VerifyOnto, DictatorRealizesEverything) {
  const auto alts = abc();
  std::vector<AgentDomain> agents{
      {"d", {ql(alts, {R(1), R(0), R(0)}), ql(alts, {R(0), R(1), R(0)}), ql(alts, {R(0), R(0), R(1)})}, 0},
      {"x", {ql(alts, {R(5), R(9), R(0)})}, 0}};
  const Scenario sc{alts, agents, MechanismSpec::unrestricted(alts, {R(1), R(0)}, ZeroPivot{})};
  const auto rep = verify_onto(sc);
  EXPECT_TRUE(rep.onto);
  for (const auto& w : rep.witnesses) EXPECT_TRUE(w);
}

TEST(VerifyOnto, RestrictedAllowedSetIsNotOnto) {
  const auto alts = abc();
  std::vector<AgentDomain> agents{
      {"d", {ql(alts, {R(2), R(0), R(0)}), ql(alts, {R(0), R(2), R(0)}), ql(alts, {R(0), R(0), R(2)})}, 0}};
  const Scenario sc{alts, agents, MechanismSpec(alts, {0, 1}, {R(1)}, {R(0), R(0), R(0)}, ZeroPivot{})};
  const auto rep = verify_onto(sc);
  EXPECT_FALSE(rep.onto);
  EXPECT_TRUE(rep.witnesses[0]);
  EXPECT_TRUE(rep.witnesses[1]);
  EXPECT_FALSE(rep.witnesses[2]);
}

TEST(VerifyOnto, ClarkeScenarioHasThreeWitnesses) {
  const auto sc = clarke_3x3();
  const auto rep = verify_onto(sc);
  EXPECT_TRUE(rep.onto);
  ASSERT_EQ(rep.witnesses.size(), 3u);
  for (std::size_t a = 0; a < 3; ++a) {
    ASSERT_TRUE(rep.witnesses[a]);
    std::vector<UtilityFunction> types;
    for (std::size_t i = 0; i < 2; ++i) types.push_back(sc.agents[i].types[(*rep.witnesses[a])[i]]);
    EXPECT_EQ(run(sc.spec, types).chosen, a);
  }
}

TEST(Dictatorial, Examples) {
  const auto alts = abc();
  const ValuationDomains domains{strict_rankings(alts), strict_rankings(alts)};
  const auto spec = MechanismSpec::unrestricted(alts, {R(1), R(0)}, ZeroPivot{});
  EXPECT_EQ(is_dictatorial(allocation_of(spec, domains), domains), (std::vector<std::size_t>{0}));

  AllocationGrid constant{{6, 6}, std::vector<std::size_t>(36, 1)};
  EXPECT_TRUE(is_dictatorial(constant, domains).empty());

  const ValuationDomains single{strict_rankings(alts)};
  const auto solo = MechanismSpec::unrestricted(alts, {R(1)}, ZeroPivot{});
  EXPECT_EQ(is_dictatorial(allocation_of(solo, single), single), (std::vector<std::size_t>{0}));
}

TEST(Dictatorial, IncompleteTable) {
  const auto alts = abc();
  const ValuationDomains domains{strict_rankings(alts)};
  AllocationGrid bad{{6}, std::vector<std::size_t>(5, 0)};
  try {
    (void)is_dictatorial(bad, domains);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompleteTable);
  }
}

// Brute force over every map from the six rankings to {a,b,c}.
static std::vector<std::vector<std::size_t>> brute_force_single_agent(const std::vector<Valuation>& domain) {
  std::vector<std::vector<std::size_t>> found;
  const std::size_t n = domain.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::size_t> table(n);
    std::size_t c = code;
    for (std::size_t k = 0; k < n; ++k) {
      table[k] = c % 3;
      c /= 3;
    }
    std::set<std::size_t> image(table.begin(), table.end());
    if (image.size() != 3) continue;
    bool ic = true;
    for (std::size_t t = 0; t < n && ic; ++t) {
      for (std::size_t l = 0; l < n && ic; ++l) ic = domain[t][table[t]] >= domain[t][table[l]];
    }
    if (ic) found.push_back(table);
  }
  return found;
}

TEST(Enumerate, SingleAgentMatchesBruteForce) {
  const auto alts = abc();
  const auto domain = strict_rankings(alts);
  const auto tables = enumerate_ic_onto_no_transfer(alts, {domain});
  const auto oracle = brute_force_single_agent(domain);
  ASSERT_EQ(oracle.size(), 1u);
  ASSERT_EQ(tables.size(), 1u);
  EXPECT_EQ(tables[0].chosen, oracle[0]);
  for (std::size_t t = 0; t < domain.size(); ++t) EXPECT_EQ(domain[t][tables[0].chosen[t]], domain[t].max());
}

TEST(Enumerate, SingletonDomainsCannotBeOnto) {
  const AlternativeSet alts({"a", "b"});
  const ValuationDomains domains{{Valuation(alts, {R(1), R(0)})}, {Valuation(alts, {R(0), R(1)})}};
  EXPECT_TRUE(enumerate_ic_onto_no_transfer(alts, domains).empty());
}

TEST(Enumerate, TwoAgentsFullRankingsGiveTwoDictators) {
  const auto alts = abc();
  const ValuationDomains domains{strict_rankings(alts), strict_rankings(alts)};
  const auto tables = enumerate_ic_onto_no_transfer(alts, domains);
  ASSERT_EQ(tables.size(), 2u);
  std::set<std::size_t> dictators;
  for (const auto& t : tables) {
    const auto d = is_dictatorial(t, domains);
    ASSERT_EQ(d.size(), 1u);
    dictators.insert(d[0]);
  }
  EXPECT_EQ(dictators, (std::set<std::size_t>{0, 1}));
}

TEST(Enumerate, Guards) {
  const auto alts = abc();
  const ValuationDomains big{strict_rankings(alts), strict_rankings(alts), strict_rankings(alts)};
  try {
    (void)enumerate_ic_onto_no_transfer(alts, big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
  }
  const ValuationDomains two{strict_rankings(alts), strict_rankings(alts)};
  EnumerationLimits tight;
  tight.node_cap = 10;
  EXPECT_THROW((void)enumerate_ic_onto_no_transfer(alts, two, tight), Error);
}

namespace {

Scenario random_scenario(Rng& rng, bool exceed) {
  const std::size_t n = 2;
  const std::size_t m = 3;
  const auto alts = alternatives(m);
  std::vector<Rational> w{rng.positive(3, 1), rng.positive(3, 1)};
  const Rational total = w[0] + w[1];
  for (auto& x : w) x /= total;
  std::vector<AgentDomain> agents;
  for (std::size_t i = 0; i < n; ++i) {
    AgentDomain d{"agent" + std::to_string(i), {}, 0};
    const std::size_t k = 2 + rng.index(2);
    for (std::size_t t = 0; t < k; ++t) {
      d.types.push_back(random_posrep_type(rng, random_valuation(rng, alts, 0, 4), rng.rational(-2, 2)));
    }
    agents.push_back(std::move(d));
  }
  std::vector<Rational> h{rng.rational(-4, 0), rng.rational(-4, 0)};
  if (exceed) h[rng.index(2)] = rng.rational(8, 14);
  return {alts, agents, MechanismSpec::unrestricted(alts, w, ConstantPivot{h})};
}

}  // namespace

TEST(VerificationProperty, BoundOnAllProfilesImpliesIc) {
  Rng rng(51);
  int checked = 0;
  for (int iter = 0; iter < 40; ++iter) {
    const auto sc = random_scenario(rng, false);
    Budget b;
    if (!verify_pivot_bound_all(sc, b).all_hold) continue;
    ++checked;
    const auto rep = verify_ic(sc);
    EXPECT_TRUE(rep.holds);
    EXPECT_EQ(oracle_violation_count(sc), 0u);
  }
  EXPECT_GT(checked, 20);
}

TEST(VerificationProperty, ViolationsMatchIndependentOracle) {
  Rng rng(52);
  for (int iter = 0; iter < 30; ++iter) {
    const auto sc = random_scenario(rng, rng.coin());
    const auto rep = verify_ic(sc);
    EXPECT_EQ(rep.violations.size(), oracle_violation_count(sc));
    EXPECT_EQ(rep.holds, rep.violations.empty());
  }
}

TEST(VerificationProperty, OntoTablesAreAffineMaximizers) {
  Rng rng(53);
  const auto alts = abc();
  int onto = 0;
  for (int iter = 0; iter < 20; ++iter) {
    const Rational w0 = rng.rational(0, 1, 4);
    const std::vector<Rational> w{w0, 1 - w0};
    const std::vector<Rational> c{R(0), rng.rational(-1, 1, 2), rng.rational(-1, 1, 2)};
    const MechanismSpec spec(alts, {0, 1, 2}, w, c, ZeroPivot{});
    ValuationDomains domains(2);
    for (auto& d : domains) {
      for (int k = 0; k < 5; ++k) d.push_back(random_valuation(rng, alts, 0, 6));
    }
    const auto grid = allocation_of(spec, domains);
    const ProfileGrid pg(grid.sizes);
    std::vector<Observation> rows;
    for (std::size_t idx = 0; idx < pg.count(); ++idx) {
      const auto p = pg.decode(idx);
      rows.push_back({{domains[0][p[0]], domains[1][p[1]]}, grid.chosen[idx]});
    }
    std::set<std::size_t> image(grid.chosen.begin(), grid.chosen.end());
    onto += image.size() == 3;
    const auto fit = fit_affine_maximizer(AllocationTable(alts, rows));
    ASSERT_TRUE(fit);
    EXPECT_EQ(fit->agreement, R(1));
  }
  EXPECT_GT(onto, 5);
}
