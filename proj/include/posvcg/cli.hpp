#pragma once

// Command implementations behind the posvcg executable. Each command takes
// the raw input document and returns a report plus an exit status:
// 0 success or property holds, 1 input error, 2 property verified false.

#include "posvcg/io.hpp"
#include "posvcg/representation.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace posvcg::cli {

using io::Json;

inline constexpr int kSchemaVersion = 1;

enum Exit : int { kOk = 0, kInputError = 1, kVerifiedFalse = 2 };

struct Options {
  std::optional<std::uint64_t> budget;
  std::optional<RepresentationMode> mode;
};

struct CommandResult {
  int exit_code = kOk;
  Json report;
};

namespace detail {

using Sorted = nlohmann::json;

// nlohmann::json keeps object keys sorted; copying into an ordered_json
// freezes that order.
inline Json freeze(const Sorted& j) {
  if (j.is_object()) {
    Json out = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = freeze(it.value());
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& e : j) out.push_back(freeze(e));
    return out;
  }
  return Json::parse(j.dump());
}

inline Sorted rat(const Rational& r) { return to_string(r); }

inline Sorted valuation(const Valuation& v) {
  Sorted out = Sorted::object();
  for (std::size_t a = 0; a < v.size(); ++a) out[v.alternatives().name(a)] = rat(v[a]);
  return out;
}

inline std::string_view order_name(std::strong_ordering o) {
  if (o == std::strong_ordering::greater) return "greater";
  if (o == std::strong_ordering::less) return "less";
  return "equal";
}

inline Json report(std::string_view command, const Json& input, const Sorted& result) {
  Sorted top;
  top["command"] = command;
  top["input"] = Sorted::parse(input.dump());
  top["result"] = result;
  top["schema_version"] = kSchemaVersion;
  return freeze(top);
}

inline Sorted error_object(const Error& e, const std::vector<std::string>* agent_names) {
  Sorted err;
  err["code"] = code_name(e.code());
  err["message"] = e.what();
  if (const auto* te = dynamic_cast<const TypeError*>(&e)) {
    err["agent"] = te->agent();
    if (agent_names && te->agent() < agent_names->size()) err["agent_name"] = (*agent_names)[te->agent()];
    if (e.code() != ErrorCode::ZeroWeightAgent) err["type_index"] = te->type_index();
  }
  return err;
}

inline Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

inline std::vector<std::string> agent_names(const Scenario& sc) {
  std::vector<std::string> out;
  for (const auto& a : sc.agents) out.push_back(a.name);
  return out;
}

inline Scenario load_scenario(const Json& input, const Options& opts) {
  Scenario sc = io::scenario_from_json(input);
  if (opts.mode) sc.spec = sc.spec.with_mode(*opts.mode);
  return sc;
}

inline Sorted bundle(const AlternativeSet& alts, const Bundle& b, const UtilityFunction& u) {
  Sorted out;
  out["alternative"] = alts.name(b.alternative);
  out["payment"] = rat(b.payment);
  out["utility"] = rat(u.eval(b));
  return out;
}

inline constexpr std::size_t kMaxListedWitnesses = 25;

inline Sorted conditions(const ConditionReport& rep, const AlternativeSet& alts) {
  Sorted out;
  out["mode"] = rep.mode == ConditionMode::Full ? "full" : "positive";
  out["all_passed"] = rep.all_passed();
  if (rep.reference) {
    Sorted ref;
    ref["alternative"] = alts.name(rep.reference->alternative);
    ref["payment"] = rat(rep.reference->payment);
    out["reference"] = ref;
  } else {
    out["reference"] = nullptr;
  }
  Sorted list = Sorted::array();
  for (const auto& c : rep.conditions) {
    Sorted item;
    item["name"] = c.name;
    item["passed"] = c.passed;
    item["vacuous"] = c.vacuous;
    if (!c.note.empty()) item["note"] = c.note;
    Sorted unbounded = Sorted::array();
    for (auto a : c.unbounded_failures) unbounded.push_back(alts.name(a));
    item["unbounded_failures"] = unbounded;
    Sorted witnesses = Sorted::array();
    item["shift_witness_count"] = c.shift_witnesses.size();
    for (const auto& w : c.shift_witnesses) {
      if (witnesses.size() == kMaxListedWitnesses) break;
      Sorted wj;
      wj["x"] = alts.name(w.x);
      wj["y"] = alts.name(w.y);
      wj["z_x"] = rat(w.z_x);
      wj["z_y"] = rat(w.z_y);
      wj["alpha"] = rat(w.alpha);
      wj["before"] = order_name(w.before);
      wj["after"] = order_name(w.after);
      witnesses.push_back(wj);
    }
    item["shift_witnesses"] = witnesses;
    list.push_back(item);
  }
  out["conditions"] = list;
  return out;
}

}  // namespace detail

/// {"alternatives", "utility", optional "grid" and "condition_mode"}.
inline CommandResult cmd_classify(const Json& input, const Options& = {}) {
  using detail::rat;
  const AlternativeSet alts = io::alternatives_from_json(io::require(input, "alternatives", "input"));
  const UtilityFunction u = io::utility_from_json(io::require(input, "utility", "input"), alts, "utility");

  detail::Sorted result;
  const auto cls = classify(u);
  result["kind"] = kind_name(cls.kind);
  if (cls.valuation) {
    result["valuation"] = detail::valuation(*cls.valuation);
    result["normalized_valuation"] = detail::valuation(normalize_min_zero(*cls.valuation));
  } else {
    result["valuation"] = nullptr;
    result["normalized_valuation"] = nullptr;
  }
  result["threshold_level"] = cls.threshold_level ? rat(*cls.threshold_level) : detail::Sorted(nullptr);

  const auto par = is_parallel(u);
  detail::Sorted pj;
  pj["is_parallel"] = par.is_parallel;
  pj["wtp"] = detail::valuation(par.wtp);
  if (par.witness) {
    const auto& w = *par.witness;
    detail::Sorted wj;
    wj["a"] = alts.name(w.alternative_a);
    wj["b"] = alts.name(w.alternative_b);
    wj["z"] = rat(w.payment);
    wj["shifted_payment"] = rat(w.payment + par.wtp[w.alternative_a] - par.wtp[w.alternative_b]);
    wj["lhs"] = rat(w.lhs);
    wj["rhs"] = rat(w.rhs);
    pj["witness"] = wj;
  } else {
    pj["witness"] = nullptr;
  }
  result["parallel"] = pj;

  if (auto it = input.find("grid"); it != input.end()) {
    if (!it->is_array() || it->empty()) throw Error(ErrorCode::EmptyGrid, "\"grid\" must be a nonempty array");
    std::vector<Rational> grid;
    for (const auto& g : *it) grid.push_back(io::rational_from_json(g, "grid"));
    ConditionMode mode = ConditionMode::Full;
    if (auto m = input.find("condition_mode"); m != input.end()) {
      if (*m == "positive") mode = ConditionMode::Positive;
      else if (*m != "full") io::fail("\"condition_mode\" must be \"full\" or \"positive\"");
    }
    result["conditions"] = detail::conditions(check_type_conditions(u, grid, mode), alts);
  }
  return {kOk, detail::report("classify", input, result)};
}

inline CommandResult cmd_run(const Json& input, const Options& opts = {}) {
  using detail::rat;
  const Scenario sc = detail::load_scenario(input, opts);
  std::vector<Valuation> profile;
  std::vector<Classification::Kind> kinds;
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    const auto& agent = sc.agents[i];
    auto cls = admit_type(sc.spec, agent.types[agent.true_type], i, agent.true_type);
    kinds.push_back(cls.kind);
    profile.push_back(std::move(*cls.valuation));
  }
  const auto bound = verify_pivot_bound_on(sc.spec, profile, kinds);
  const Outcome out = run_on_valuations(sc.spec, profile);

  detail::Sorted result;
  result["agents"] = detail::agent_names(sc);
  result["chosen"] = sc.alternatives.name(out.chosen);
  detail::Sorted payments = detail::Sorted::array();
  detail::Sorted canon = detail::Sorted::array();
  detail::Sorted kind_list = detail::Sorted::array();
  detail::Sorted bounds = detail::Sorted::array();
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    payments.push_back(rat(out.payments[i]));
    canon.push_back(detail::valuation(out.canonical_valuations[i]));
    kind_list.push_back(kind_name(kinds[i]));
    bounds.push_back(static_cast<bool>(bound[i]));
  }
  result["payments"] = payments;
  result["canonical_valuations"] = canon;
  result["classifications"] = kind_list;
  result["pivot_bound"] = bounds;
  result["representation_mode"] = io::mode_to_string(sc.spec.mode());
  return {kOk, detail::report("run", input, result)};
}

inline CommandResult cmd_verify_ic(const Json& input, const Options& opts = {}) {
  using detail::rat;
  const Scenario sc = detail::load_scenario(input, opts);
  Budget budget(opts.budget.value_or(1'000'000));
  const auto rep = verify_ic(sc, budget);
  Budget sweep_budget(opts.budget.value_or(1'000'000));
  const auto sweep = verify_pivot_bound_all(sc, sweep_budget);

  detail::Sorted result;
  result["holds"] = rep.holds;
  result["evaluations"] = budget.used();
  result["pivot_bound_all_profiles"] = sweep.all_hold;
  detail::Sorted list = detail::Sorted::array();
  for (const auto& v : rep.violations) {
    const auto& truth = sc.agents[v.agent].types[v.true_type];
    detail::Sorted vj;
    vj["agent"] = sc.agents[v.agent].name;
    vj["true_type"] = v.true_type;
    vj["misreport"] = v.misreport;
    vj["profile"] = v.profile;
    vj["truthful"] = detail::bundle(sc.alternatives, v.truthful, truth);
    vj["deviating"] = detail::bundle(sc.alternatives, v.deviating, truth);
    list.push_back(vj);
  }
  result["violations"] = list;
  return {rep.holds ? kOk : kVerifiedFalse, detail::report("verify ic", input, result)};
}

inline CommandResult cmd_verify_onto(const Json& input, const Options& opts = {}) {
  const Scenario sc = detail::load_scenario(input, opts);
  Budget budget(opts.budget.value_or(1'000'000));
  const auto rep = verify_onto(sc, budget);
  detail::Sorted result;
  result["onto"] = rep.onto;
  result["evaluations"] = budget.used();
  detail::Sorted witnesses = detail::Sorted::object();
  for (std::size_t a = 0; a < sc.alternatives.size(); ++a) {
    witnesses[sc.alternatives.name(a)] =
        rep.witnesses[a] ? detail::Sorted(*rep.witnesses[a]) : detail::Sorted(nullptr);
  }
  result["witnesses"] = witnesses;
  return {rep.onto ? kOk : kVerifiedFalse, detail::report("verify onto", input, result)};
}

inline CommandResult cmd_fit(const Json& input, const Options& = {}) {
  const AllocationTable table = io::table_from_json(input);
  FitOptions fo;
  if (auto it = input.find("max_variables"); it != input.end()) {
    if (!it->is_number_integer() || it->get<long long>() <= 0) io::fail("\"max_variables\" must be a positive integer");
    fo.max_variables = it->get<std::size_t>();
  }
  const auto fit = fit_affine_maximizer(table, fo);
  detail::Sorted result;
  result["feasible"] = fit.has_value();
  if (fit) {
    detail::Sorted w = detail::Sorted::array();
    for (const auto& x : fit->weights) w.push_back(detail::rat(x));
    result["weights"] = w;
    result["costs"] = detail::valuation(Valuation(table.alternatives(), fit->costs));
    result["agreement"] = detail::rat(fit->agreement);
  } else {
    result["weights"] = nullptr;
    result["costs"] = nullptr;
    result["agreement"] = nullptr;
  }
  return {fit ? kOk : kVerifiedFalse, detail::report("fit", input, result)};
}

/// {"alternatives", "domains": [[valuation, ...], ...], optional
/// "max_profiles", "node_cap"}. --budget overrides the node cap.
inline CommandResult cmd_enumerate(const Json& input, const Options& opts = {}) {
  const AlternativeSet alts = io::alternatives_from_json(io::require(input, "alternatives", "input"));
  const auto& dj = io::require(input, "domains", "input");
  if (!dj.is_array() || dj.empty()) io::fail("\"domains\" must be a nonempty array");
  ValuationDomains domains;
  for (std::size_t i = 0; i < dj.size(); ++i) {
    const std::string where = "domains[" + std::to_string(i) + "]";
    if (!dj[i].is_array() || dj[i].empty()) io::fail(where + " must be a nonempty array of valuations");
    std::vector<Valuation> d;
    for (std::size_t t = 0; t < dj[i].size(); ++t) {
      d.push_back(io::valuation_from_json(dj[i][t], alts, where + "[" + std::to_string(t) + "]"));
    }
    domains.push_back(std::move(d));
  }
  EnumerationLimits limits;
  auto read_cap = [&](const char* key, auto& field) {
    if (auto it = input.find(key); it != input.end()) {
      if (!it->is_number_integer() || it->get<long long>() <= 0) {
        io::fail(std::string("\"") + key + "\" must be a positive integer");
      }
      field = it->get<std::decay_t<decltype(field)>>();
    }
  };
  read_cap("max_profiles", limits.max_profiles);
  read_cap("node_cap", limits.node_cap);
  if (opts.budget) limits.node_cap = *opts.budget;

  const auto tables = enumerate_ic_onto_no_transfer(alts, domains, limits);
  detail::Sorted result;
  result["count"] = tables.size();
  result["profile_order"] = "mixed radix, agent 0 varies fastest";
  detail::Sorted list = detail::Sorted::array();
  for (const auto& t : tables) {
    detail::Sorted tj;
    detail::Sorted chosen = detail::Sorted::array();
    for (auto a : t.chosen) chosen.push_back(alts.name(a));
    tj["chosen"] = chosen;
    tj["dictators"] = is_dictatorial(t, domains);
    list.push_back(tj);
  }
  result["tables"] = list;
  return {kOk, detail::report("enumerate", input, result)};
}

enum class Command { Classify, Run, VerifyIc, VerifyOnto, Fit, Enumerate };

inline std::string_view command_name(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::Run: return "run";
    case Command::VerifyIc: return "verify ic";
    case Command::VerifyOnto: return "verify onto";
    case Command::Fit: return "fit";
    case Command::Enumerate: return "enumerate";
  }
  return "";
}

/// Parses `text`, runs `command`, and converts library errors into a JSON
/// error report with exit status 1.
inline CommandResult execute(Command command, std::string_view text, const Options& opts = {}) {
  std::optional<Json> input;
  try {
    input = detail::parse(text);
    switch (command) {
      case Command::Classify: return cmd_classify(*input, opts);
      case Command::Run: return cmd_run(*input, opts);
      case Command::VerifyIc: return cmd_verify_ic(*input, opts);
      case Command::VerifyOnto: return cmd_verify_onto(*input, opts);
      case Command::Fit: return cmd_fit(*input, opts);
      case Command::Enumerate: return cmd_enumerate(*input, opts);
    }
    throw Error(ErrorCode::InvalidSpec, "unknown command");
  } catch (const Error& e) {
    std::optional<std::vector<std::string>> names;
    if (input && input->is_object() && input->contains("agents") && (*input)["agents"].is_array()) {
      names.emplace();
      for (const auto& a : (*input)["agents"]) {
        names->push_back(a.is_object() && a.contains("name") && a["name"].is_string()
                             ? a["name"].get<std::string>()
                             : std::string());
      }
    }
    detail::Sorted top;
    top["command"] = command_name(command);
    top["error"] = detail::error_object(e, names ? &*names : nullptr);
    top["schema_version"] = kSchemaVersion;
    return {kInputError, detail::freeze(top)};
  }
}

}  // namespace posvcg::cli
