#pragma once

// JSON encodings of the domain types. Rationals travel as "p/q" strings or
// JSON integers; floating-point numbers are rejected.

#include "posvcg/error.hpp"
#include "posvcg/mechanism.hpp"
#include "posvcg/rational.hpp"
#include "posvcg/roberts_fit.hpp"
#include "posvcg/utility.hpp"
#include "posvcg/verification.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace posvcg::io {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& message) {
  throw Error(ErrorCode::ParseError, message);
}

inline const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + " is missing \"" + key + "\"");
  return *it;
}

inline Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Rational(Integer(j.get<unsigned long long>()));
    return Rational(Integer(j.get<long long>()));
  }
  if (j.is_number_float()) fail(where + ": floating-point numbers are not accepted, use \"p/q\"");
  if (!j.is_string()) fail(where + ": expected a rational as \"p/q\" or an integer");
  auto r = parse_rational(j.get<std::string>());
  if (!r) fail(where + ": malformed rational \"" + j.get<std::string>() + "\"");
  return *r;
}

inline Json rational_to_json(const Rational& r) { return to_string(r); }

inline AlternativeSet alternatives_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) fail("\"alternatives\" must be a nonempty array of strings");
  std::vector<std::string> names;
  for (const auto& name : j) {
    if (!name.is_string()) fail("\"alternatives\" must contain strings");
    names.push_back(name.get<std::string>());
  }
  try {
    return AlternativeSet(std::move(names));
  } catch (const Error& e) {
    fail(e.what());
  }
}

inline Json alternatives_to_json(const AlternativeSet& alts) {
  Json out = Json::array();
  for (const auto& name : alts.names()) out.push_back(name);
  return out;
}

/// {alt: rational, ...} covering every alternative exactly once.
template <typename Fn>
inline void for_each_alternative(const Json& obj, const AlternativeSet& alts,
                                 const std::string& where, Fn&& fn) {
  if (!obj.is_object()) fail(where + " must be an object keyed by alternative");
  if (obj.size() != alts.size()) fail(where + " must cover every alternative exactly once");
  for (std::size_t a = 0; a < alts.size(); ++a) {
    auto it = obj.find(alts.name(a));
    if (it == obj.end()) fail(where + " is missing alternative \"" + alts.name(a) + "\"");
    fn(a, *it);
  }
}

inline Valuation valuation_from_json(const Json& j, const AlternativeSet& alts,
                                     const std::string& where) {
  std::vector<Rational> values(alts.size());
  for_each_alternative(j, alts, where, [&](std::size_t a, const Json& v) {
    values[a] = rational_from_json(v, where + "." + alts.name(a));
  });
  return Valuation(alts, std::move(values));
}

inline Json valuation_to_json(const Valuation& v) {
  Json out = Json::object();
  for (std::size_t a = 0; a < v.size(); ++a) out[v.alternatives().name(a)] = rational_to_json(v[a]);
  return out;
}

inline PiecewiseLinearCurve curve_from_json(const Json& j, const std::string& where) {
  const auto& pts = require(j, "points", where);
  if (!pts.is_array() || pts.empty()) fail(where + ".points must be a nonempty array");
  std::vector<CurvePoint> points;
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() != 2) fail(where + ".points entries must be [z, u] pairs");
    points.push_back({rational_from_json(p[0], where + ".points"),
                      rational_from_json(p[1], where + ".points")});
  }
  return PiecewiseLinearCurve(std::move(points),
                              rational_from_json(require(j, "left_slope", where), where + ".left_slope"),
                              rational_from_json(require(j, "right_slope", where), where + ".right_slope"));
}

inline Json curve_to_json(const PiecewiseLinearCurve& c) {
  Json pts = Json::array();
  for (const auto& p : c.points()) pts.push_back(Json::array({rational_to_json(p.z), rational_to_json(p.u)}));
  Json out = Json::object();
  out["left_slope"] = rational_to_json(c.left_slope());
  out["points"] = std::move(pts);
  out["right_slope"] = rational_to_json(c.right_slope());
  return out;
}

/// {"kind":"quasilinear","valuation":{...}} or {"kind":"pwl","curves":{...}}.
inline UtilityFunction utility_from_json(const Json& j, const AlternativeSet& alts,
                                         const std::string& where) {
  const auto& kind = require(j, "kind", where);
  if (kind == "quasilinear") {
    return ql_from_valuation(valuation_from_json(require(j, "valuation", where), alts, where + ".valuation"));
  }
  if (kind == "pwl") {
    std::vector<std::optional<PiecewiseLinearCurve>> curves(alts.size());
    for_each_alternative(require(j, "curves", where), alts, where + ".curves",
                         [&](std::size_t a, const Json& c) {
                           curves[a] = curve_from_json(c, where + ".curves." + alts.name(a));
                         });
    std::vector<PiecewiseLinearCurve> out;
    for (auto& c : curves) out.push_back(std::move(*c));
    return UtilityFunction(alts, std::move(out));
  }
  fail(where + ".kind must be \"quasilinear\" or \"pwl\"");
}

inline Json utility_to_json(const UtilityFunction& u) {
  Json curves = Json::object();
  for (std::size_t a = 0; a < u.size(); ++a) curves[u.alternatives().name(a)] = curve_to_json(u.curve(a));
  Json out = Json::object();
  out["curves"] = std::move(curves);
  out["kind"] = "pwl";
  return out;
}

inline RepresentationMode mode_from_string(const std::string& s) {
  if (s == "pos") return RepresentationMode::Pos;
  if (s == "full") return RepresentationMode::Full;
  fail("representation_mode must be \"pos\" or \"full\"");
}

inline std::string mode_to_string(RepresentationMode m) {
  return m == RepresentationMode::Pos ? "pos" : "full";
}

/// Per-agent rationals given either as an array in agent order or as an
/// object keyed by agent name.
inline std::vector<Rational> per_agent_from_json(const Json& j, const std::vector<std::string>& agents,
                                                 const std::string& where) {
  std::vector<Rational> out;
  if (j.is_array()) {
    if (j.size() != agents.size()) fail(where + " needs one entry per agent");
    for (const auto& v : j) out.push_back(rational_from_json(v, where));
    return out;
  }
  if (!j.is_object() || j.size() != agents.size()) fail(where + " needs one entry per agent");
  for (const auto& name : agents) {
    auto it = j.find(name);
    if (it == j.end()) fail(where + " is missing agent \"" + name + "\"");
    out.push_back(rational_from_json(*it, where + "." + name));
  }
  return out;
}

inline Scenario scenario_from_json(const Json& j) {
  const AlternativeSet alts = alternatives_from_json(require(j, "alternatives", "scenario"));
  const auto& agents_json = require(j, "agents", "scenario");
  if (!agents_json.is_array() || agents_json.empty()) fail("\"agents\" must be a nonempty array");

  std::vector<AgentDomain> agents;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < agents_json.size(); ++i) {
    const auto& aj = agents_json[i];
    const std::string where = "agents[" + std::to_string(i) + "]";
    AgentDomain agent;
    const auto& name = require(aj, "name", where);
    if (!name.is_string()) fail(where + ".name must be a string");
    agent.name = name.get<std::string>();
    const auto& domain = require(aj, "type_domain", where);
    if (!domain.is_array() || domain.empty()) fail(where + ".type_domain must be a nonempty array");
    for (std::size_t t = 0; t < domain.size(); ++t) {
      agent.types.push_back(utility_from_json(domain[t], alts, where + ".type_domain[" + std::to_string(t) + "]"));
    }
    const auto& tt = require(aj, "true_type", where);
    if (!tt.is_number_integer() || tt.get<long long>() < 0) fail(where + ".true_type must be a nonnegative integer");
    agent.true_type = tt.get<std::size_t>();
    names.push_back(agent.name);
    agents.push_back(std::move(agent));
  }

  const auto& mj = require(j, "mechanism", "scenario");
  std::vector<std::size_t> allowed;
  if (auto it = mj.find("allowed"); it != mj.end()) {
    if (!it->is_array()) fail("mechanism.allowed must be an array of alternative names");
    for (const auto& name : *it) {
      if (!name.is_string()) fail("mechanism.allowed must contain strings");
      auto idx = alts.find(name.get<std::string>());
      if (!idx) fail("mechanism.allowed names unknown alternative \"" + name.get<std::string>() + "\"");
      allowed.push_back(*idx);
    }
    std::sort(allowed.begin(), allowed.end());
  } else {
    for (std::size_t a = 0; a < alts.size(); ++a) allowed.push_back(a);
  }
  auto weights = per_agent_from_json(require(mj, "weights", "mechanism"), names, "mechanism.weights");
  std::vector<Rational> costs(alts.size(), Rational(0));
  if (auto it = mj.find("costs"); it != mj.end()) {
    if (it->is_array()) {
      if (it->size() != alts.size()) fail("mechanism.costs needs one entry per alternative");
      for (std::size_t a = 0; a < alts.size(); ++a) costs[a] = rational_from_json((*it)[a], "mechanism.costs");
    } else {
      costs = valuation_from_json(*it, alts, "mechanism.costs").values();
    }
  }
  PivotRule pivot = ZeroPivot{};
  if (auto it = mj.find("pivot"); it != mj.end()) {
    const auto& kind = require(*it, "kind", "mechanism.pivot");
    if (kind == "zero") {
      pivot = ZeroPivot{};
    } else if (kind == "clarke") {
      pivot = ClarkePivot{};
    } else if (kind == "constant") {
      pivot = ConstantPivot{per_agent_from_json(require(*it, "values", "mechanism.pivot"), names,
                                                "mechanism.pivot.values")};
    } else {
      fail("mechanism.pivot.kind must be \"zero\", \"clarke\" or \"constant\"");
    }
  }
  RepresentationMode mode = RepresentationMode::Pos;
  if (auto it = mj.find("representation_mode"); it != mj.end()) {
    if (!it->is_string()) fail("mechanism.representation_mode must be a string");
    mode = mode_from_string(it->get<std::string>());
  }
  try {
    MechanismSpec spec(alts, std::move(allowed), std::move(weights), std::move(costs), std::move(pivot), mode);
    Scenario sc{alts, std::move(agents), std::move(spec)};
    sc.validate();
    return sc;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidSpec || e.code() == ErrorCode::AlternativeMismatch) fail(e.what());
    throw;
  }
}

inline AllocationTable table_from_json(const Json& j) {
  const AlternativeSet alts = alternatives_from_json(require(j, "alternatives", "table"));
  const auto& rows = require(j, "observations", "table");
  if (!rows.is_array()) fail("\"observations\" must be an array");
  if (rows.empty()) throw Error(ErrorCode::EmptyTable, "allocation table has no observations");
  std::vector<Observation> obs;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "observations[" + std::to_string(r) + "]";
    const auto& profile = require(rows[r], "profile", where);
    if (!profile.is_array() || profile.empty()) fail(where + ".profile must be a nonempty array");
    Observation row;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      row.profile.push_back(valuation_from_json(profile[i], alts, where + ".profile[" + std::to_string(i) + "]"));
    }
    const auto& chosen = require(rows[r], "chosen", where);
    if (!chosen.is_string()) fail(where + ".chosen must be an alternative name");
    auto idx = alts.find(chosen.get<std::string>());
    if (!idx) fail(where + ".chosen names unknown alternative \"" + chosen.get<std::string>() + "\"");
    row.chosen = *idx;
    obs.push_back(std::move(row));
  }
  try {
    return AllocationTable(alts, std::move(obs));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyTable) throw;
    fail(e.what());
  }
}

inline Json table_to_json(const AllocationTable& table) {
  Json rows = Json::array();
  for (const auto& row : table.observations()) {
    Json profile = Json::array();
    for (const auto& v : row.profile) profile.push_back(valuation_to_json(v));
    Json r = Json::object();
    r["chosen"] = table.alternatives().name(row.chosen);
    r["profile"] = std::move(profile);
    rows.push_back(std::move(r));
  }
  Json out = Json::object();
  out["alternatives"] = alternatives_to_json(table.alternatives());
  out["observations"] = std::move(rows);
  return out;
}

}  // namespace posvcg::io
