#include "exitwaves/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "exitwaves/errors.hpp"

namespace exitwaves {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError("missing key '" + key + "' in " + where);
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError("'" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::uint64_t count(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ValidationError("'" + key + "' in " + where + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool flag(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ValidationError("'" + key + "' in " + where + " must be true or false");
  return v.get<bool>();
}

std::array<double, 2> range(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ValidationError("'" + key + "' in " + where + " must be a two-number array");
  }
  std::array<double, 2> r{v[0].get<double>(), v[1].get<double>()};
  if (!(r[0] < r[1])) throw ValidationError("'" + key + "' in " + where + " must be increasing");
  return r;
}

CostSpec parse_agent(const json& obj, std::size_t index) {
  const std::string where = "agents[" + std::to_string(index) + "]";
  if (!obj.is_object() || !obj.contains("family") || !obj.at("family").is_string()) {
    throw ValidationError(where + " needs a string 'family'");
  }
  const std::string family = obj.at("family").get<std::string>();
  if (family == "exponential") {
    reject_unknown(obj, where, {"family", "b", "beta"});
    return exponential_cost(number(obj, "b", where), number_or(obj, "beta", where, 1.0));
  }
  if (family == "power") {
    reject_unknown(obj, where, {"family", "a", "p", "beta"});
    return power_cost(number(obj, "a", where), number(obj, "p", where), number_or(obj, "beta", where, 1.0));
  }
  if (family == "affine_quadratic") {
    reject_unknown(obj, where, {"family", "a2", "a1", "a0"});
    return affine_quadratic_cost(number(obj, "a2", where), number(obj, "a1", where), number(obj, "a0", where));
  }
  throw ValidationError(where + " has unknown family '" + family + "'");
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
  reject_unknown(doc, "scenario", {"agents", "scope_bounds", "sim", "penalty", "scan"});
  ScenarioConfig config;
  if (!doc.contains("agents") || !doc.at("agents").is_array() || doc.at("agents").empty()) {
    throw ValidationError("scenario needs a non-empty 'agents' array");
  }
  for (std::size_t i = 0; i < doc.at("agents").size(); ++i) config.agents.push_back(parse_agent(doc.at("agents")[i], i));

  if (!doc.contains("scope_bounds")) throw ValidationError("scenario needs 'scope_bounds'");
  const json& b = doc.at("scope_bounds");
  reject_unknown(b, "scope_bounds", {"lo", "hi"});
  config.scope_bounds = {number(b, "lo", "scope_bounds"), number(b, "hi", "scope_bounds")};
  check_bounds(config.scope_bounds);
  require_valid(config.agents, config.scope_bounds);

  if (doc.contains("sim")) {
    const json& s = doc.at("sim");
    reject_unknown(s, "sim", {"dt", "n_paths", "seed", "t_max", "bridge_correction", "threads", "strict"});
    SimConfig sim;
    sim.dt = number_or(s, "dt", "sim", sim.dt);
    if (s.contains("n_paths")) sim.n_paths = count(s, "n_paths", "sim");
    if (s.contains("seed")) sim.seed = count(s, "seed", "sim");
    sim.t_max = number_or(s, "t_max", "sim", sim.t_max);
    if (s.contains("bridge_correction")) sim.bridge_correction = flag(s, "bridge_correction", "sim");
    if (s.contains("threads")) sim.threads = count(s, "threads", "sim");
    if (s.contains("strict")) sim.strict = flag(s, "strict", "sim");
    check_config(sim);
    config.sim = sim;
  }
  if (doc.contains("penalty")) {
    const json& p = doc.at("penalty");
    reject_unknown(p, "penalty", {"alpha"});
    const double alpha = number(p, "alpha", "penalty");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("penalty alpha must lie in [0, 1]");
    if (config.agents.size() != 2) throw ValidationError("the penalty extension supports exactly two agents");
    config.penalty_alpha = alpha;
  }
  if (doc.contains("scan")) {
    const json& s = doc.at("scan");
    reject_unknown(s, "scan", {"beta2_range", "beta3_range", "steps"});
    ScanSpec scan;
    if (s.contains("beta2_range")) scan.beta2_range = range(s, "beta2_range", "scan");
    if (s.contains("beta3_range")) scan.beta3_range = range(s, "beta3_range", "scan");
    if (s.contains("steps")) scan.steps = count(s, "steps", "scan");
    if (scan.steps < 1) throw ValidationError("scan steps must be at least 1");
    if (config.agents.size() != 3) throw ValidationError("scan needs a three-agent template");
    for (const CostSpec& c : config.agents) {
      if (!std::holds_alternative<ScaledExponential>(c.family)) {
        throw ValidationError("scan needs exponential-cost agents");
      }
    }
    if (!proportional_multipliers(config.agents)) throw ValidationError("scan needs proportional costs");
    config.scan = scan;
  }
  return config;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

json cost_to_json(const CostSpec& cost) {
  return std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ScaledExponential>) {
          return {{"family", "exponential"}, {"b", c.rate}, {"beta", c.beta}};
        } else if constexpr (std::is_same_v<T, ScaledPower>) {
          return {{"family", "power"}, {"a", c.coefficient}, {"p", c.exponent}, {"beta", c.beta}};
        } else {
          return {{"family", "affine_quadratic"}, {"a2", c.a2}, {"a1", c.a1}, {"a0", c.a0}};
        }
      },
      cost.family);
}

json scenario_to_json(const ScenarioConfig& config) {
  json doc;
  doc["agents"] = json::array();
  for (const CostSpec& c : config.agents) doc["agents"].push_back(cost_to_json(c));
  doc["scope_bounds"] = {{"lo", config.scope_bounds.lo}, {"hi", config.scope_bounds.hi}};
  if (config.sim) {
    const SimConfig& s = *config.sim;
    doc["sim"] = {{"dt", s.dt},           {"n_paths", s.n_paths},
                  {"seed", s.seed},       {"t_max", s.t_max},
                  {"bridge_correction", s.bridge_correction},
                  {"threads", s.threads}, {"strict", s.strict}};
  }
  if (config.penalty_alpha) doc["penalty"] = {{"alpha", *config.penalty_alpha}};
  if (config.scan) {
    doc["scan"] = {{"beta2_range", config.scan->beta2_range},
                   {"beta3_range", config.scan->beta3_range},
                   {"steps", config.scan->steps}};
  }
  return doc;
}

}  // namespace exitwaves
