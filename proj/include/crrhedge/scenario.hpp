#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crrhedge/bsm.hpp"
#include "crrhedge/payoff.hpp"

namespace crrhedge {

/// Malformed or schema-violating input. Kept outside the Error hierarchy:
/// the CLI exits 2 on these and 3 on pricing (domain) errors.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

enum class MarketKind { lattice, bsm };

/// BSM block as written in a scenario; dt is optional because convergence
/// studies choose their own refinements.
struct BsmScenario {
  double mu = 0;
  double sigma = 0;
  double r = 0;
  double horizon = 0;
  std::optional<double> dt{};
};

/// A parsed scenario file: market + payoff + optional command inputs.
struct Scenario {
  MarketKind kind = MarketKind::lattice;
  LatticeParams<double> lattice{};  // populated when kind == lattice
  BsmScenario bsm{};                // populated when kind == bsm
  double s0 = 0;
  Payoff<double> payoff{};
  std::optional<Trajectory> trajectory{};
  std::optional<std::vector<double>> strikes{};
  std::optional<std::uint64_t> seed{};
  std::optional<long long> mc_paths{};
  std::optional<std::vector<int>> step_counts{};
};

namespace detail {

using json = nlohmann::json;

inline double require_number(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ScenarioError(path + key + ": required");
  const json& v = j.at(key);
  if (!v.is_number()) throw ScenarioError(path + key + ": expected a number");
  return v.get<double>();
}

inline long long require_integer(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ScenarioError(path + key + ": required");
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ScenarioError(path + key + ": expected an integer");
  return v.get<long long>();
}

inline void reject_unknown_keys(const json& j, const std::string& path,
                                const std::set<std::string>& allowed) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ScenarioError(path + item.key() + ": unexpected field");
}

inline TerminalPayoff<double> parse_terminal_payoff(const json& j, const std::string& path);

inline Payoff<double> parse_payoff(const json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path.substr(0, path.size() - 1) + ": expected an object");
  if (!j.contains("kind")) throw ScenarioError(path + "kind: required");
  if (!j.at("kind").is_string()) throw ScenarioError(path + "kind: expected a string");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "barrier") {
    reject_unknown_keys(j, path, {"kind", "level", "direction", "inner"});
    BarrierPayoff<double> p;
    p.level = require_number(j, path, "level");
    if (!j.contains("direction")) throw ScenarioError(path + "direction: required");
    if (!j.at("direction").is_string())
      throw ScenarioError(path + "direction: expected a string");
    const std::string dir = j.at("direction").get<std::string>();
    if (dir == "up_in")
      p.direction = BarrierDirection::up_in;
    else if (dir == "up_out")
      p.direction = BarrierDirection::up_out;
    else if (dir == "down_in")
      p.direction = BarrierDirection::down_in;
    else if (dir == "down_out")
      p.direction = BarrierDirection::down_out;
    else
      throw ScenarioError(path + "direction: unknown value '" + dir + "'");
    if (!j.contains("inner")) throw ScenarioError(path + "inner: required");
    p.inner = parse_terminal_payoff(j.at("inner"), path + "inner.");
    return p;
  }
  if (kind == "asian_arithmetic") {
    reject_unknown_keys(j, path, {"kind", "strike"});
    return AsianArithmeticPayoff<double>{require_number(j, path, "strike")};
  }
  if (kind == "lookback") {
    reject_unknown_keys(j, path, {"kind"});
    return LookbackPayoff<double>{};
  }
  if (kind == "table_path") {
    reject_unknown_keys(j, path, {"kind", "values"});
    if (!j.contains("values")) throw ScenarioError(path + "values: required");
    const json& values = j.at("values");
    if (!values.is_object()) throw ScenarioError(path + "values: expected an object");
    TablePathPayoff<double> p;
    for (const auto& item : values.items()) {
      for (char c : item.key())
        if (c != '0' && c != '1')
          throw ScenarioError(path + "values." + item.key() +
                              ": keys must be 0/1 move strings");
      if (!item.value().is_number())
        throw ScenarioError(path + "values." + item.key() + ": expected a number");
      p.values[item.key()] = item.value().get<double>();
    }
    return p;
  }
  return widen(parse_terminal_payoff(j, path));
}

inline TerminalPayoff<double> parse_terminal_payoff(const json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path.substr(0, path.size() - 1) + ": expected an object");
  if (!j.contains("kind")) throw ScenarioError(path + "kind: required");
  if (!j.at("kind").is_string()) throw ScenarioError(path + "kind: expected a string");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "call") {
    reject_unknown_keys(j, path, {"kind", "strike"});
    return CallPayoff<double>{require_number(j, path, "strike")};
  }
  if (kind == "put") {
    reject_unknown_keys(j, path, {"kind", "strike"});
    return PutPayoff<double>{require_number(j, path, "strike")};
  }
  if (kind == "digital_at") {
    reject_unknown_keys(j, path, {"kind", "strike"});
    return DigitalAtPayoff<double>{require_number(j, path, "strike")};
  }
  if (kind == "digital_interval") {
    reject_unknown_keys(j, path, {"kind", "lo", "hi"});
    DigitalIntervalPayoff<double> p;
    p.lo = require_number(j, path, "lo");
    p.hi = require_number(j, path, "hi");
    if (!(p.lo <= p.hi)) throw ScenarioError(path + "hi: must be >= lo");
    return p;
  }
  if (kind == "table_terminal") {
    reject_unknown_keys(j, path, {"kind", "entries"});
    if (!j.contains("entries")) throw ScenarioError(path + "entries: required");
    const json& entries = j.at("entries");
    if (!entries.is_array()) throw ScenarioError(path + "entries: expected an array");
    TableTerminalPayoff<double> p;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const json& e = entries[i];
      const std::string epath = path + "entries[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ScenarioError(epath + ": expected a [price, value] number pair");
      p.entries.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return p;
  }
  throw ScenarioError(path + "kind: unknown payoff kind '" + kind + "'");
}

}  // namespace detail

/// Parse and validate a scenario document. Every structural problem throws
/// ScenarioError naming the offending field; value-level (domain) problems
/// surface later when the market parameters are validated.
inline Scenario parse_scenario(const nlohmann::json& j) {
  using detail::require_integer;
  using detail::require_number;
  if (!j.is_object()) throw ScenarioError("scenario: expected a JSON object");

  const bool has_lattice = j.contains("u") || j.contains("d") || j.contains("steps");
  const bool has_bsm =
      j.contains("mu") || j.contains("sigma") || j.contains("horizon") || j.contains("dt");
  if (has_lattice && has_bsm)
    throw ScenarioError("scenario mixes lattice (u/d/steps) and BSM (mu/sigma/horizon/dt) fields");
  if (!has_lattice && !has_bsm)
    throw ScenarioError("scenario: expected either u/d/r/steps or mu/sigma/r/horizon");

  static const std::set<std::string> common = {"s0",     "r",     "payoff",     "trajectory",
                                              "strikes", "seed", "mc_paths",   "step_counts"};
  std::set<std::string> allowed = common;
  if (has_lattice) {
    allowed.insert({"u", "d", "steps", "p", "recombining_strict"});
  } else {
    allowed.insert({"mu", "sigma", "horizon", "dt"});
  }
  detail::reject_unknown_keys(j, "", allowed);

  Scenario sc;
  sc.s0 = require_number(j, "", "s0");
  if (has_lattice) {
    sc.kind = MarketKind::lattice;
    sc.lattice.s0 = sc.s0;
    sc.lattice.u = require_number(j, "", "u");
    sc.lattice.d = require_number(j, "", "d");
    sc.lattice.r = require_number(j, "", "r");
    const long long steps = require_integer(j, "", "steps");
    if (steps > (1 << 20) || steps < -(1 << 20))
      throw ScenarioError("steps: magnitude out of range");
    sc.lattice.steps = static_cast<int>(steps);  // steps < 1 is rejected by validate()
    if (j.contains("p")) sc.lattice.p = require_number(j, "", "p");
    if (j.contains("recombining_strict")) {
      if (!j.at("recombining_strict").is_boolean())
        throw ScenarioError("recombining_strict: expected a boolean");
      sc.lattice.recombining_strict = j.at("recombining_strict").get<bool>();
    }
  } else {
    sc.kind = MarketKind::bsm;
    sc.bsm.mu = require_number(j, "", "mu");
    sc.bsm.sigma = require_number(j, "", "sigma");
    sc.bsm.r = require_number(j, "", "r");
    sc.bsm.horizon = require_number(j, "", "horizon");
    if (j.contains("dt")) sc.bsm.dt = require_number(j, "", "dt");
  }

  if (!j.contains("payoff")) throw ScenarioError("payoff: required");
  sc.payoff = detail::parse_payoff(j.at("payoff"), "payoff.");

  if (j.contains("trajectory")) {
    if (!j.at("trajectory").is_string()) throw ScenarioError("trajectory: expected a string");
    const std::string s = j.at("trajectory").get<std::string>();
    if (s.empty()) throw ScenarioError("trajectory: must be a nonempty 0/1 string");
    for (char c : s)
      if (c != '0' && c != '1') throw ScenarioError("trajectory: may contain only 0 and 1");
    sc.trajectory = Trajectory::from_string(s);
  }
  if (j.contains("strikes")) {
    const auto& arr = j.at("strikes");
    if (!arr.is_array()) throw ScenarioError("strikes: expected an array of numbers");
    std::vector<double> strikes;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number())
        throw ScenarioError("strikes[" + std::to_string(i) + "]: expected a number");
      strikes.push_back(arr[i].get<double>());
    }
    sc.strikes = std::move(strikes);
  }
  if (j.contains("seed")) {
    const auto& v = j.at("seed");
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ScenarioError("seed: expected a nonnegative integer");
    sc.seed = v.get<std::uint64_t>();
  }
  if (j.contains("mc_paths")) {
    // mc_paths < 1 is a domain problem, flagged by the simulator.
    sc.mc_paths = require_integer(j, "", "mc_paths");
  }
  if (j.contains("step_counts")) {
    const auto& arr = j.at("step_counts");
    if (!arr.is_array()) throw ScenarioError("step_counts: expected an array of integers");
    std::vector<int> counts;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number_integer())
        throw ScenarioError("step_counts[" + std::to_string(i) + "]: expected an integer");
      counts.push_back(arr[i].get<int>());
    }
    sc.step_counts = std::move(counts);
  }
  return sc;
}

inline Scenario load_scenario_file(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) throw ScenarioError("cannot open scenario file: " + file_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("scenario is not valid JSON: " + std::string(e.what()));
  }
  return parse_scenario(j);
}

/// Assemble full BSM parameters; dt must have been supplied whenever a
/// single lattice is to be built.
inline BsmParams resolved_bsm(const Scenario& sc) {
  if (sc.kind != MarketKind::bsm) throw ScenarioError("scenario does not define a BSM market");
  if (!sc.bsm.dt) throw ScenarioError("dt: required to discretize the BSM market");
  return {sc.bsm.mu, sc.bsm.sigma, sc.bsm.r, sc.bsm.horizon, *sc.bsm.dt};
}

}  // namespace crrhedge
