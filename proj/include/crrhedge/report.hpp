#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "crrhedge/backward_walk.hpp"
#include "crrhedge/bsm.hpp"
#include "crrhedge/static_hedging.hpp"

namespace crrhedge {

/// All emitted numbers are pre-rounded to 10 significant digits so that
/// repeated runs are byte-identical regardless of formatting path.
inline std::string format_sig10(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

inline double round_sig10(double x) { return std::strtod(format_sig10(x).c_str(), nullptr); }

using Report = nlohmann::ordered_json;

// --- hedge ledger -----------------------------------------------------------

inline std::string ledger_to_csv(const std::vector<HedgeStep<double>>& rows) {
  std::string out = "time,instrument,shares,wealth\n";
  for (const auto& row : rows) {
    out += std::to_string(row.time);
    out += ',';
    if (row.instrument) out += to_string(*row.instrument);
    out += ',';
    if (row.instrument) out += format_sig10(row.shares);
    out += ',';
    out += format_sig10(row.wealth);
    out += '\n';
  }
  return out;
}

inline Report ledger_to_json(const std::vector<HedgeStep<double>>& rows) {
  Report r;
  r["rows"] = Report::array();
  for (const auto& row : rows) {
    Report item;
    item["time"] = row.time;
    item["instrument"] = row.instrument ? to_string(*row.instrument) : "";
    item["shares"] = round_sig10(row.shares);
    item["wealth"] = round_sig10(row.wealth);
    r["rows"].push_back(item);
  }
  if (!rows.empty()) r["price"] = round_sig10(rows.front().wealth);
  return r;
}

// --- value grid -------------------------------------------------------------

inline std::string grid_to_csv(const ValueGrid<double>& grid,
                               const LatticeParams<double>& params) {
  std::string out = "t,k,l,price,value\n";
  for (int t = 0; t <= grid.steps(); ++t) {
    for (const auto& [state, value] : grid.layer(t)) {
      out += std::to_string(t);
      out += ',';
      out += std::to_string(state.k);
      out += ',';
      out += std::to_string(state.l);
      out += ',';
      out += format_sig10(extended_state_price(params, state));
      out += ',';
      out += format_sig10(value);
      out += '\n';
    }
  }
  return out;
}

// --- invariance rows --------------------------------------------------------

struct InvarianceRow {
  int t = 0;
  double sum = 0;
};

inline std::string invariance_to_csv(const std::vector<InvarianceRow>& rows, double expected) {
  std::string out = "t,sum,expected\n";
  for (const auto& row : rows) {
    out += std::to_string(row.t);
    out += ',';
    out += format_sig10(row.sum);
    out += ',';
    out += format_sig10(expected);
    out += '\n';
  }
  return out;
}

// --- convergence ------------------------------------------------------------

inline std::string convergence_to_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "n,dt,crr_price,bsm_price,abs_error\n";
  for (const auto& row : rows) {
    out += std::to_string(row.n);
    out += ',';
    out += format_sig10(row.dt);
    out += ',';
    out += format_sig10(row.crr_price);
    out += ',';
    out += format_sig10(row.bsm_price);
    out += ',';
    out += format_sig10(row.abs_error);
    out += '\n';
  }
  return out;
}

inline Report convergence_to_json(const std::vector<ConvergenceRow>& rows) {
  Report arr = Report::array();
  for (const auto& row : rows) {
    Report item;
    item["n"] = row.n;
    item["dt"] = round_sig10(row.dt);
    item["crr_price"] = round_sig10(row.crr_price);
    item["bsm_price"] = round_sig10(row.bsm_price);
    item["abs_error"] = round_sig10(row.abs_error);
    arr.push_back(item);
  }
  return arr;
}

// --- backward walk ----------------------------------------------------------

inline Report walk_to_json(double exact, const WalkEstimate& estimate) {
  Report r;
  r["exact"] = round_sig10(exact);
  r["estimate"] = round_sig10(estimate.estimate);
  r["std_error"] = round_sig10(estimate.std_error);
  r["mc_paths"] = estimate.mc_paths;
  r["seed"] = estimate.seed;
  return r;
}

inline std::string walk_to_csv(double exact, const WalkEstimate& estimate) {
  std::string out = "exact,estimate,std_error,mc_paths,seed\n";
  out += format_sig10(exact);
  out += ',';
  out += format_sig10(estimate.estimate);
  out += ',';
  out += format_sig10(estimate.std_error);
  out += ',';
  out += std::to_string(estimate.mc_paths);
  out += ',';
  out += std::to_string(estimate.seed);
  out += '\n';
  return out;
}

}  // namespace crrhedge
