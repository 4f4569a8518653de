// crrhedge: binomial derivatives pricing through static Arrow-Debreu
// hedging, with the backward-walk and BSM-asymptotics diagnostics.
//
// Exit codes: 0 success, 2 malformed input, 3 pricing (domain) error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crrhedge/crrhedge.hpp"

namespace {

using namespace crrhedge;

enum class Format { human, json, csv };

struct Options {
  std::string scenario_path;
  bool json = false;
  bool csv = false;
  bool verify = false;
  bool counterexample = false;
  std::optional<std::uint64_t> seed;
  std::optional<long long> mc_paths;
  std::vector<int> step_counts;
  std::string trajectory;

  Format format() const { return json ? Format::json : csv ? Format::csv : Format::human; }
};

void add_common_options(CLI::App* cmd, Options& opts) {
  cmd->add_option("--scenario", opts.scenario_path, "Scenario JSON file")->required();
  auto* json_flag = cmd->add_flag("--json", opts.json, "Emit a JSON report");
  auto* csv_flag = cmd->add_flag("--csv", opts.csv, "Emit CSV rows");
  json_flag->excludes(csv_flag);
  csv_flag->excludes(json_flag);
}

/// A single lattice out of either market parameterization.
LatticeParams<double> lattice_from(const Scenario& sc) {
  if (sc.kind == MarketKind::lattice) {
    LatticeParams<double> params = sc.lattice;
    params.validate();
    return params;
  }
  return map_to_lattice(resolved_bsm(sc), sc.s0);
}

void emit(const Report& report, Format format) {
  if (format == Format::json) {
    std::cout << report.dump(2) << "\n";
    return;
  }
  // Human format: one "key value" line per top-level scalar.
  for (const auto& item : report.items()) {
    if (item.value().is_object() || item.value().is_array()) continue;
    std::cout << item.key() << " "
              << (item.value().is_string() ? item.value().get<std::string>()
                                           : item.value().dump())
              << "\n";
  }
}

// --- price ------------------------------------------------------------------

int cmd_price(const Options& opts) {
  const Scenario sc = load_scenario_file(opts.scenario_path);
  const LatticeParams<double> params = lattice_from(sc);

  // Path aggregation is the primary pricer at desk scale; past the
  // enumeration cap only terminal payoffs are priceable, via CRR.
  NumerairePrice<double> numeraire{};
  const bool enumerable = params.steps <= max_enumeration_steps;
  if (enumerable)
    numeraire = price_path_dependent(params, sc.payoff);
  else
    numeraire = price_european_crr(params, sc.payoff);
  const double nominal = to_nominal(numeraire, params);

  Report report;
  report["numeraire"] = round_sig10(numeraire.value);
  report["nominal"] = round_sig10(nominal);

  std::optional<double> backward_delta;
  std::optional<double> crr_delta;
  if (opts.verify) {
    if (enumerable)
      backward_delta = numeraire.value - backward_induction_price(params, sc.payoff).value;
    if (is_terminal_payoff(sc.payoff))
      crr_delta = numeraire.value - price_european_crr(params, sc.payoff).value;
    Report verify;
    if (backward_delta) verify["backward_induction_delta"] = round_sig10(*backward_delta);
    if (crr_delta) verify["crr_delta"] = round_sig10(*crr_delta);
    report["verify"] = verify;
  }

  if (opts.format() == Format::csv) {
    std::string header = "numeraire,nominal";
    std::string row = format_sig10(numeraire.value) + "," + format_sig10(nominal);
    if (opts.verify) {
      header += ",backward_induction_delta,crr_delta";
      row += ",";
      if (backward_delta) row += format_sig10(*backward_delta);
      row += ",";
      if (crr_delta) row += format_sig10(*crr_delta);
    }
    std::cout << header << "\n" << row << "\n";
    return 0;
  }
  if (opts.format() == Format::human && opts.verify) {
    emit(report, Format::human);
    if (backward_delta) std::cout << "backward_induction_delta " << format_sig10(*backward_delta) << "\n";
    if (crr_delta) std::cout << "crr_delta " << format_sig10(*crr_delta) << "\n";
    return 0;
  }
  emit(report, opts.format());
  return 0;
}

// --- hedge ------------------------------------------------------------------

int cmd_hedge(const Options& opts) {
  const Scenario sc = load_scenario_file(opts.scenario_path);
  const LatticeParams<double> params = lattice_from(sc);

  std::optional<Trajectory> traj = sc.trajectory;
  if (!opts.trajectory.empty()) {
    for (char c : opts.trajectory)
      if (c != '0' && c != '1')
        throw ScenarioError("--trajectory may contain only 0 and 1");
    traj = Trajectory::from_string(opts.trajectory);
  }
  if (!traj)
    throw ScenarioError("trajectory: required (scenario field or --trajectory)");
  if (traj->steps() != params.steps)
    throw ScenarioError("trajectory has " + std::to_string(traj->steps()) +
                        " moves but the lattice has " + std::to_string(params.steps) + " steps");

  const auto rows = hedge_ledger(params, *traj);
  switch (opts.format()) {
    case Format::csv:
      std::cout << ledger_to_csv(rows);
      break;
    case Format::json:
      std::cout << ledger_to_json(rows).dump(2) << "\n";
      break;
    case Format::human:
      std::cout << "time instrument shares wealth\n";
      for (const auto& row : rows) {
        std::cout << row.time << " " << (row.instrument ? to_string(*row.instrument) : "payoff")
                  << " " << (row.instrument ? format_sig10(row.shares) : std::string("-")) << " "
                  << format_sig10(row.wealth) << "\n";
      }
      break;
  }
  return 0;
}

// --- digital ----------------------------------------------------------------

int cmd_digital(const Options& opts) {
  const Scenario sc = load_scenario_file(opts.scenario_path);
  const LatticeParams<double> params = lattice_from(sc);
  const auto* digital = std::get_if<DigitalAtPayoff<double>>(&sc.payoff);
  if (!digital) throw ScenarioError("payoff.kind: the digital command requires digital_at");

  const auto spec = DigitalSpec<double>::from_strike(params, digital->strike);
  const auto numeraire = price_digital(params, spec);
  const double nominal = to_nominal(numeraire, params);

  Report report;
  report["strike"] = round_sig10(spec.strike);
  report["strike_index"] = spec.strike_index;
  report["numeraire"] = round_sig10(numeraire.value);
  report["nominal"] = round_sig10(nominal);

  std::optional<double> ad_delta;
  std::optional<double> walk_delta;
  if (opts.verify) {
    if (params.steps <= max_enumeration_steps)
      ad_delta = numeraire.value - digital_from_ad(params, spec).value;
    const auto config = BackwardWalkConfig<double>::from_market(params, spec.strike);
    walk_delta = numeraire.value - backward_hit_probability(config, params);
    Report verify;
    if (ad_delta) verify["path_ad_delta"] = round_sig10(*ad_delta);
    verify["walk_exact_delta"] = round_sig10(*walk_delta);
    report["verify"] = verify;
  }

  if (opts.format() == Format::csv) {
    std::string header = "strike,strike_index,numeraire,nominal";
    std::string row = format_sig10(spec.strike) + "," + std::to_string(spec.strike_index) + "," +
                      format_sig10(numeraire.value) + "," + format_sig10(nominal);
    if (opts.verify) {
      header += ",path_ad_delta,walk_exact_delta";
      row += ",";
      if (ad_delta) row += format_sig10(*ad_delta);
      row += "," + format_sig10(*walk_delta);
    }
    std::cout << header << "\n" << row << "\n";
    return 0;
  }
  if (opts.format() == Format::human && opts.verify) {
    emit(report, Format::human);
    if (ad_delta) std::cout << "path_ad_delta " << format_sig10(*ad_delta) << "\n";
    std::cout << "walk_exact_delta " << format_sig10(*walk_delta) << "\n";
    return 0;
  }
  emit(report, opts.format());
  return 0;
}

// --- invariance -------------------------------------------------------------

int cmd_invariance(const Options& opts) {
  const Scenario sc = load_scenario_file(opts.scenario_path);
  const LatticeParams<double> params = lattice_from(sc);

  std::vector<double> strikes;
  if (sc.strikes) {
    strikes = *sc.strikes;
  } else {
    for (int x = 0; x <= params.steps; ++x) strikes.push_back(terminal_node_price(params, x));
  }

  const auto grid = build_value_grid(params, sc.payoff, strikes);
  const double expected = invariance_sum(grid, params.steps);  // the seeded payoff mass
  std::vector<InvarianceRow> rows;
  double max_dev = 0;
  for (int t = 0; t <= params.steps; ++t) {
    const double sum = invariance_sum(grid, t);
    rows.push_back({t, sum});
    max_dev = std::max(max_dev, std::abs(sum - expected));
  }

  std::optional<std::pair<double, int>> counterexample;
  if (opts.counterexample) counterexample = standard_crr_invariance_counterexample(params);

  switch (opts.format()) {
    case Format::csv: {
      std::string out = invariance_to_csv(rows, expected);
      if (counterexample) {
        out += "counterexample_bond_value," + format_sig10(counterexample->first) + ",\n";
        out += "counterexample_terminal_states," + std::to_string(counterexample->second) + ",\n";
      }
      std::cout << out;
      break;
    }
    case Format::json: {
      Report report;
      report["rows"] = Report::array();
      for (const auto& row : rows)
        report["rows"].push_back({{"t", row.t}, {"sum", round_sig10(row.sum)}});
      report["expected"] = round_sig10(expected);
      report["max_abs_deviation"] = round_sig10(max_dev);
      if (counterexample)
        report["counterexample"] = {{"bond_value", round_sig10(counterexample->first)},
                                    {"terminal_states", counterexample->second}};
      std::cout << report.dump(2) << "\n";
      break;
    }
    case Format::human:
      std::cout << "t sum expected\n";
      for (const auto& row : rows)
        std::cout << row.t << " " << format_sig10(row.sum) << " " << format_sig10(expected)
                  << "\n";
      std::cout << "max_abs_deviation " << format_sig10(max_dev) << "\n";
      if (counterexample) {
        std::cout << "counterexample_bond_value " << format_sig10(counterexample->first) << "\n";
        std::cout << "counterexample_terminal_states " << counterexample->second << "\n";
      }
      break;
  }
  return 0;
}

// --- converge ---------------------------------------------------------------

int cmd_converge(const Options& opts) {
  const Scenario sc = load_scenario_file(opts.scenario_path);
  if (sc.kind != MarketKind::bsm)
    throw ScenarioError("the converge command requires a BSM market (mu/sigma/r/horizon)");
  const auto* call = std::get_if<CallPayoff<double>>(&sc.payoff);
  if (!call) throw ScenarioError("payoff.kind: the converge command requires a call");

  BsmParams base;
  base.mu = sc.bsm.mu;
  base.sigma = sc.bsm.sigma;
  base.r = sc.bsm.r;
  base.horizon = sc.bsm.horizon;
  base.dt = sc.bsm.horizon;  // placeholder; each row sets its own dt

  std::vector<int> ns = opts.step_counts;
  if (ns.empty() && sc.step_counts) ns = *sc.step_counts;
  if (ns.empty()) ns = {16, 64, 256, 1024};

  const auto rows = convergence_study(sc.s0, call->strike, base, ns);

  // Variance-slope fit over the refinement grid's step sizes.
  std::vector<double> dts;
  for (const auto& row : rows) dts.push_back(row.dt);
  std::sort(dts.begin(), dts.end());
  dts.erase(std::unique(dts.begin(), dts.end()), dts.end());
  std::optional<VarianceSlopeFit> fit;
  if (dts.size() >= 2)
    fit = fit_variance_slope(base, dts);
  else
    std::cerr << "warning: slope fit skipped, need at least two distinct step counts\n";

  // Drift-sensitivity diagnostics at the finest step (or the scenario dt).
  BsmParams sensitivity = base;
  sensitivity.dt = sc.bsm.dt ? *sc.bsm.dt : dts.front();
  const double dq_analytic = dq_dmu(sensitivity);
  const double dq_fd = dq_dmu_finite_difference(sensitivity);

  switch (opts.format()) {
    case Format::csv: {
      std::string out = convergence_to_csv(rows);
      if (fit) out += "slope," + format_sig10(fit->slope) + ",,,\n";
      out += "mu_plus_r," + format_sig10(base.mu + base.r) + ",,,\n";
      out += "dq_dmu_analytic," + format_sig10(dq_analytic) + ",,,\n";
      out += "dq_dmu_fd," + format_sig10(dq_fd) + ",,,\n";
      std::cout << out;
      break;
    }
    case Format::json: {
      Report report;
      report["rows"] = convergence_to_json(rows);
      if (fit) report["slope"] = round_sig10(fit->slope);
      report["mu_plus_r"] = round_sig10(base.mu + base.r);
      report["dq_dmu"] = {{"dt", round_sig10(sensitivity.dt)},
                          {"analytic", round_sig10(dq_analytic)},
                          {"finite_difference", round_sig10(dq_fd)}};
      std::cout << report.dump(2) << "\n";
      break;
    }
    case Format::human:
      std::cout << "n dt crr_price bsm_price abs_error\n";
      for (const auto& row : rows)
        std::cout << row.n << " " << format_sig10(row.dt) << " " << format_sig10(row.crr_price)
                  << " " << format_sig10(row.bsm_price) << " " << format_sig10(row.abs_error)
                  << "\n";
      if (fit) std::cout << "slope " << format_sig10(fit->slope) << "\n";
      std::cout << "mu_plus_r " << format_sig10(base.mu + base.r) << "\n";
      std::cout << "dq_dmu_analytic " << format_sig10(dq_analytic) << "\n";
      std::cout << "dq_dmu_fd " << format_sig10(dq_fd) << "\n";
      break;
  }
  return 0;
}

// --- walk -------------------------------------------------------------------

int cmd_walk(const Options& opts) {
  const Scenario sc = load_scenario_file(opts.scenario_path);
  const LatticeParams<double> params = lattice_from(sc);
  const auto* digital = std::get_if<DigitalAtPayoff<double>>(&sc.payoff);
  if (!digital) throw ScenarioError("payoff.kind: the walk command requires digital_at");

  long long mc_paths = 100000;
  if (sc.mc_paths) mc_paths = *sc.mc_paths;
  if (opts.mc_paths) mc_paths = *opts.mc_paths;
  std::uint64_t seed = 0;
  if (sc.seed) seed = *sc.seed;
  if (opts.seed) seed = *opts.seed;

  auto config = BackwardWalkConfig<double>::from_market(params, digital->strike, mc_paths, seed);
  const double exact = backward_hit_probability(config, params);
  const WalkEstimate estimate = simulate_backward_walk(config, params);

  switch (opts.format()) {
    case Format::csv:
      std::cout << walk_to_csv(exact, estimate);
      break;
    case Format::json:
      std::cout << walk_to_json(exact, estimate).dump(2) << "\n";
      break;
    case Format::human:
      std::cout << "exact " << format_sig10(exact) << "\n";
      std::cout << "estimate " << format_sig10(estimate.estimate) << "\n";
      std::cout << "std_error " << format_sig10(estimate.std_error) << "\n";
      std::cout << "mc_paths " << estimate.mc_paths << "\n";
      std::cout << "seed " << estimate.seed << "\n";
      break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binomial derivatives pricing via static Arrow-Debreu hedging"};
  app.require_subcommand(1);

  Options opts;
  auto* price = app.add_subcommand("price", "Price the scenario payoff");
  add_common_options(price, opts);
  price->add_flag("--verify", opts.verify, "Cross-check against independent pricers");

  auto* hedge = app.add_subcommand("hedge", "Replication ledger for a path AD security");
  add_common_options(hedge, opts);
  hedge->add_option("--trajectory", opts.trajectory, "Move string, e.g. 011");

  auto* digital = app.add_subcommand("digital", "Price a degenerate (single-node) digital");
  add_common_options(digital, opts);
  digital->add_flag("--verify", opts.verify, "Cross-check against path AD and walk pricers");

  auto* invariance = app.add_subcommand("invariance", "Per-time value-grid sums");
  add_common_options(invariance, opts);
  invariance->add_flag("--counterexample", opts.counterexample,
                       "Also report the standard-model failure pair");

  auto* converge = app.add_subcommand("converge", "Lattice-vs-BSM convergence table");
  add_common_options(converge, opts);
  converge->add_option("--steps", opts.step_counts, "Step counts, e.g. 16,64,256")
      ->delimiter(',');

  auto* walk = app.add_subcommand("walk", "Backward random-walk hit probability");
  add_common_options(walk, opts);
  walk->add_option("--seed", opts.seed, "Monte Carlo seed");
  walk->add_option("--mc-paths", opts.mc_paths, "Monte Carlo path count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the parser message
    return 2;
  }

  try {
    if (app.got_subcommand(price)) return cmd_price(opts);
    if (app.got_subcommand(hedge)) return cmd_hedge(opts);
    if (app.got_subcommand(digital)) return cmd_digital(opts);
    if (app.got_subcommand(invariance)) return cmd_invariance(opts);
    if (app.got_subcommand(converge)) return cmd_converge(opts);
    if (app.got_subcommand(walk)) return cmd_walk(opts);
  } catch (const crrhedge::ScenarioError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const crrhedge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
