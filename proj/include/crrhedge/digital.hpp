#pragma once

#include <vector>

#include "crrhedge/static_hedging.hpp"

namespace crrhedge {

/// A terminal lattice node, identified both by its up-move count and its
/// asset price. A digital option struck here is the sum of the C(T, x0)
/// path Arrow-Debreu securities reaching the node.
template <typename Real>
struct DigitalSpec {
  int strike_index = 0;  // x0: number of up moves, in [0, T]
  Real strike{};         // s0 (1+u)^x0 (1+d)^(T-x0)

  static DigitalSpec from_index(const LatticeParams<Real>& params, int x0) {
    if (x0 < 0 || x0 > params.steps)
      throw InvalidParams("strike index " + std::to_string(x0) + " outside [0, " +
                          std::to_string(params.steps) + "]");
    return {x0, terminal_node_price(params, x0)};
  }

  /// Match a quoted strike against the terminal nodes; throws
  /// StrikeOffLattice when it coincides with none of them.
  static DigitalSpec from_strike(const LatticeParams<Real>& params, const Real& strike) {
    for (int x = 0; x <= params.steps; ++x) {
      const Real node = terminal_node_price(params, x);
      if (price_matches(strike, node)) return {x, node};
    }
    throw StrikeOffLattice("strike " + detail::str(strike) + " hits no terminal node of the " +
                           std::to_string(params.steps) + "-step lattice");
  }
};

/// Digital price in closed form: C(T, x0) q^x0 (1-q)^(T-x0).
template <typename Real>
NumerairePrice<Real> price_digital(const LatticeParams<Real>& params,
                                   const DigitalSpec<Real>& spec) {
  params.validate();
  if (spec.strike_index < 0 || spec.strike_index > params.steps)
    throw InvalidParams("strike index " + std::to_string(spec.strike_index) + " outside [0, " +
                        std::to_string(params.steps) + "]");
  const Real q = risk_neutral_q(params).q;
  const int x0 = spec.strike_index;
  return {binomial_coefficient<Real>(params.steps, x0) * pow_int(q, x0) *
              pow_int(Real(1) - q, params.steps - x0),
          0};
}

/// Same digital priced the hard way: enumerate all trajectories and sum the
/// path AD prices of those ending at the strike node.
template <typename Real>
NumerairePrice<Real> digital_from_ad(const LatticeParams<Real>& params,
                                     const DigitalSpec<Real>& spec) {
  params.validate();
  Accumulator<Real> acc;
  for_each_trajectory(params.steps, [&](const Trajectory& traj) {
    if (traj.up_count() == spec.strike_index) acc.add(price_path_ad(params, traj).value);
  });
  return {acc.total(), 0};
}

/// CRR valuation of a terminal-state payoff at time t, after x_so_far up
/// moves: sum over the remaining T-t steps with binomial weights
/// C(T-t, x) q^x (1-q)^(T-t-x). Only terminal payoffs are admissible.
template <typename Real>
NumerairePrice<Real> price_european_crr(const LatticeParams<Real>& params,
                                        const Payoff<Real>& payoff, int t = 0, int x_so_far = 0) {
  params.validate();
  detail::require_time_in_range(params, t);
  if (x_so_far < 0 || x_so_far > t)
    throw InvalidParams("x_so_far=" + std::to_string(x_so_far) + " outside [0, " +
                        std::to_string(t) + "]");
  const auto terminal = as_terminal(payoff);
  if (!terminal)
    throw PathDependentPayoffRejected(
        "the CRR summation prices terminal-state payoffs only; aggregate path AD securities "
        "instead");
  const Real q = risk_neutral_q(params).q;
  const Real s_t = params.s0 * pow_int(params.up_factor(), x_so_far) *
                   pow_int(params.down_factor(), t - x_so_far);
  const int n = params.steps - t;  // remaining steps, not the full horizon
  Accumulator<Real> acc;
  for (int x = 0; x <= n; ++x) {
    const Real node = s_t * pow_int(params.up_factor(), x) * pow_int(params.down_factor(), n - x);
    const Real value = evaluate_terminal(*terminal, node);
    if (value == Real(0)) continue;
    // Keep C(n,x) q^x adjacent: their product stays in range at n = 1024
    // where the raw coefficient alone flirts with the double ceiling.
    acc.add(binomial_coefficient<Real>(n, x) * pow_int(q, x) * pow_int(Real(1) - q, n - x) *
            value);
  }
  return {acc.total(), t};
}

/// Expectation recursion on the full non-recombining move tree:
/// V(node) = q V(up child) + (1-q) V(down child), V(leaf) = payoff.
/// Handles every payoff kind; cost is O(2^T), so the enumeration cap
/// applies.
template <typename Real>
NumerairePrice<Real> backward_induction_price(const LatticeParams<Real>& params,
                                              const Payoff<Real>& payoff) {
  params.validate();
  if (params.steps > max_enumeration_steps)
    throw EnumerationCapExceeded("2^" + std::to_string(params.steps) +
                                 " tree nodes exceed the enumeration cap of 2^" +
                                 std::to_string(max_enumeration_steps));
  const Real q = risk_neutral_q(params).q;
  std::vector<std::uint8_t> moves(static_cast<std::size_t>(params.steps));
  auto recurse = [&](auto&& self, int depth) -> Real {
    if (depth == params.steps)
      return evaluate_payoff(payoff, params, Trajectory(moves));
    moves[static_cast<std::size_t>(depth)] = 1;
    const Real up_value = self(self, depth + 1);
    moves[static_cast<std::size_t>(depth)] = 0;
    const Real down_value = self(self, depth + 1);
    return q * up_value + (Real(1) - q) * down_value;
  };
  return {recurse(recurse, 0), 0};
}

}  // namespace crrhedge
