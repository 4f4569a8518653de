#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "crrhedge/digital.hpp"

namespace crrhedge {

/// Node of the extended state space s0 (1+u)^k (1+d)^l. Running the lattice
/// backward from a terminal node can leave the forward cone, so the
/// exponents may go negative.
struct ExtendedState {
  int k = 0;  // accumulated up-move exponent
  int l = 0;  // accumulated down-move exponent

  int net() const noexcept { return k - l; }
  auto operator<=>(const ExtendedState&) const = default;
};

/// Asset price attached to an extended state.
template <typename Real>
Real extended_state_price(const LatticeParams<Real>& params, const ExtendedState& state) {
  return params.s0 * pow_int(params.up_factor(), state.k) *
         pow_int(params.down_factor(), state.l);
}

/// Parameters of the reversed random walk that mirrors the pricing
/// recursion: start at the strike, divide by (1+u) with probability q and
/// by (1+d) with probability 1-q, and ask for the probability of sitting
/// on the target after exactly `steps` moves.
template <typename Real>
struct BackwardWalkConfig {
  Real strike{};               // Y_0
  int steps = 1;               // number of backward moves, = lattice horizon
  RiskNeutralWeight<Real> q{};
  long long mc_paths = 1;
  std::uint64_t seed = 0;

  static BackwardWalkConfig from_market(const LatticeParams<Real>& market, const Real& strike,
                                        long long mc_paths = 1, std::uint64_t seed = 0) {
    market.validate();
    return {strike, market.steps, risk_neutral_q(market), mc_paths, seed};
  }
};

namespace detail {

template <typename Real>
void require_walk_consistent(const BackwardWalkConfig<Real>& config,
                             const LatticeParams<Real>& market) {
  market.validate();
  if (config.steps != market.steps)
    throw InvalidParams("walk has " + std::to_string(config.steps) + " steps but the lattice has " +
                        std::to_string(market.steps));
  if (!(Real(0) < config.q.q && config.q.q < Real(1)))
    throw OutOfRange("walk step prices must lie strictly inside (0,1), got q=" +
                     str(config.q.q));
}

// The walk hits the target iff the strike sits on a terminal node and the
// number of backward down-divisions equals that node's up count.
template <typename Real>
int resolve_strike_index(const BackwardWalkConfig<Real>& config,
                         const LatticeParams<Real>& market) {
  for (int x = 0; x <= market.steps; ++x)
    if (price_matches(config.strike, terminal_node_price(market, x))) return x;
  throw Unreachable("no integer split of " + std::to_string(market.steps) +
                    " moves carries " + str(config.strike) + " onto the target " +
                    str(market.s0));
}

}  // namespace detail

/// Exact probability that the backward walk started at the strike lands on
/// the market's initial price: C(T, x0) q^x0 (1-q)^(T-x0), numerically the
/// digital price. Throws Unreachable when the strike is off the lattice.
template <typename Real>
Real backward_hit_probability(const BackwardWalkConfig<Real>& config,
                              const LatticeParams<Real>& market) {
  detail::require_walk_consistent(config, market);
  const int x0 = detail::resolve_strike_index(config, market);
  return binomial_coefficient<Real>(config.steps, x0) * pow_int(config.q.q, x0) *
         pow_int(config.q.down(), config.steps - x0);
}

/// Monte Carlo estimate of the hit probability, with its frequency standard
/// error. Deterministic for a fixed seed on every platform.
struct WalkEstimate {
  double estimate = 0;
  double std_error = 0;
  long long mc_paths = 0;
  std::uint64_t seed = 0;
};

template <typename Real>
WalkEstimate simulate_backward_walk(const BackwardWalkConfig<Real>& config,
                                    const LatticeParams<Real>& market) {
  detail::require_walk_consistent(config, market);
  if (config.mc_paths < 1)
    throw InvalidParams("mc_paths must be >= 1, got " + std::to_string(config.mc_paths));
  const int x0 = detail::resolve_strike_index(config, market);
  const double q = to_double(config.q.q);
  std::mt19937_64 rng(config.seed);
  // Fixed uniform construction (top 53 bits) instead of the
  // implementation-defined std distribution, so seeds reproduce everywhere.
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  long long hits = 0;
  for (long long path = 0; path < config.mc_paths; ++path) {
    int down_divisions = 0;  // backward moves that divide by (1+d)
    for (int t = 0; t < config.steps; ++t)
      if (uniform() < q) ++down_divisions;
    if (down_divisions == x0) ++hits;
  }
  WalkEstimate est;
  est.mc_paths = config.mc_paths;
  est.seed = config.seed;
  est.estimate = static_cast<double>(hits) / static_cast<double>(config.mc_paths);
  est.std_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(config.mc_paths));
  return est;
}

/// Values of a claim on every reachable extended state, one layer per
/// calendar time 0..T. Under a strictly recombining lattice states collapse
/// to their net exponent; otherwise (k,l) pairs stay distinct.
template <typename Real>
class ValueGrid {
 public:
  using Layer = std::map<ExtendedState, Real>;

  ValueGrid(int steps, bool collapse_net)
      : layers_(static_cast<std::size_t>(steps) + 1), collapse_net_(collapse_net) {}

  int steps() const noexcept { return static_cast<int>(layers_.size()) - 1; }
  bool collapsed() const noexcept { return collapse_net_; }

  const Layer& layer(int t) const { return layers_.at(static_cast<std::size_t>(t)); }

  Real value(const ExtendedState& state, int t) const {
    const auto& lay = layer(t);
    auto it = lay.find(canonical(state));
    return it == lay.end() ? Real(0) : it->second;
  }

  void add(const ExtendedState& state, int t, const Real& v) {
    layers_.at(static_cast<std::size_t>(t))[canonical(state)] += v;
  }

 private:
  ExtendedState canonical(const ExtendedState& state) const {
    if (!collapse_net_) return state;
    return {state.net(), 0};  // (1+u)^k (1+d)^l depends on k-l only
  }

  std::vector<Layer> layers_;
  bool collapse_net_;
};

/// Seed f(K) at each strike's terminal node and run the pricing recursion
/// V_t(s) = q V_{t+1}(s(1+u)) + (1-q) V_{t+1}(s(1+d)) backward through the
/// extended state space: node by node, the time-(t+1) value at (k,l)
/// contributes q of itself to (k-1,l) and 1-q to (k,l-1).
/// Strikes must be finite, nonnegative, and on the terminal lattice.
template <typename Real>
ValueGrid<Real> build_value_grid(const LatticeParams<Real>& params, const Payoff<Real>& payoff,
                                 const std::vector<Real>& strikes) {
  params.validate();
  const auto terminal = as_terminal(payoff);
  if (!terminal)
    throw PathDependentPayoffRejected(
        "the per-strike grid recursion is defined for terminal-state payoffs only");
  const Real q = risk_neutral_q(params).q;
  const int T = params.steps;
  ValueGrid<Real> grid(T, params.recombining_strict);
  for (const Real& strike : strikes) {
    if (!(strike >= Real(0)))
      throw InvalidParams("strikes must be nonnegative, got " + detail::str(strike));
    // StrikeOffLattice propagates from here for foreign strikes.
    const auto spec = DigitalSpec<Real>::from_strike(params, strike);
    const Real weight = evaluate_terminal(*terminal, spec.strike);
    grid.add({spec.strike_index, T - spec.strike_index}, T, weight);
  }
  for (int t = T - 1; t >= 0; --t) {
    for (const auto& [state, value] : grid.layer(t + 1)) {
      if (value == Real(0)) continue;
      grid.add({state.k - 1, state.l}, t, q * value);
      grid.add({state.k, state.l - 1}, t, (Real(1) - q) * value);
    }
  }
  return grid;
}

/// Sum of grid values across all states of one layer. On the extended state
/// space this is time-invariant and equals the sum of the seeded payoffs.
template <typename Real>
Real invariance_sum(const ValueGrid<Real>& grid, int t) {
  Accumulator<Real> acc;
  for (const auto& [state, value] : grid.layer(t)) acc.add(value);
  return acc.total();
}

/// Why the invariance needs the extended space: on the standard T-step
/// model, the same all-strikes sum at time 0 is the bond value (one unit of
/// numeraire), while the terminal layer sums the T+1 unit payoffs. Returns
/// that (bond value, terminal state count) pair, (1, T+1).
template <typename Real>
std::pair<Real, int> standard_crr_invariance_counterexample(const LatticeParams<Real>& params) {
  params.validate();
  // f = 1 on every terminal node, priced through the CRR summation.
  const Real top = terminal_node_price(params, params.steps);
  const Payoff<Real> everywhere = DigitalIntervalPayoff<Real>{Real(0), top + top};
  const Real bond = price_european_crr(params, everywhere).value;
  return {bond, params.steps + 1};
}

}  // namespace crrhedge
