#pragma once

#include <optional>
#include <vector>

#include "crrhedge/lattice.hpp"
#include "crrhedge/payoff.hpp"

namespace crrhedge {

/// One-step Arrow-Debreu prices in numeraire units: q for the up state,
/// 1-q for the down state.
template <typename Real>
struct RiskNeutralWeight {
  Real q{};
  Real down() const { return Real(1) - q; }
};

namespace detail {

template <typename Real>
void require_no_arbitrage(const LatticeParams<Real>& params) {
  if (!(params.d < params.r && params.r < params.u))
    throw OutOfRange("one-step state prices would leave (0,1): need d < r < u, got d=" +
                     str(params.d) + ", r=" + str(params.r) + ", u=" + str(params.u));
}

}  // namespace detail

/// q = (r - d)/(u - d), the numeraire-units price of the one-step up-state
/// Arrow-Debreu security. Requires d < r < u so that q lies in (0,1).
template <typename Real>
RiskNeutralWeight<Real> risk_neutral_q(const LatticeParams<Real>& params) {
  detail::require_no_arbitrage(params);
  return {(params.r - params.d) / (params.u - params.d)};
}

/// Which one-step Arrow-Debreu security: pays 1 in the up state or 1 in the
/// down state.
enum class HedgeDirection { up, down };

inline const char* to_string(HedgeDirection dir) {
  return dir == HedgeDirection::up ? "AD_up" : "AD_down";
}

/// Buy-and-hold replication of a one-step Arrow-Debreu payoff with the
/// asset and the money market. bond_units is in accounts normalized to be
/// worth 1 now and (1+r) after the step; cost is in nominal currency.
template <typename Real>
struct OneStepHedge {
  Real asset_units{};  // a: asset position
  Real bond_units{};   // b: money-market position
  Real cost{};         // a*s0 + b, the nominal price of the AD security
};

/// Solve the two-state replication system
///   a s0 (1+u) + b (1+r) = 1{up},  a s0 (1+d) + b (1+r) = 1{down}.
template <typename Real>
OneStepHedge<Real> replicate_one_step(HedgeDirection dir, const LatticeParams<Real>& params) {
  detail::require_no_arbitrage(params);
  if (!(params.s0 > Real(0)))
    throw InvalidParams("s0 must be positive, got " + detail::str(params.s0));
  const Real spread = params.u - params.d;
  OneStepHedge<Real> h;
  if (dir == HedgeDirection::up) {
    h.asset_units = Real(1) / (params.s0 * spread);
    h.bond_units = -(params.down_factor()) / (spread * params.growth_factor());
  } else {
    h.asset_units = Real(-1) / (params.s0 * spread);
    h.bond_units = params.up_factor() / (spread * params.growth_factor());
  }
  h.cost = h.asset_units * params.s0 + h.bond_units;
  return h;
}

/// Time-0 numeraire price of the Arrow-Debreu security paying 1 on one
/// fully specified trajectory and 0 on every other: q^x (1-q)^(T-x).
template <typename Real>
NumerairePrice<Real> price_path_ad(const LatticeParams<Real>& params, const Trajectory& traj) {
  detail::require_steps_match(params, traj);
  const Real q = risk_neutral_q(params).q;
  const int x = traj.up_count();
  return {pow_int(q, x) * pow_int(Real(1) - q, params.steps - x), 0};
}

/// Price an arbitrary (possibly path-dependent) payoff by aggregating the
/// path Arrow-Debreu securities over all 2^T trajectories.
template <typename Real>
NumerairePrice<Real> price_path_dependent(const LatticeParams<Real>& params,
                                          const Payoff<Real>& payoff) {
  params.validate();
  const Real q = risk_neutral_q(params).q;
  Accumulator<Real> acc;
  for_each_trajectory(params.steps, [&](const Trajectory& traj) {
    const Real value = evaluate_payoff(payoff, params, traj);
    if (value == Real(0)) return;  // skip the pow work for dead paths
    const int x = traj.up_count();
    acc.add(value * pow_int(q, x) * pow_int(Real(1) - q, params.steps - x));
  });
  return {acc.total(), 0};
}

/// One row of the backward-constructed hedge ledger for a path Arrow-Debreu
/// security. At each time t < T the whole wealth buys `shares` units of the
/// one-step AD security matching the trajectory's next move; the maturity
/// row just records the unit payoff.
template <typename Real>
struct HedgeStep {
  int time = 0;
  std::optional<HedgeDirection> instrument{};  // empty on the maturity row
  Real shares{};                               // bought at `time`, 0 at maturity
  Real wealth{};                               // numeraire wealth required at `time`
};

/// Backward recursion W(T) = 1, W(t) = price(AD_{move t+1}) * W(t+1); rows
/// are returned in forward time order, so rows.front().wealth is the path
/// AD price at time 0.
template <typename Real>
std::vector<HedgeStep<Real>> hedge_ledger(const LatticeParams<Real>& params,
                                          const Trajectory& traj) {
  detail::require_steps_match(params, traj);
  const Real q = risk_neutral_q(params).q;
  std::vector<HedgeStep<Real>> rows(static_cast<std::size_t>(params.steps) + 1);
  rows[static_cast<std::size_t>(params.steps)] = {params.steps, std::nullopt, Real(0), Real(1)};
  for (int t = params.steps - 1; t >= 0; --t) {
    const bool up = traj.up(t);
    const Real step_price = up ? q : Real(1) - q;
    auto& row = rows[static_cast<std::size_t>(t)];
    const auto& next = rows[static_cast<std::size_t>(t) + 1];
    row.time = t;
    row.instrument = up ? HedgeDirection::up : HedgeDirection::down;
    row.shares = next.wealth;           // one unit of next-step wealth per share
    row.wealth = step_price * row.shares;  // self-financing by construction
  }
  return rows;
}

}  // namespace crrhedge
