#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "crrhedge/lattice.hpp"

namespace crrhedge {

// --- terminal-state payoff kinds -------------------------------------------

template <typename Real>
struct CallPayoff {
  Real strike{};
};

template <typename Real>
struct PutPayoff {
  Real strike{};
};

/// Pays 1 iff S_T lands exactly on the strike node.
template <typename Real>
struct DigitalAtPayoff {
  Real strike{};
};

/// Pays 1 iff lo <= S_T <= hi.
template <typename Real>
struct DigitalIntervalPayoff {
  Real lo{};
  Real hi{};
};

/// Explicit terminal-price -> value table; prices are matched with the
/// lattice node tolerance and unmatched prices pay 0.
template <typename Real>
struct TableTerminalPayoff {
  std::vector<std::pair<Real, Real>> entries;
};

template <typename Real>
using TerminalPayoff = std::variant<CallPayoff<Real>, PutPayoff<Real>, DigitalAtPayoff<Real>,
                                    DigitalIntervalPayoff<Real>, TableTerminalPayoff<Real>>;

// --- path-dependent payoff kinds -------------------------------------------

enum class BarrierDirection { up_in, up_out, down_in, down_out };

inline const char* to_string(BarrierDirection dir) {
  switch (dir) {
    case BarrierDirection::up_in: return "up_in";
    case BarrierDirection::up_out: return "up_out";
    case BarrierDirection::down_in: return "down_in";
    case BarrierDirection::down_out: return "down_out";
  }
  return "?";
}

/// Knock-in/out wrapper around a terminal payoff. "up" barriers monitor the
/// running maximum of S_0..S_T against the level, "down" the running
/// minimum; touching the level counts.
template <typename Real>
struct BarrierPayoff {
  Real level{};
  BarrierDirection direction = BarrierDirection::up_in;
  TerminalPayoff<Real> inner;
};

/// Call on the arithmetic mean of S_0..S_T.
template <typename Real>
struct AsianArithmeticPayoff {
  Real strike{};
};

/// Pays S_T minus the running minimum of S_0..S_T.
template <typename Real>
struct LookbackPayoff {};

/// Explicit value per trajectory, keyed by the "011"-style move string;
/// missing trajectories pay 0.
template <typename Real>
struct TablePathPayoff {
  std::map<std::string, Real> values;
};

template <typename Real>
using Payoff =
    std::variant<CallPayoff<Real>, PutPayoff<Real>, DigitalAtPayoff<Real>,
                 DigitalIntervalPayoff<Real>, TableTerminalPayoff<Real>, BarrierPayoff<Real>,
                 AsianArithmeticPayoff<Real>, LookbackPayoff<Real>, TablePathPayoff<Real>>;

// --- classification ---------------------------------------------------------

/// Extract the terminal-state view of a payoff, if it has one. Barrier,
/// Asian, lookback and path tables depend on the whole trajectory.
template <typename Real>
std::optional<TerminalPayoff<Real>> as_terminal(const Payoff<Real>& payoff) {
  using T = TerminalPayoff<Real>;
  return std::visit(detail::overloaded{
                        [](const CallPayoff<Real>& p) -> std::optional<T> { return T(p); },
                        [](const PutPayoff<Real>& p) -> std::optional<T> { return T(p); },
                        [](const DigitalAtPayoff<Real>& p) -> std::optional<T> { return T(p); },
                        [](const DigitalIntervalPayoff<Real>& p) -> std::optional<T> {
                          return T(p);
                        },
                        [](const TableTerminalPayoff<Real>& p) -> std::optional<T> {
                          return T(p);
                        },
                        [](const auto&) -> std::optional<T> { return std::nullopt; },
                    },
                    payoff);
}

template <typename Real>
bool is_terminal_payoff(const Payoff<Real>& payoff) {
  return as_terminal(payoff).has_value();
}

/// Embed a terminal payoff into the full payoff variant.
template <typename Real>
Payoff<Real> widen(const TerminalPayoff<Real>& payoff) {
  return std::visit([](const auto& p) -> Payoff<Real> { return p; }, payoff);
}

// --- evaluation -------------------------------------------------------------

template <typename Real>
Real evaluate_terminal(const TerminalPayoff<Real>& payoff, const Real& terminal) {
  return std::visit(
      detail::overloaded{
          [&](const CallPayoff<Real>& p) -> Real {
            return terminal > p.strike ? terminal - p.strike : Real(0);
          },
          [&](const PutPayoff<Real>& p) -> Real {
            return p.strike > terminal ? p.strike - terminal : Real(0);
          },
          [&](const DigitalAtPayoff<Real>& p) -> Real {
            return price_matches(terminal, p.strike) ? Real(1) : Real(0);
          },
          [&](const DigitalIntervalPayoff<Real>& p) -> Real {
            return (p.lo <= terminal && terminal <= p.hi) ? Real(1) : Real(0);
          },
          [&](const TableTerminalPayoff<Real>& p) -> Real {
            for (const auto& [price, value] : p.entries)
              if (price_matches(terminal, price)) return value;
            return Real(0);
          },
      },
      payoff);
}

/// Value of a payoff along one fully specified trajectory.
template <typename Real>
Real evaluate_payoff(const Payoff<Real>& payoff, const LatticeParams<Real>& params,
                     const Trajectory& traj) {
  detail::require_steps_match(params, traj);
  const auto path = [&] { return price_path(params, traj); };
  return std::visit(
      detail::overloaded{
          [&](const BarrierPayoff<Real>& p) -> Real {
            const auto prices = path();
            const Real extreme =
                (p.direction == BarrierDirection::up_in || p.direction == BarrierDirection::up_out)
                    ? *std::max_element(prices.begin(), prices.end())
                    : *std::min_element(prices.begin(), prices.end());
            const bool touched = (p.direction == BarrierDirection::up_in ||
                                  p.direction == BarrierDirection::up_out)
                                     ? extreme >= p.level
                                     : extreme <= p.level;
            const bool alive = (p.direction == BarrierDirection::up_in ||
                                p.direction == BarrierDirection::down_in)
                                   ? touched
                                   : !touched;
            return alive ? evaluate_terminal(p.inner, prices.back()) : Real(0);
          },
          [&](const AsianArithmeticPayoff<Real>& p) -> Real {
            const auto prices = path();
            Real sum(0);
            for (const auto& s : prices) sum += s;
            const Real mean = sum / Real(static_cast<int>(prices.size()));
            return mean > p.strike ? mean - p.strike : Real(0);
          },
          [&](const LookbackPayoff<Real>&) -> Real {
            const auto prices = path();
            const Real low = *std::min_element(prices.begin(), prices.end());
            return prices.back() - low;
          },
          [&](const TablePathPayoff<Real>& p) -> Real {
            auto it = p.values.find(traj.to_string());
            return it == p.values.end() ? Real(0) : it->second;
          },
          [&](const auto& terminal_kind) -> Real {
            return evaluate_terminal(TerminalPayoff<Real>(terminal_kind),
                                     terminal_price(params, traj));
          },
      },
      payoff);
}

}  // namespace crrhedge
