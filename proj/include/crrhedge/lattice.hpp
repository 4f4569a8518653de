#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crrhedge/errors.hpp"
#include "crrhedge/numeric.hpp"

namespace crrhedge {

/// Exhaustive 2^T path enumeration stops here; beyond this, recombining
/// algorithms (CRR summation, grid recursion) are the only option.
inline constexpr int max_enumeration_steps = 25;

/// One-period-compounded binomial market: over each step the asset moves
/// S_{t+1} = S_t (1 + d + theta_t (u - d)) with theta_t in {0, 1}, and the
/// money market grows by (1 + r).
template <typename Real>
struct LatticeParams {
  Real s0{};                      // initial asset price, > 0
  Real u{};                       // up-move net return
  Real d{};                       // down-move net return
  Real r{};                       // per-step net short rate, d < r < u
  int steps = 1;                  // horizon T in steps
  std::optional<Real> p{};        // real-world up probability; never enters a price
  bool recombining_strict = false;  // additionally enforce (1+u)(1+d) = 1

  Real up_factor() const { return Real(1) + u; }
  Real down_factor() const { return Real(1) + d; }
  Real growth_factor() const { return Real(1) + r; }

  void validate() const {
    if (!(s0 > Real(0))) throw InvalidParams("s0 must be positive, got " + detail::str(s0));
    if (steps < 1) throw InvalidParams("steps must be >= 1, got " + std::to_string(steps));
    if (!(Real(1) + d > Real(0)))
      throw InvalidParams("down factor 1+d must stay positive, got d=" + detail::str(d));
    if (!(d < r && r < u))
      throw OutOfRange("need d < r < u to rule out arbitrage, got d=" + detail::str(d) +
                       ", r=" + detail::str(r) + ", u=" + detail::str(u));
    if (p && !(Real(0) < *p && *p < Real(1)))
      throw InvalidParams("real-world probability p must lie in (0,1), got " + detail::str(*p));
    if (recombining_strict) {
      Real prod = up_factor() * down_factor();
      if constexpr (is_exact_real_v<Real>) {
        if (prod != Real(1))
          throw InvalidParams("recombining_strict requires (1+u)(1+d) = 1 exactly");
      } else {
        if (!(prod > Real(1) - Real(1e-12) && prod < Real(1) + Real(1e-12)))
          throw InvalidParams("recombining_strict requires (1+u)(1+d) = 1, got " +
                              detail::str(prod));
      }
    }
  }
};

/// Do two asset prices denote the same lattice node? Exact comparison for
/// rational arithmetic; log-price tolerance 1e-9 for floating point, far
/// below any admissible node spacing.
template <typename Real>
bool price_matches(const Real& a, const Real& b) {
  if constexpr (is_exact_real_v<Real>) {
    return a == b;
  } else {
    if (a == b) return true;
    if (!(a > Real(0)) || !(b > Real(0))) return false;
    return std::abs(std::log(a / b)) <= Real(1e-9);
  }
}

/// A fully specified path of moves; moves[t] is the step from time t to
/// t+1, 1 = up, 0 = down.
class Trajectory {
 public:
  explicit Trajectory(std::vector<std::uint8_t> moves) : moves_(std::move(moves)) {
    if (moves_.empty()) throw InvalidParams("trajectory must contain at least one move");
    for (auto m : moves_)
      if (m > 1)
        throw InvalidParams("trajectory moves must be 0 or 1, got " + std::to_string(int(m)));
  }

  /// Parse "011"-style strings, first character = first step.
  static Trajectory from_string(const std::string& s) {
    std::vector<std::uint8_t> moves;
    moves.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1')
        throw InvalidParams(std::string("trajectory string may contain only 0/1, got '") + c +
                            "'");
      moves.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return Trajectory(std::move(moves));
  }

  /// Decode an enumeration mask; bit t of `mask` is the move at step t+1.
  static Trajectory from_mask(int steps, std::uint32_t mask) {
    if (steps < 1 || steps > 31) throw InvalidParams("mask trajectories support 1..31 steps");
    std::vector<std::uint8_t> moves(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) moves[static_cast<std::size_t>(t)] = (mask >> t) & 1u;
    return Trajectory(std::move(moves));
  }

  int steps() const noexcept { return static_cast<int>(moves_.size()); }

  bool up(int t) const {
    if (t < 0 || t >= steps())
      throw InvalidParams("trajectory index " + std::to_string(t) + " outside [0, " +
                          std::to_string(steps()) + ")");
    return moves_[static_cast<std::size_t>(t)] == 1;
  }

  int up_count() const noexcept {
    int x = 0;
    for (auto m : moves_) x += m;
    return x;
  }

  const std::vector<std::uint8_t>& moves() const noexcept { return moves_; }

  std::string to_string() const {
    std::string s;
    s.reserve(moves_.size());
    for (auto m : moves_) s.push_back(static_cast<char>('0' + m));
    return s;
  }

 private:
  std::vector<std::uint8_t> moves_;
};

/// Invoke fn(const Trajectory&) for each of the 2^T trajectories, in mask
/// order (deterministic).
template <typename Fn>
void for_each_trajectory(int steps, Fn&& fn) {
  if (steps < 1) throw InvalidParams("steps must be >= 1");
  if (steps > max_enumeration_steps)
    throw EnumerationCapExceeded("2^" + std::to_string(steps) +
                                 " trajectories exceed the enumeration cap of 2^" +
                                 std::to_string(max_enumeration_steps));
  const std::uint32_t count = 1u << steps;
  for (std::uint32_t mask = 0; mask < count; ++mask) fn(Trajectory::from_mask(steps, mask));
}

namespace detail {

template <typename Real>
void require_steps_match(const LatticeParams<Real>& params, const Trajectory& traj) {
  if (traj.steps() != params.steps)
    throw InvalidParams("trajectory has " + std::to_string(traj.steps()) + " moves but the lattice has " +
                        std::to_string(params.steps) + " steps");
}

}  // namespace detail

/// Terminal asset price s0 (1+u)^x (1+d)^(T-x), x = number of up moves.
template <typename Real>
Real terminal_price(const LatticeParams<Real>& params, const Trajectory& traj) {
  detail::require_steps_match(params, traj);
  const int x = traj.up_count();
  return params.s0 * pow_int(params.up_factor(), x) *
         pow_int(params.down_factor(), params.steps - x);
}

/// Terminal price of the node reached by x up moves out of T.
template <typename Real>
Real terminal_node_price(const LatticeParams<Real>& params, int up_moves) {
  if (up_moves < 0 || up_moves > params.steps)
    throw InvalidParams("up-move count " + std::to_string(up_moves) + " outside [0, " +
                        std::to_string(params.steps) + "]");
  return params.s0 * pow_int(params.up_factor(), up_moves) *
         pow_int(params.down_factor(), params.steps - up_moves);
}

/// The full price path S_0, ..., S_T along a trajectory, computed stepwise
/// as S_{t+1} = S_t (1 + d + theta (u - d)).
template <typename Real>
std::vector<Real> price_path(const LatticeParams<Real>& params, const Trajectory& traj) {
  detail::require_steps_match(params, traj);
  std::vector<Real> path;
  path.reserve(static_cast<std::size_t>(params.steps) + 1);
  path.push_back(params.s0);
  for (int t = 0; t < params.steps; ++t) {
    const Real theta = traj.up(t) ? Real(1) : Real(0);
    path.push_back(path.back() * (Real(1) + params.d + theta * (params.u - params.d)));
  }
  return path;
}

/// A price expressed in time-T numeraire units, together with the quote
/// time. The numeraire is the money-market account normalized to be worth
/// one currency unit at maturity.
template <typename Real>
struct NumerairePrice {
  Real value{};  // price in time-T numeraire units
  int t = 0;     // quote time
};

namespace detail {

template <typename Real>
void require_time_in_range(const LatticeParams<Real>& params, int t) {
  if (t < 0 || t > params.steps)
    throw InvalidParams("time " + std::to_string(t) + " outside [0, " +
                        std::to_string(params.steps) + "]");
}

}  // namespace detail

/// Convert a numeraire quote into nominal currency at its quote time:
/// nominal = value * (1+r)^(t-T).
template <typename Real>
Real to_nominal(const NumerairePrice<Real>& price, const LatticeParams<Real>& params) {
  detail::require_time_in_range(params, price.t);
  return price.value * pow_int(params.growth_factor(), price.t - params.steps);
}

/// Inverse of to_nominal.
template <typename Real>
NumerairePrice<Real> from_nominal(const Real& nominal, int t, const LatticeParams<Real>& params) {
  detail::require_time_in_range(params, t);
  return {nominal * pow_int(params.growth_factor(), params.steps - t), t};
}

}  // namespace crrhedge
