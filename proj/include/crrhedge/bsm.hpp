#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "crrhedge/digital.hpp"

namespace crrhedge {

/// Continuous-time market whose Δt-discretization feeds the lattice: gross
/// step returns U = e^{μΔt + σ√Δt}, D = e^{μΔt - σ√Δt}, R = e^{rΔt}.
struct BsmParams {
  double mu = 0;       // drift, per year
  double sigma = 0;    // volatility, per sqrt(year)
  double r = 0;        // short rate, per year
  double horizon = 0;  // maturity T, years
  double dt = 0;       // step length, years; horizon/dt must be integral

  int step_count() const {
    const double ratio = horizon / dt;
    return static_cast<int>(std::llround(ratio));
  }

  void validate() const {
    if (!(sigma > 0)) throw InvalidParams("sigma must be positive, got " + std::to_string(sigma));
    if (!(horizon > 0))
      throw InvalidParams("horizon must be positive, got " + std::to_string(horizon));
    if (!(dt > 0) || dt > horizon)
      throw InvalidParams("dt must lie in (0, horizon], got " + std::to_string(dt));
    const double ratio = horizon / dt;
    const double n = std::llround(ratio);
    if (n < 1 || std::abs(ratio - n) > 1e-6 * n)
      throw InvalidParams("horizon/dt = " + std::to_string(ratio) +
                          " is not a whole number of steps");
  }
};

struct StepReturns {
  double U = 0;  // gross up return
  double D = 0;  // gross down return
  double R = 0;  // gross money-market return
  double q = 0;  // (R - D)/(U - D)
};

/// Compute the per-step gross returns; throws NoArbitrageViolated unless
/// D < R < U (large |μ - r|Δt relative to σ√Δt breaks it).
inline StepReturns step_returns(const BsmParams& bsm) {
  bsm.validate();
  StepReturns s;
  const double vol = bsm.sigma * std::sqrt(bsm.dt);
  s.U = std::exp(bsm.mu * bsm.dt + vol);
  s.D = std::exp(bsm.mu * bsm.dt - vol);
  s.R = std::exp(bsm.r * bsm.dt);
  if (!(s.D < s.R && s.R < s.U))
    throw NoArbitrageViolated("gross returns must satisfy D < R < U, got D=" +
                              std::to_string(s.D) + ", R=" + std::to_string(s.R) +
                              ", U=" + std::to_string(s.U));
  s.q = (s.R - s.D) / (s.U - s.D);
  return s;
}

/// Discretize into lattice net returns u = U-1, d = D-1, r = R-1. The
/// lattice recombines strictly (UD = 1) exactly when μ = 0.
inline LatticeParams<double> map_to_lattice(const BsmParams& bsm, double s0) {
  const StepReturns s = step_returns(bsm);
  LatticeParams<double> params;
  params.s0 = s0;
  params.u = s.U - 1;
  params.d = s.D - 1;
  params.r = s.R - 1;
  params.steps = bsm.step_count();
  params.recombining_strict = (bsm.mu == 0);
  params.validate();
  return params;
}

/// q U + (1-q) D. Identically equal to R — the drift μ cancels.
inline double risk_neutral_step_mean(const BsmParams& bsm) {
  const StepReturns s = step_returns(bsm);
  return s.q * s.U + (1 - s.q) * s.D;
}

/// q U^2 + (1-q) D^2, and the closed form it collapses to: RU + RD - UD.
inline double step_second_moment(const BsmParams& bsm) {
  const StepReturns s = step_returns(bsm);
  return s.q * s.U * s.U + (1 - s.q) * s.D * s.D;
}

inline double step_second_moment_identity(const BsmParams& bsm) {
  const StepReturns s = step_returns(bsm);
  return s.R * s.U + s.R * s.D - s.U * s.D;
}

/// Exact per-horizon risk-neutral variance of the gross step returns,
/// (T/Δt) [q (U-R)^2 + (1-q)(D-R)^2], the lattice counterpart of the
/// Tσ² heuristic for Var log(S_T/S_0).
inline double risk_neutral_variance_exact(const BsmParams& bsm) {
  const StepReturns s = step_returns(bsm);
  const double per_step = s.q * (s.U - s.R) * (s.U - s.R) + (1 - s.q) * (s.D - s.R) * (s.D - s.R);
  return (bsm.horizon / bsm.dt) * per_step;
}

/// First-order asymptotic form T σ² (1 + (μ+r) Δt); exactly T σ² at μ = -r.
inline double risk_neutral_variance_approx(const BsmParams& bsm) {
  bsm.validate();
  return bsm.horizon * bsm.sigma * bsm.sigma * (1 + (bsm.mu + bsm.r) * bsm.dt);
}

/// Leading-order drift sensitivity of the state price: ∂q/∂μ ≈ -√Δt/(2σ).
inline double dq_dmu(const BsmParams& bsm) {
  bsm.validate();
  return -std::sqrt(bsm.dt) / (2 * bsm.sigma);
}

/// Central finite difference of the exact q = (R-D)/(U-D) with respect to μ,
/// for validating the closed-form sensitivity.
inline double dq_dmu_finite_difference(const BsmParams& bsm, double h = 1e-6) {
  BsmParams hi = bsm;
  BsmParams lo = bsm;
  hi.mu += h;
  lo.mu -= h;
  return (step_returns(hi).q - step_returns(lo).q) / (2 * h);
}

/// Shift of the binomial up-count induced by a drift change Δμ over the
/// horizon: Δx ≈ -T Δμ / (2 σ √Δt); prices are insensitive because q moves
/// the opposite way.
inline double dx_adjustment(const BsmParams& bsm, double dmu) {
  bsm.validate();
  return -bsm.horizon * dmu / (2 * bsm.sigma * std::sqrt(bsm.dt));
}

/// Standard normal CDF via erf.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Black-Scholes-Merton European call with continuous compounding. The
/// σ√T -> 0 and K -> 0 degeneracies collapse to the discounted intrinsic
/// value.
inline double black_scholes_call(double s0, double strike, double r, double sigma,
                                 double horizon) {
  if (!(s0 > 0)) throw InvalidParams("s0 must be positive, got " + std::to_string(s0));
  if (strike < 0) throw InvalidParams("strike must be nonnegative");
  if (horizon < 0) throw InvalidParams("horizon must be nonnegative");
  const double discounted_strike = strike * std::exp(-r * horizon);
  const double vol = sigma * std::sqrt(horizon);
  if (strike == 0) return s0;
  if (vol <= 0) return std::max(s0 - discounted_strike, 0.0);
  const double d1 = (std::log(s0 / strike) + (r + 0.5 * sigma * sigma) * horizon) / vol;
  const double d2 = d1 - vol;
  return s0 * normal_cdf(d1) - discounted_strike * normal_cdf(d2);
}

inline double bsm_call_reference(double s0, double strike, const BsmParams& bsm) {
  return black_scholes_call(s0, strike, bsm.r, bsm.sigma, bsm.horizon);
}

/// One refinement level of the lattice-vs-continuum comparison.
struct ConvergenceRow {
  int n = 0;            // step count
  double dt = 0;        // horizon / n
  double crr_price = 0; // nominal lattice call price
  double bsm_price = 0; // closed-form reference
  double abs_error = 0; // |crr - bsm|
};

/// Price the call on lattices of increasing refinement against the BSM
/// closed form. `base.dt` is ignored; each row uses dt = horizon/n.
inline std::vector<ConvergenceRow> convergence_study(double s0, double strike,
                                                     const BsmParams& base,
                                                     const std::vector<int>& step_counts) {
  std::vector<ConvergenceRow> rows;
  rows.reserve(step_counts.size());
  const double reference = black_scholes_call(s0, strike, base.r, base.sigma, base.horizon);
  for (int n : step_counts) {
    if (n < 1) throw InvalidParams("step counts must be >= 1, got " + std::to_string(n));
    BsmParams level = base;
    level.dt = base.horizon / n;
    const LatticeParams<double> lattice = map_to_lattice(level, s0);
    const Payoff<double> call = CallPayoff<double>{strike};
    const NumerairePrice<double> numeraire = price_european_crr(lattice, call);
    ConvergenceRow row;
    row.n = n;
    row.dt = level.dt;
    row.crr_price = to_nominal(numeraire, lattice);
    row.bsm_price = reference;
    row.abs_error = std::abs(row.crr_price - row.bsm_price);
    rows.push_back(row);
  }
  return rows;
}

/// Ordinary least squares of y = (variance_exact/(Tσ²) - 1) on Δt.
struct VarianceSlopeFit {
  double slope = 0;
  double intercept = 0;
};

inline VarianceSlopeFit fit_variance_slope(const BsmParams& base, const std::vector<double>& dts) {
  if (dts.size() < 2)
    throw InvalidParams("slope fit needs at least two distinct step sizes, got " +
                        std::to_string(dts.size()));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double scale = base.horizon * base.sigma * base.sigma;
  for (double dt : dts) {
    BsmParams level = base;
    level.dt = dt;
    const double y = risk_neutral_variance_exact(level) / scale - 1;
    sx += dt;
    sy += y;
    sxx += dt * dt;
    sxy += dt * y;
  }
  const double n = static_cast<double>(dts.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw InvalidParams("slope fit needs at least two distinct step sizes");
  VarianceSlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace crrhedge
