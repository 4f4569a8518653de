#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "crrhedge/bsm.hpp"

using namespace crrhedge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

BsmParams daily_params() {
  BsmParams b;
  b.mu = 0.1;
  b.sigma = 0.2;
  b.r = 0.04;
  b.horizon = 1.0;
  b.dt = 1.0 / 365.0;
  return b;
}

// Simpson-rule lognormal expectation, an in-test oracle for the closed form.
double call_by_quadrature(double s0, double strike, double r, double sigma, double horizon) {
  const double mean = std::log(s0) + (r - 0.5 * sigma * sigma) * horizon;
  const double sd = sigma * std::sqrt(horizon);
  // The payoff kinks at y = log(strike); below it the integrand vanishes.
  // Starting the grid at the kink keeps Simpson on a smooth integrand and
  // preserves its full O(h^4) accuracy.
  double lo = mean - 12 * sd;
  if (strike > 0) lo = std::max(lo, std::log(strike));
  const double hi = mean + 12 * sd;
  if (lo >= hi) return 0.0;
  const int n = 20000;
  const double h = (hi - lo) / n;
  auto f = [&](double y) {
    const double z = (y - mean) / sd;
    return (std::exp(y) - strike) * std::exp(-0.5 * z * z) / (sd * std::sqrt(2 * M_PI));
  };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return std::exp(-r * horizon) * sum * h / 3.0;
}

}  // namespace

TEST_CASE("BSM parameter validation") {
  auto b = daily_params();
  REQUIRE_NOTHROW(b.validate());
  REQUIRE(b.step_count() == 365);

  SECTION("sigma must be positive") {
    b.sigma = 0;
    REQUIRE_THROWS_AS(b.validate(), InvalidParams);
  }
  SECTION("horizon must be positive") {
    b.horizon = 0;
    REQUIRE_THROWS_AS(b.validate(), InvalidParams);
  }
  SECTION("dt must divide the horizon into whole steps") {
    b.dt = 0.3;
    REQUIRE_THROWS_AS(b.validate(), InvalidParams);
    b.dt = 2.0;
    REQUIRE_THROWS_AS(b.validate(), InvalidParams);
    b.dt = 0.25;
    REQUIRE_NOTHROW(b.validate());
  }
  SECTION("overwhelming drift violates no-arbitrage") {
    b.mu = 200.0;
    REQUIRE_THROWS_AS(step_returns(b), NoArbitrageViolated);
    b.mu = -200.0;
    REQUIRE_THROWS_AS(step_returns(b), NoArbitrageViolated);
  }
}

TEST_CASE("per-step gross returns and the state price") {
  const auto s = step_returns(daily_params());
  REQUIRE(s.D < s.R);
  REQUIRE(s.R < s.U);
  REQUIRE_THAT(s.q, WithinAbs(0.489532334121, 1e-9));  // pinned at mu=0.1, dt=1/365
}

TEST_CASE("discretization maps onto a valid lattice") {
  const auto params = map_to_lattice(daily_params(), 100.0);
  REQUIRE(params.steps == 365);
  REQUIRE_FALSE(params.recombining_strict);  // drift skews the tree
  REQUIRE_NOTHROW(params.validate());

  auto driftless = daily_params();
  driftless.mu = 0.0;
  const auto strict = map_to_lattice(driftless, 100.0);
  REQUIRE(strict.recombining_strict);
  REQUIRE_THAT((1 + strict.u) * (1 + strict.d), WithinAbs(1.0, 1e-14));
}

TEST_CASE("risk-neutral step mean collapses to R independently of drift") {
  auto b = daily_params();
  const double R = std::exp(b.r * b.dt);
  REQUIRE_THAT(risk_neutral_step_mean(b), WithinRel(R, 1e-15));
  b.mu = 0.3;
  REQUIRE_THAT(risk_neutral_step_mean(b), WithinRel(R, 1e-15));
  b.mu = -0.02;
  REQUIRE_THAT(risk_neutral_step_mean(b), WithinRel(R, 1e-15));
}

TEST_CASE("second moment obeys the closed-form identity") {
  for (double mu : {-0.1, 0.0, 0.1, 0.25}) {
    for (double dt : {1.0 / 52, 1.0 / 365, 1.0 / 3650}) {
      auto b = daily_params();
      b.mu = mu;
      b.dt = dt;
      REQUIRE_THAT(step_second_moment(b), WithinRel(step_second_moment_identity(b), 1e-12));
    }
  }
}

TEST_CASE("exact and approximate horizon variance at the pinned point") {
  const auto b = daily_params();
  // Exact closed expression evaluated at dt = 1/365.
  REQUIRE_THAT(risk_neutral_variance_exact(b), WithinRel(0.0400058440493, 1e-9));
  // The first-order form evaluates to T sigma^2 (1 + 0.14/365).
  REQUIRE_THAT(risk_neutral_variance_approx(b), WithinRel(0.04 * (1 + 0.14 / 365), 1e-14));

  // Both tend to T sigma^2 as dt -> 0.
  auto fine = b;
  fine.dt = 1.0 / 365000.0;
  fine.horizon = 1.0;
  REQUIRE_THAT(risk_neutral_variance_exact(fine), WithinRel(0.04, 1e-6));
  REQUIRE_THAT(risk_neutral_variance_approx(fine), WithinRel(0.04, 1e-6));

  // At mu = -r the first-order factor is exactly 1, so the approximate
  // form equals T sigma^2 bit for bit for every dt.
  auto balanced = b;
  balanced.mu = -balanced.r;
  for (double dt : {1.0 / 52, 1.0 / 365}) {
    balanced.dt = dt;
    REQUIRE(risk_neutral_variance_approx(balanced) ==
            balanced.horizon * balanced.sigma * balanced.sigma);
  }
}

TEST_CASE("variance expansion: measured slope and first-order residual") {
  // The exact variance expands as
  //   T sigma^2 (1 + [(mu+r) - (mu-r)^2/sigma^2 + sigma^2/12] dt + O(dt^2)),
  // so the fitted slope sits at 0.0533..., not at mu + r = 0.14: the
  // (mu-r)^2 and sigma^4 corrections are the same order as the kept term.
  const auto b = daily_params();
  const double theory =
      (b.mu + b.r) - (b.mu - b.r) * (b.mu - b.r) / (b.sigma * b.sigma) + b.sigma * b.sigma / 12;
  REQUIRE_THAT(theory, WithinRel(0.0533333333, 1e-8));

  const std::vector<double> dts = {1.0 / 3650, 1.0 / 365, 1.0 / 52};
  const auto fit = fit_variance_slope(b, dts);
  REQUIRE_THAT(fit.slope, WithinRel(theory, 0.02));
  REQUIRE_THAT(fit.intercept, WithinAbs(0.0, 1e-6));

  // Consequently exact - approx has a first-order term: the ratio to dt is
  // flat at T sigma^2 (theory - (mu+r)) = -0.0034667, not O(dt).
  for (double dt : dts) {
    auto level = b;
    level.dt = dt;
    const double residual = risk_neutral_variance_exact(level) - risk_neutral_variance_approx(level);
    REQUIRE_THAT(residual / dt, WithinRel(0.04 * (theory - 0.14), 0.01));
  }

  REQUIRE_THROWS_AS(fit_variance_slope(b, {1.0 / 365}), InvalidParams);
}

TEST_CASE("state-price drift sensitivity") {
  const auto b = daily_params();
  REQUIRE_THAT(dq_dmu(b), WithinAbs(-0.1308559806, 1e-8));

  // Heuristic vs the exact central difference of q(mu).
  const double fd = dq_dmu_finite_difference(b);
  REQUIRE_THAT(fd, WithinAbs(-0.1308320822, 1e-8));
  REQUIRE(std::abs((dq_dmu(b) - fd) / fd) < 1e-3);

  // Scaling laws: halves when sigma doubles, halves when dt quarters.
  auto wide = b;
  wide.sigma = 0.4;
  REQUIRE_THAT(dq_dmu(wide), WithinRel(dq_dmu(b) / 2, 1e-12));
  auto fine = b;
  fine.dt = b.dt / 4;
  fine.horizon = b.horizon / 4;  // keep steps integral
  REQUIRE_THAT(dq_dmu(fine), WithinRel(dq_dmu(b) / 2, 1e-12));
}

TEST_CASE("binomial argument shift under a drift change") {
  const auto b = daily_params();
  REQUIRE_THAT(dx_adjustment(b, 0.01), WithinAbs(-0.477624, 1e-5));
  REQUIRE(dx_adjustment(b, 0.0) == 0.0);
  REQUIRE(dx_adjustment(b, 0.05) < 0.0);
  REQUIRE(dx_adjustment(b, -0.05) > 0.0);
  // Linear in the drift change.
  REQUIRE_THAT(dx_adjustment(b, 0.02), WithinRel(2 * dx_adjustment(b, 0.01), 1e-12));
  // One more x for the same drift change costs 2 sigma sqrt(dt) of drift.
  REQUIRE_THAT(dx_adjustment(b, 0.01) * 2 * b.sigma * std::sqrt(b.dt),
               WithinRel(-b.horizon * 0.01, 1e-12));
}

TEST_CASE("closed-form call against quadrature and its degenerate limits") {
  const double reference = black_scholes_call(100.0, 100.0, 0.04, 0.2, 1.0);
  REQUIRE_THAT(reference, WithinRel(9.925053717274437, 1e-12));
  REQUIRE_THAT(reference, WithinRel(call_by_quadrature(100, 100, 0.04, 0.2, 1.0), 1e-8));

  REQUIRE_THAT(black_scholes_call(80.0, 95.0, 0.03, 0.35, 0.75),
               WithinRel(call_by_quadrature(80, 95, 0.03, 0.35, 0.75), 1e-8));

  // Zero strike pays the asset.
  REQUIRE(black_scholes_call(100.0, 0.0, 0.04, 0.2, 1.0) == 100.0);
  // Vanishing volatility leaves the discounted intrinsic value.
  REQUIRE_THAT(black_scholes_call(100.0, 90.0, 0.04, 1e-12, 1.0),
               WithinRel(100.0 - 90.0 * std::exp(-0.04), 1e-9));
  REQUIRE(black_scholes_call(100.0, 110.0, 0.04, 0.0, 1.0) == 0.0);
  // Zero horizon is intrinsic value.
  REQUIRE(black_scholes_call(100.0, 90.0, 0.04, 0.2, 0.0) == 10.0);

  REQUIRE_THROWS_AS(black_scholes_call(-1.0, 100.0, 0.04, 0.2, 1.0), InvalidParams);
  REQUIRE_THROWS_AS(black_scholes_call(100.0, -5.0, 0.04, 0.2, 1.0), InvalidParams);
  REQUIRE_THROWS_AS(black_scholes_call(100.0, 100.0, 0.04, 0.2, -1.0), InvalidParams);
}

TEST_CASE("lattice prices converge to the closed form") {
  BsmParams base = daily_params();
  const auto rows = convergence_study(100.0, 100.0, base, {16, 64, 256, 1024});
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) REQUIRE(rows[i + 1].abs_error < rows[i].abs_error);
  REQUIRE(rows.back().abs_error < 5e-3);
  REQUIRE_THAT(rows.back().abs_error, WithinAbs(0.00237755, 1e-5));
  REQUIRE_THAT(rows.back().bsm_price, WithinRel(9.925053717274437, 1e-12));

  // A single step stays inside the no-arbitrage band.
  const auto coarse = convergence_study(100.0, 100.0, base, {1});
  REQUIRE(coarse[0].crr_price >= 0.0);
  REQUIRE(coarse[0].crr_price <= 100.0);

  REQUIRE_THROWS_AS(convergence_study(100.0, 100.0, base, {0}), InvalidParams);
}

TEST_CASE("drift barely moves the converged lattice price") {
  BsmParams base = daily_params();
  const auto at_mu1 = convergence_study(100.0, 100.0, base, {1024})[0];
  base.mu = 0.2;
  const auto at_mu2 = convergence_study(100.0, 100.0, base, {1024})[0];
  REQUIRE_THAT(at_mu2.crr_price, WithinAbs(9.92037784424, 1e-6));
  REQUIRE(std::abs(at_mu2.crr_price - at_mu1.crr_price) < 10 * at_mu1.abs_error);

  base.mu = 0.0;
  const auto at_mu0 = convergence_study(100.0, 100.0, base, {1024})[0];
  REQUIRE_THAT(at_mu0.crr_price, WithinAbs(9.92311101208, 1e-6));
}
