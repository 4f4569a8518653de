#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "crrhedge/backward_walk.hpp"
#include "crrhedge/rational.hpp"

using namespace crrhedge;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

LatticeParams<double> desk_params(int steps = 2) {
  LatticeParams<double> p;
  p.s0 = 100;
  p.u = 0.2;
  p.d = -0.1;
  p.r = 0.04;
  p.steps = steps;
  return p;
}

LatticeParams<Rational> desk_params_exact(int steps = 2) {
  LatticeParams<Rational> p;
  p.s0 = 100;
  p.u = Rational(1, 5);
  p.d = Rational(-1, 10);
  p.r = Rational(1, 25);
  p.steps = steps;
  return p;
}

}  // namespace

TEST_CASE("extended states price multiplicatively and may leave the cone") {
  const auto p = desk_params();
  REQUIRE_THAT(extended_state_price(p, {1, 1}), WithinRel(108.0, 1e-12));
  REQUIRE_THAT(extended_state_price(p, {2, 0}), WithinRel(144.0, 1e-12));
  // Negative exponents divide: the backward walk can step outside the
  // forward-reachable lattice.
  REQUIRE_THAT(extended_state_price(p, {-1, 0}), WithinRel(100.0 / 1.2, 1e-12));
  REQUIRE_THAT(extended_state_price(p, {0, -2}), WithinRel(100.0 / 0.81, 1e-12));
  REQUIRE(ExtendedState{2, 1}.net() == 1);
}

TEST_CASE("backward walk hit probability equals the digital price") {
  const auto p = desk_params();
  const auto config = BackwardWalkConfig<double>::from_market(p, 108.0);
  REQUIRE(config.steps == 2);
  REQUIRE_THAT(config.q.q, WithinAbs(7.0 / 15.0, 1e-15));
  REQUIRE_THAT(backward_hit_probability(config, p), WithinRel(112.0 / 225.0, 1e-13));

  // One step up: the walk must take its single down-division.
  const auto p1 = desk_params(1);
  const auto c1 = BackwardWalkConfig<double>::from_market(p1, 120.0);
  REQUIRE_THAT(backward_hit_probability(c1, p1), WithinAbs(7.0 / 15.0, 1e-14));

  // Off-lattice strikes cannot come home.
  const auto foreign = BackwardWalkConfig<double>{150.0, 2, risk_neutral_q(p), 1, 0};
  REQUIRE_THROWS_AS(backward_hit_probability(foreign, p), Unreachable);
}

TEST_CASE("walk and digital agree exactly in rational arithmetic") {
  for (int T : {1, 2, 3, 8}) {
    const auto p = desk_params_exact(T);
    for (int x = 0; x <= T; ++x) {
      const auto spec = DigitalSpec<Rational>::from_index(p, x);
      const auto config = BackwardWalkConfig<Rational>::from_market(p, spec.strike);
      REQUIRE(backward_hit_probability(config, p) == price_digital(p, spec).value);
    }
  }
}

TEST_CASE("walk configuration is validated") {
  const auto p = desk_params();
  auto config = BackwardWalkConfig<double>::from_market(p, 108.0);

  auto wrong_steps = config;
  wrong_steps.steps = 3;
  REQUIRE_THROWS_AS(backward_hit_probability(wrong_steps, p), InvalidParams);

  // Degenerate state prices are rejected before any simulation.
  auto degenerate = config;
  degenerate.q.q = 1.0;
  REQUIRE_THROWS_AS(backward_hit_probability(degenerate, p), OutOfRange);
  REQUIRE_THROWS_AS(simulate_backward_walk(degenerate, p), OutOfRange);

  auto no_paths = config;
  no_paths.mc_paths = 0;
  REQUIRE_THROWS_AS(simulate_backward_walk(no_paths, p), InvalidParams);
}

TEST_CASE("walk simulation is seed-deterministic") {
  const auto p = desk_params();
  const auto config = BackwardWalkConfig<double>::from_market(p, 108.0, 20000, 7);
  const auto first = simulate_backward_walk(config, p);
  const auto second = simulate_backward_walk(config, p);
  REQUIRE(first.estimate == second.estimate);
  REQUIRE(first.std_error == second.std_error);
  REQUIRE(first.mc_paths == 20000);
  REQUIRE(first.seed == 7);

  // A single path gives a bare indicator.
  const auto one = simulate_backward_walk(BackwardWalkConfig<double>::from_market(p, 108.0, 1, 3), p);
  REQUIRE((one.estimate == 0.0 || one.estimate == 1.0));
  REQUIRE(one.std_error == 0.0);
}

TEST_CASE("walk estimates land within five standard errors") {
  const auto p = desk_params();
  const auto exact = 112.0 / 225.0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 11ull, 99ull}) {
    const auto config = BackwardWalkConfig<double>::from_market(p, 108.0, 200000, seed);
    const auto est = simulate_backward_walk(config, p);
    const double se = std::sqrt(exact * (1 - exact) / 200000.0);
    REQUIRE(std::abs(est.estimate - exact) < 5 * se);
    REQUIRE_THAT(est.std_error, WithinRel(se, 0.05));
  }
}

TEST_CASE("value grid seeds strikes at maturity and recurses backward") {
  const int T = 3;
  const auto p = desk_params(T);
  const double q = risk_neutral_q(p).q;
  const auto spec = DigitalSpec<double>::from_index(p, 1);  // node 100*1.2*0.81
  const Payoff<double> unit{DigitalAtPayoff<double>{spec.strike}};
  const auto grid = build_value_grid(p, unit, {spec.strike});

  // Maturity layer: exactly the seeded node.
  REQUIRE(grid.layer(T).size() == 1);
  REQUIRE(grid.value({1, 2}, T) == 1.0);

  // One step earlier the claim splits into the two backward neighbours:
  // value q at strike/(1+u), value 1-q at strike/(1+d).
  REQUIRE(grid.layer(T - 1).size() == 2);
  REQUIRE_THAT(grid.value({0, 2}, T - 1), WithinRel(q, 1e-14));
  REQUIRE_THAT(grid.value({1, 1}, T - 1), WithinRel(1 - q, 1e-14));
  REQUIRE_THAT(extended_state_price(p, {0, 2}), WithinRel(spec.strike / 1.2, 1e-12));
  REQUIRE_THAT(extended_state_price(p, {1, 1}), WithinRel(spec.strike / 0.9, 1e-12));

  // Two steps back: binomial weights over net displacements.
  REQUIRE(grid.layer(T - 2).size() == 3);
  REQUIRE_THAT(grid.value({-1, 2}, T - 2), WithinRel(q * q, 1e-14));
  REQUIRE_THAT(grid.value({0, 1}, T - 2), WithinRel(2 * q * (1 - q), 1e-14));
  REQUIRE_THAT(grid.value({1, 0}, T - 2), WithinRel((1 - q) * (1 - q), 1e-14));

  // Layer t holds T-t+1 states for a single strike.
  for (int t = 0; t <= T; ++t)
    REQUIRE(static_cast<int>(grid.layer(t).size()) == T - t + 1);
}

TEST_CASE("grid sums are time-invariant and equal the seeded mass") {
  const int T = 6;
  const auto p = desk_params(T);

  SECTION("single unit strike") {
    for (int x = 0; x <= T; ++x) {
      const auto spec = DigitalSpec<double>::from_index(p, x);
      const Payoff<double> unit{DigitalAtPayoff<double>{spec.strike}};
      const auto grid = build_value_grid(p, unit, {spec.strike});
      for (int t = 0; t <= T; ++t) REQUIRE_THAT(invariance_sum(grid, t), WithinAbs(1.0, 1e-12));
    }
  }

  SECTION("weighted strikes under a call payoff") {
    std::vector<double> strikes;
    double expected = 0;
    for (int x = 2; x <= 5; ++x) {
      const auto spec = DigitalSpec<double>::from_index(p, x);
      strikes.push_back(spec.strike);
      expected += std::max(spec.strike - 150.0, 0.0);
    }
    const Payoff<double> call{CallPayoff<double>{150}};
    const auto grid = build_value_grid(p, call, strikes);
    for (int t = 0; t <= T; ++t)
      REQUIRE_THAT(invariance_sum(grid, t), WithinRel(expected, 1e-12));
  }

  SECTION("zero payoff stays identically zero") {
    const Payoff<double> zero{CallPayoff<double>{1e9}};
    const auto grid =
        build_value_grid(p, zero, {terminal_node_price(p, 0), terminal_node_price(p, 3)});
    for (int t = 0; t <= T; ++t) REQUIRE(invariance_sum(grid, t) == 0.0);
  }
}

TEST_CASE("grid rejects bad inputs") {
  const auto p = desk_params(3);
  const Payoff<double> call{CallPayoff<double>{100}};
  REQUIRE_THROWS_AS(build_value_grid(p, call, {103.0}), StrikeOffLattice);
  REQUIRE_THROWS_AS(build_value_grid(p, call, {-5.0}), InvalidParams);
  const Payoff<double> lookback{LookbackPayoff<double>{}};
  REQUIRE_THROWS_AS(build_value_grid(p, lookback, {terminal_node_price(p, 1)}),
                    PathDependentPayoffRejected);
}

TEST_CASE("strictly recombining lattices collapse states to net exponents") {
  LatticeParams<double> p;
  p.s0 = 100;
  p.u = 0.25;
  p.d = 1.0 / 1.25 - 1.0;
  p.r = 0.02;
  p.steps = 4;
  p.recombining_strict = true;
  p.validate();

  std::vector<double> strikes = {terminal_node_price(p, 1), terminal_node_price(p, 3)};
  const Payoff<double> bond{DigitalIntervalPayoff<double>{0.0, 1e9}};
  const auto grid = build_value_grid(p, bond, strikes);
  REQUIRE(grid.collapsed());

  // Keys are stored canonically by net exponent, values stay nonnegative,
  // and the all-states sum still matches the seeded mass at every time.
  for (int t = 0; t <= 4; ++t) {
    for (const auto& [state, value] : grid.layer(t)) {
      REQUIRE(state.l == 0);
      REQUIRE(value >= 0.0);
    }
    REQUIRE_THAT(invariance_sum(grid, t), WithinAbs(2.0, 1e-12));
  }
  // Seeds at nets -2 and +2 fan out to nets {-6,...,2} and {-2,...,6}; the
  // union holds the 7 even nets in [-6, 6].
  REQUIRE(grid.layer(0).size() == 7);

  // The same fan on a non-strict lattice, keyed by (k,l) pairs: every
  // time-t state satisfies k+l = t, so the layer sizes coincide and the
  // canonical form is a pure re-labeling.
  LatticeParams<double> skew = desk_params(4);
  const auto skew_grid =
      build_value_grid(skew, bond, {terminal_node_price(skew, 1), terminal_node_price(skew, 3)});
  REQUIRE_FALSE(skew_grid.collapsed());
  REQUIRE(skew_grid.layer(0).size() == 7);
  for (int t = 0; t <= 4; ++t)
    for (const auto& [state, value] : skew_grid.layer(t)) REQUIRE(state.k + state.l == t);
}

TEST_CASE("standard-model invariance fails with the known pair") {
  for (int T : {1, 2, 10}) {
    const auto p = desk_params(T);
    const auto [bond_value, states] = standard_crr_invariance_counterexample(p);
    REQUIRE_THAT(bond_value, WithinAbs(1.0, 1e-12));
    REQUIRE(states == T + 1);
  }
}
