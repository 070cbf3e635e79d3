#include <gtest/gtest.h>

#include <cmath>

#include "relopt/diagnostics.hpp"
#include "relopt/models.hpp"
#include "relopt/solvers.hpp"
#include "support/oracles.hpp"
#include "support/test_models.hpp"

namespace relopt {
namespace {

using models::example_variant;
using models::make_example;

state_point pt(double v) { return state_point::scalar(v); }

// Monotone script z_k = target (1 - 0.8^k), k = 1..n. Faster contraction
// drives f below the rounding of phi(x, x) within a few dozen steps.
std::vector<state_point> approach(double target, std::size_t n) {
  std::vector<state_point> out;
  for (std::size_t k = 1; k <= n; ++k) out.push_back(pt(target * (1.0 - std::pow(0.8, static_cast<double>(k)))));
  return out;
}

TEST(Residual, PaperSolutionsAreStationary) {
  auto ex31 = make_example(example_variant::ex31);
  auto ex32 = make_example(example_variant::ex32);
  rng_type rng(1);
  EXPECT_LE(stationarity_residual(*ex31, pt(1.0 / 12.0), 256, rng), 1e-9);
  EXPECT_LE(stationarity_residual(*ex32, pt(0.25), 256, rng), 1e-9);
  for (double x : {0.5, 0.75, 1.0}) EXPECT_LE(stationarity_residual(*ex32, pt(x), 256, rng), 1e-9) << x;
}

TEST(Residual, Example31AtZero) {
  auto ex31 = make_example(example_variant::ex31);
  rng_type rng(1);
  EXPECT_NEAR(stationarity_residual(*ex31, pt(0.0), 256, rng), 0.005, 1e-6);
}

TEST(Residual, MatchesEndpointOracle) {
  auto ex31 = make_example(example_variant::ex31);
  auto ex32 = make_example(example_variant::ex32);
  rng_type rng(4);
  for (int i = 0; i <= 40; ++i) {
    const double x = i / 40.0;
    // The grid includes both endpoints, where the affine supremum sits.
    EXPECT_NEAR(stationarity_residual(*ex31, pt(x), 16, rng), oracle::ex31_residual(x), 1e-12) << x;
    EXPECT_NEAR(stationarity_residual(*ex32, pt(x), 16, rng), oracle::ex32_residual(x), 1e-12) << x;
  }
}

TEST(Residual, NonNegativeOnAllModels) {
  for (const auto& model : testing::builtin_models()) {
    rng_type rng(6);
    for (int i = 0; i < 10; ++i) {
      auto x = model->sample_state(rng);
      EXPECT_GE(stationarity_residual(*model, x, 32, rng), 0.0) << model->name();
    }
  }
}

TEST(AssumptionReport, Example31MoveAddsOverEstimate) {
  auto ex31 = make_example(example_variant::ex31);
  assumption_report r;
  r.update(make_move_record(*ex31, 0, pt(0.0), pt(0.1), 0.0));
  EXPECT_NEAR(r.sum_b_minus_c_pos(), 0.03, 1e-12);
  EXPECT_NEAR(r.sum_b(), 0.03, 1e-12);
  EXPECT_EQ(r.a4pp_violations(), 1u);
  EXPECT_EQ(r.b1_min_offdiag_cost(), 0.0);
  EXPECT_EQ(r.moves_seen(), 1u);
}

TEST(AssumptionReport, StationaryMoveChangesOnlyCounters) {
  auto ex31 = make_example(example_variant::ex31);
  assumption_report r;
  r.update(make_move_record(*ex31, 0, pt(0.0), pt(0.1), 0.0));
  const auto before = r;
  r.update(make_move_record(*ex31, 1, pt(0.1), pt(0.1), 0.0));
  EXPECT_EQ(r.sum_b_minus_c_pos(), before.sum_b_minus_c_pos());
  EXPECT_EQ(r.sum_b(), before.sum_b());
  EXPECT_EQ(r.a4pp_violations(), before.a4pp_violations());
  EXPECT_EQ(r.b1_min_offdiag_cost(), before.b1_min_offdiag_cost());
  EXPECT_EQ(r.moves_seen(), 2u);
}

TEST(AssumptionReport, TelecomHasNoOverEstimate) {
  auto tel = models::make_telecom_model({});
  rng_type rng(2);
  auto x = tel->sample_state(rng);
  assumption_report r;
  for (std::size_t k = 0; k < 5; ++k) {
    auto y = tel->sample_feasible(x, rng, 1).front();
    r = update_assumption_report(r, make_move_record(*tel, k, x, y, 0.0));
    x = y;
  }
  EXPECT_EQ(r.sum_b(), 0.0);
  EXPECT_EQ(r.a4pp_violations(), 0u);
  EXPECT_GT(r.b1_min_offdiag_cost(), 0.0);
}

TEST(AssumptionReport, RejectsBrokenChain) {
  auto ex41 = make_example(example_variant::ex41);
  assumption_report r;
  r.update(make_move_record(*ex41, 0, pt(0.0), pt(0.3), 0.0));
  EXPECT_THROW(r.update(make_move_record(*ex41, 1, pt(0.2), pt(0.4), 0.0)), std::logic_error);
}

TEST(AssumptionReport, TailWindowForgetsOldMoves) {
  auto ex31 = make_example(example_variant::ex31);
  assumption_report r(2);
  r.update(make_move_record(*ex31, 0, pt(0.0), pt(0.1), 0.0));  // b = 0.03
  r.update(make_move_record(*ex31, 1, pt(0.1), pt(0.11), 0.0));
  EXPECT_NEAR(r.tail_max_b(), 0.03, 1e-12);
  r.update(make_move_record(*ex31, 2, pt(0.11), pt(0.12), 0.0));
  EXPECT_LT(r.tail_max_b(), 0.03);
  EXPECT_NEAR(r.sum_b(), 0.03 + 0.6 * 0.4 * 0.01 + 0.6 * 0.39 * 0.01, 1e-12);
}

// Along monotone trajectories of both examples the largest b over the last
// W = 20 moves never grows and falls by orders of magnitude.
TEST(AssumptionReport, TailStatisticShrinksOnMonotoneRuns) {
  for (auto [variant, target] : {std::pair{example_variant::ex31, 1.0 / 12.0}, std::pair{example_variant::ex32, 0.25}}) {
    auto model = make_example(variant);
    SCOPED_TRACE(model->name());
    auto report = sdm_solve(*model, pt(0.0), scripted_candidates(approach(target, 50)), solve_budget{}, 1, 16);
    ASSERT_EQ(report.path.moves.size(), 50u);
    assumption_report r(default_tail_window);
    double previous = std::numeric_limits<double>::infinity();
    double first = 0.0;
    for (const auto& m : report.path.moves) {
      r.update(m);
      if (r.moves_seen() == 1) first = r.tail_max_b();
      EXPECT_LE(r.tail_max_b(), previous);
      previous = r.tail_max_b();
    }
    EXPECT_GT(first, 0.0);
    EXPECT_LT(r.tail_max_b(), 0.01 * first);
  }
}

// Example 3.2 lets the state step down while it is below 0.5, so sampled
// runs overshoot 0.25 and come back; b does not vanish along such a run.
TEST(AssumptionReport, Example32SampledRunsMoveDown) {
  auto ex32 = make_example(example_variant::ex32);
  auto report = tdm_solve(*ex32, pt(0.0), threshold_schedule{}, search_policy{}, solve_budget{}, 2);
  bool downward = false;
  for (const auto& m : report.path.moves) downward = downward || (m.from[0] < 0.5 && m.to[0] < m.from[0]);
  EXPECT_TRUE(downward);
  EXPECT_TRUE(verify_descent_invariants(report.path).empty());
  EXPECT_LE(std::abs(report.final_state[0] - 0.25), 1e-2);
}

TEST(B1, DiscreteGridHolds) {
  auto grid = models::make_discrete_grid({});
  rng_type rng(1);
  auto r = check_b1_conditions(*grid, 10000, rng, 0.05);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_GE(r.min_cost, 0.05);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.pairs_checked, 101u * 100u);
}

TEST(B1, Example41Fails) {
  auto ex41 = make_example(example_variant::ex41);
  rng_type rng(1);
  for (double delta : {1e-6, 0.05, 1.0}) {
    auto r = check_b1_conditions(*ex41, 100, rng, delta);
    EXPECT_EQ(r.min_cost, 0.0);
    EXPECT_FALSE(r.holds);
  }
  EXPECT_FALSE(check_b1_conditions(*ex41, 100, rng).holds);
}

TEST(B1, SingleStateIsVacuous) {
  auto single = models::make_discrete_grid({.resolution = 0, .utility = std::vector<double>{1.0}});
  rng_type rng(1);
  auto r = check_b1_conditions(*single, 10, rng, 0.05);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.pairs_checked, 0u);
}

TEST(Triangle, Counts) {
  rng_type rng(12);
  EXPECT_EQ(check_triangle_inequality(*models::make_telecom_model({}), 2000, rng), 0u);
  EXPECT_EQ(check_triangle_inequality(*make_example(example_variant::ex31), 2000, rng), 0u);
  EXPECT_GT(check_triangle_inequality(models::squared_cost_line{}, 2000, rng), 0u);
  EXPECT_THROW(check_triangle_inequality(models::squared_cost_line{}, 0, rng), std::invalid_argument);
}

TEST(OverEstimateBound, TelecomAndGrid) {
  rng_type rng(3);
  auto tel = check_overestimate_bound(*models::make_telecom_model({}), 500, rng);
  EXPECT_EQ(tel.pairs, 500u);
  EXPECT_EQ(tel.violations, 0u);
  // Grid off the diagonal: b = eps0 = 0.025 < c = 0.05.
  auto grid = check_overestimate_bound(*models::make_discrete_grid({}), 500, rng);
  EXPECT_EQ(grid.violations, 0u);
  EXPECT_LE(grid.max_b_minus_c, 0.0);
  EXPECT_GT(check_overestimate_bound(*make_example(example_variant::ex31), 500, rng).violations, 0u);
}

TEST(CostDominatesMetric, GridCostExceedsScaledMetric) {
  auto grid = models::make_discrete_grid({});
  rng_type rng(5);
  EXPECT_EQ(check_cost_dominates_metric(*grid, [](double d) { return 0.05 * d; }, 1000, rng), 0u);
  EXPECT_GT(check_cost_dominates_metric(*grid, [](double d) { return d; }, 1000, rng), 0u);
}

TEST(Verify, FlagsPositiveEstimate) {
  auto ex31 = make_example(example_variant::ex31);
  auto m = make_move_record(*ex31, 0, pt(0.0), pt(0.1), 0.0);
  m.f_value = 0.1;
  auto v = verify_descent_invariants(std::vector<move_record>{m});
  ASSERT_FALSE(v.empty());
  std::size_t rule = 0;
  for (const auto& x : v) rule += x.kind == violation_kind::threshold_rule;
  EXPECT_EQ(rule, 1u);
}

TEST(Verify, EmptyTrajectoryIsClean) {
  trajectory t;
  t.initial = pt(0.0);
  EXPECT_TRUE(verify_descent_invariants(t).empty());
  EXPECT_TRUE(verify_descent_invariants(std::vector<move_record>{}).empty());
}

TEST(Verify, FlagsRaisedThresholdAndBrokenChain) {
  auto ex41 = make_example(example_variant::ex41);
  std::vector<move_record> moves{make_move_record(*ex41, 0, pt(0.0), pt(0.5), 0.1),
                                 make_move_record(*ex41, 1, pt(0.6), pt(0.9), 0.2)};
  std::size_t order = 0, chain = 0;
  for (const auto& v : verify_descent_invariants(moves)) {
    order += v.kind == violation_kind::threshold_order;
    chain += v.kind == violation_kind::chain;
  }
  EXPECT_EQ(order, 1u);
  EXPECT_EQ(chain, 1u);
}

TEST(Verify, FlagsDescentRelationFailure) {
  auto ex41 = make_example(example_variant::ex41);
  auto m = make_move_record(*ex41, 0, pt(0.0), pt(0.5), 0.1);
  m.u_to = m.u_from + 0.05;  // gain below delta with b = c = 0
  m.e_value = m.u_from - m.u_to;
  std::size_t relation = 0;
  for (const auto& v : verify_descent_invariants(std::vector<move_record>{m})) {
    relation += v.kind == violation_kind::descent_relation;
  }
  EXPECT_EQ(relation, 1u);
}

TEST(Boundedness, Examples) {
  auto ex31 = make_example(example_variant::ex31);
  auto r31 = tdm_solve(*ex31, pt(0.0), threshold_schedule{}, search_policy{}, solve_budget{}, 3);
  EXPECT_LE(boundedness_monitor(*ex31, r31.path).max_norm, 1.0);

  auto ex41 = make_example(example_variant::ex41);
  auto r41 = tdm_solve(*ex41, pt(0.0), threshold_schedule{.delta0 = 0.25}, search_policy{}, solve_budget{}, 3);
  auto b41 = boundedness_monitor(*ex41, r41.path);
  EXPECT_GE(b41.u_min, 0.0);
  EXPECT_LE(b41.u_max, 1.0);
  EXPECT_EQ(b41.u_min, 0.0);

  auto tel = models::make_telecom_model({});
  auto rt = tdm_solve(*tel, tel->default_initial(), threshold_schedule{.delta_min = 1e-3},
                      search_policy{.samples_per_round = 16}, solve_budget{.max_moves = 200}, 3, 64);
  EXPECT_LE(boundedness_monitor(*tel, rt.path).max_norm, tel->max_link_cap());
}

TEST(Audit, TelecomAndExample41) {
  auto tel = audit_assumptions(*models::make_telecom_model({}), 500, 1);
  EXPECT_TRUE(tel.base_ok);
  EXPECT_EQ(tel.triangle_violations, 0u);
  EXPECT_EQ(tel.a4pp.violations, 0u);

  auto ex41 = audit_assumptions(*make_example(example_variant::ex41), 500, 1);
  EXPECT_FALSE(ex41.b1.holds);
  EXPECT_EQ(ex41.b1.min_cost, 0.0);
}

}  // namespace
}  // namespace relopt
