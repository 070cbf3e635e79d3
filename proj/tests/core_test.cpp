#include <gtest/gtest.h>

#include "relopt/core.hpp"
#include "relopt/models.hpp"
#include "support/test_models.hpp"

namespace relopt {
namespace {

using models::example_variant;
using models::make_example;

state_point pt(double v) { return state_point::scalar(v); }

TEST(TrueUtility, ExampleValues) {
  auto ex31 = make_example(example_variant::ex31);
  auto ex41 = make_example(example_variant::ex41);
  EXPECT_DOUBLE_EQ(true_utility(*ex31, pt(0.0)), 1.0);
  EXPECT_DOUBLE_EQ(true_utility(*ex41, pt(0.5)), 0.5);
  EXPECT_NEAR(true_utility(*ex31, pt(0.1)), 0.975, 1e-15);
}

TEST(TrueUtility, RejectsPointsOutsideX) {
  auto ex31 = make_example(example_variant::ex31);
  EXPECT_THROW(true_utility(*ex31, pt(1.5)), domain_error);
  EXPECT_THROW(true_utility(*ex31, pt(-0.1)), domain_error);
  EXPECT_THROW(true_utility(*ex31, state_point({0.1, 0.2})), domain_error);
  EXPECT_THROW(true_utility(*ex31, pt(std::nan(""))), domain_error);
}

TEST(PureExpenseEstimate, ExampleValues) {
  auto ex31 = make_example(example_variant::ex31);
  auto ex32 = make_example(example_variant::ex32);
  EXPECT_NEAR(pure_expense_estimate(*ex31, pt(0.0), pt(0.1)), -0.005, 1e-12);
  EXPECT_NEAR(pure_expense_estimate(*ex32, pt(0.0), pt(0.2)), -0.05, 1e-12);
  for (double x : {0.0, 0.3, 0.5, 1.0}) EXPECT_EQ(pure_expense_estimate(*ex31, pt(x), pt(x)), 0.0);
}

TEST(PureExpenseEstimate, RejectsInfeasibleTarget) {
  auto ex31 = make_example(example_variant::ex31);
  // D(0) = [0, 0.1]
  EXPECT_THROW(pure_expense_estimate(*ex31, pt(0.0), pt(0.2)), feasibility_error);
  EXPECT_THROW(ex31->utility_estimate(pt(0.5), pt(0.4)), feasibility_error);
}

TEST(TruePureExpense, ExampleValues) {
  auto ex31 = make_example(example_variant::ex31);
  auto ex41 = make_example(example_variant::ex41);
  EXPECT_NEAR(true_pure_expense(*ex31, pt(0.0), pt(0.1)), 0.025, 1e-12);
  EXPECT_NEAR(true_pure_expense(*ex41, pt(0.0), pt(0.25)), -0.25, 1e-12);
  EXPECT_EQ(true_pure_expense(*ex41, pt(0.7), pt(0.7)), 0.0);
  // Defined outside D(x) too.
  EXPECT_NO_THROW(true_pure_expense(*ex31, pt(0.0), pt(0.9)));
  EXPECT_THROW(true_pure_expense(*ex31, pt(0.0), pt(1.1)), domain_error);
}

TEST(OverEstimate, ExampleValues) {
  auto ex31 = make_example(example_variant::ex31);
  for (double y : {0.5, 0.51, 0.53, 0.55}) EXPECT_EQ(over_estimate(*ex31, pt(0.5), pt(y)), 0.0);
  EXPECT_NEAR(over_estimate(*ex31, pt(0.0), pt(0.1)), 0.03, 1e-12);
  EXPECT_EQ(over_estimate(*ex31, pt(0.2), pt(0.2)), 0.0);
  EXPECT_THROW(over_estimate(*ex31, pt(0.0), pt(0.5)), feasibility_error);
}

TEST(ModelFault, NanEstimateAborts) {
  testing::nan_model m;
  EXPECT_THROW(pure_expense_estimate(m, pt(0.1), pt(0.2)), model_fault);
  EXPECT_EQ(pure_expense_estimate(m, pt(0.1), pt(0.1)), 0.0);
}

TEST(ModelFault, SamplerOutsideFeasibleSet) {
  testing::bad_sampler_model m;
  rng_type rng(3);
  EXPECT_THROW(m.sample_feasible(pt(0.2), rng, 1), model_fault);
}

TEST(MoveRecord, CarriesConsistentValues) {
  auto ex31 = make_example(example_variant::ex31);
  auto m = make_move_record(*ex31, 4, pt(0.0), pt(0.1), 0.001);
  EXPECT_EQ(m.step, 4u);
  EXPECT_NEAR(m.f_value, -0.005, 1e-12);
  EXPECT_NEAR(m.e_value, 0.025, 1e-12);
  EXPECT_NEAR(m.b_value, 0.03, 1e-12);
  EXPECT_EQ(m.c_value, 0.0);
  EXPECT_DOUBLE_EQ(m.u_from, 1.0);
  EXPECT_DOUBLE_EQ(m.threshold_at_move, 0.001);
  const double phi = ex31->utility_estimate(pt(0.0), pt(0.1));
  EXPECT_NEAR(m.e_value, m.f_value + (phi - m.u_to), 1e-12);
}

TEST(Trajectory, AppendEnforcesChain) {
  auto ex41 = make_example(example_variant::ex41);
  trajectory t;
  t.initial = pt(0.0);
  t.append(make_move_record(*ex41, 0, pt(0.0), pt(0.5), 0.0));
  EXPECT_EQ(t.current(), pt(0.5));
  EXPECT_THROW(t.append(make_move_record(*ex41, 1, pt(0.2), pt(0.6), 0.0)), std::logic_error);
  t.append(make_move_record(*ex41, 1, pt(0.5), pt(0.75), 0.0));
  EXPECT_NEAR(t.cumulative_estimate(), -0.75, 1e-15);
}

// Property: for every model and sampled pair, e - f = phi(x,y) - u(y) and
// e <= f + b; the diagonal has f = e = b = 0; the metric is symmetric.
TEST(CoreProperties, ExpenseIdentityOnAllModels) {
  for (const auto& model : testing::builtin_models()) {
    SCOPED_TRACE(model->name());
    const double tol = model->dimension() == 1 ? 1e-12 : 1e-9;
    rng_type rng(2024);
    std::size_t pairs = 0;
    while (pairs < 1000) {
      auto x = model->sample_state(rng);
      for (const auto& y : model->sample_feasible(x, rng, 10)) {
        const double f = pure_expense_estimate(*model, x, y);
        const double e = true_pure_expense(*model, x, y);
        const double b = over_estimate(*model, x, y);
        const double gap = model->utility_estimate(x, y) - true_utility(*model, y);
        ASSERT_NEAR(e - f, gap, tol);
        ASSERT_LE(e, f + b + tol);
        ASSERT_GE(b, 0.0);
        ASSERT_NEAR(model->metric(x, y), model->metric(y, x), 1e-15);
        ++pairs;
      }
      ASSERT_EQ(pure_expense_estimate(*model, x, x), 0.0);
      ASSERT_EQ(true_pure_expense(*model, x, x), 0.0);
      ASSERT_EQ(over_estimate(*model, x, x), 0.0);
      ASSERT_EQ(model->move_cost(x, x), 0.0);
      ASSERT_EQ(model->metric(x, x), 0.0);
      ASSERT_TRUE(model->feasible_contains(x, x));
    }
  }
}

TEST(CoreProperties, SamplerStaysFeasible) {
  auto models = testing::builtin_models();
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto& model = models[seed % models.size()];
    rng_type rng(seed);
    auto x = model->sample_state(rng);
    ASSERT_TRUE(model->state_contains(x)) << model->name();
    for (const auto& y : model->sample_feasible(x, rng, 4)) {
      ASSERT_TRUE(model->feasible_contains(x, y)) << model->name() << " seed " << seed;
      ASSERT_TRUE(model->state_contains(y)) << model->name() << " seed " << seed;
    }
  }
}

TEST(CoreProperties, EvaluationsArePure) {
  for (const auto& model : testing::builtin_models()) {
    rng_type rng(11);
    auto x = model->sample_state(rng);
    auto y = model->sample_feasible(x, rng, 1).front();
    EXPECT_EQ(model->utility_estimate(x, y), model->utility_estimate(x, y)) << model->name();
    EXPECT_EQ(model->move_cost(x, y), model->move_cost(x, y)) << model->name();
  }
}

}  // namespace
}  // namespace relopt
