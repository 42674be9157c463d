#include <cmath>

#include <gtest/gtest.h>

#include "ladpm/analysis.hpp"
#include "ladpm/errors.hpp"
#include "ladpm/oracle.hpp"

namespace ladpm {
namespace {

const EstimateStep kWorked = EstimateStep::from_ratio(0.9, 0.5, 0.1, 0.3, 1.0);

TEST(EstimateStep, WorkedExampleDerivedQuantities) {
  EXPECT_NEAR(kWorked.gamma_next, 0.45, 1e-15);
  EXPECT_NEAR(kWorked.gamma_ratio(), 0.5, 1e-15);
  EXPECT_NEAR(kWorked.phi_cond_sq(), 0.0875, 1e-15);
  EXPECT_NO_THROW(kWorked.validate());
}

TEST(EstimateStep, Validation) {
  EXPECT_THROW((EstimateStep{1.0, 0.5, 0.1, 0.3, 1.0}.validate()), ConfigError);
  EXPECT_THROW((EstimateStep{0.5, 0.6, 0.1, 0.3, 1.0}.validate()), ConfigError);
  EXPECT_THROW((EstimateStep{0.5, 0.4, 0.3, 0.3, 1.0}.validate()), ConfigError);
  EXPECT_THROW((EstimateStep{0.5, 0.4, 0.1, 0.3, 0.0}.validate()), ConfigError);
  EstimateSequence seq{{0.9, 0.45, 0.2}, {0.1, 0.3, 0.5}, 1.0};
  EXPECT_NO_THROW(seq.validate());
  EXPECT_NEAR(seq.at(1).gamma_ratio(), 0.2 / 0.45, 1e-15);
  seq.phi = {0.1, 0.3};
  EXPECT_THROW(seq.validate(), ConfigError);
}

TEST(ExpectedSqError, BaselineAtZero) {
  EXPECT_NEAR(expected_sq_error(0.0, kWorked), 0.01 + 0.01, 1e-15);
}

TEST(ExpectedSqError, NoLookaheadInformationWhenRatioIsOne) {
  const EstimateStep p{0.6, 0.6, 0.2, 0.3, 1.0};
  const double base = expected_sq_error(0.0, p);
  for (double la : {0.1, 0.5, 1.0}) {
    EXPECT_NEAR(expected_sq_error(la, p), base + la * la * p.phi_cond_sq(), 1e-14);
  }
  EXPECT_EQ(optimal_lambda(p), 0.0);
}

TEST(OptimalLambda, WorkedExample) {
  EXPECT_NEAR(optimal_lambda(kWorked), 0.04 / 0.2925, 1e-15);
  EXPECT_NEAR(optimal_lambda(kWorked), 0.13675, 1e-5);
  EXPECT_NEAR(expected_sq_error_slope(optimal_lambda(kWorked), kWorked), 0.0, 1e-15);
}

TEST(OptimalLambda, BoundaryIsZero) {
  // phi_i^2 = gamma_i (1 - gamma_i) |x|^2 exactly.
  const EstimateStep p = EstimateStep::from_ratio(0.5, 0.6, 0.5, 0.7, 1.0);
  EXPECT_NEAR(optimal_lambda(p), 0.0, 1e-12);
  EXPECT_FALSE(positivity_condition(p));
}

TEST(OptimalLambda, ZeroDenominator) {
  EXPECT_THROW(optimal_lambda(EstimateStep{0.6, 0.6, 0.0, 0.0, 1.0}), NumericError);
}

TEST(OptimalLambda, DimensionScalingMatchesMonteCarlo) {
  const EstimateStep p = EstimateStep::from_ratio(0.8, 0.5, 0.1, 0.2, 1.0);
  const Vec x = Vec::Constant(3, 1.0 / std::sqrt(3.0));
  const auto mc = simulate_estimate_process(p, x, {0.0, 0.2, 0.5}, 200000, 3);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(mc.mse[k], expected_sq_error(mc.lambdas[k], p, 3), 3.0 * mc.std_error[k]);
  }
}

TEST(Positivity, Examples) {
  EXPECT_TRUE(positivity_condition(EstimateStep::from_ratio(0.4, 0.5, 0.0, 0.2, 1.0)));
  EXPECT_FALSE(positivity_condition(EstimateStep::from_ratio(0.999999, 0.5, 0.1, 0.3, 1.0)));
}

// Exhaustive grid: quadratic structure, stationarity and the sign equivalence.
TEST(OptimalLambda, GridProperties) {
  int count = 0;
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b < 10; ++b) {
      for (int c = 0; c < 10; ++c) {
        for (int d = 0; d < 10; ++d) {
          const double g = 0.05 + 0.1 * a;
          const double r = 0.1 + 0.0989 * b;
          const double phi = 0.6 * c / 9.0;
          const EstimateStep p = EstimateStep::from_ratio(g, r, phi, phi + 0.05 + 0.05 * d, 1.0);
          const double ls = optimal_lambda(p);
          EXPECT_LT(std::abs(expected_sq_error_slope(ls, p)), 1e-10);
          const double second = expected_sq_error(ls + 0.1, p) - 2 * expected_sq_error(ls, p) +
                                expected_sq_error(ls - 0.1, p);
          EXPECT_GT(second, 0.0);
          EXPECT_EQ(positivity_condition(p), ls > 0.0);
          ++count;
        }
      }
    }
  }
  EXPECT_EQ(count, 10000);
}

TEST(MonteCarlo, ZeroStrengthMatchesClosedForm) {
  const auto mc = simulate_estimate_process(kWorked, Vec::Ones(1), {0.0}, 100000, 1);
  EXPECT_NEAR(mc.mse[0], expected_sq_error(0.0, kWorked), 3.0 * mc.std_error[0]);
}

TEST(SqErrorVariance, MatchesMonteCarloSpread) {
  const auto mc = simulate_estimate_process(kWorked, Vec::Ones(1), {0.0, 0.3}, 400000, 12);
  for (std::size_t k = 0; k < 2; ++k) {
    const double empirical = mc.std_error[k] * mc.std_error[k] * 400000.0;
    EXPECT_NEAR(empirical / sq_error_variance(mc.lambdas[k], kWorked), 1.0, 0.03);
  }
  EXPECT_EQ(sq_error_variance(0.2, EstimateStep{0.9, 0.45, 0.0, 0.0, 1.0}), 0.0);
}

TEST(MonteCarlo, NoiseFreeProcessIsDeterministic) {
  const EstimateStep p{0.9, 0.45, 0.0, 0.0, 1.0};
  const auto mc = simulate_estimate_process(p, Vec::Ones(1), {0.0, 0.25, 0.5}, 1000, 2);
  for (std::size_t k = 0; k < 3; ++k) {
    const double kk = 1.0 + mc.lambdas[k] * (1.0 - 0.5);
    EXPECT_NEAR(mc.mse[k], (kk * 0.9 - 1.0) * (kk * 0.9 - 1.0), 1e-14);
    EXPECT_NEAR(mc.std_error[k], 0.0, 1e-14);
  }
}

TEST(MonteCarlo, ArgminNearOptimum) {
  const auto grid = lambda_grid();
  const auto mc = simulate_estimate_process(kWorked, Vec::Ones(1), grid, 1000000, 5);
  EXPECT_NEAR(mc.argmin_lambda(), optimal_lambda(kWorked), 0.02);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(mc.mse[k], expected_sq_error(grid[k], kWorked), 3.0 * mc.std_error[k]);
  }
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  const auto grid = lambda_grid(0.0, 0.3, 0.1);
  const auto a = simulate_estimate_process(kWorked, Vec::Ones(1), grid, 300000, 9, 1);
  const auto b = simulate_estimate_process(kWorked, Vec::Ones(1), grid, 300000, 9, 3);
  EXPECT_EQ(a.mse, b.mse);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(MonteCarlo, Preconditions) {
  EXPECT_THROW(simulate_estimate_process(kWorked, Vec::Ones(1), {0.0}, 0, 1), ConfigError);
  EXPECT_THROW(simulate_estimate_process(kWorked, Vec::Ones(1), {}, 10, 1), ConfigError);
}

TEST(LambdaGrid, DefaultSpansZeroToHalf) {
  const auto g = lambda_grid();
  ASSERT_EQ(g.size(), 51u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_NEAR(g.back(), 0.5, 1e-15);
  EXPECT_THROW(lambda_grid(0.0, 1.0, 0.0), ConfigError);
}

Trajectory make_traj(std::vector<std::pair<double, double>> xs) {
  Trajectory t;
  int step = static_cast<int>(xs.size());
  for (auto [xh, xt] : xs) t.records.push_back({step--, 0.5, Vec::Zero(1), Vec::Zero(1), Vec::Constant(1, xh), Vec::Constant(1, xt)});
  t.records.push_back({0, 0.001, Vec::Zero(1), Vec::Zero(1), Vec::Zero(1), Vec::Zero(1)});
  return t;
}

TEST(MseTrace, ValuesAndAlignment) {
  const auto tr = xhat_mse_trace(make_traj({{1.0, 1.0}, {2.0, 3.0}}), Vec::Constant(1, 1.0));
  EXPECT_EQ(tr.steps, (std::vector<int>{2, 1}));
  EXPECT_EQ(tr.xhat_sq_error, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(tr.xtilde_sq_error, (std::vector<double>{0.0, 4.0}));
}

TEST(MseTrace, MissingFields) {
  Trajectory t = make_traj({{1.0, 1.0}});
  t.records.front().xtilde = Vec();
  EXPECT_THROW(xhat_mse_trace(t, Vec::Ones(1)), ConfigError);
  EXPECT_THROW(xhat_mse_trace(Trajectory{}, Vec::Ones(1)), ConfigError);
}

TEST(MseTrace, MeanOverTrajectories) {
  const auto m = mean_mse_trace({make_traj({{1.0, 2.0}}), make_traj({{3.0, 2.0}})}, {Vec::Ones(1), Vec::Ones(1)});
  EXPECT_EQ(m.xhat_sq_error, (std::vector<double>{2.0}));
  EXPECT_EQ(m.xtilde_sq_error, (std::vector<double>{1.0}));
}

}  // namespace
}  // namespace ladpm
