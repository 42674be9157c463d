#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "ladpm/deis.hpp"
#include "ladpm/errors.hpp"

namespace ladpm {
namespace {

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const GaussLegendre rule(8);
  EXPECT_NEAR(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0), 2.0, 1e-14);
  for (int p = 0; p <= 15; ++p) {
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * std::pow(rule.nodes[k], p);
    const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
    EXPECT_NEAR(sum, exact, 1e-13) << p;
  }
}

TEST(DeisCoeffs, OrderZeroIsDdimCoefficient) {
  for (const auto& sched : {Schedule::continuous_vp(), Schedule::discrete_vp()}) {
    const TimeGrid grid(sched, 25, Spacing::UniformTime);
    for (int i = 1; i <= 25; ++i) {
      const auto c = deis_tab_coeffs(sched, grid, i, 0);
      ASSERT_EQ(c.size(), 1u);
      const double expected = sched.sigma(grid[i - 1]) - sched.alpha(grid[i - 1]) * sched.sigma(grid[i]) / sched.alpha(grid[i]);
      EXPECT_NEAR(c[0], expected, 1e-12 * std::max(1.0, std::abs(expected))) << i;
    }
  }
}

TEST(DeisCoeffs, PartitionOfUnity) {
  for (const auto& sched : {Schedule::continuous_vp(), Schedule::discrete_vp()}) {
    const TimeGrid grid(sched, 20, Spacing::UniformLogSnr);
    for (int r = 1; r <= 3; ++r) {
      for (int i = 1; i + r <= 20; ++i) {
        const auto c = deis_tab_coeffs(sched, grid, i, r);
        const double sum = std::accumulate(c.begin(), c.end(), 0.0);
        const double c0 = deis_tab_coeffs(sched, grid, i, 0)[0];
        EXPECT_NEAR(sum, c0, 1e-12) << "i=" << i << " r=" << r;
      }
    }
  }
}

TEST(DeisCoeffs, QuadratureSelfConvergence) {
  const auto sched = Schedule::discrete_vp();
  const TimeGrid grid(sched, 15, Spacing::UniformTime);
  for (int i = 1; i + 3 <= 15; ++i) {
    const auto a = deis_tab_coeffs(sched, grid, i, 3, 64);
    const auto b = deis_tab_coeffs(sched, grid, i, 3, 128);
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-10);
  }
}

// c_ij = alpha_{i-1} int_{t_i}^{t_{i-1}} L_j(tau) rho'(tau) dtau by Simpson in t,
// with rho'(t) from the closed-form continuous schedule.
TEST(DeisCoeffs, MatchesDirectTimeIntegration) {
  const double b0 = 0.1;
  const double b1 = 20.0;
  const auto sched = Schedule::continuous_vp(b0, b1);
  const TimeGrid grid(sched, 12, Spacing::UniformTime);
  auto drho = [&](double t) {
    const double la = -0.25 * t * t * (b1 - b0) - 0.5 * t * b0;
    const double dla = -0.5 * t * (b1 - b0) - 0.5 * b0;
    const double rho = std::sqrt(std::expm1(-2.0 * la));
    return -std::exp(-2.0 * la) * dla / rho;
  };
  const int r = 2;
  for (int i = 1; i + r <= 12; ++i) {
    const auto c = deis_tab_coeffs(sched, grid, i, r);
    for (int j = 0; j <= r; ++j) {
      auto lagrange = [&](double t) {
        double v = 1.0;
        for (int m = 0; m <= r; ++m) {
          if (m != j) v *= (t - grid[i + m]) / (grid[i + j] - grid[i + m]);
        }
        return v;
      };
      const int n = 20000;
      const double lo = grid[i];
      const double hi = grid[i - 1];
      const double h = (hi - lo) / n;
      double sum = 0.0;
      for (int k = 0; k <= n; ++k) {
        const double t = lo + h * k;
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        sum += w * lagrange(t) * drho(t);
      }
      const double expected = sched.alpha(hi) * sum * h / 3.0;
      EXPECT_NEAR(c[static_cast<std::size_t>(j)], expected, 1e-9) << "i=" << i << " j=" << j;
    }
  }
}

TEST(DeisCoeffs, RejectsWindowsPastTheGrid) {
  const auto sched = Schedule::continuous_vp();
  const TimeGrid grid(sched, 10, Spacing::UniformTime);
  EXPECT_THROW(deis_tab_coeffs(sched, grid, 9, 2), ConfigError);
  EXPECT_THROW(deis_tab_coeffs(sched, grid, 0, 0), ConfigError);
  EXPECT_THROW(deis_tab_coeffs(sched, grid, 3, -1), ConfigError);
}

TEST(DeisTable, OrderCapShrinksNearTheStart) {
  const auto sched = Schedule::continuous_vp();
  const TimeGrid grid(sched, 10, Spacing::UniformTime);
  const DeisTable table(sched, grid, 3);
  EXPECT_EQ(table.order_cap(10), 0);
  EXPECT_EQ(table.order_cap(9), 1);
  EXPECT_EQ(table.order_cap(8), 2);
  EXPECT_EQ(table.order_cap(7), 3);
  EXPECT_EQ(table.order_cap(1), 3);
  EXPECT_THROW(table.coeffs(9, 2), SequencingError);
  const auto c = table.coeffs(5, 3);
  const auto direct = deis_tab_coeffs(sched, grid, 5, 3);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(c[j], direct[j]);
}

}  // namespace
}  // namespace ladpm
