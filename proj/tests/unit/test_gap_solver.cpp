#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tcost/errors.hpp"
#include "tcost/gap_solver.hpp"

using namespace tcost;

namespace {

const Preferences kPrefs{0.03125};
const MarketParams kBase{0.08, 0.16, 0.01};

MarketParams with_mu_bar(double mb, double eps) { return {mb * 0.0256, 0.16, eps}; }

}  // namespace

TEST(GapSolver, ResidualBelowToleranceOnGrid) {
  for (double mb : {0.2, 0.5, 1.0, 3.125}) {
    for (double eps : {1e-4, 1e-3, 1e-2}) {
      const GapSolution gap = solve_gap(with_mu_bar(mb, eps), kPrefs);
      EXPECT_LE(std::fabs(gap.residual), 1e-9) << mb << ' ' << eps;
      EXPECT_GT(gap.lambda_bar, 0.0);
      EXPECT_LT(gap.lambda_bar, mb);
    }
  }
}

TEST(GapSolver, RootAgreesWithRungeKuttaTerminalCondition) {
  for (double mb : {0.2, 3.125}) {
    const GapSolution gap = solve_gap(with_mu_bar(mb, 0.01), kPrefs);
    const auto ref = tcost::testing::integrate_riccati(gap, gap.y_max);
    EXPECT_NEAR(ref.w, gap.mu_bar + gap.lambda_bar, 1e-8);
  }
}

TEST(GapSolver, BaselineGapGolden) {
  const GapSolution gap = solve_gap(kBase, kPrefs);
  EXPECT_NEAR(gap.lambda_bar, 0.4184, 0.02);
  EXPECT_NEAR(gap.lambda_bar, 0.41146437058200830, 1e-12);  // frozen after verification
  const double ratio = gap.lambda_bar / gap_leading_order(kBase).lambda_leading;
  EXPECT_GE(ratio, 0.9);
  EXPECT_LE(ratio, 1.1);
}

TEST(GapSolver, LeadingRatioTightensAsSpreadShrinks) {
  double prev = 1.0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    MarketParams m = kBase;
    m.epsilon = eps;
    const double dev = std::fabs(solve_gap(m, kPrefs).lambda_bar / gap_leading_order(m).lambda_leading - 1.0);
    EXPECT_LT(dev, prev);
    prev = dev;
  }
}

TEST(GapSolver, ZeroSpreadLimit) {
  MarketParams m = kBase;
  m.epsilon = 1e-10;
  EXPECT_LT(solve_gap(m, kPrefs).lambda_bar, 1e-3);
}

TEST(GapSolver, LeadingOrderArithmetic) {
  EXPECT_NEAR(gap_leading_order(kBase).lambda_leading, 0.418, 5e-4);
  EXPECT_NEAR(gap_leading_order(kBase).lambda_leading, 0.4183956, 1e-7);
  EXPECT_NEAR(gap_leading_order(kBase).lambda_leading, std::cbrt(7.32421875) * std::cbrt(0.01), 1e-14);
  EXPECT_EQ(gap_leading_order(3.125, 0.0), 0.0);
  EXPECT_NEAR(gap_leading_order(1.0, 1e-6), std::cbrt(0.75) * 0.01, 1e-15);
  EXPECT_NEAR(gap_leading_order(1.0, 1e-6), 0.009086, 5e-7);
  EXPECT_EQ(gap_leading_order(kBase).order, 0);
}

TEST(GapSolver, RemainderOrderBothBranches) {
  const std::vector<double> grid{1e-2, 1e-3, 1e-4, 1e-5};
  for (double mb : {3.125, 0.2}) {
    const OrderFit fit = verify_asymptotic_order(mb * 0.0256, 0.16, grid);
    EXPECT_GE(fit.slope, 0.9) << mb;
    EXPECT_LE(fit.slope, 1.2) << mb;
  }
}

TEST(GapSolver, OrderFitValidation) {
  const std::vector<double> one{1e-2};
  EXPECT_THROW((void)verify_asymptotic_order(0.08, 0.16, one), ValidationError);
  const std::vector<double> e{1e-2, 1e-3}, bad{1.0, 0.0};
  EXPECT_THROW((void)fit_power_order(e, bad), ValidationError);
  const std::vector<double> r{2e-2, 2e-3};
  EXPECT_NEAR(fit_power_order(e, r).slope, 1.0, 1e-12);
  EXPECT_NEAR(fit_power_order(e, r).intercept, std::log(2.0), 1e-12);
}

TEST(GapSolver, ResidualChangesSignOnce) {
  for (double mb : {0.2, 1.0, 3.125}) {
    for (double eps : {1e-3, 1e-2}) {
      int changes = 0;
      double prev = gap_residual(mb, eps, mb * 1e-6);
      const int n = 4000;
      for (int i = 1; i <= n; ++i) {
        const double lam = mb * (1.0 - 1e-6) * i / n;
        const double r = gap_residual(mb, eps, lam);
        if (std::isfinite(prev) && std::isfinite(r) && (prev > 0.0) != (r > 0.0)) ++changes;
        if (std::isfinite(r)) prev = r;
      }
      EXPECT_EQ(changes, 1) << mb << ' ' << eps;
    }
  }
}

TEST(GapSolver, MonotoneInSpread) {
  double prev = 0.0;
  for (double eps : {1e-5, 1e-4, 1e-3, 1e-2, 5e-2, 0.1}) {
    MarketParams m = kBase;
    m.epsilon = eps;
    const double lam = solve_gap(m, kPrefs).lambda_bar;
    EXPECT_GT(lam, prev);
    prev = lam;
  }
}

TEST(GapSolver, DependsOnlyOnMuBarAndSpread) {
  const double base = solve_gap(kBase, kPrefs).lambda_bar;
  for (double c : {0.5, 2.0, 10.0}) {
    const MarketParams m{c * 0.08, std::sqrt(c) * 0.16, 0.01};
    EXPECT_NEAR(solve_gap(m, kPrefs).lambda_bar, base, 1e-12);
  }
  EXPECT_NEAR(solve_gap(kBase, {0.3125}).lambda_bar, base, 1e-12);
  EXPECT_NEAR(solve_gap(kBase, {3.0}).lambda_bar, base, 1e-12);
}

TEST(GapSolver, ConfigValidation) {
  SolverConfig c;
  c.tol_residual = 0.0;
  EXPECT_THROW((void)solve_gap(kBase, kPrefs, c), ValidationError);
  c = {};
  c.max_iter = 0;
  EXPECT_THROW((void)solve_gap(kBase, kPrefs, c), ValidationError);
  c = {};
  c.bracket_shrink = 1.5;
  EXPECT_THROW((void)solve_gap(kBase, kPrefs, c), ValidationError);
}

TEST(GapSolver, MaxIterationsReported) {
  SolverConfig c;
  c.max_iter = 1;
  c.tol_residual = 1e-15;
  EXPECT_THROW((void)solve_gap(kBase, kPrefs, c), MaxIterExceededError);
}
