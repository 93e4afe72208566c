#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tcost/core_model.hpp"
#include "tcost/errors.hpp"
#include "tcost/gap_solver.hpp"

using namespace tcost;
using tcost::testing::integrate_riccati;
using tcost::testing::quadrature;

namespace {

const Preferences kPrefs{0.03125};

GapSolution solved(double mu_bar, double eps, double sigma = 0.16) {
  return solve_gap({mu_bar * sigma * sigma, sigma, eps}, kPrefs);
}

std::vector<double> grid(const GapSolution& gap, int n) {
  std::vector<double> ys;
  for (int i = 1; i <= n; ++i) ys.push_back(gap.y_max * i / (n + 1));
  return ys;
}

}  // namespace

TEST(CoreModel, InitialAndTerminalValues) {
  for (double mb : {0.2, 0.5, 1.0, 3.125}) {
    const GapSolution gap = solved(mb, 0.01);
    EXPECT_NEAR(eval_w(gap, 0.0), gap.mu_bar - gap.lambda_bar, 1e-14);
    EXPECT_NEAR(eval_w(gap, gap.y_max), gap.mu_bar + gap.lambda_bar, 1e-8);
    EXPECT_DOUBLE_EQ(eval_k(gap, 0.0), 1.0);
    EXPECT_NEAR(eval_k(gap, gap.y_max),
                (gap.mu_bar - gap.lambda_bar) / (gap.mu_bar + gap.lambda_bar), 1e-8);
    EXPECT_DOUBLE_EQ(eval_g(gap, 0.0), 1.0);
    EXPECT_NEAR(eval_g(gap, gap.y_max), (1.0 - 0.01) * gap.u / gap.l, 1e-8);
  }
}

TEST(CoreModel, BandEndpoints) {
  const GapSolution gap = solved(3.125, 0.01);
  EXPECT_DOUBLE_EQ(gap.l, (gap.mu_bar - gap.lambda_bar) / kPrefs.alpha);
  EXPECT_DOUBLE_EQ(gap.u, (gap.mu_bar + gap.lambda_bar) / ((1.0 - 0.01) * kPrefs.alpha));
  EXPECT_GT(gap.u, gap.l);
  EXPECT_NEAR(gap.y_max, std::log(gap.u / gap.l), 1e-14);
  EXPECT_DOUBLE_EQ(gap.b, 0.5 - gap.lambda_bar);
  const double d = gap.mu_bar * gap.mu_bar - gap.lambda_bar * gap.lambda_bar -
                   (0.5 - gap.mu_bar) * (0.5 - gap.mu_bar);
  EXPECT_NEAR(gap.a, std::sqrt(std::fabs(d)), 1e-14);
}

TEST(CoreModel, WMatchesRungeKuttaAtFixedPoint) {
  const GapSolution gap = solved(3.125, 0.01);
  EXPECT_NEAR(eval_w(gap, 0.05), integrate_riccati(gap, 0.05).w, 1e-8);
}

TEST(CoreModel, BothBranchesMatchRungeKuttaOnGrid) {
  for (double mb : {0.2, 3.125}) {
    const GapSolution gap = solved(mb, 0.01);
    EXPECT_EQ(gap.branch, mb < 1.0 ? Branch::Hyperbolic : Branch::Trigonometric);
    for (double y : grid(gap, 25)) {
      const auto ref = integrate_riccati(gap, y);
      EXPECT_NEAR(eval_w(gap, y), ref.w, 1e-8) << "mu_bar=" << mb << " y=" << y;
      EXPECT_NEAR(eval_k(gap, y), ref.k, 1e-8) << "mu_bar=" << mb << " y=" << y;
      EXPECT_NEAR(eval_w_integral(gap, y), ref.int_w, 1e-8);
      EXPECT_NEAR(eval_g(gap, y), ref.g, 1e-8);
    }
  }
}

TEST(CoreModel, GMatchesQuadratureOfInverseK) {
  const GapSolution gap = solved(3.125, 0.01);
  const double y = 0.5 * gap.y_max;
  const double ref = 1.0 + quadrature([&](double z) { return 1.0 / eval_k(gap, z); }, 0.0, y);
  EXPECT_NEAR(eval_g(gap, y), ref, 1e-8);
}

TEST(CoreModel, SmoothPasting) {
  for (double mb : {0.2, 3.125}) {
    const GapSolution gap = solved(mb, 0.01);
    EXPECT_NEAR(eval_g_prime(gap, 0.0), 1.0, 1e-9);
    EXPECT_NEAR(eval_g_prime(gap, gap.y_max), 1.0 - 0.01, 1e-9);
  }
}

TEST(CoreModel, RiccatiResidualByFiniteDifferences) {
  for (double mb : {0.2, 3.125}) {
    const GapSolution gap = solved(mb, 0.01);
    const double h = 1e-5 * gap.y_max;
    const double c = gap.mu_bar * gap.mu_bar - gap.lambda_bar * gap.lambda_bar;
    for (double y : grid(gap, 200)) {
      const double w = eval_w(gap, y);
      const double dw = (eval_w(gap, y + h) - eval_w(gap, y - h)) / (2.0 * h);
      EXPECT_LE(std::fabs(dw - w * w + (2.0 * gap.mu_bar - 1.0) * w - c), 1e-6);
      EXPECT_NEAR(eval_w_prime(gap, y), dw, 1e-6);
    }
  }
}

TEST(CoreModel, Monotonicity) {
  for (double mb : {0.2, 0.5, 3.125}) {
    const GapSolution gap = solved(mb, 0.01);
    double w = eval_w(gap, 0.0), k = eval_k(gap, 0.0), g = eval_g(gap, 0.0);
    for (int i = 1; i <= 200; ++i) {
      const double y = gap.y_max * i / 200.0;
      const double w2 = eval_w(gap, y), k2 = eval_k(gap, y), g2 = eval_g(gap, y);
      EXPECT_GE(w2, w);
      EXPECT_LT(k2, k);
      EXPECT_GT(k2, 0.0);
      EXPECT_GT(g2, g);
      w = w2;
      k = k2;
      g = g2;
    }
  }
}

TEST(CoreModel, NearDegenerateSeriesMatchesRungeKutta) {
  // Trial gap with D = mu_bar - 1/4 - lambda^2 of order 1e-14.
  const double mb = 1.0;
  const MarketParams m{mb * 0.0256, 0.16, 0.01};
  for (double shift : {-1e-14, 0.0, 1e-14}) {
    const double lambda = std::sqrt(mb - 0.25 + shift);
    const GapSolution cand = make_gap_candidate(m, kPrefs, lambda);
    ASSERT_TRUE(cand.near_degenerate);
    for (double y : {0.01, 0.1, 0.5 * cand.y_max, cand.y_max}) {
      const auto ref = integrate_riccati(mb, lambda, y);
      EXPECT_NEAR(eval_w(cand, y), ref.w, 1e-8);
      EXPECT_NEAR(eval_k(cand, y), ref.k, 1e-8);
      EXPECT_NEAR(eval_w_integral(cand, y), ref.int_w, 1e-8);
    }
  }
}

TEST(CoreModel, SeriesIsContinuousWithClosedForms) {
  const double mb = 1.0;
  const MarketParams m{mb * 0.0256, 0.16, 0.01};
  const double lam0 = std::sqrt(mb - 0.25);
  const double y = 0.2;
  const GapSolution below = make_gap_candidate(m, kPrefs, lam0 - 1e-7);  // D > 0, closed form
  const GapSolution above = make_gap_candidate(m, kPrefs, lam0 + 1e-7);  // D < 0, closed form
  const GapSolution at = make_gap_candidate(m, kPrefs, lam0);
  ASSERT_FALSE(below.near_degenerate);
  ASSERT_FALSE(above.near_degenerate);
  ASSERT_TRUE(at.near_degenerate);
  EXPECT_NEAR(eval_w(at, y), 0.5 * (eval_w(below, y) + eval_w(above, y)), 1e-6);
  EXPECT_NEAR(eval_k(at, y), 0.5 * (eval_k(below, y) + eval_k(above, y)), 1e-6);
}

TEST(CoreModel, BranchFollowsDiscriminantSign) {
  // Near mu_bar = 1/4 the sign of D, not mu_bar - 1/4, decides the branch.
  const MarketParams m{0.26 * 0.0256, 0.16, 0.01};
  EXPECT_EQ(make_gap_candidate(m, kPrefs, 0.05).branch, Branch::Trigonometric);
  EXPECT_EQ(make_gap_candidate(m, kPrefs, 0.2).branch, Branch::Hyperbolic);
}

TEST(CoreModel, DomainHandling) {
  const GapSolution gap = solved(3.125, 0.01);
  EXPECT_EQ(clamp_state(gap, -1e-13 * gap.y_max), 0.0);
  EXPECT_EQ(clamp_state(gap, gap.y_max * (1.0 + 1e-13)), gap.y_max);
  EXPECT_THROW((void)eval_w(gap, -1e-6), DomainError);
  EXPECT_THROW((void)eval_k(gap, gap.y_max + 1e-6), DomainError);
  EXPECT_THROW((void)eval_g(gap, 2.0 * gap.y_max), DomainError);
}

TEST(CoreModel, CandidateValidation) {
  const MarketParams m{0.08, 0.16, 0.01};
  EXPECT_THROW((void)make_gap_candidate(m, kPrefs, 0.0), ValidationError);
  EXPECT_THROW((void)make_gap_candidate(m, kPrefs, 3.125), ValidationError);
  EXPECT_THROW((void)make_gap_candidate({0.08, 0.16, 0.0}, kPrefs, 0.1), ValidationError);
  EXPECT_THROW((void)make_gap_candidate({0.08, 0.16, 1.0}, kPrefs, 0.1), ValidationError);
  EXPECT_THROW((void)make_gap_candidate({-0.08, 0.16, 0.01}, kPrefs, 0.1), ValidationError);
  EXPECT_THROW((void)make_gap_candidate({0.08, 0.0, 0.01}, kPrefs, 0.1), ValidationError);
  EXPECT_THROW((void)make_gap_candidate(m, {0.0}, 0.1), ValidationError);
}

TEST(CoreModel, BlowUpReportsInfinity) {
  // A trial gap far below the root makes the tan solution reach its pole.
  const MarketParams m{0.08, 0.16, 0.9};
  const GapSolution cand = make_gap_candidate(m, kPrefs, 0.01);
  ASSERT_GT(cand.a * cand.y_max, cand.phase);
  EXPECT_TRUE(std::isinf(eval_w(cand, cand.y_max)));
  EXPECT_TRUE(std::isfinite(eval_w(cand, 0.5 * cand.phase / cand.a)));
}
