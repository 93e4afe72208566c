#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "tcost/errors.hpp"
#include "tcost/gap_solver.hpp"
#include "tcost/metrics.hpp"
#include "tcost/simulator.hpp"

using namespace tcost;

namespace {

const Preferences kPrefs{0.03125};

ShadowModel base_model(double eps = 0.01) { return ShadowModel(solve_gap({0.08, 0.16, eps}, kPrefs)); }

SimConfig config(double horizon, double dt, std::size_t paths, std::uint64_t seed) {
  SimConfig c;
  c.horizon_years = horizon;
  c.dt_years = dt;
  c.n_paths = paths;
  c.seed = seed;
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST(Simulator, DeterministicReflection) {
  // Zero volatility: the state drifts up, reaches y_max at t = y_max / drift,
  // then every further step is clamped into U.
  NormalStream noise(1, 0);
  const ReflectedWalk walk{0.05, 0.0, 0.2};
  const ReflectionTotals r = run_reflected_walk(walk, 0.0, 10.0, 1e-3, noise);
  EXPECT_DOUBLE_EQ(r.y_final, 0.2);
  EXPECT_EQ(r.l_total, 0.0);
  EXPECT_NEAR(r.u_total, 0.05 * (10.0 - 4.0), 1e-9);
  const ReflectionTotals down = run_reflected_walk({-0.05, 0.0, 0.2}, 0.2, 10.0, 1e-3, noise);
  EXPECT_NEAR(down.l_total, 0.3, 1e-9);
  EXPECT_EQ(down.u_total, 0.0);
  EXPECT_THROW((void)run_reflected_walk({0.0, -1.0, 0.2}, 0.0, 1.0, 0.1, noise), ValidationError);
  EXPECT_THROW((void)run_reflected_walk(walk, 0.5, 1.0, 0.1, noise), DomainError);
}

TEST(Simulator, VanishingHorizonNoTrades) {
  const ShadowModel m = base_model();
  SimConfig c = config(1e-6, 1e-7, 1000, 5);
  c.y0 = 0.5 * m.y_max();
  for (const PathRecord& p : simulate_reflected(m, c)) {
    EXPECT_EQ(p.l_total, 0.0);
    EXPECT_EQ(p.u_total, 0.0);
  }
}

TEST(Simulator, StateContainmentAndLedger) {
  const ShadowModel m = base_model(0.001);
  SimConfig c = config(2.0, 1e-3, 16, 9);
  c.snapshot_every = 1;
  const auto paths = simulate_reflected(m, c);
  const double l = m.gap().l;
  const double eta_plus = (1.0 - 0.001) * m.gap().u;
  for (const PathRecord& p : paths) {
    ASSERT_EQ(p.snapshots.size(), c.n_steps() + 1);
    for (std::size_t i = 0; i < p.snapshots.size(); ++i) {
      const PathSnapshot& s = p.snapshots[i];
      EXPECT_GE(s.y, 0.0);
      EXPECT_LE(s.y, m.y_max());
      if (i == 0) continue;
      const double dl = s.l_total - p.snapshots[i - 1].l_total;
      const double du = s.u_total - p.snapshots[i - 1].u_total;
      EXPECT_GE(dl, 0.0);
      EXPECT_GE(du, 0.0);
      EXPECT_FALSE(dl > 0.0 && du > 0.0);
      if (dl > 0.0) EXPECT_EQ(s.y, 0.0);
      if (du > 0.0) EXPECT_EQ(s.y, m.y_max());
    }
    EXPECT_GT(p.l_total + p.u_total, 0.0);
    EXPECT_NEAR(p.bought_value / c.horizon_years, l * (p.l_total / c.horizon_years), 1e-12);
    EXPECT_NEAR(p.sold_value / c.horizon_years, eta_plus * (p.u_total / c.horizon_years), 1e-12);
    const double shares_ratio = p.snapshots.back().shares / p.snapshots.front().shares;
    EXPECT_NEAR(shares_ratio, std::exp(p.l_total - p.u_total), 1e-12);
  }
}

TEST(Simulator, ThreadCountDoesNotChangeResults) {
  const ShadowModel m = base_model();
  SimConfig c = config(1.0, 1e-3, 37, 123);
  c.track_shadow_wealth = true;
  const auto a = simulate_reflected(m, c);
  c.threads = 4;
  const auto b = simulate_reflected(m, c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(same_bits(a[i].y_final, b[i].y_final));
    EXPECT_TRUE(same_bits(a[i].l_total, b[i].l_total));
    EXPECT_TRUE(same_bits(a[i].u_total, b[i].u_total));
    EXPECT_TRUE(same_bits(a[i].wealth_terminal, b[i].wealth_terminal));
    EXPECT_TRUE(same_bits(a[i].shadow_wealth_terminal, b[i].shadow_wealth_terminal));
    EXPECT_TRUE(same_bits(a[i].avg_position, b[i].avg_position));
  }
  c.measure = Measure::RiskNeutral;
  c.threads = 1;
  const auto r1 = simulate_reflected(m, c);
  c.threads = 3;
  const auto r3 = simulate_reflected(m, c);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_TRUE(same_bits(r1[i].log_likelihood_ratio, r3[i].log_likelihood_ratio));
  }
  c.threads = 2;
  const SimResult s1 = run_simulation(m, c);
  const SimResult s2 = run_simulation(m, c);
  EXPECT_TRUE(same_bits(s1.ea.value, s2.ea.value));
  EXPECT_TRUE(same_bits(s1.ergodic.sht.value, s2.ergodic.sht.value));
}

TEST(Simulator, ErgodicEstimatesMatchClosedForms) {
  const ShadowModel m = base_model();
  const PolicyMetrics ref = compute_metrics(m.gap());
  const SimConfig c = config(100.0, 1e-4, 32, 77);
  const auto paths = simulate_reflected(m, c);
  const ErgodicEstimates e = account_trades(paths, c.horizon_years);
  auto check = [](const Estimate& est, double exact, const char* what) {
    EXPECT_GT(est.se, 0.0) << what;
    EXPECT_LE(std::fabs(est.value - exact), 3.0 * est.se) << what << " " << est.value << " vs "
                                                          << exact << " se " << est.se;
  };
  check(e.lt_buy, ref.lt_buy, "lt_buy");
  check(e.lt_sell, ref.lt_sell, "lt_sell");
  check(e.sht, ref.sht, "sht");
  check(e.wet, ref.wet, "wet");
  check(e.avg_position, ref.avg_position, "avg_position");
}

TEST(Simulator, StationaryDensityChiSquare) {
  // Snapshots two years apart are close to independent draws from the
  // stationary law, whose density is proportional to e^{(2 mu_bar - 1) y}.
  const ShadowModel m = base_model();
  SimConfig c = config(20.0, 1e-4, 200, 31);
  c.snapshot_every = 20000;
  const auto paths = simulate_reflected(m, c);
  const double x = 2.0 * m.gap().mu_bar - 1.0;
  const double y_max = m.y_max();
  const int bins = 10;
  std::vector<double> edges(bins + 1);
  const double total = std::expm1(x * y_max);
  for (int k = 0; k <= bins; ++k) edges[k] = std::log1p(total * k / bins) / x;
  edges[bins] = y_max;
  std::vector<double> counts(bins, 0.0);
  std::size_t n = 0;
  for (const PathRecord& p : paths) {
    for (std::size_t i = 1; i < p.snapshots.size(); ++i) {
      const double y = p.snapshots[i].y;
      const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, y);
      counts[static_cast<std::size_t>(it - edges.begin() - 1)] += 1.0;
      ++n;
    }
  }
  ASSERT_EQ(n, 2000u);
  const double expected = static_cast<double>(n) / bins;
  double chi2 = 0.0;
  for (double k : counts) chi2 += (k - expected) * (k - expected) / expected;
  const boost::math::chi_squared dist(bins - 1);
  const double p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  EXPECT_GT(p_value, 1e-3) << "chi2 " << chi2;
}

TEST(Simulator, StepRefinementStable) {
  // The refinement bias must stay below the standard error of a 64-path run;
  // the 1024-path runs make the comparison itself precise.
  const ShadowModel m = base_model();
  const auto coarse = account_trades(simulate_reflected(m, config(10.0, 4e-4, 1024, 3)), 10.0);
  const auto fine = account_trades(simulate_reflected(m, config(10.0, 2e-4, 1024, 4)), 10.0);
  const double scale = std::sqrt(1024.0 / 64.0);
  auto check = [&](const Estimate& a, const Estimate& b, const char* what) {
    EXPECT_LT(std::fabs(a.value - b.value), scale * std::max(a.se, b.se)) << what;
  };
  check(coarse.sht, fine.sht, "sht");
  check(coarse.wet, fine.wet, "wet");
  check(coarse.lt_buy, fine.lt_buy, "lt_buy");
  check(coarse.lt_sell, fine.lt_sell, "lt_sell");
  check(coarse.avg_position, fine.avg_position, "avg_position");
}

TEST(Simulator, AnnuityFallsWithSpread) {
  auto ea = [](double eps) {
    const ShadowModel m = base_model(eps);
    SimConfig c = config(100.0, 1e-4, 32, 8);
    c.measure = Measure::RiskNeutral;
    return estimate_equivalent_annuity(simulate_reflected(m, c), kPrefs, c.horizon_years);
  };
  const Estimate wide = ea(0.05);
  const Estimate narrow = ea(0.01);
  EXPECT_LT(wide.value + 3.0 * std::hypot(wide.se, narrow.se), narrow.value);
}

TEST(Simulator, FrictionlessLimit) {
  const ShadowModel m = base_model(1e-6);
  SimConfig c = config(50.0, 1e-4, 16, 21);
  c.measure = Measure::RiskNeutral;
  const Estimate e = estimate_equivalent_annuity(simulate_reflected(m, c), kPrefs, 50.0);
  const double merton = 0.0256 * 3.125 * 3.125 / (2.0 * kPrefs.alpha);
  EXPECT_LE(std::fabs(e.value - merton), std::max(3.0 * e.se, 1e-3)) << e.value << " se " << e.se;
}

TEST(Simulator, FiniteHorizonBoundSmallRun) {
  const ShadowModel m = base_model();
  SimConfig c = config(0.1, 1e-4, 4000, 11);
  const FiniteHorizonReport r = verify_finite_horizon_bound(m, c);
  EXPECT_LE(std::fabs(r.z_score), 3.0);
  EXPECT_TRUE(r.q_bound_holds);
  EXPECT_GT(r.lhs.se, 0.0);
  EXPECT_GT(r.rhs.se, 0.0);
  EXPECT_NEAR(r.annuity_term,
              0.5 * 0.0256 * (3.125 * 3.125 - std::pow(m.gap().lambda_bar, 2)) * 0.1, 1e-14);
}

TEST(Simulator, FiniteHorizonBoundVanishingHorizon) {
  const ShadowModel m = base_model();
  SimConfig c = config(1e-8, 1e-8, 200, 12);
  c.y0 = 0.3 * m.y_max();
  const FiniteHorizonReport r = verify_finite_horizon_bound(m, c);
  EXPECT_NEAR(r.lhs.value, 1.0, 1e-5);
  EXPECT_NEAR(r.rhs.value, 1.0, 1e-5);
}

TEST(Simulator, TransitoryTermIsOrderSpread) {
  std::vector<double> eps{1e-4, 1e-3, 1e-2}, sup;
  for (double e : eps) sup.push_back(max_abs_q_tilde(base_model(e)));
  EXPECT_GE(fit_power_order(eps, sup).slope, 0.9);
  EXPECT_THROW((void)max_abs_q_tilde(base_model(), 1), ValidationError);
}

TEST(Simulator, PathDumpFormat) {
  const ShadowModel m = base_model();
  SimConfig c = config(1.0, 0.25, 2, 1);
  c.snapshot_every = 2;
  const auto paths = simulate_reflected(m, c);
  std::ostringstream os;
  write_path_dump(os, paths);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "path_id,t,y,L,U,cash,shares");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
  }
  EXPECT_EQ(rows, 2 * 3);
  EXPECT_NE(os.str().find("\n1,1,"), std::string::npos);
}

TEST(Simulator, ConfigValidation) {
  const ShadowModel m = base_model();
  EXPECT_THROW((void)simulate_reflected(m, config(1.0, 0.0, 1, 0)), ValidationError);
  EXPECT_THROW((void)simulate_reflected(m, config(0.01, 0.1, 1, 0)), ValidationError);
  EXPECT_THROW((void)simulate_reflected(m, config(1.0, 0.1, 0, 0)), ValidationError);
  SimConfig c = config(1.0, 0.1, 1, 0);
  c.y0 = m.y_max() + 0.01;
  EXPECT_THROW((void)simulate_reflected(m, c), ValidationError);
  c.y0 = -0.01;
  EXPECT_THROW((void)simulate_reflected(m, c), ValidationError);
  EXPECT_EQ(config(1.0, 0.3, 1, 0).n_steps(), 4u);
  EXPECT_EQ(config(1.0, 1e-4, 1, 0).n_steps(), 10000u);
  EXPECT_STREQ(to_string(Measure::RiskNeutral), "risk_neutral");
}

TEST(Simulator, OverflowGuard) {
  std::vector<PathRecord> paths(2);
  paths[0].wealth_terminal = 1.0;
  paths[1].wealth_terminal = -1e6;
  EXPECT_THROW((void)estimate_equivalent_annuity(paths, kPrefs, 1.0), OverflowGuardError);
  paths[1].wealth_terminal = 2.0;
  const Estimate e = estimate_equivalent_annuity(paths, kPrefs, 1.0);
  EXPECT_TRUE(std::isfinite(e.value));
  EXPECT_THROW((void)account_trades(std::span<const PathRecord>{}, 1.0), ValidationError);
}
