#pragma once

#include "tcost/core_model.hpp"

namespace tcost {

/// Long-run welfare, policy and volume statistics of the optimal strategy.
/// Rates are per calendar year unless converted with to_business_time().
struct PolicyMetrics {
  double ea = 0.0;            ///< equivalent annuity, dollars/year
  double lip = 0.0;           ///< liquidity premium, per year
  double eta_minus = 0.0;     ///< buy boundary at the ask, dollars
  double eta_plus = 0.0;      ///< sell boundary at the bid, dollars
  double sht = 0.0;           ///< relative (share) turnover, 1/year
  double wet = 0.0;           ///< absolute (wealth) turnover, dollars/year
  double wet_minus = 0.0;     ///< purchases, dollars/year
  double wet_plus = 0.0;      ///< sales, dollars/year
  double lt_buy = 0.0;        ///< lim L_T / T, 1/year
  double lt_sell = 0.0;       ///< lim U_T / T, 1/year
  double avg_position = 0.0;  ///< long-run average risky position, dollars
  double alpha_hat = 0.0;     ///< mu_bar / avg_position
};

struct TradingBoundaries {
  double eta_minus = 0.0;
  double eta_plus = 0.0;
};

struct LocalTimeRates {
  double buy = 0.0;   ///< lim L_T / T
  double sell = 0.0;  ///< lim U_T / T
};

struct AbsoluteTurnover {
  double total = 0.0;
  double purchases = 0.0;  ///< WeT_-
  double sales = 0.0;      ///< WeT_+
};

/// sigma^2 (mu_bar^2 - lambda^2) / (2 alpha).
[[nodiscard]] double equivalent_annuity(const GapSolution& gap);

/// sigma^2 (mu_bar - sqrt(mu_bar^2 - lambda^2)); independent of alpha.
[[nodiscard]] double liquidity_premium(const GapSolution& gap);

/// (mu_bar -+ lambda) / alpha. eta_minus = l, eta_plus = (1 - eps) u.
[[nodiscard]] TradingBoundaries trading_boundaries(const GapSolution& gap);

/// Local-time rates of the reflected state at the buy and sell boundaries.
/// |2 mu_bar - 1| < kHalfMuBarWindow switches to the series of x / (e^x - 1).
[[nodiscard]] LocalTimeRates local_time_averages(const GapSolution& gap);

/// lt_buy + lt_sell.
[[nodiscard]] double relative_turnover(const GapSolution& gap);

/// Purchases eta_minus * lt_buy and sales eta_plus * lt_sell, at execution prices.
[[nodiscard]] AbsoluteTurnover absolute_turnover(const GapSolution& gap);

/// Mean of l e^y under the stationary density of the reflected state.
[[nodiscard]] double average_position(const GapSolution& gap);

/// mu_bar / average_position: the risk aversion an observer would infer from
/// average holdings with the frictionless formula.
[[nodiscard]] double implied_risk_aversion_estimate(const GapSolution& gap);

[[nodiscard]] PolicyMetrics compute_metrics(const GapSolution& gap);

/// Rates measured on the clock sigma^2 t: ea, lip, sht, wet and local-time
/// rates are divided by sigma^2; positions are unchanged.
[[nodiscard]] PolicyMetrics to_business_time(const PolicyMetrics& m, double sigma);

/// Leading terms of the small-spread expansions.
struct LeadingExpansions {
  double lambda = 0.0;
  double ea = 0.0;
  double lip = 0.0;
  double eta_minus = 0.0;
  double eta_plus = 0.0;
  double sht = 0.0;
  double wet = 0.0;
  double avg_position = 0.0;
  double alpha_hat = 0.0;
};

[[nodiscard]] LeadingExpansions leading_expansions(const MarketParams& market,
                                                   const Preferences& prefs);

inline constexpr double kHalfMuBarWindow = 1e-5;

/// x / (r^x - 1) with log_r = log r > 0, continuous through x = 0.
[[nodiscard]] double power_ratio(double x, double log_r) noexcept;

}  // namespace tcost
