#include "tcost/metrics.hpp"

#include <cmath>

namespace tcost {

double power_ratio(double x, double log_r) noexcept {
  const double z = x * log_r;
  if (std::fabs(x) < kHalfMuBarWindow) {
    return (1.0 - z / 2.0 + z * z / 12.0) / log_r;
  }
  return x / std::expm1(z);
}

double equivalent_annuity(const GapSolution& gap) {
  const double m = gap.mu_bar, lam = gap.lambda_bar;
  return gap.market.variance() * (m - lam) * (m + lam) / (2.0 * gap.prefs.alpha);
}

double liquidity_premium(const GapSolution& gap) {
  const double m = gap.mu_bar, lam = gap.lambda_bar;
  // mu_bar - sqrt(mu_bar^2 - lambda^2), rationalized to avoid cancellation.
  const double root = std::sqrt((m - lam) * (m + lam));
  return gap.market.variance() * lam * lam / (m + root);
}

TradingBoundaries trading_boundaries(const GapSolution& gap) {
  return {(gap.mu_bar - gap.lambda_bar) / gap.prefs.alpha,
          (gap.mu_bar + gap.lambda_bar) / gap.prefs.alpha};
}

LocalTimeRates local_time_averages(const GapSolution& gap) {
  const double half_var = 0.5 * gap.market.variance();
  const double x = 2.0 * gap.mu_bar - 1.0;
  return {half_var * power_ratio(x, gap.y_max), half_var * power_ratio(-x, gap.y_max)};
}

double relative_turnover(const GapSolution& gap) {
  const LocalTimeRates lt = local_time_averages(gap);
  return lt.buy + lt.sell;
}

AbsoluteTurnover absolute_turnover(const GapSolution& gap) {
  const LocalTimeRates lt = local_time_averages(gap);
  const TradingBoundaries eta = trading_boundaries(gap);
  AbsoluteTurnover out;
  out.purchases = eta.eta_minus * lt.buy;
  out.sales = eta.eta_plus * lt.sell;
  out.total = out.purchases + out.sales;
  return out;
}

double average_position(const GapSolution& gap) {
  // l * int_0^ymax e^y p(y) dy with p(y) = x e^{xy} / (e^{x ymax} - 1), x = 2 mu_bar - 1.
  const double x = 2.0 * gap.mu_bar - 1.0;
  return gap.l * power_ratio(x, gap.y_max) * std::expm1((x + 1.0) * gap.y_max) / (x + 1.0);
}

double implied_risk_aversion_estimate(const GapSolution& gap) {
  return gap.mu_bar / average_position(gap);
}

PolicyMetrics compute_metrics(const GapSolution& gap) {
  PolicyMetrics m;
  m.ea = equivalent_annuity(gap);
  m.lip = liquidity_premium(gap);
  const TradingBoundaries eta = trading_boundaries(gap);
  m.eta_minus = eta.eta_minus;
  m.eta_plus = eta.eta_plus;
  const LocalTimeRates lt = local_time_averages(gap);
  m.lt_buy = lt.buy;
  m.lt_sell = lt.sell;
  m.sht = lt.buy + lt.sell;
  const AbsoluteTurnover wet = absolute_turnover(gap);
  m.wet = wet.total;
  m.wet_minus = wet.purchases;
  m.wet_plus = wet.sales;
  m.avg_position = average_position(gap);
  m.alpha_hat = gap.mu_bar / m.avg_position;
  return m;
}

PolicyMetrics to_business_time(const PolicyMetrics& m, double sigma) {
  const double var = sigma * sigma;
  PolicyMetrics out = m;
  out.ea /= var;
  out.lip /= var;
  out.sht /= var;
  out.wet /= var;
  out.wet_minus /= var;
  out.wet_plus /= var;
  out.lt_buy /= var;
  out.lt_sell /= var;
  return out;
}

LeadingExpansions leading_expansions(const MarketParams& market, const Preferences& prefs) {
  market.validate();
  prefs.validate();
  const double m = market.mu_bar();
  const double eps = market.epsilon;
  const double var = market.variance();
  const double alpha = prefs.alpha;
  const double lam = std::cbrt(0.75 * m * m) * std::cbrt(eps);
  const double skew = (m - 1.0) / (std::cbrt(6.0) * std::cbrt(m * m)) * std::cbrt(eps * eps);

  LeadingExpansions e;
  e.lambda = lam;
  e.ea = var / (2.0 * alpha) * (m * m - lam * lam);
  e.lip = var / (2.0 * m) * lam * lam;
  e.eta_minus = (m - lam) / alpha;
  e.eta_plus = (m + lam) / alpha;
  e.sht = 0.5 * var * m / lam;
  e.wet = 2.0 * var / (3.0 * alpha) * lam * lam / eps;
  e.avg_position = m / alpha * (1.0 + skew);
  e.alpha_hat = alpha * (1.0 - skew);
  return e;
}

}  // namespace tcost
