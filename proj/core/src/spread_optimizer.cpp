#include "tcost/spread_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tcost/errors.hpp"
#include "tcost/metrics.hpp"

namespace tcost {

void BookConvention::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) throw ValidationError("delta must lie in [0, 1]");
}

void SpreadSearch::validate() const {
  if (!(eps_min > 0.0 && eps_min < eps_max && eps_max < 1.0)) {
    throw ValidationError("spread search needs 0 < eps_min < eps_max < 1");
  }
  if (grid_points < 3) throw ValidationError("spread grid needs at least 3 points");
  if (!(tol > 0.0)) throw ValidationError("spread tolerance must be > 0");
}

SpreadRow profit_row(const AssetDynamics& dyn, const Preferences& prefs, double epsilon,
                     const BookConvention& book, const SolverConfig& cfg) {
  dyn.validate();
  book.validate();
  const GapSolution gap = solve_gap(dyn.with_spread(epsilon), prefs, cfg);
  const AbsoluteTurnover wet = absolute_turnover(gap);
  SpreadRow row;
  row.epsilon = epsilon;
  row.lambda_bar = gap.lambda_bar;
  row.wet_minus = wet.purchases;
  row.wet_plus = wet.sales;
  row.profit = epsilon * (book.delta * wet.purchases +
                          (1.0 - book.delta) / (1.0 - epsilon) * wet.sales);
  return row;
}

double profit(const AssetDynamics& dyn, const Preferences& prefs, double epsilon,
              const BookConvention& book, const SolverConfig& cfg) {
  return profit_row(dyn, prefs, epsilon, book, cfg).profit;
}

SpreadCurve profit_curve(const AssetDynamics& dyn, const Preferences& prefs,
                         const BookConvention& book, const SpreadSearch& search,
                         const SolverConfig& cfg) {
  search.validate();
  book.validate();
  dyn.validate();
  SpreadCurve curve;
  curve.delta = book.delta;
  const double lo = std::log(search.eps_min), hi = std::log(search.eps_max);
  const int n = search.grid_points;
  for (int i = 0; i < n; ++i) {
    const double eps = i == 0       ? search.eps_min
                      : i == n - 1 ? search.eps_max
                                   : std::exp(lo + (hi - lo) * i / (n - 1));
    try {
      curve.rows.push_back(profit_row(dyn, prefs, eps, book, cfg));
    } catch (const NoBracketError& e) {
      curve.excluded.push_back(eps);
      curve.warnings.push_back("eps=" + std::to_string(eps) + " excluded: " + e.what());
    } catch (const MaxIterExceededError& e) {
      curve.excluded.push_back(eps);
      curve.warnings.push_back("eps=" + std::to_string(eps) + " excluded: " + e.what());
    }
  }
  return curve;
}

SpreadOptimum optimize_spread(const AssetDynamics& dyn, const Preferences& prefs,
                              const BookConvention& book, const SpreadSearch& search,
                              const SolverConfig& cfg) {
  SpreadOptimum opt;
  opt.curve = profit_curve(dyn, prefs, book, search, cfg);
  const auto& rows = opt.curve.rows;
  if (rows.empty()) throw NoBracketError("no spread on the search grid admits a gap solution");

  std::size_t best = 0;
  int local_maxima = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].profit > rows[best].profit) best = i;
    const bool left = i == 0 || rows[i].profit > rows[i - 1].profit;
    const bool right = i + 1 == rows.size() || rows[i].profit > rows[i + 1].profit;
    if (left && right) ++local_maxima;
  }
  opt.not_unimodal = local_maxima > 1;
  if (opt.not_unimodal) {
    opt.curve.warnings.push_back("NotUnimodal: " + std::to_string(local_maxima) +
                                 " local maxima on the grid; refining the global grid maximum");
  }

  double a = rows[best > 0 ? best - 1 : best].epsilon;
  double b = rows[best + 1 < rows.size() ? best + 1 : best].epsilon;
  auto f = [&](double eps) {
    try {
      return profit(dyn, prefs, eps, book, cfg);
    } catch (const NoBracketError&) {
      return -std::numeric_limits<double>::infinity();
    } catch (const MaxIterExceededError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > search.tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  SpreadRow refined;
  refined.profit = -std::numeric_limits<double>::infinity();
  if (std::isfinite(f(0.5 * (a + b)))) refined = profit_row(dyn, prefs, 0.5 * (a + b), book, cfg);
  if (refined.profit >= rows[best].profit) {
    opt.eps_star = refined.epsilon;
    opt.profit_star = refined.profit;
    opt.lambda_bar = refined.lambda_bar;
  } else {
    opt.eps_star = rows[best].epsilon;
    opt.profit_star = rows[best].profit;
    opt.lambda_bar = rows[best].lambda_bar;
  }
  return opt;
}

}  // namespace tcost
