#pragma once

#include <span>
#include <vector>

#include "tcost/core_model.hpp"
#include "tcost/params.hpp"

namespace tcost {

struct SolverConfig {
  double tol_residual = 1e-11;  ///< bound on |w(log(u/l)) - (mu_bar + lambda)|
  int max_iter = 200;
  double bracket_shrink = 0.5;  ///< initial bracket [s * lead, lead / s], s in (0, 1)

  void validate() const;
};

/// Leading term of the small-spread expansion of the gap.
struct GapAsymptotics {
  double lambda_leading = 0.0;  ///< (3/4 mu_bar^2)^(1/3) eps^(1/3)
  int order = 0;                ///< terms retained beyond the leading one (always 0)
};

/// Residual lambda -> w(lambda, log(u(lambda)/l(lambda))) - (mu_bar + lambda).
/// Independent of alpha and of (mu, sigma) beyond mu_bar. +infinity when the
/// Riccati solution blows up inside the band.
[[nodiscard]] double gap_residual(double mu_bar, double epsilon, double lambda);

/// Root of the gap equation. Throws NoBracketError when no sign change is found
/// (spread outside the small-spread regime) and MaxIterExceededError.
[[nodiscard]] GapSolution solve_gap(const MarketParams& market, const Preferences& prefs,
                                    const SolverConfig& cfg = {});

[[nodiscard]] GapAsymptotics gap_leading_order(const MarketParams& market);

/// Same formula on raw inputs; epsilon = 0 is allowed and gives 0.
[[nodiscard]] double gap_leading_order(double mu_bar, double epsilon);

/// Least-squares slope and intercept of log|remainder| against log eps.
struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> epsilon;
  std::vector<double> remainder;
};

/// Throws ValidationError with fewer than two points or non-positive inputs.
[[nodiscard]] OrderFit fit_power_order(std::span<const double> epsilon,
                                       std::span<const double> remainder);

/// Solves the gap on each epsilon of a decreasing grid and fits the order of
/// lambda_bar - lambda_leading. Solver errors propagate.
[[nodiscard]] OrderFit verify_asymptotic_order(double mu, double sigma,
                                               std::span<const double> eps_grid,
                                               const SolverConfig& cfg = {});

}  // namespace tcost
