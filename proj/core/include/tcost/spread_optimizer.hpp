#pragma once

#include <string>
#include <vector>

#include "tcost/gap_solver.hpp"
#include "tcost/params.hpp"

namespace tcost {

/// Book price S (1 - eps delta) at which the market maker values inventory;
/// delta = 0 is the ask, delta = 1 the bid.
struct BookConvention {
  double delta = 1.0;

  void validate() const;
};

struct SpreadRow {
  double epsilon = 0.0;
  double profit = 0.0;  ///< dollars/year
  double lambda_bar = 0.0;
  double wet_minus = 0.0;
  double wet_plus = 0.0;
};

/// Profit on a spread grid. Spreads at which the gap cannot be solved are
/// listed in `excluded` (with the solver message in `warnings`), never zeroed.
struct SpreadCurve {
  double delta = 0.0;
  std::vector<SpreadRow> rows;  ///< sorted by epsilon
  std::vector<double> excluded;
  std::vector<std::string> warnings;
};

struct SpreadSearch {
  double eps_min = 1e-4;
  double eps_max = 0.5;
  int grid_points = 121;  ///< log-spaced
  double tol = 1e-5;      ///< absolute, in epsilon

  void validate() const;
};

/// eps (delta WeT_- + (1 - delta) / (1 - eps) WeT_+). Solver errors propagate.
[[nodiscard]] double profit(const AssetDynamics& dyn, const Preferences& prefs, double epsilon,
                            const BookConvention& book, const SolverConfig& cfg = {});

/// Same, returning the row with its inputs.
[[nodiscard]] SpreadRow profit_row(const AssetDynamics& dyn, const Preferences& prefs,
                                   double epsilon, const BookConvention& book,
                                   const SolverConfig& cfg = {});

[[nodiscard]] SpreadCurve profit_curve(const AssetDynamics& dyn, const Preferences& prefs,
                                       const BookConvention& book, const SpreadSearch& search = {},
                                       const SolverConfig& cfg = {});

struct SpreadOptimum {
  double eps_star = 0.0;
  double profit_star = 0.0;
  double lambda_bar = 0.0;
  bool not_unimodal = false;  ///< grid shows more than one local maximum
  SpreadCurve curve;
};

/// Grid maximum followed by golden-section refinement on the neighbouring
/// grid cells. Throws NoBracketError if no grid spread is solvable.
[[nodiscard]] SpreadOptimum optimize_spread(const AssetDynamics& dyn, const Preferences& prefs,
                                            const BookConvention& book,
                                            const SpreadSearch& search = {},
                                            const SolverConfig& cfg = {});

}  // namespace tcost
