#pragma once

#include <cstddef>
#include <vector>

#include "tcost/gap_solver.hpp"
#include "tcost/metrics.hpp"
#include "tcost/simulator.hpp"

namespace tcost {

/// Independent risky assets sharing one CARA investor. Correlations are not
/// representable: the additive solution only covers independent assets.
struct MultiMarket {
  std::vector<MarketParams> assets;
  Preferences prefs;

  void validate() const;
};

struct AssetReport {
  std::size_t index = 0;
  GapSolution gap;
  PolicyMetrics metrics;
};

struct MultiTotals {
  double ea = 0.0;
  double sht = 0.0;
  double wet = 0.0;
  double wet_minus = 0.0;
  double wet_plus = 0.0;
  double avg_position = 0.0;  ///< summed dollar exposure
};

struct MultiReport {
  std::vector<AssetReport> assets;  ///< input order
  MultiTotals totals;
};

/// Solves every asset on its own and adds up the additive quantities. Totals
/// are summed in sorted order, so they do not depend on the asset order.
/// A failing asset aborts with an error of the same type naming its index.
[[nodiscard]] MultiReport solve_all(const MultiMarket& multi, const SolverConfig& cfg = {});

/// Sum of per-asset simulated equivalent annuities (risk-neutral importance
/// sampling, one derived seed per asset) with the combined standard error.
[[nodiscard]] Estimate simulate_total_ea(const MultiMarket& multi, const SimConfig& sim,
                                         const SolverConfig& cfg = {});

}  // namespace tcost
