#include "tcost/multi_asset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcost/errors.hpp"
#include "tcost/shadow.hpp"

namespace tcost {
namespace {

double ordered_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::string prefix(std::size_t i, const char* what) {
  return "asset " + std::to_string(i) + ": " + what;
}

GapSolution solve_asset(const MultiMarket& multi, std::size_t i, const SolverConfig& cfg) {
  try {
    return solve_gap(multi.assets[i], multi.prefs, cfg);
  } catch (const NoBracketError& e) {
    throw NoBracketError(prefix(i, e.what()));
  } catch (const MaxIterExceededError& e) {
    throw MaxIterExceededError(prefix(i, e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(prefix(i, e.what()));
  }
}

}  // namespace

void MultiMarket::validate() const {
  if (assets.empty()) throw ValidationError("at least one asset is required");
  prefs.validate();
  for (std::size_t i = 0; i < assets.size(); ++i) {
    try {
      assets[i].validate();
    } catch (const ValidationError& e) {
      throw ValidationError(prefix(i, e.what()));
    }
  }
}

MultiReport solve_all(const MultiMarket& multi, const SolverConfig& cfg) {
  multi.validate();
  MultiReport rep;
  rep.assets.reserve(multi.assets.size());
  for (std::size_t i = 0; i < multi.assets.size(); ++i) {
    AssetReport r;
    r.index = i;
    r.gap = solve_asset(multi, i, cfg);
    r.metrics = compute_metrics(r.gap);
    rep.assets.push_back(std::move(r));
  }

  auto total = [&](double PolicyMetrics::*field) {
    std::vector<double> v;
    v.reserve(rep.assets.size());
    for (const auto& a : rep.assets) v.push_back(a.metrics.*field);
    return ordered_sum(std::move(v));
  };
  rep.totals.ea = total(&PolicyMetrics::ea);
  rep.totals.sht = total(&PolicyMetrics::sht);
  rep.totals.wet = total(&PolicyMetrics::wet);
  rep.totals.wet_minus = total(&PolicyMetrics::wet_minus);
  rep.totals.wet_plus = total(&PolicyMetrics::wet_plus);
  rep.totals.avg_position = total(&PolicyMetrics::avg_position);
  return rep;
}

Estimate simulate_total_ea(const MultiMarket& multi, const SimConfig& sim,
                           const SolverConfig& cfg) {
  multi.validate();
  std::vector<double> values, variances;
  for (std::size_t i = 0; i < multi.assets.size(); ++i) {
    const ShadowModel model(solve_asset(multi, i, cfg));
    SimConfig c = sim;
    c.measure = Measure::RiskNeutral;
    c.snapshot_every = 0;
    c.seed = mix_seed(sim.seed, 100 + i);
    const auto paths = simulate_reflected(model, c);
    const Estimate e = estimate_equivalent_annuity(paths, multi.prefs, sim.horizon_years);
    values.push_back(e.value);
    variances.push_back(e.se * e.se);
  }
  return {ordered_sum(std::move(values)), std::sqrt(ordered_sum(std::move(variances)))};
}

}  // namespace tcost
