#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tcost/rng.hpp"
#include "tcost/shadow.hpp"

namespace tcost {

enum class Measure { Physical, RiskNeutral };

[[nodiscard]] const char* to_string(Measure m) noexcept;

struct SimConfig {
  double horizon_years = 1.0;
  double dt_years = 1e-4;
  std::size_t n_paths = 64;
  std::uint64_t seed = 0;
  Measure measure = Measure::Physical;
  double y0 = 0.0;

  /// Integrate shadow wealth dX~ = eta~ (mu~ dt + sigma~ dW) along the path.
  /// Costs one Riccati evaluation per step under the physical measure.
  bool track_shadow_wealth = false;
  /// Record a PathSnapshot every this many steps (0 = off).
  std::size_t snapshot_every = 0;
  /// Worker threads; 0 uses std::thread::hardware_concurrency().
  unsigned threads = 1;
  /// Ask price at time zero; only sets the share count in snapshots.
  double s0 = 100.0;

  /// Throws ValidationError; y0 is checked against y_max at simulation time.
  void validate() const;
  [[nodiscard]] std::size_t n_steps() const;
};

struct PathSnapshot {
  double t = 0.0;
  double y = 0.0;
  double l_total = 0.0;
  double u_total = 0.0;
  double cash = 0.0;
  double shares = 0.0;
};

/// Everything one path contributes to the estimators.
///
/// Wealth starts at zero: the initial position l e^{y0} is bought at the ask
/// with borrowed cash. bought_value and sold_value value the local times at
/// the boundaries, l per unit of L and eta_plus = (1 - eps) u per unit of U.
/// The cash ledger behind wealth_terminal books each step's trade at the
/// price actually paid: a clamp by dL buys l (1 - e^{-dL}) dollars at the ask,
/// a clamp by dU sells (e^{dU} - 1) u dollars at the bid. The two agree as
/// dt -> 0.
struct PathRecord {
  double y_final = 0.0;
  double l_total = 0.0;
  double u_total = 0.0;
  double bought_value = 0.0;
  double sold_value = 0.0;
  double wealth_terminal = 0.0;         ///< liquidation value Xi_T
  double shadow_wealth_initial = 0.0;   ///< X~_0 = cash_0 + g(e^{y0}) l
  double shadow_wealth_terminal = 0.0;  ///< X~_T (0 unless tracked)
  double avg_position = 0.0;            ///< time average of l e^{y}
  double log_likelihood_ratio = 0.0;    ///< log dP/dQ~ on the path; 0 under P
  double q_increment = 0.0;             ///< q~(y_T) - q~(y_0)
  std::vector<PathSnapshot> snapshots;
};

/// Brownian motion with drift on [0, y_max], reflected by per-step clamping.
/// The clamped excess is booked as local time: L below 0, U above y_max.
struct ReflectedWalk {
  double drift = 0.0;
  double vol = 0.0;
  double y_max = 0.0;
};

struct ReflectionTotals {
  double y_final = 0.0;
  double l_total = 0.0;
  double u_total = 0.0;
};

/// Low-level reflected walk with constant coefficients. Any vol >= 0 is
/// accepted, including the deterministic vol = 0 case.
[[nodiscard]] ReflectionTotals run_reflected_walk(const ReflectedWalk& walk, double y0,
                                                  double horizon, double dt, NormalStream& noise);

/// Simulates the state dY = (mu - sigma^2/2) dt + sigma dW + dL - dU under the
/// physical measure, or with drift sigma^2 (mu_bar - 1/2 - w(Y)) under the
/// shadow risk-neutral measure. Path i uses Philox stream i of cfg.seed, and
/// records are returned in path order regardless of cfg.threads.
[[nodiscard]] std::vector<PathRecord> simulate_reflected(const ShadowModel& model,
                                                         const SimConfig& cfg);

struct Estimate {
  double value = 0.0;
  double se = 0.0;  ///< standard error; 0 for a single path
};

struct ErgodicEstimates {
  Estimate sht;
  Estimate wet;
  Estimate wet_minus;
  Estimate wet_plus;
  Estimate lt_buy;
  Estimate lt_sell;
  Estimate avg_position;
};

/// Per-path time averages over the horizon, then mean and standard error
/// across paths. Meaningful for physical-measure paths.
[[nodiscard]] ErgodicEstimates account_trades(std::span<const PathRecord> paths, double horizon);

/// -(1/(alpha T)) log of the sample mean of exp(-alpha Xi_T) dP/dQ, with a
/// delta-method standard error. Physical paths carry a unit likelihood ratio;
/// risk-neutral paths turn this into an importance-sampling estimator.
/// Throws OverflowGuardError when |alpha Xi_T| leaves the exp range.
[[nodiscard]] Estimate estimate_equivalent_annuity(std::span<const PathRecord> paths,
                                                   const Preferences& prefs, double horizon);

struct SimResult {
  Estimate ea;
  ErgodicEstimates ergodic;
  std::size_t n_paths = 0;
  double horizon_years = 0.0;
};

/// Ergodic statistics from physical paths and the equivalent annuity from
/// risk-neutral paths (importance sampled). The two runs use streams derived
/// from cfg.seed; cfg.measure is ignored. The physical paths (with snapshots
/// when cfg.snapshot_every > 0) are moved into keep_physical if given.
[[nodiscard]] SimResult run_simulation(const ShadowModel& model, const SimConfig& cfg,
                                       std::vector<PathRecord>* keep_physical = nullptr);

/// Both sides of
///   E[exp(-alpha (X~_T - X~_0))] = exp(-alpha sigma^2 beta T) E~[exp(q~(Y_T) - q~(Y_0))]
/// from independent physical and risk-neutral runs.
struct FiniteHorizonReport {
  Estimate lhs;
  Estimate rhs;
  double log_lhs = 0.0;
  double log_rhs = 0.0;
  double z_score = 0.0;
  double annuity_term = 0.0;  ///< alpha sigma^2 beta T
  double q_correction = 0.0;  ///< log E~[exp(dq~)]
  double max_abs_q = 0.0;     ///< sup |q~| over the band
  bool q_bound_holds = false;  ///< |q_correction| <= 2 max_abs_q
  std::size_t n_paths = 0;
  double horizon_years = 0.0;
};

[[nodiscard]] FiniteHorizonReport verify_finite_horizon_bound(const ShadowModel& model,
                                                              const SimConfig& cfg);

/// sup |q~| on a uniform grid of the band.
[[nodiscard]] double max_abs_q_tilde(const ShadowModel& model, std::size_t grid = 2001);

/// CSV path dump: path_id,t,y,L,U,cash,shares (one row per snapshot).
void write_path_dump(std::ostream& out, std::span<const PathRecord> paths);

}  // namespace tcost
