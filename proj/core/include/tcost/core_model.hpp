#pragma once

#include "tcost/params.hpp"

namespace tcost {

/// Which closed form solves the Riccati equation for w. The choice follows the
/// sign of D = mu_bar^2 - lambda^2 - (1/2 - mu_bar)^2 (tan for D > 0, coth for D < 0).
enum class Branch { Hyperbolic, Trigonometric };

[[nodiscard]] const char* to_string(Branch branch) noexcept;

/// The gap lambda_bar together with everything derived from it: the Riccati
/// coefficients, the no-trade band [l, u] (ask valuation, dollars) and the
/// boundary residual w(log(u/l)) - (mu_bar + lambda_bar).
///
/// Immutable once built. Any lambda in (0, mu_bar) yields a well-formed
/// object; only the solver's output has a small residual.
struct GapSolution {
  MarketParams market;
  Preferences prefs;

  double lambda_bar = 0.0;
  double a = 0.0;         ///< sqrt(|D|)
  double b = 0.0;         ///< w(0) - (mu_bar - 1/2) = 1/2 - lambda_bar
  double l = 0.0;         ///< buy boundary, (mu_bar - lambda_bar) / alpha
  double u = 0.0;         ///< sell boundary, (mu_bar + lambda_bar) / ((1 - eps) alpha)
  Branch branch = Branch::Trigonometric;
  double residual = 0.0;  ///< w(log(u/l)) - (mu_bar + lambda_bar)

  // Cached quantities shared by the evaluators.
  double mu_bar = 0.0;
  double y_max = 0.0;       ///< log(u / l)
  double disc = 0.0;        ///< signed D = +-a^2
  double phase = 0.0;       ///< atan2(a, b) (tan branch) or atanh(a / b) (coth branch)
  bool near_degenerate = false;  ///< |a| below kDegenerateA; series evaluation

  [[nodiscard]] double ratio() const noexcept { return u / l; }
};

/// Below this |a| the closed forms are replaced by their expansion in D.
inline constexpr double kDegenerateA = 1e-6;

/// Relative tolerance (times y_max) within which off-interval inputs are clamped.
inline constexpr double kDomainTolerance = 1e-12;

/// Builds the band and Riccati data for a trial gap and evaluates the boundary
/// residual. Throws ValidationError unless 0 < lambda < mu_bar.
[[nodiscard]] GapSolution make_gap_candidate(const MarketParams& market, const Preferences& prefs,
                                             double lambda);

/// Maps y onto [0, y_max], clamping round-off; throws DomainError farther out.
[[nodiscard]] double clamp_state(const GapSolution& gap, double y);

/// Solution of w' = w^2 - (2 mu_bar - 1) w + mu_bar^2 - lambda^2 with
/// w(0) = mu_bar - lambda. Returns +infinity past a blow-up of the solution
/// (only possible for trial gaps far from the root).
[[nodiscard]] double eval_w(const GapSolution& gap, double y);

/// w'(y), taken from the Riccati equation itself.
[[nodiscard]] double eval_w_prime(const GapSolution& gap, double y);

/// Integral of w over [0, y] via the log-cos / log-sinh antiderivative.
[[nodiscard]] double eval_w_integral(const GapSolution& gap, double y);

/// k(y) = 1 / (g'(e^y) e^y): solves k' = k (2 mu_bar - 1 - 2 w), k(0) = 1.
[[nodiscard]] double eval_k(const GapSolution& gap, double y);

/// g(e^y) = 1 + int_0^y 1/k, mapping [1, u/l] onto [1, (1 - eps) u/l].
[[nodiscard]] double eval_g(const GapSolution& gap, double y);

/// g'(e^y) = 1 / (e^y k(y)).
[[nodiscard]] double eval_g_prime(const GapSolution& gap, double y);

namespace detail {

/// Unchecked evaluators used on hot paths. y must already lie in [0, y_max].
[[nodiscard]] double riccati_shifted(const GapSolution& gap, double y) noexcept;  // w - (mu_bar - 1/2)
[[nodiscard]] double w_unchecked(const GapSolution& gap, double y) noexcept;
[[nodiscard]] double k_unchecked(const GapSolution& gap, double y) noexcept;

}  // namespace detail

}  // namespace tcost
