#pragma once

#include "tcost/core_model.hpp"

namespace tcost {

/// Frictionless shadow market S~ = S e^{-y} g(e^y) built on a solved gap.
///
/// All coefficients are functions of the state y in [0, y_max] only:
///   sigma~(y) = sigma g'(e^y) e^y / g(e^y)
///   mu~(y)    = (mu g'(e^y) e^y + sigma^2/2 g''(e^y) e^{2y}) / g(e^y)
/// with g'' eliminated through g''(e^y) e^y = g'(e^y) (2 w(y) - 2 mu_bar).
/// w~ = w - alpha l g'(e^y) e^y vanishes at both ends of the band and its
/// antiderivative q~ is the transitory term of the finite-horizon bounds.
class ShadowModel {
 public:
  explicit ShadowModel(GapSolution gap);

  [[nodiscard]] const GapSolution& gap() const noexcept { return gap_; }
  [[nodiscard]] double y_max() const noexcept { return gap_.y_max; }

  [[nodiscard]] double mu_tilde(double y) const;
  [[nodiscard]] double sigma_tilde(double y) const;
  [[nodiscard]] double w_tilde(double y) const;
  /// Closed form: int_0^y w - alpha l (g(e^y) - 1).
  [[nodiscard]] double q_tilde(double y) const;

  /// Optimal dollar amount in the shadow asset,
  /// (mu~/sigma~^2 - (sigma/sigma~) w~) / alpha.
  [[nodiscard]] double policy(double y) const;

  /// S~ / S = g(e^y) e^{-y}, within [1 - eps, 1].
  [[nodiscard]] double price_ratio(double y) const;

  /// Shadow price for ask price s.
  [[nodiscard]] double shadow_price(double s, double y) const;

  /// Market price of risk mu~/sigma~ = sigma w(y); no domain check.
  [[nodiscard]] double market_price_of_risk_unchecked(double y) const noexcept;

 private:
  GapSolution gap_;
};

enum class InitialTrade { None, BuyAtAsk, SellAtBid };

[[nodiscard]] const char* to_string(InitialTrade trade) noexcept;

/// Position right after the time-zero jump onto the nearest band boundary.
struct InitialState {
  double xi0 = 0.0;  ///< cash before the jump, dollars
  double xi = 0.0;   ///< shares before the jump
  double s0 = 0.0;   ///< ask price, dollars/share
  double y0 = 0.0;   ///< state after the jump

  InitialTrade trade = InitialTrade::None;
  double shares_traded = 0.0;  ///< signed, positive when buying
  double cash_after = 0.0;     ///< xi0 minus cost at ask, or plus proceeds at bid
  double shares_after = 0.0;
};

/// Jump rule: y0 = 0 if xi s0 <= l, log(u/l) if xi s0 >= u, log(xi s0 / l)
/// otherwise. Throws ValidationError unless s0 > 0.
[[nodiscard]] InitialState initial_jump(double xi0, double xi, double s0, const GapSolution& gap);

}  // namespace tcost
