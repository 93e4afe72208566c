#pragma once

namespace tcost {

/// One risky asset: ask price dS/S = mu dt + sigma dW, bid price (1 - epsilon) S.
struct MarketParams {
  double mu = 0.0;       ///< expected excess return, per year
  double sigma = 0.0;    ///< volatility, per sqrt(year)
  double epsilon = 0.0;  ///< relative bid-ask spread, in (0, 1)

  /// Mean-variance ratio mu / sigma^2.
  [[nodiscard]] double mu_bar() const noexcept { return mu / (sigma * sigma); }
  [[nodiscard]] double variance() const noexcept { return sigma * sigma; }

  /// Throws ValidationError unless mu > 0, sigma > 0, 0 < epsilon < 1.
  void validate() const;
};

/// Asset dynamics without a spread; the market maker picks epsilon.
struct AssetDynamics {
  double mu = 0.0;
  double sigma = 0.0;

  [[nodiscard]] MarketParams with_spread(double epsilon) const noexcept {
    return {mu, sigma, epsilon};
  }
  void validate() const;
};

/// Constant absolute risk aversion, U(x) = -exp(-alpha x).
struct Preferences {
  double alpha = 0.0;  ///< per dollar

  void validate() const;
};

}  // namespace tcost
