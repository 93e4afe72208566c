#include "tcost/shadow.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "tcost/errors.hpp"

namespace tcost {

ShadowModel::ShadowModel(GapSolution gap) : gap_(std::move(gap)) {}

double ShadowModel::sigma_tilde(double y) const {
  y = clamp_state(gap_, y);
  const double k = detail::k_unchecked(gap_, y);
  return gap_.market.sigma / (k * eval_g(gap_, y));
}

double ShadowModel::mu_tilde(double y) const {
  y = clamp_state(gap_, y);
  const double w = detail::w_unchecked(gap_, y);
  const double gp_ey = 1.0 / detail::k_unchecked(gap_, y);   // g'(e^y) e^y
  const double gpp_e2y = gp_ey * (2.0 * w - 2.0 * gap_.mu_bar);  // g''(e^y) e^{2y}
  const double var = gap_.market.variance();
  return (gap_.market.mu * gp_ey + 0.5 * var * gpp_e2y) / eval_g(gap_, y);
}

double ShadowModel::w_tilde(double y) const {
  y = clamp_state(gap_, y);
  return detail::w_unchecked(gap_, y) - gap_.prefs.alpha * gap_.l / detail::k_unchecked(gap_, y);
}

double ShadowModel::q_tilde(double y) const {
  y = clamp_state(gap_, y);
  return eval_w_integral(gap_, y) - gap_.prefs.alpha * gap_.l * (eval_g(gap_, y) - 1.0);
}

double ShadowModel::policy(double y) const {
  const double mt = mu_tilde(y);
  const double st = sigma_tilde(y);
  return (mt / (st * st) - gap_.market.sigma / st * w_tilde(y)) / gap_.prefs.alpha;
}

double ShadowModel::price_ratio(double y) const {
  y = clamp_state(gap_, y);
  return eval_g(gap_, y) * std::exp(-y);
}

double ShadowModel::shadow_price(double s, double y) const {
  if (!(s > 0.0)) throw ValidationError("ask price must be > 0");
  return s * price_ratio(y);
}

double ShadowModel::market_price_of_risk_unchecked(double y) const noexcept {
  return gap_.market.sigma * detail::w_unchecked(gap_, y);
}

const char* to_string(InitialTrade trade) noexcept {
  switch (trade) {
    case InitialTrade::BuyAtAsk:
      return "buy_at_ask";
    case InitialTrade::SellAtBid:
      return "sell_at_bid";
    case InitialTrade::None:
      break;
  }
  return "none";
}

InitialState initial_jump(double xi0, double xi, double s0, const GapSolution& gap) {
  if (!(s0 > 0.0) || !std::isfinite(s0)) {
    throw ValidationError("initial ask price must be > 0, got " + std::to_string(s0));
  }
  InitialState st;
  st.xi0 = xi0;
  st.xi = xi;
  st.s0 = s0;
  st.cash_after = xi0;
  st.shares_after = xi;

  const double position = xi * s0;
  if (position <= gap.l) {
    st.y0 = 0.0;
    st.shares_after = gap.l / s0;
    st.shares_traded = st.shares_after - xi;
    st.cash_after = xi0 - st.shares_traded * s0;
    if (st.shares_traded > 0.0) st.trade = InitialTrade::BuyAtAsk;
  } else if (position >= gap.u) {
    st.y0 = gap.y_max;
    st.shares_after = gap.u / s0;
    st.shares_traded = st.shares_after - xi;
    st.cash_after = xi0 - st.shares_traded * (1.0 - gap.market.epsilon) * s0;
    if (st.shares_traded < 0.0) st.trade = InitialTrade::SellAtBid;
  } else {
    st.y0 = std::log(position / gap.l);
  }
  return st;
}

}  // namespace tcost
