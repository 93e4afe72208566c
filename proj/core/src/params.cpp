#include "tcost/params.hpp"

#include <cmath>
#include <string>

#include "tcost/errors.hpp"

namespace tcost {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void MarketParams::validate() const {
  require(std::isfinite(mu) && mu > 0.0, "mu must be finite and > 0, got " + std::to_string(mu));
  require(std::isfinite(sigma) && sigma > 0.0,
          "sigma must be finite and > 0, got " + std::to_string(sigma));
  require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 1.0,
          "epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  require(std::isfinite(mu_bar()), "mu / sigma^2 is not finite");
}

void AssetDynamics::validate() const {
  require(std::isfinite(mu) && mu > 0.0, "mu must be finite and > 0, got " + std::to_string(mu));
  require(std::isfinite(sigma) && sigma > 0.0,
          "sigma must be finite and > 0, got " + std::to_string(sigma));
}

void Preferences::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0,
          "alpha must be finite and > 0, got " + std::to_string(alpha));
}

}  // namespace tcost
