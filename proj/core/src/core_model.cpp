#include "tcost/core_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tcost/errors.hpp"

namespace tcost {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Expansion of the solution of v' = v^2 + D, v(0) = b in powers of D, used when
// |D| < kDegenerateA^2. With c = 1/b and t = c - y the first three terms are
//   v0 = 1/t,  v1 = (c^3 - t^3) / (3 t^2),
//   v2 = (c^6/t + c^3 t^2 - t^5/5 - 9 c^5/5) / (9 t^2).
double series_v(double b, double disc, double y) noexcept {
  const double c = 1.0 / b;
  const double t = c - y;
  if (b > 0.0 && t <= 0.0) return kInf;
  const double c3 = c * c * c;
  const double t2 = t * t;
  const double v0 = 1.0 / t;
  const double v1 = (c3 - t2 * t) / (3.0 * t2);
  const double v2 = (c3 * c3 / t + c3 * t2 - t2 * t2 * t / 5.0 - 9.0 * c3 * c * c / 5.0) / (9.0 * t2);
  return v0 + disc * (v1 + disc * v2);
}

// Antiderivatives of the three series terms over [0, y].
double series_v_integral(double b, double disc, double y) noexcept {
  const double c = 1.0 / b;
  const double t = c - y;
  if (b > 0.0 && t <= 0.0) return kInf;
  const double c2 = c * c;
  const double c3 = c2 * c;
  const double t2 = t * t;
  const double i0 = -std::log1p(-b * y);
  const double i1 = c3 / (3.0 * t) + t2 / 6.0 - c2 / 2.0;
  const double i2 = (2.25 * c2 * c2 + c3 * c3 / (2.0 * t2) - c3 * t + t2 * t2 / 20.0 -
                     1.8 * c3 * c2 / t) /
                    9.0;
  return i0 + disc * (i1 + disc * i2);
}

}  // namespace

const char* to_string(Branch branch) noexcept {
  return branch == Branch::Hyperbolic ? "hyperbolic" : "trigonometric";
}

GapSolution make_gap_candidate(const MarketParams& market, const Preferences& prefs, double lambda) {
  market.validate();
  prefs.validate();
  const double mu_bar = market.mu_bar();
  if (!(lambda > 0.0 && lambda < mu_bar)) {
    throw ValidationError("gap must lie in (0, mu_bar), got " + std::to_string(lambda));
  }

  GapSolution gap;
  gap.market = market;
  gap.prefs = prefs;
  gap.lambda_bar = lambda;
  gap.mu_bar = mu_bar;
  gap.l = (mu_bar - lambda) / prefs.alpha;
  gap.u = (mu_bar + lambda) / ((1.0 - market.epsilon) * prefs.alpha);
  gap.y_max = std::log1p(2.0 * lambda / (mu_bar - lambda)) - std::log1p(-market.epsilon);

  gap.disc = (mu_bar - 0.25) - lambda * lambda;
  gap.a = std::sqrt(std::fabs(gap.disc));
  gap.b = 0.5 - lambda;
  gap.branch = gap.disc > 0.0 ? Branch::Trigonometric : Branch::Hyperbolic;
  gap.near_degenerate = gap.a < kDegenerateA;
  if (!gap.near_degenerate) {
    gap.phase = gap.branch == Branch::Trigonometric ? std::atan2(gap.a, gap.b)
                                                    : std::atanh(gap.a / gap.b);
  }

  gap.residual = detail::riccati_shifted(gap, gap.y_max) - (0.5 + lambda);
  return gap;
}

double clamp_state(const GapSolution& gap, double y) {
  const double tol = kDomainTolerance * gap.y_max;
  if (y >= 0.0 && y <= gap.y_max) return y;
  if (y < 0.0 && y >= -tol) return 0.0;
  if (y > gap.y_max && y <= gap.y_max + tol) return gap.y_max;
  throw DomainError("state " + std::to_string(y) + " outside [0, " + std::to_string(gap.y_max) +
                    "]");
}

namespace detail {

double riccati_shifted(const GapSolution& gap, double y) noexcept {
  if (y == 0.0) return gap.b;
  if (gap.near_degenerate) return series_v(gap.b, gap.disc, y);
  if (gap.branch == Branch::Trigonometric) {
    // a tan(atan(b/a) + a y) written as a cot(atan2(a, b) - a y) to keep the
    // phase away from the pole at pi/2.
    const double phi = gap.phase - gap.a * y;
    if (phi <= 0.0) return kInf;
    return gap.a / std::tan(phi);
  }
  const double psi = gap.phase - gap.a * y;
  if (gap.phase > 0.0 && psi <= 0.0) return kInf;
  return gap.a / std::tanh(psi);
}

double w_unchecked(const GapSolution& gap, double y) noexcept {
  return riccati_shifted(gap, y) + (gap.mu_bar - 0.5);
}

double k_unchecked(const GapSolution& gap, double y) noexcept {
  if (gap.near_degenerate) {
    const double v = series_v(gap.b, gap.disc, y);
    return (gap.mu_bar - gap.lambda_bar) / (v * v + gap.disc);
  }
  if (gap.branch == Branch::Trigonometric) {
    // (1 + b^2/a^2) cos^2(atan(b/a) + a y)
    const double s = std::sin(gap.phase - gap.a * y) / gap.a;
    return (gap.a * gap.a + gap.b * gap.b) * s * s;
  }
  // (b^2/a^2 - 1) sinh^2(acoth(b/a) - a y)
  const double s = std::sinh(gap.phase - gap.a * y) / gap.a;
  return (gap.b * gap.b - gap.a * gap.a) * s * s;
}

}  // namespace detail

double eval_w(const GapSolution& gap, double y) {
  return detail::w_unchecked(gap, clamp_state(gap, y));
}

double eval_w_prime(const GapSolution& gap, double y) {
  const double v = detail::riccati_shifted(gap, clamp_state(gap, y));
  return v * v + gap.disc;
}

double eval_w_integral(const GapSolution& gap, double y) {
  y = clamp_state(gap, y);
  double shifted = 0.0;
  if (gap.near_degenerate) {
    shifted = series_v_integral(gap.b, gap.disc, y);
  } else if (gap.branch == Branch::Trigonometric) {
    const double phi = gap.phase - gap.a * y;
    shifted = phi <= 0.0 ? kInf : std::log(std::sin(gap.phase) / std::sin(phi));
  } else {
    const double psi = gap.phase - gap.a * y;
    shifted = (gap.phase > 0.0 && psi <= 0.0) ? kInf
                                              : std::log(std::sinh(gap.phase) / std::sinh(psi));
  }
  return shifted + (gap.mu_bar - 0.5) * y;
}

double eval_k(const GapSolution& gap, double y) {
  return detail::k_unchecked(gap, clamp_state(gap, y));
}

double eval_g(const GapSolution& gap, double y) {
  y = clamp_state(gap, y);
  // Trig: 1 + a/(a^2+b^2) (tan(atan(b/a) + a y) - b/a); coth branch likewise
  // with b^2 - a^2. Both read 1 + (v - b) / (b^2 + D).
  const double v = detail::riccati_shifted(gap, y);
  return 1.0 + (v - gap.b) / (gap.b * gap.b + gap.disc);
}

double eval_g_prime(const GapSolution& gap, double y) {
  y = clamp_state(gap, y);
  return 1.0 / (std::exp(y) * detail::k_unchecked(gap, y));
}

}  // namespace tcost
