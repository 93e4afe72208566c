#include "tcost/gap_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "tcost/errors.hpp"

namespace tcost {
namespace {

constexpr double kUpperFraction = 0.999;  // search never reaches mu_bar itself
constexpr int kScanPoints = 400;
constexpr double kHuge = 1e100;

// Blow-ups are reported as +inf; clamp so secant arithmetic stays finite.
double finite_residual(double mu_bar, double eps, double lambda) {
  const double f = gap_residual(mu_bar, eps, lambda);
  if (std::isnan(f)) return kHuge;
  return std::clamp(f, -kHuge, kHuge);
}

struct Bracket {
  double lo, hi, flo, fhi;
};

bool is_root_bracket(double flo, double fhi) { return flo > 0.0 && fhi <= 0.0 && fhi > -kHuge; }

// Geometric scan for the first sign change from + to - with finite values.
bool scan_for_bracket(double mu_bar, double eps, double lead, Bracket& out) {
  const double top = kUpperFraction * mu_bar;
  const double bottom = std::min(1e-6 * std::max(lead, 1e-300), 1e-6 * top);
  const double ratio = std::pow(top / bottom, 1.0 / (kScanPoints - 1));
  double prev = bottom;
  double fprev = finite_residual(mu_bar, eps, prev);
  for (int i = 1; i < kScanPoints; ++i) {
    const double next = i == kScanPoints - 1 ? top : prev * ratio;
    const double fnext = finite_residual(mu_bar, eps, next);
    if (fprev < kHuge && is_root_bracket(fprev, fnext)) {
      out = {prev, next, fprev, fnext};
      return true;
    }
    prev = next;
    fprev = fnext;
  }
  return false;
}

// TOMS 748 on a verified bracket; stops when the bracket is a few ulps wide.
double refine_root(double mu_bar, double eps, const Bracket& br, int max_iter) {
  auto f = [&](double lambda) { return finite_residual(mu_bar, eps, lambda); };
  boost::uintmax_t iters = static_cast<boost::uintmax_t>(max_iter);
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      f, br.lo, br.hi, br.flo, br.fhi, boost::math::tools::eps_tolerance<double>(), iters);
  const double flo = std::fabs(f(lo));
  const double fhi = std::fabs(f(hi));
  return flo <= fhi ? lo : hi;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol_residual > 0.0)) throw ValidationError("tol_residual must be > 0");
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
  if (!(bracket_shrink > 0.0 && bracket_shrink < 1.0)) {
    throw ValidationError("bracket_shrink must lie in (0, 1)");
  }
}

double gap_residual(double mu_bar, double epsilon, double lambda) {
  // alpha cancels from u/l; any positive value works for the candidate.
  const double sigma = 1.0;
  const GapSolution g = make_gap_candidate({mu_bar, sigma, epsilon}, {1.0}, lambda);
  return g.residual;
}

double gap_leading_order(double mu_bar, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in [0, 1), got " + std::to_string(epsilon));
  }
  return std::cbrt(0.75 * mu_bar * mu_bar) * std::cbrt(epsilon);
}

GapAsymptotics gap_leading_order(const MarketParams& market) {
  market.validate();
  return {gap_leading_order(market.mu_bar(), market.epsilon), 0};
}

GapSolution solve_gap(const MarketParams& market, const Preferences& prefs,
                      const SolverConfig& cfg) {
  market.validate();
  prefs.validate();
  cfg.validate();

  const double mu_bar = market.mu_bar();
  const double eps = market.epsilon;
  const double lead = gap_leading_order(mu_bar, eps);
  const double top = kUpperFraction * mu_bar;

  Bracket br{};
  double hi = std::min(lead / cfg.bracket_shrink, top);
  double lo = std::min(cfg.bracket_shrink * lead, 0.5 * hi);
  br = {lo, hi, finite_residual(mu_bar, eps, lo), finite_residual(mu_bar, eps, hi)};
  if (!is_root_bracket(br.flo, br.fhi) && !scan_for_bracket(mu_bar, eps, lead, br)) {
    throw NoBracketError("gap residual has no sign change on (0, " + std::to_string(top) +
                         ") for mu_bar=" + std::to_string(mu_bar) +
                         ", epsilon=" + std::to_string(eps));
  }

  const double lambda = refine_root(mu_bar, eps, br, cfg.max_iter);
  GapSolution gap = make_gap_candidate(market, prefs, lambda);
  if (!(std::fabs(gap.residual) <= cfg.tol_residual)) {
    throw MaxIterExceededError("gap residual " + std::to_string(gap.residual) +
                               " above tolerance after " + std::to_string(cfg.max_iter) + " iterations");
  }
  return gap;
}

OrderFit fit_power_order(std::span<const double> epsilon, std::span<const double> remainder) {
  if (epsilon.size() != remainder.size()) throw ValidationError("grid/remainder size mismatch");
  if (epsilon.size() < 2) throw ValidationError("order fit needs at least two grid points");
  const std::size_t n = epsilon.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(epsilon[i] > 0.0) || !(std::fabs(remainder[i]) > 0.0)) {
      throw ValidationError("order fit needs positive epsilon and nonzero remainder");
    }
    const double x = std::log(epsilon[i]);
    const double y = std::log(std::fabs(remainder[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::fabs(denom) > 0.0)) throw ValidationError("order fit needs distinct epsilon values");
  OrderFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.epsilon.assign(epsilon.begin(), epsilon.end());
  fit.remainder.assign(remainder.begin(), remainder.end());
  return fit;
}

OrderFit verify_asymptotic_order(double mu, double sigma, std::span<const double> eps_grid,
                                 const SolverConfig& cfg) {
  if (eps_grid.size() < 2) throw ValidationError("epsilon grid too small: need at least two points");
  std::vector<double> rem;
  rem.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    const MarketParams m{mu, sigma, eps};
    const GapSolution g = solve_gap(m, {1.0}, cfg);
    rem.push_back(g.lambda_bar - gap_leading_order(m.mu_bar(), eps));
  }
  return fit_power_order(eps_grid, rem);
}

}  // namespace tcost
