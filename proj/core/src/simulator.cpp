#include "tcost/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tcost/errors.hpp"
#include "tcost/metrics.hpp"

namespace tcost {
namespace {

constexpr double kExpGuard = 700.0;
constexpr std::size_t kTableIntervals = 4096;

// Cubic Hermite table of w, k and e^y on [0, y_max]. Derivatives are exact
// (w' from the Riccati equation, k' = k (2 mu_bar - 1 - 2 w)), so the
// interpolation error is O(h^4).
class StateTable {
 public:
  explicit StateTable(const GapSolution& gap) : y_max_(gap.y_max) {
    const std::size_t n = kTableIntervals;
    h_ = gap.y_max / static_cast<double>(n);
    inv_h_ = 1.0 / h_;
    nodes_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const double y = i == n ? gap.y_max : h_ * static_cast<double>(i);
      const double v = detail::riccati_shifted(gap, y);
      const double w = v + gap.mu_bar - 0.5;
      const double k = detail::k_unchecked(gap, y);
      const double e = std::exp(y);
      nodes_[i] = {w, h_ * (v * v + gap.disc), k, h_ * k * (2.0 * gap.mu_bar - 1.0 - 2.0 * w), e,
                   h_ * e};
    }
  }

  struct Values {
    double w, k, e;
  };

  Values at(double y) const noexcept {
    double s = y * inv_h_;
    auto i = static_cast<std::size_t>(s);
    if (i >= kTableIntervals) i = kTableIntervals - 1;
    const double t = s - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    const Node& a = nodes_[i];
    const Node& b = nodes_[i + 1];
    return {h00 * a.w + h10 * a.dw + h01 * b.w + h11 * b.dw,
            h00 * a.k + h10 * a.dk + h01 * b.k + h11 * b.dk,
            h00 * a.e + h10 * a.de + h01 * b.e + h11 * b.de};
  }

  double y_max() const noexcept { return y_max_; }

 private:
  struct Node {
    double w, dw, k, dk, e, de;
  };
  std::vector<Node> nodes_;
  double y_max_ = 0.0;
  double h_ = 0.0;
  double inv_h_ = 0.0;
};

struct Kernel {
  const ShadowModel& model;
  const GapSolution& gap;
  StateTable table;
  std::size_t n_steps;
  double dt;
  double sqrt_dt;
  double y0;
  double var;
  double sigma;
  double phys_drift;
  double cash0;
  double eta_plus;
  double shares0;
  SimConfig cfg;

  Kernel(const ShadowModel& m, const SimConfig& c)
      : model(m), gap(m.gap()), table(m.gap()), cfg(c) {
    n_steps = c.n_steps();
    dt = c.horizon_years / static_cast<double>(n_steps);
    sqrt_dt = std::sqrt(dt);
    y0 = clamp_state(gap, c.y0);
    var = gap.market.variance();
    sigma = gap.market.sigma;
    phys_drift = (gap.market.mu - 0.5 * var) * dt;
    cash0 = -gap.l * std::exp(y0);
    eta_plus = (1.0 - gap.market.epsilon) * gap.u;
    shares0 = gap.l * std::exp(y0) / c.s0;
  }

  template <Measure M, bool Shadow>
  void run(std::size_t path, PathRecord& rec) const {
    NormalStream noise(cfg.seed, path);
    const double y_max = gap.y_max;
    const double l = gap.l;
    const double rn_shift = gap.mu_bar - 0.5;
    double y = y0, big_l = 0.0, big_u = 0.0;
    double pos_sum = 0.0, llr = 0.0, xt = 0.0;
    double cost = 0.0, proceeds = 0.0;

    rec.snapshots.clear();
    if (cfg.snapshot_every > 0) {
      rec.snapshots.reserve(n_steps / cfg.snapshot_every + 2);
      rec.snapshots.push_back({0.0, y, 0.0, 0.0, cash0, shares0});
    }

    for (std::size_t step = 1; step <= n_steps; ++step) {
      const double dw = sqrt_dt * noise.next();
      double incr = sigma * dw;
      if constexpr (M == Measure::Physical) {
        incr += phys_drift;
        if constexpr (Shadow) {
          const auto v = table.at(y);
          xt += l * sigma / v.k * (sigma * v.w * dt + dw);
        }
      } else {
        const double w = table.at(y).w;
        incr += var * (rn_shift - w) * dt;
        const double theta = sigma * w;
        llr += theta * dw - 0.5 * theta * theta * dt;
      }
      y += incr;
      // Shares scale by e^{dL - dU}; the cash ledger uses the value actually
      // traded, l (1 - e^{-dL}) at the ask and eta_plus (e^{dU} - 1) at the bid.
      if (y < 0.0) {
        big_l -= y;
        cost -= l * std::expm1(y);
        y = 0.0;
      } else if (y > y_max) {
        big_u += y - y_max;
        proceeds += eta_plus * std::expm1(y - y_max);
        y = y_max;
      }
      if constexpr (M == Measure::Physical) pos_sum += table.at(y).e;

      if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) {
        rec.snapshots.push_back({static_cast<double>(step) * dt, y, big_l, big_u,
                                 cash0 - cost + proceeds,
                                 shares0 * std::exp(big_l - big_u)});
      }
    }

    rec.y_final = y;
    rec.l_total = big_l;
    rec.u_total = big_u;
    rec.bought_value = l * big_l;
    rec.sold_value = eta_plus * big_u;
    rec.wealth_terminal = cash0 - cost + proceeds +
                          (1.0 - gap.market.epsilon) * l * std::exp(y);
    rec.shadow_wealth_initial = cash0 + eval_g(gap, y0) * l;
    rec.shadow_wealth_terminal = Shadow ? rec.shadow_wealth_initial + xt : 0.0;
    rec.avg_position =
        M == Measure::Physical ? l * pos_sum / static_cast<double>(n_steps) : 0.0;
    rec.log_likelihood_ratio = llr;
    rec.q_increment = model.q_tilde(y) - model.q_tilde(y0);
  }

  void run_any(std::size_t path, PathRecord& rec) const {
    if (cfg.measure == Measure::RiskNeutral) {
      run<Measure::RiskNeutral, false>(path, rec);
    } else if (cfg.track_shadow_wealth) {
      run<Measure::Physical, true>(path, rec);
    } else {
      run<Measure::Physical, false>(path, rec);
    }
  }
};

unsigned resolve_threads(unsigned requested, std::size_t n_paths) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(t, n_paths));
}

Estimate mean_and_se(const std::vector<double>& x) {
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  if (x.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// log of the sample mean of exp(z_i) with the delta-method standard error of
// that log.
Estimate log_mean_exp(const std::vector<double>& z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> e(z.size());
  std::transform(z.begin(), z.end(), e.begin(), [zmax](double v) { return std::exp(v - zmax); });
  const Estimate m = mean_and_se(e);
  return {zmax + std::log(m.value), m.se / m.value};
}

}  // namespace

const char* to_string(Measure m) noexcept {
  return m == Measure::RiskNeutral ? "risk_neutral" : "physical";
}

void SimConfig::validate() const {
  if (!(dt_years > 0.0) || !std::isfinite(dt_years)) {
    throw ValidationError("dt_years must be > 0");
  }
  if (!(horizon_years >= dt_years) || !std::isfinite(horizon_years)) {
    throw ValidationError("horizon_years must be >= dt_years");
  }
  if (n_paths < 1) throw ValidationError("n_paths must be >= 1");
  if (!(s0 > 0.0)) throw ValidationError("s0 must be > 0");
  if (!std::isfinite(y0)) throw ValidationError("y0 must be finite");
}

std::size_t SimConfig::n_steps() const {
  return static_cast<std::size_t>(std::ceil(horizon_years / dt_years - 1e-9));
}

ReflectionTotals run_reflected_walk(const ReflectedWalk& walk, double y0, double horizon,
                                    double dt, NormalStream& noise) {
  if (!(walk.vol >= 0.0) || !(walk.y_max > 0.0)) {
    throw ValidationError("reflected walk needs vol >= 0 and y_max > 0");
  }
  if (!(dt > 0.0) || !(horizon >= dt)) throw ValidationError("need 0 < dt <= horizon");
  if (!(y0 >= 0.0 && y0 <= walk.y_max)) throw DomainError("y0 outside [0, y_max]");
  const auto n = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  const double h = horizon / static_cast<double>(n);
  const double sd = walk.vol * std::sqrt(h);
  ReflectionTotals out{y0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    double y = out.y_final + walk.drift * h;
    if (sd > 0.0) y += sd * noise.next();
    if (y < 0.0) {
      out.l_total -= y;
      y = 0.0;
    } else if (y > walk.y_max) {
      out.u_total += y - walk.y_max;
      y = walk.y_max;
    }
    out.y_final = y;
  }
  return out;
}

std::vector<PathRecord> simulate_reflected(const ShadowModel& model, const SimConfig& cfg) {
  cfg.validate();
  const double tol = kDomainTolerance * model.y_max();
  if (cfg.y0 < -tol || cfg.y0 > model.y_max() + tol) {
    throw ValidationError("y0 must lie in [0, " + std::to_string(model.y_max()) + "]");
  }
  const Kernel kernel(model, cfg);
  std::vector<PathRecord> out(cfg.n_paths);
  const unsigned n_threads = resolve_threads(cfg.threads, cfg.n_paths);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < cfg.n_paths; ++i) kernel.run_any(i, out[i]);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < cfg.n_paths && !failed; i = next++) kernel.run_any(i, out[i]);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

ErgodicEstimates account_trades(std::span<const PathRecord> paths, double horizon) {
  if (paths.empty()) throw ValidationError("no paths to account");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be > 0");
  const std::size_t n = paths.size();
  std::vector<double> sht(n), wet(n), wm(n), wp(n), lb(n), ls(n), pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PathRecord& p = paths[i];
    lb[i] = p.l_total / horizon;
    ls[i] = p.u_total / horizon;
    sht[i] = lb[i] + ls[i];
    wm[i] = p.bought_value / horizon;
    wp[i] = p.sold_value / horizon;
    wet[i] = wm[i] + wp[i];
    pos[i] = p.avg_position;
  }
  return {mean_and_se(sht), mean_and_se(wet), mean_and_se(wm), mean_and_se(wp),
          mean_and_se(lb),  mean_and_se(ls),  mean_and_se(pos)};
}

Estimate estimate_equivalent_annuity(std::span<const PathRecord> paths, const Preferences& prefs,
                                     double horizon) {
  prefs.validate();
  if (paths.empty()) throw ValidationError("no paths for the equivalent annuity");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be > 0");
  std::vector<double> z(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const double a = prefs.alpha * paths[i].wealth_terminal;
    if (!std::isfinite(a) || std::fabs(a) > kExpGuard) {
      throw OverflowGuardError("exp(-alpha * wealth) out of range on path " + std::to_string(i) +
                               " (alpha * wealth = " + std::to_string(a) + ")");
    }
    z[i] = -a + paths[i].log_likelihood_ratio;
  }
  const Estimate lm = log_mean_exp(z);
  const double scale = prefs.alpha * horizon;
  return {-lm.value / scale, lm.se / scale};
}

SimResult run_simulation(const ShadowModel& model, const SimConfig& cfg,
                         std::vector<PathRecord>* keep_physical) {
  SimConfig phys = cfg;
  phys.measure = Measure::Physical;
  phys.track_shadow_wealth = false;
  SimConfig rn = cfg;
  rn.measure = Measure::RiskNeutral;
  rn.seed = mix_seed(cfg.seed, 1);
  rn.snapshot_every = 0;

  SimResult res;
  res.n_paths = cfg.n_paths;
  res.horizon_years = cfg.horizon_years;
  {
    auto paths = simulate_reflected(model, phys);
    res.ergodic = account_trades(paths, cfg.horizon_years);
    if (keep_physical != nullptr) *keep_physical = std::move(paths);
  }
  const auto paths = simulate_reflected(model, rn);
  res.ea = estimate_equivalent_annuity(paths, model.gap().prefs, cfg.horizon_years);
  return res;
}

double max_abs_q_tilde(const ShadowModel& model, std::size_t grid) {
  if (grid < 2) throw ValidationError("grid must have at least 2 points");
  double m = 0.0;
  const double y_max = model.y_max();
  for (std::size_t i = 0; i < grid; ++i) {
    const double y = y_max * static_cast<double>(i) / static_cast<double>(grid - 1);
    m = std::max(m, std::fabs(model.q_tilde(y)));
  }
  return m;
}

FiniteHorizonReport verify_finite_horizon_bound(const ShadowModel& model, const SimConfig& cfg) {
  const GapSolution& gap = model.gap();
  SimConfig phys = cfg;
  phys.measure = Measure::Physical;
  phys.track_shadow_wealth = true;
  phys.snapshot_every = 0;
  phys.seed = mix_seed(cfg.seed, 2);
  SimConfig rn = phys;
  rn.measure = Measure::RiskNeutral;
  rn.track_shadow_wealth = false;
  rn.seed = mix_seed(cfg.seed, 3);

  FiniteHorizonReport rep;
  rep.n_paths = cfg.n_paths;
  rep.horizon_years = cfg.horizon_years;
  const double alpha = gap.prefs.alpha;

  std::vector<double> z(cfg.n_paths);
  {
    const auto paths = simulate_reflected(model, phys);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = -alpha * (paths[i].shadow_wealth_terminal - paths[i].shadow_wealth_initial);
      if (!std::isfinite(z[i]) || std::fabs(z[i]) > kExpGuard) {
        throw OverflowGuardError("exp(-alpha * shadow wealth) out of range on path " +
                                 std::to_string(i));
      }
    }
  }
  const Estimate log_lhs = log_mean_exp(z);
  {
    const auto paths = simulate_reflected(model, rn);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = paths[i].q_increment;
  }
  const Estimate log_q = log_mean_exp(z);

  rep.annuity_term = 0.5 * gap.market.variance() * (gap.mu_bar - gap.lambda_bar) *
                     (gap.mu_bar + gap.lambda_bar) * cfg.horizon_years;
  rep.q_correction = log_q.value;
  rep.log_lhs = log_lhs.value;
  rep.log_rhs = -rep.annuity_term + log_q.value;
  rep.lhs = {std::exp(rep.log_lhs), std::exp(rep.log_lhs) * log_lhs.se};
  rep.rhs = {std::exp(rep.log_rhs), std::exp(rep.log_rhs) * log_q.se};
  const double se = std::hypot(log_lhs.se, log_q.se);
  const double diff = rep.log_lhs - rep.log_rhs;
  rep.z_score = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff));
  rep.max_abs_q = max_abs_q_tilde(model);
  rep.q_bound_holds = std::fabs(rep.q_correction) <= 2.0 * rep.max_abs_q;
  return rep;
}

void write_path_dump(std::ostream& out, std::span<const PathRecord> paths) {
  out << "path_id,t,y,L,U,cash,shares\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (const PathSnapshot& s : paths[i].snapshots) {
      out << i << ',' << s.t << ',' << s.y << ',' << s.l_total << ',' << s.u_total << ','
          << s.cash << ',' << s.shares << '\n';
    }
  }
  out.precision(old);
}

}  // namespace tcost
