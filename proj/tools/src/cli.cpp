#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json_config.hpp"
#include "report.hpp"
#include "tcost/errors.hpp"
#include "tcost/gap_solver.hpp"
#include "tcost/metrics.hpp"
#include "tcost/multi_asset.hpp"
#include "tcost/shadow.hpp"
#include "tcost/simulator.hpp"
#include "tcost/spread_optimizer.hpp"

namespace tcost::cli {
namespace {

struct Globals {
  double mu = 0.08;
  double sigma = 0.16;
  double alpha = 0.03125;
  double eps = 0.01;
  std::string format = "human";
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool business_time = false;
  bool strict = false;
  double tol = 1e-11;

  MarketParams market() const { return {mu, sigma, eps}; }
  Preferences prefs() const { return {alpha}; }
  SolverConfig solver() const {
    SolverConfig c;
    c.tol_residual = tol;
    return c;
  }
};

struct ExpandArgs {
  std::vector<double> eps_grid{1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4};
};

struct SimArgs {
  std::size_t paths = 64;
  double horizon = 200.0;
  double dt = 1e-4;
  double y0 = 0.0;
  std::string dump;
  std::size_t snapshot_every = 10000;
};

struct SpreadArgs {
  std::vector<double> deltas{1.0, 0.5, 0.0};
  SpreadSearch search;
  std::string split_dir;
  std::string plot_json;
};

struct MultiArgs {
  std::string input;
  bool simulate = false;
  SimArgs sim{256, 50.0, 1e-3, 0.0, {}, 0};
};

// A report plus whether every tolerance check it contains passed.
struct Outcome {
  Report report;
  bool pass = true;
};

struct Check {
  double estimate, se, exact, z;
  bool pass;
};

Check three_se(const Estimate& e, double exact) {
  const double diff = e.value - exact;
  const double z = e.se > 0.0 ? diff / e.se : 0.0;
  return {e.value, e.se, exact, z, std::fabs(diff) <= 3.0 * e.se};
}

// Simulated annuities also carry the O(1/T) cost of the final liquidation.
Check ea_check(const Estimate& e, double exact) {
  Check c = three_se(e, exact);
  c.pass = std::fabs(c.estimate - c.exact) <= std::max(3.0 * c.se, 0.02 * std::fabs(c.exact));
  return c;
}

void put_check(Report& r, const std::string& name, const Check& c) {
  r.set(name + "_estimate", c.estimate);
  r.set(name + "_se", c.se);
  r.set(name + "_exact", c.exact);
  r.set(name + "_z", c.z);
  r.set(name + "_pass", c.pass);
}

void put_market(Report& r, const Globals& g) {
  r.set("mu", g.mu);
  r.set("sigma", g.sigma);
  r.set("epsilon", g.eps);
  r.set("alpha", g.alpha);
  r.set("mu_bar", g.market().mu_bar());
}

Outcome cmd_solve(const Globals& g) {
  Outcome o{Report("solve")};
  Report& r = o.report;
  const GapSolution gap = solve_gap(g.market(), g.prefs(), g.solver());
  PolicyMetrics m = compute_metrics(gap);
  if (g.business_time) m = to_business_time(m, g.sigma);

  put_market(r, g);
  r.set("time_unit", std::string(g.business_time ? "business" : "calendar"));
  r.set("lambda_bar", gap.lambda_bar);
  r.set("a", gap.a);
  r.set("b", gap.b);
  r.set("branch", std::string(to_string(gap.branch)));
  r.set("l", gap.l);
  r.set("u", gap.u);
  r.set("y_max", gap.y_max);
  r.set("residual", gap.residual);
  r.set("eta_minus", m.eta_minus);
  r.set("eta_plus", m.eta_plus);
  r.set("ea", m.ea);
  r.set("lip", m.lip);
  r.set("sht", m.sht);
  r.set("wet", m.wet);
  r.set("wet_minus", m.wet_minus);
  r.set("wet_plus", m.wet_plus);
  r.set("lt_buy", m.lt_buy);
  r.set("lt_sell", m.lt_sell);
  r.set("avg_position", m.avg_position);
  r.set("alpha_hat", m.alpha_hat);
  r.set("universal_ratio", m.lip / (g.eps * m.sht));
  return o;
}

std::optional<double> try_order(const std::vector<double>& eps, const std::vector<double>& rem,
                                Report& r, const std::string& what) {
  try {
    return fit_power_order(eps, rem).slope;
  } catch (const ValidationError& e) {
    r.warn(what + " order fit skipped: " + e.what());
    return std::nullopt;
  }
}

Outcome cmd_expand(const Globals& g, const ExpandArgs& a) {
  Outcome o{Report("expand")};
  Report& r = o.report;
  put_market(r, g);
  r.set("time_unit", std::string(g.business_time ? "business" : "calendar"));
  Table& t = r.add_table("expansions",
                         {"epsilon", "lambda_bar", "lambda_lead", "ea", "ea_lead", "lip",
                          "lip_lead", "sht", "sht_lead", "wet", "wet_lead", "avg_position",
                          "avg_position_lead"});
  const double scale = g.business_time ? 1.0 / (g.sigma * g.sigma) : 1.0;
  std::vector<double> eps, rem_lambda, rem_ea, rem_lip, rem_sht, rem_wet;
  for (double e : a.eps_grid) {
    MarketParams mk = g.market();
    mk.epsilon = e;
    const GapSolution gap = solve_gap(mk, g.prefs(), g.solver());
    const PolicyMetrics m = compute_metrics(gap);
    const LeadingExpansions lead = leading_expansions(mk, g.prefs());
    t.rows.push_back({e, gap.lambda_bar, lead.lambda, m.ea * scale, lead.ea * scale,
                      m.lip * scale, lead.lip * scale, m.sht * scale, lead.sht * scale,
                      m.wet * scale, lead.wet * scale, m.avg_position, lead.avg_position});
    eps.push_back(e);
    rem_lambda.push_back(std::fabs(gap.lambda_bar - lead.lambda));
    rem_ea.push_back(std::fabs(m.ea - lead.ea));
    rem_lip.push_back(std::fabs(m.lip - lead.lip));
    rem_sht.push_back(std::fabs(m.sht / lead.sht - 1.0));
    rem_wet.push_back(std::fabs(m.wet / lead.wet - 1.0));
  }
  const std::pair<const char*, const std::vector<double>*> fits[] = {
      {"lambda_remainder_order", &rem_lambda}, {"ea_remainder_order", &rem_ea},
      {"lip_remainder_order", &rem_lip},       {"sht_relative_error_order", &rem_sht},
      {"wet_relative_error_order", &rem_wet}};
  for (const auto& [name, rem] : fits) {
    if (auto s = try_order(eps, *rem, r, name)) r.set(name, *s);
  }
  return o;
}

SimConfig sim_config(const Globals& g, const SimArgs& a) {
  SimConfig c;
  c.horizon_years = a.horizon;
  c.dt_years = a.dt;
  c.n_paths = a.paths;
  c.seed = g.seed;
  c.y0 = a.y0;
  c.threads = g.threads;
  return c;
}

Outcome cmd_simulate(const Globals& g, const SimArgs& a) {
  Outcome o{Report("simulate")};
  Report& r = o.report;
  const ShadowModel model(solve_gap(g.market(), g.prefs(), g.solver()));
  const PolicyMetrics m = compute_metrics(model.gap());
  SimConfig c = sim_config(g, a);
  if (!a.dump.empty()) c.snapshot_every = a.snapshot_every;
  if (g.business_time) r.warn("--business-time ignored: simulation reports calendar time");

  std::vector<PathRecord> paths;
  const SimResult res = run_simulation(model, c, a.dump.empty() ? nullptr : &paths);
  if (!a.dump.empty()) {
    std::ofstream f(a.dump);
    if (!f) throw ValidationError("cannot open path dump file " + a.dump);
    write_path_dump(f, paths);
  }

  put_market(r, g);
  r.set("lambda_bar", model.gap().lambda_bar);
  r.set("horizon_years", a.horizon);
  r.set("dt_years", a.dt);
  r.set("n_paths", static_cast<std::int64_t>(a.paths));
  r.set("seed", std::to_string(g.seed));
  r.set("y0", a.y0);

  const Check ea = ea_check(res.ea, m.ea);
  const std::pair<std::string, Check> checks[] = {
      {"ea", ea},
      {"sht", three_se(res.ergodic.sht, m.sht)},
      {"wet", three_se(res.ergodic.wet, m.wet)},
      {"wet_minus", three_se(res.ergodic.wet_minus, m.wet_minus)},
      {"wet_plus", three_se(res.ergodic.wet_plus, m.wet_plus)},
      {"lt_buy", three_se(res.ergodic.lt_buy, m.lt_buy)},
      {"lt_sell", three_se(res.ergodic.lt_sell, m.lt_sell)},
      {"avg_position", three_se(res.ergodic.avg_position, m.avg_position)}};
  for (const auto& [name, chk] : checks) {
    put_check(r, name, chk);
    o.pass = o.pass && chk.pass;
  }
  r.set("all_pass", o.pass);
  return o;
}

Outcome cmd_bound_check(const Globals& g, const SimArgs& a) {
  Outcome o{Report("bound-check")};
  Report& r = o.report;
  const ShadowModel model(solve_gap(g.market(), g.prefs(), g.solver()));
  const FiniteHorizonReport fh = verify_finite_horizon_bound(model, sim_config(g, a));
  put_market(r, g);
  r.set("lambda_bar", model.gap().lambda_bar);
  r.set("horizon_years", a.horizon);
  r.set("dt_years", a.dt);
  r.set("n_paths", static_cast<std::int64_t>(a.paths));
  r.set("seed", std::to_string(g.seed));
  r.set("lhs", fh.lhs.value);
  r.set("lhs_se", fh.lhs.se);
  r.set("rhs", fh.rhs.value);
  r.set("rhs_se", fh.rhs.se);
  r.set("log_lhs", fh.log_lhs);
  r.set("log_rhs", fh.log_rhs);
  r.set("z_score", fh.z_score);
  r.set("annuity_term", fh.annuity_term);
  r.set("q_correction", fh.q_correction);
  r.set("max_abs_q", fh.max_abs_q);
  r.set("q_bound_holds", fh.q_bound_holds);
  o.pass = std::fabs(fh.z_score) <= 3.0 && fh.q_bound_holds;
  r.set("pass", o.pass);
  return o;
}

std::string delta_tag(double d) {
  std::string s = format_double(d);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

void write_curve_csv(std::ostream& out, const SpreadCurve& c) {
  out << "epsilon,profit,lambda_bar,wet_minus,wet_plus,delta\n";
  for (const SpreadRow& row : c.rows) {
    out << format_double(row.epsilon) << ',' << format_double(row.profit) << ','
        << format_double(row.lambda_bar) << ',' << format_double(row.wet_minus) << ','
        << format_double(row.wet_plus) << ',' << format_double(c.delta) << '\n';
  }
}

Outcome cmd_spread_opt(const Globals& g, const SpreadArgs& a) {
  Outcome o{Report("spread-opt")};
  Report& r = o.report;
  const AssetDynamics dyn{g.mu, g.sigma};
  r.set("mu", g.mu);
  r.set("sigma", g.sigma);
  r.set("alpha", g.alpha);
  r.set("mu_bar", g.mu / (g.sigma * g.sigma));
  r.set("eps_min", a.search.eps_min);
  r.set("eps_max", a.search.eps_max);
  r.set("grid_points", static_cast<std::int64_t>(a.search.grid_points));

  std::vector<SpreadOptimum> opts;
  for (double d : a.deltas) opts.push_back(optimize_spread(dyn, g.prefs(), {d}, a.search, g.solver()));
  if (opts.size() == 1) {
    r.set("delta", opts[0].curve.delta);
    r.set("eps_star", opts[0].eps_star);
    r.set("profit_star", opts[0].profit_star);
  }
  Table& opt_t = r.add_table("optima", {"delta", "eps_star", "profit_star", "lambda_bar",
                                        "not_unimodal", "excluded"});
  Table& curve_t = r.add_table("curve", {"epsilon", "profit", "lambda_bar", "wet_minus",
                                         "wet_plus", "delta"});
  for (const SpreadOptimum& op : opts) {
    opt_t.rows.push_back({op.curve.delta, op.eps_star, op.profit_star, op.lambda_bar,
                          op.not_unimodal, static_cast<std::int64_t>(op.curve.excluded.size())});
    for (const SpreadRow& row : op.curve.rows) {
      curve_t.rows.push_back(
          {row.epsilon, row.profit, row.lambda_bar, row.wet_minus, row.wet_plus, op.curve.delta});
    }
    for (const std::string& w : op.curve.warnings) {
      r.warn("delta=" + format_double(op.curve.delta) + ": " + w);
    }
    o.pass = o.pass && !op.not_unimodal;
  }

  if (!a.split_dir.empty()) {
    std::filesystem::create_directories(a.split_dir);
    for (const SpreadOptimum& op : opts) {
      const auto path = std::filesystem::path(a.split_dir) /
                        ("spread_delta_" + delta_tag(op.curve.delta) + ".csv");
      std::ofstream f(path);
      if (!f) throw ValidationError("cannot write " + path.string());
      write_curve_csv(f, op.curve);
    }
  }
  if (!a.plot_json.empty()) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["x"] = "epsilon";
    j["y"] = "profit";
    j["x_scale"] = "log";
    j["y_scale"] = "log";
    j["series"] = nlohmann::ordered_json::array();
    for (const SpreadOptimum& op : opts) {
      nlohmann::ordered_json s;
      s["delta"] = op.curve.delta;
      s["eps_star"] = op.eps_star;
      std::vector<double> x, y;
      for (const SpreadRow& row : op.curve.rows) {
        x.push_back(row.epsilon);
        y.push_back(row.profit);
      }
      s["epsilon"] = x;
      s["profit"] = y;
      j["series"].push_back(std::move(s));
    }
    std::ofstream f(a.plot_json);
    if (!f) throw ValidationError("cannot write " + a.plot_json);
    f << j.dump(2) << '\n';
  }
  return o;
}

void reject_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                 const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (key.rfind("correlation", 0) == 0) {
      throw ValidationError(where + ": correlated assets are not supported ('" + key + "')");
    }
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(where + ": unknown key '" + key + "'");
    }
  }
}

double number_at(const nlohmann::json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ValidationError(where + ": '" + key + "' must be a number");
  }
  return obj[key].get<double>();
}

MultiMarket parse_multi(std::istream& in, double default_alpha) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("asset file is not valid JSON: ") + e.what());
  }
  MultiMarket mm;
  mm.prefs.alpha = default_alpha;
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    reject_keys(j, {"alpha", "assets"}, "asset file");
    if (j.contains("alpha")) mm.prefs.alpha = number_at(j, "alpha", "asset file");
    if (!j.contains("assets")) throw ValidationError("asset file: missing 'assets'");
    list = &j["assets"];
  }
  if (!list->is_array()) throw ValidationError("asset file: expected a list of assets");
  for (std::size_t i = 0; i < list->size(); ++i) {
    const auto& a = (*list)[i];
    const std::string where = "asset " + std::to_string(i);
    if (!a.is_object()) throw ValidationError(where + ": expected an object");
    reject_keys(a, {"mu", "sigma", "epsilon", "eps"}, where);
    const double eps = a.contains("epsilon") ? number_at(a, "epsilon", where)
                                             : number_at(a, "eps", where);
    mm.assets.push_back({number_at(a, "mu", where), number_at(a, "sigma", where), eps});
  }
  return mm;
}

Outcome cmd_multi(const Globals& g, const MultiArgs& a) {
  Outcome o{Report("multi")};
  Report& r = o.report;
  std::ifstream in(a.input);
  if (!in) throw ValidationError("cannot open asset file " + a.input);
  const MultiMarket mm = parse_multi(in, g.alpha);
  const MultiReport rep = solve_all(mm, g.solver());

  r.set("alpha", mm.prefs.alpha);
  r.set("n_assets", static_cast<std::int64_t>(mm.assets.size()));
  r.set("total_ea", rep.totals.ea);
  r.set("total_sht", rep.totals.sht);
  r.set("total_wet", rep.totals.wet);
  r.set("total_wet_minus", rep.totals.wet_minus);
  r.set("total_wet_plus", rep.totals.wet_plus);
  r.set("total_avg_position", rep.totals.avg_position);

  Table& t = r.add_table("assets", {"asset", "mu", "sigma", "epsilon", "lambda_bar", "eta_minus",
                                    "eta_plus", "ea", "sht", "wet", "wet_minus", "wet_plus",
                                    "avg_position"});
  for (const AssetReport& ar : rep.assets) {
    const PolicyMetrics& m = ar.metrics;
    t.rows.push_back({std::to_string(ar.index), ar.gap.market.mu, ar.gap.market.sigma,
                      ar.gap.market.epsilon, ar.gap.lambda_bar, m.eta_minus, m.eta_plus, m.ea,
                      m.sht, m.wet, m.wet_minus, m.wet_plus, m.avg_position});
  }
  const std::string blank;
  t.rows.push_back({std::string("TOTAL"), blank, blank, blank, blank, blank, blank, rep.totals.ea,
                    rep.totals.sht, rep.totals.wet, rep.totals.wet_minus, rep.totals.wet_plus,
                    rep.totals.avg_position});

  if (a.simulate) {
    SimConfig c = sim_config(g, a.sim);
    const Estimate e = simulate_total_ea(mm, c, g.solver());
    const Check chk = ea_check(e, rep.totals.ea);
    r.set("horizon_years", a.sim.horizon);
    r.set("dt_years", a.sim.dt);
    r.set("n_paths", static_cast<std::int64_t>(a.sim.paths));
    r.set("seed", std::to_string(g.seed));
    put_check(r, "sim_total_ea", chk);
    o.pass = chk.pass;
  }
  return o;
}

void add_sim_options(CLI::App* sub, SimArgs& s) {
  sub->add_option("--paths", s.paths, "Number of simulated paths")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--T", s.horizon, "Horizon in years")->capture_default_str();
  sub->add_option("--dt", s.dt, "Euler step in years")->capture_default_str();
  sub->add_option("--y0", s.y0, "Initial state in [0, log(u/l)]")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Globals g;
  ExpandArgs expand;
  SimArgs sim;
  SimArgs bound{100000, 1.0, 1e-4, 0.0, {}, 0};
  SpreadArgs spread;
  MultiArgs multi;

  CLI::App app{"Optimal trading under proportional transaction costs (CARA investor)", "tcost"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values");
  app.add_option("--mu", g.mu, "Expected excess return per year")->capture_default_str();
  app.add_option("--sigma", g.sigma, "Volatility per sqrt(year)")->capture_default_str();
  app.add_option("--alpha", g.alpha, "Absolute risk aversion per dollar")->capture_default_str();
  app.add_option("--eps", g.eps, "Relative bid-ask spread in (0, 1)")->capture_default_str();
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "human"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "Write the report to this file instead of stdout");
  app.add_option("--seed", g.seed, "RNG seed")->envname("TCOST_SEED")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--tol", g.tol, "Gap equation residual tolerance")->capture_default_str();
  app.add_flag("--business-time", g.business_time, "Report rates per unit of variance");
  app.add_flag("--strict", g.strict, "Exit with code 4 when a tolerance check fails");
  app.require_subcommand(1);
  app.fallthrough();

  auto* solve = app.add_subcommand("solve", "Gap, band and closed-form metrics");
  auto* exp = app.add_subcommand("expand", "Exact values against small-spread expansions");
  exp->add_option("--eps-grid", expand.eps_grid, "Spreads to evaluate")->capture_default_str();
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates against closed forms");
  add_sim_options(simulate, sim);
  simulate->add_option("--dump-paths", sim.dump, "Write a path CSV (path_id,t,y,L,U,cash,shares)");
  simulate->add_option("--snapshot-every", sim.snapshot_every, "Steps between dumped rows")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* bc = app.add_subcommand("bound-check", "Finite-horizon identity by simulation");
  add_sim_options(bc, bound);
  auto* so = app.add_subcommand("spread-opt", "Market maker's profit-maximizing spread");
  so->add_option("--delta", spread.deltas, "Book-price weights in [0, 1]")->capture_default_str();
  so->add_option("--eps-min", spread.search.eps_min, "Smallest spread")->capture_default_str();
  so->add_option("--eps-max", spread.search.eps_max, "Largest spread")->capture_default_str();
  so->add_option("--grid", spread.search.grid_points, "Log-grid size")->capture_default_str();
  so->add_option("--eps-tol", spread.search.tol, "Refinement tolerance")->capture_default_str();
  so->add_option("--split-dir", spread.split_dir, "Write one CSV per delta into this directory");
  so->add_option("--plot-json", spread.plot_json, "Write plot data for the profit curves");
  auto* mu = app.add_subcommand("multi", "Independent assets: per-asset results and totals");
  mu->add_option("--input", multi.input, "JSON list of {mu, sigma, epsilon}")->required();
  mu->add_flag("--simulate", multi.simulate, "Also estimate the total EA by simulation");
  add_sim_options(mu, multi.sim);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    Outcome o{Report("")};
    if (solve->parsed()) {
      o = cmd_solve(g);
    } else if (exp->parsed()) {
      o = cmd_expand(g, expand);
    } else if (simulate->parsed()) {
      o = cmd_simulate(g, sim);
    } else if (bc->parsed()) {
      o = cmd_bound_check(g, bound);
    } else if (so->parsed()) {
      o = cmd_spread_opt(g, spread);
    } else {
      o = cmd_multi(g, multi);
    }
    const Format fmt = g.format == "json" ? Format::Json
                       : g.format == "csv" ? Format::Csv
                                           : Format::Human;
    const std::string text = render(o.report, fmt);
    if (g.out.empty()) {
      out << text;
    } else {
      std::ofstream f(g.out);
      if (!f) throw ValidationError("cannot write " + g.out);
      f << text;
    }
    if (g.strict && !o.pass) {
      err << "tcost: tolerance check failed\n";
      return kToleranceFailed;
    }
    return kOk;
  } catch (const NoBracketError& e) {
    err << "tcost: no bracket for the gap equation: " << e.what() << '\n';
    return kNoBracket;
  } catch (const ValidationError& e) {
    err << "tcost: invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const DomainError& e) {
    err << "tcost: invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "tcost: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace tcost::cli
