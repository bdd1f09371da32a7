#include "heatbound/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <variant>

#include "heatbound/errors.hpp"
#include "heatbound/kernels.hpp"
#include "heatbound/numerics.hpp"

namespace heatbound::verify {
namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double inf_v = std::numeric_limits<double>::infinity();

const geometry::Factor* sole_factor(const ModelManifold& m) {
  return m.factors().size() == 1 ? &m.factors()[0] : nullptr;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void keep_within_diameter(std::vector<double>& ds, const ModelManifold& m) {
  double diam = m.diameter();
  std::erase_if(ds, [&](double d) { return d > diam; });
}

// One (d, t) cell worth of sweep output, merged in grid order afterwards so
// reports never depend on the thread count.
struct CellResult {
  std::vector<SweepRecord> records;
  double chain_margin = inf_v;
  int skipped = 0;
};

double rel_gap(double log_small, double log_big) {
  return -std::expm1(log_small - log_big);
}

void chain_against_kernel(double log_h, const std::vector<bounds::ChainLink>& links,
                          bool is_lower, double& worst) {
  if (links.empty()) return;
  double prev = is_lower ? rel_gap(links[0].log_value, log_h)
                         : rel_gap(log_h, links[0].log_value);
  worst = std::min(worst, prev);
  for (std::size_t i = 1; i < links.size(); ++i) {
    double step = is_lower ? rel_gap(links[i].log_value, links[i - 1].log_value)
                           : rel_gap(links[i - 1].log_value, links[i].log_value);
    worst = std::min(worst, step);
  }
}

double safe_rel_margin(double lhs, double rhs) {
  double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
  return (rhs - lhs) / scale;
}

}  // namespace

GridSpec default_sandwich_grid(const ModelManifold& m) {
  GridSpec g;
  g.delta = {0.1, 0.5, 1.0, 2.0, 10.0};
  if (const auto* f = sole_factor(m)) {
    if (std::holds_alternative<geometry::Euclidean>(*f)) {
      g.d = {0.0, 0.5, 1.0, 2.0, 5.0};
      g.t = numerics::logspace(1e-3, 1e3, 25);
      return g;
    }
    if (const auto* c = std::get_if<geometry::Circle>(f)) {
      g.d = {0.0, std::min(1.0, c->length / 4.0), c->length / 2.0};
      g.t = numerics::logspace(1e-2, 1e3, 25);
      return g;
    }
    g.d = {0.0, 0.5, 1.0, 2.0};  // sphere
    g.t = numerics::logspace(1e-3, 10.0, 25);
    return g;
  }
  g.d = {0.0, 0.5, 1.0, 2.0};
  g.t = numerics::logspace(1e-2, 1e2, 25);
  keep_within_diameter(g.d, m);
  return g;
}

GridSpec default_derivative_grid(const ModelManifold& m) {
  GridSpec g;
  if (const auto* f = sole_factor(m)) {
    if (std::holds_alternative<geometry::Euclidean>(*f)) {
      g.d = {0.0, 0.5, 1.0, 2.0};
      g.t = numerics::logspace(1e-2, 1e2, 15);
      return g;
    }
    if (const auto* c = std::get_if<geometry::Circle>(f)) {
      g.d = {0.0, c->length / 8.0, c->length / 4.0, c->length / 2.0};
      g.t = numerics::logspace(1e-2, 1e2, 15);
      return g;
    }
    // Sphere: stay clear of the cut locus and keep d^2/4t small enough for
    // the alternating series to retain precision.
    g.d = {0.0, 0.3, 1.0, 2.0};
    g.t = numerics::logspace(0.15, 10.0, 10);
    return g;
  }
  g.d = {0.0, 0.5, 1.0};
  g.t = numerics::logspace(0.05, 50.0, 12);
  keep_within_diameter(g.d, m);
  return g;
}

std::vector<double> default_monotonicity_times(const ModelManifold& m) {
  if (const auto* f = sole_factor(m)) {
    if (std::holds_alternative<geometry::Euclidean>(*f))
      return numerics::logspace(1e-3, 1e3, 50);
    if (std::holds_alternative<geometry::Circle>(*f))
      return numerics::logspace(1e-2, 1e3, 50);
    return numerics::logspace(1e-3, 30.0, 50);
  }
  return numerics::logspace(1e-2, 1e2, 50);
}

std::vector<ModelManifold> default_catalog() {
  std::vector<ModelManifold> out;
  out.push_back(ModelManifold::euclidean(1));
  out.push_back(ModelManifold::euclidean(2));
  out.push_back(ModelManifold::euclidean(3));
  out.push_back(ModelManifold::circle(2.0 * std::numbers::pi));
  out.push_back(ModelManifold::sphere2());
  out.push_back(ModelManifold::product(
      {ModelManifold::euclidean(1), ModelManifold::circle(2.0 * std::numbers::pi)}));
  out.push_back(ModelManifold::product({ModelManifold::circle(2.0 * std::numbers::pi),
                                        ModelManifold::circle(2.0 * std::numbers::pi)}));
  out.push_back(
      ModelManifold::product({ModelManifold::euclidean(1), ModelManifold::sphere2()}));
  return out;
}

SweepReport sandwich_sweep(const ModelManifold& m, const GridSpec& grid,
                           const ToleranceConfig& tol) {
  SweepReport rep;
  rep.suite = "sandwich";
  rep.manifold = m.tag();
  rep.n = m.dimension();
  rep.grid = grid;

  const std::size_t nd = grid.d.size(), nt = grid.t.size();
  std::vector<CellResult> cells(nd * nt);
  numerics::parallel_for(nd * nt, [&](std::size_t idx) {
    double d = grid.d[idx / nt];
    double t = grid.t[idx % nt];
    CellResult& cell = cells[idx];
    double log_h = 0;
    bool have_h = true;
    try {
      log_h = kernels::log_heat_kernel_at(m, d, t, tol.series);
    } catch (const PrecisionError&) {
      have_h = false;
    }
    for (double delta : grid.delta) {
      SweepRecord rec;
      rec.d = d;
      rec.t = t;
      rec.delta = delta;
      if (!have_h) {
        rec.lower = rec.reference = rec.upper = nan_v;
        rec.margin_lower = rec.margin_upper = nan_v;
        rec.pass = true;
        rec.skipped = true;
        ++cell.skipped;
        cell.records.push_back(rec);
        continue;
      }
      auto lo = bounds::lower_bound_at(m, d, t, delta, false, tol);
      auto up = bounds::upper_bound_at(m, d, t, delta, false, tol);
      rec.lower = lo.value;
      rec.reference = std::exp(log_h);
      rec.upper = up.value;
      rec.margin_lower = rel_gap(lo.log_value, log_h);
      rec.margin_upper = rel_gap(log_h, up.log_value);
      rec.pass = rec.margin_lower >= -tol.slack && rec.margin_upper >= -tol.slack;
      cell.records.push_back(rec);
    }
    if (have_h) {
      auto chains = bounds::bounds_delta1_at(m, d, t, tol);
      chain_against_kernel(log_h, chains.lower, true, cell.chain_margin);
      chain_against_kernel(log_h, chains.lower_symmetric, true, cell.chain_margin);
      chain_against_kernel(log_h, chains.upper, false, cell.chain_margin);
      chain_against_kernel(log_h, chains.upper_symmetric, false, cell.chain_margin);
    }
  });

  rep.worst_margin_lower = rep.worst_margin_upper = rep.worst_chain_margin = inf_v;
  for (const CellResult& cell : cells) {
    rep.skipped += cell.skipped;
    rep.worst_chain_margin = std::min(rep.worst_chain_margin, cell.chain_margin);
    for (const SweepRecord& rec : cell.records) {
      rep.records.push_back(rec);
      if (rec.skipped) continue;
      rep.worst_margin_lower = std::min(rep.worst_margin_lower, rec.margin_lower);
      rep.worst_margin_upper = std::min(rep.worst_margin_upper, rec.margin_upper);
      if (!rec.pass) rep.pass = false;
    }
  }
  if (rep.worst_chain_margin < -tol.slack) rep.pass = false;
  return rep;
}

SweepReport derivative_sweep(const ModelManifold& m, const GridSpec& grid,
                             std::span<const double> alphas,
                             const ToleranceConfig& tol) {
  SweepReport rep;
  rep.suite = "gradient";
  rep.manifold = m.tag();
  rep.n = m.dimension();
  rep.grid = grid;
  rep.informative = m.compact();
  const int n = m.dimension();

  std::vector<double> modes;
  modes.push_back(nan_v);  // sharp form first
  modes.insert(modes.end(), alphas.begin(), alphas.end());

  const std::size_t nd = grid.d.size(), nt = grid.t.size();
  std::vector<CellResult> cells(nd * nt);
  numerics::parallel_for(nd * nt, [&](std::size_t idx) {
    double d = grid.d[idx / nt];
    double t = grid.t[idx % nt];
    CellResult& cell = cells[idx];
    kernels::KernelEval ke;
    bool have = true;
    try {
      ke = kernels::kernel_derivatives_at(m, d, t, tol.series);
    } catch (const PrecisionError&) {
      have = false;
    }
    for (double alpha : modes) {
      SweepRecord rec;
      rec.d = d;
      rec.t = t;
      rec.delta = alpha;
      if (!have) {
        rec.lower = rec.reference = rec.upper = nan_v;
        rec.margin_lower = rec.margin_upper = nan_v;
        rec.pass = true;
        rec.skipped = true;
        ++cell.skipped;
        cell.records.push_back(rec);
        continue;
      }
      auto grad = std::isnan(alpha) ? estimates::gradient_rhs(d, t, n)
                                    : estimates::gradient_rhs(d, t, n, alpha);
      auto lap = std::isnan(alpha) ? estimates::laplacian_rhs(d, t, n)
                                   : estimates::laplacian_rhs(d, t, n, alpha);
      double lhs_g = grad.lhs_coefficient * t * ke.grad_log_sq;
      double lhs_l = lap.lhs_coefficient * t * ke.laplacian_ratio;
      rec.lower = lhs_g;
      rec.reference = nan_v;
      rec.upper = grad.rhs;
      rec.margin_lower = safe_rel_margin(lhs_g, grad.rhs);
      rec.margin_upper = safe_rel_margin(lhs_l, lap.rhs);
      rec.pass = rec.margin_lower >= -tol.slack && rec.margin_upper >= -tol.slack;
      cell.records.push_back(rec);
    }
  });

  rep.worst_margin_lower = rep.worst_margin_upper = inf_v;
  rep.worst_chain_margin = inf_v;
  for (const CellResult& cell : cells) {
    rep.skipped += cell.skipped;
    for (const SweepRecord& rec : cell.records) {
      rep.records.push_back(rec);
      if (rec.skipped) continue;
      rep.worst_margin_lower = std::min(rep.worst_margin_lower, rec.margin_lower);
      rep.worst_margin_upper = std::min(rep.worst_margin_upper, rec.margin_upper);
      if (!rec.pass && !rep.informative) rep.pass = false;
    }
  }
  return rep;
}

AsymptoticsReport asymptotic_diagnostics(const ModelManifold& m,
                                         const PathSpec& path,
                                         std::span<const double> t_grid,
                                         const ToleranceConfig& tol,
                                         double quartile_threshold,
                                         double monotonicity_slack) {
  if (!std::isfinite(path.beta) || !std::isfinite(path.scale) || path.scale < 0)
    throw UsageError("asymptotics: path requires finite beta and scale >= 0");
  if (t_grid.empty()) throw UsageError("asymptotics: empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0)) throw UsageError("asymptotics: times must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw UsageError("asymptotics: times must be strictly increasing");
  }

  AsymptoticsReport rep;
  rep.manifold = m.tag();
  rep.n = m.dimension();
  rep.path = path;
  const int n = m.dimension();
  const double diam = m.diameter();

  std::vector<double> dists(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    dists[i] = path.scale * std::pow(t_grid[i], path.beta);
    if (dists[i] > diam)
      throw UsageError("asymptotics: path distance " + g17(dists[i]) +
                       " exceeds the diameter of " + m.tag());
  }

  rep.records.resize(t_grid.size());
  numerics::parallel_for(t_grid.size(), [&](std::size_t i) {
    AsymptoticsRecord& rec = rep.records[i];
    rec.t = t_grid[i];
    rec.d = dists[i];
    try {
      double log_h = kernels::log_heat_kernel_at(m, rec.d, rec.t, tol.series);
      double log_v = geometry::log_ball_volume(m, std::sqrt(rec.t), tol.tol_quad);
      rec.q = std::exp(log_v + rec.d * rec.d / (4.0 * rec.t) + log_h);
      double log_h0 = rec.d == 0 ? log_h
                                 : kernels::log_heat_kernel_at(m, 0.0, rec.t, tol.series);
      rec.tn2h = std::exp(0.5 * n * std::log(rec.t) + log_h0);
    } catch (const PrecisionError&) {
      rec.q = rec.tn2h = nan_v;
      rec.skipped = true;
    }
  });

  if (auto theta = geometry::mvg_theta(m)) {
    rep.limit = *theta / std::pow(4.0 * std::numbers::pi, 0.5 * n);
  }

  rep.last_quartile_dev = nan_v;
  if (rep.limit) {
    double dev = -1.0;
    std::size_t start = (3 * rep.records.size()) / 4;
    for (std::size_t i = start; i < rep.records.size(); ++i) {
      if (rep.records[i].skipped) continue;
      dev = std::max(dev, std::fabs(rep.records[i].q / *rep.limit - 1.0));
    }
    rep.last_quartile_dev = dev >= 0 ? dev : nan_v;
  }

  rep.worst_monotonicity_margin = inf_v;
  const AsymptoticsRecord* prev = nullptr;
  for (const AsymptoticsRecord& rec : rep.records) {
    if (rec.skipped) continue;
    if (prev) {
      rep.worst_monotonicity_margin = std::min(
          rep.worst_monotonicity_margin, (rec.tn2h - prev->tn2h) / prev->tn2h);
    }
    prev = &rec;
  }
  rep.monotonic = rep.worst_monotonicity_margin >= -monotonicity_slack;
  rep.pass = rep.monotonic &&
             (!rep.limit || rep.last_quartile_dev <= quartile_threshold);
  return rep;
}

SuiteResult run_suite(std::string_view suite,
                      std::span<const ModelManifold> manifolds,
                      const ToleranceConfig& tol) {
  bool all = suite == "all";
  bool known = all || suite == "sandwich" || suite == "gradient" ||
               suite == "classical" || suite == "asymptotics";
  if (!known) throw UsageError("unknown suite: " + std::string(suite));

  SuiteResult out;
  if (all || suite == "sandwich") {
    for (const ModelManifold& m : manifolds)
      out.sweeps.push_back(sandwich_sweep(m, default_sandwich_grid(m), tol));
  }
  if (all || suite == "gradient") {
    const double alphas[] = {0.1, 0.25, 0.5, 0.9};
    for (const ModelManifold& m : manifolds)
      out.sweeps.push_back(derivative_sweep(m, default_derivative_grid(m), alphas, tol));
  }
  if (all || suite == "classical") {
    using estimates::ClassicalCheck;
    const ClassicalCheck checks[] = {
        ClassicalCheck::li_yau_gradient,  ClassicalCheck::harnack,
        ClassicalCheck::mean_value,       ClassicalCheck::cheeger_yau,
        ClassicalCheck::davies_integral,  ClassicalCheck::hamilton_gradient,
        ClassicalCheck::hamilton_laplacian};
    for (const ModelManifold& m : manifolds)
      for (ClassicalCheck c : checks)
        if (estimates::check_applicable(c, m))
          out.checks.push_back(estimates::check_classical(c, m, tol));
  }
  if (all || suite == "asymptotics") {
    for (const ModelManifold& m : manifolds) {
      out.asymptotics.push_back(asymptotic_diagnostics(
          m, PathSpec{0.0, 0.0}, default_monotonicity_times(m), tol));
      if (geometry::mvg_theta(m)) {
        out.asymptotics.push_back(asymptotic_diagnostics(
            m, PathSpec{0.4, 1.0}, numerics::logspace(1.0, 1e6, 25), tol));
      }
    }
  }
  for (const auto& r : out.sweeps) out.pass = out.pass && r.pass;
  for (const auto& r : out.checks) out.pass = out.pass && r.pass;
  for (const auto& r : out.asymptotics) out.pass = out.pass && r.pass;
  return out;
}

std::string to_csv(const SweepReport& report) {
  std::string out =
      "manifold,n,d,t,delta,lower,reference,upper,margin_lower,margin_upper,pass\n";
  for (const SweepRecord& rec : report.records) {
    if (rec.skipped) continue;
    out += report.manifold;
    out += ',';
    out += std::to_string(report.n);
    for (double v : {rec.d, rec.t, rec.delta, rec.lower, rec.reference, rec.upper,
                     rec.margin_lower, rec.margin_upper}) {
      out += ',';
      out += g17(v);
    }
    out += rec.pass ? ",1\n" : ",0\n";
  }
  return out;
}

nlohmann::json to_json(const SweepReport& report) {
  nlohmann::json recs = nlohmann::json::array();
  for (const SweepRecord& rec : report.records) {
    recs.push_back({{"d", rec.d},
                    {"t", rec.t},
                    {"delta", rec.delta},
                    {"lower", rec.lower},
                    {"reference", rec.reference},
                    {"upper", rec.upper},
                    {"margin_lower", rec.margin_lower},
                    {"margin_upper", rec.margin_upper},
                    {"pass", rec.pass},
                    {"skipped", rec.skipped}});
  }
  return {{"suite", report.suite},
          {"manifold", report.manifold},
          {"n", report.n},
          {"grid",
           {{"d", report.grid.d}, {"t", report.grid.t}, {"delta", report.grid.delta}}},
          {"records", std::move(recs)},
          {"worst",
           {{"margin_lower", report.worst_margin_lower},
            {"margin_upper", report.worst_margin_upper},
            {"chain_margin", report.worst_chain_margin}}},
          {"skipped", report.skipped},
          {"informative", report.informative},
          {"verdict", report.pass ? "pass" : "fail"}};
}

nlohmann::json to_json(const AsymptoticsReport& report) {
  nlohmann::json recs = nlohmann::json::array();
  for (const AsymptoticsRecord& rec : report.records) {
    recs.push_back({{"t", rec.t},
                    {"d", rec.d},
                    {"q", rec.q},
                    {"tn2h", rec.tn2h},
                    {"skipped", rec.skipped}});
  }
  nlohmann::json out = {{"manifold", report.manifold},
                        {"n", report.n},
                        {"path", {{"beta", report.path.beta}, {"scale", report.path.scale}}},
                        {"records", std::move(recs)},
                        {"last_quartile_dev", report.last_quartile_dev},
                        {"worst_monotonicity_margin", report.worst_monotonicity_margin},
                        {"monotonic", report.monotonic},
                        {"verdict", report.pass ? "pass" : "fail"}};
  out["limit"] = report.limit ? nlohmann::json(*report.limit) : nlohmann::json();
  return out;
}

nlohmann::json to_json(const estimates::CheckReport& report) {
  return {{"check", estimates::check_name(report.id)},
          {"manifold", report.manifold},
          {"points", report.points},
          {"skipped", report.skipped},
          {"worst_margin", report.worst_margin},
          {"worst_at", report.worst_at},
          {"verdict", report.pass ? "pass" : "fail"}};
}

nlohmann::json to_json(const SuiteResult& result) {
  nlohmann::json sweeps = nlohmann::json::array();
  for (const auto& r : result.sweeps) sweeps.push_back(to_json(r));
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& r : result.checks) checks.push_back(to_json(r));
  nlohmann::json asym = nlohmann::json::array();
  for (const auto& r : result.asymptotics) asym.push_back(to_json(r));
  return {{"sweeps", std::move(sweeps)},
          {"checks", std::move(checks)},
          {"asymptotics", std::move(asym)},
          {"verdict", result.pass ? "pass" : "fail"}};
}

}  // namespace heatbound::verify
