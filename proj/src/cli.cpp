#include "heatbound/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatbound/bounds.hpp"
#include "heatbound/errors.hpp"
#include "heatbound/estimates.hpp"
#include "heatbound/geometry.hpp"
#include "heatbound/kernels.hpp"
#include "heatbound/numerics.hpp"
#include "heatbound/verify.hpp"

namespace heatbound::cli {
namespace {

using nlohmann::json;

double parse_double(const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("not a number: '" + text + "'");
}

int parse_int(const std::string& text) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("not an integer: '" + text + "'");
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string dumped(const json& j) { return j.dump(2) + "\n"; }

json bound_json(const bounds::BoundValue& b) {
  return {{"family", bounds::family_name(b.family)},
          {"value", b.value},
          {"log_value", b.log_value},
          {"radius", b.radius},
          {"t_shifted", b.t_shifted},
          {"f", b.f},
          {"vol_x", b.vol_x},
          {"vol_y", b.vol_y},
          {"vol_eucl", b.vol_eucl},
          {"degenerate", b.degenerate},
          {"at_boundary", b.at_boundary},
          {"illustrative", b.illustrative}};
}

struct CommonFlags {
  std::string manifold;
  std::string out;
  std::string format = "json";
  ToleranceConfig tol;
};

void add_common(CLI::App* sub, CommonFlags* c, const char* default_format) {
  c->format = default_format;
  sub->add_option("--manifold", c->manifold,
                  "manifold spec: rn:n=<int>, circle:L=<len>, s2, prod:a+b");
  sub->add_option("--out", c->out, "output file (atomic write); stdout when absent");
  sub->add_option("--format", c->format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--rel-tol", c->tol.tol_quad, "relative quadrature tolerance");
  sub->add_option("--series-tol", c->tol.series.tol_series,
                  "series truncation tolerance");
}

geometry::ModelManifold need_manifold(const CommonFlags& c) {
  if (c.manifold.empty()) throw UsageError("--manifold is required");
  return geometry::ModelManifold::from_spec(c.manifold);
}

int cmd_eval(const CommonFlags& c, double d, double t, double delta, double c1,
             double c2) {
  if (c.format != "json") throw UsageError("eval emits json only");
  auto m = need_manifold(c);
  validate(c.tol.series);
  auto [x, y] = geometry::points_at_distance(m, d);

  double log_h = kernels::log_heat_kernel(m, x, y, t, c.tol.series);
  auto lo = bounds::lower_bound(m, x, y, t, delta, false, c.tol);
  auto up = bounds::upper_bound(m, x, y, t, delta, false, c.tol);
  auto lo_sym = bounds::lower_bound(m, x, y, t, delta, true, c.tol);
  auto up_sym = bounds::upper_bound(m, x, y, t, delta, true, c.tol);
  auto [ly_lo, ly_up] =
      bounds::li_yau_bounds(m, x, y, t, bounds::LiYauConstants{c1, c2, 0.5}, c.tol);

  json derivs;
  try {
    auto ke = kernels::kernel_derivatives(m, x, y, t, c.tol.series);
    derivs = {{"grad_log_sq", ke.grad_log_sq},
              {"laplacian_ratio", ke.laplacian_ratio},
              {"dt_log", ke.dt_log}};
  } catch (const PrecisionError&) {
  } catch (const DomainError&) {
  }

  json out = {{"manifold", m.tag()},
              {"n", m.dimension()},
              {"d", d},
              {"t", t},
              {"delta", delta},
              {"reference", {{"value", std::exp(log_h)}, {"log_value", log_h}}},
              {"lower", bound_json(lo)},
              {"upper", bound_json(up)},
              {"lower_symmetric", bound_json(lo_sym)},
              {"upper_symmetric", bound_json(up_sym)},
              {"li_yau", {{"lower", bound_json(ly_lo)}, {"upper", bound_json(ly_up)}}},
              {"derivatives", derivs}};
  write_output(c.out, dumped(out));
  return 0;
}

int cmd_sweep(const CommonFlags& c, const std::string& d_text,
              const std::string& t_text, const std::string& delta_text) {
  auto m = need_manifold(c);
  validate(c.tol.series);
  verify::GridSpec grid = verify::default_sandwich_grid(m);
  if (!d_text.empty()) grid.d = parse_grid(d_text);
  if (!t_text.empty()) grid.t = parse_grid(t_text);
  if (!delta_text.empty()) grid.delta = parse_grid(delta_text);
  for (double d : grid.d)
    if (d < 0) throw UsageError("distances must be nonnegative");
  for (double t : grid.t)
    if (!(t > 0)) throw UsageError("times must be positive");
  for (double delta : grid.delta)
    if (!(delta > 0)) throw UsageError("delta must be positive");

  auto rep = verify::sandwich_sweep(m, grid, c.tol);
  write_output(c.out, c.format == "csv" ? verify::to_csv(rep) : dumped(to_json(rep)));
  return rep.pass ? 0 : 1;
}

int cmd_verify(const CommonFlags& c, const std::string& suite) {
  validate(c.tol.series);
  std::vector<geometry::ModelManifold> manifolds;
  if (c.manifold.empty() || c.manifold == "all") {
    manifolds = verify::default_catalog();
  } else {
    manifolds.push_back(geometry::ModelManifold::from_spec(c.manifold));
  }
  auto result = verify::run_suite(suite, manifolds, c.tol);

  std::string payload;
  if (c.format == "csv") {
    if (result.checks.empty() && result.asymptotics.empty() &&
        !result.sweeps.empty()) {
      payload = verify::to_csv(result.sweeps[0]);
      for (std::size_t i = 1; i < result.sweeps.size(); ++i) {
        std::string block = verify::to_csv(result.sweeps[i]);
        payload += block.substr(block.find('\n') + 1);
      }
    } else {
      throw UsageError("csv output covers sweep suites only; use --format json");
    }
  } else {
    payload = dumped(to_json(result));
  }
  if (!c.out.empty()) {
    for (const auto& r : result.sweeps) {
      std::printf("%-10s %-24s worst_lower=%.3e worst_upper=%.3e %s%s\n",
                  r.suite.c_str(), r.manifold.c_str(), r.worst_margin_lower,
                  r.worst_margin_upper, r.pass ? "pass" : "FAIL",
                  r.informative ? " (informative)" : "");
    }
    for (const auto& r : result.checks) {
      std::printf("%-10s %-24s worst=%.3e %s\n", estimates::check_name(r.id),
                  r.manifold.c_str(), r.worst_margin, r.pass ? "pass" : "FAIL");
    }
    for (const auto& r : result.asymptotics) {
      std::printf("asymptotics %-24s monotonic=%s %s\n", r.manifold.c_str(),
                  r.monotonic ? "yes" : "no", r.pass ? "pass" : "FAIL");
    }
  }
  write_output(c.out, payload);
  return result.pass ? 0 : 1;
}

int cmd_optimize(const CommonFlags& c, double d, double t,
                 const std::string& side_text) {
  if (c.format != "json") throw UsageError("optimize-delta emits json only");
  auto m = need_manifold(c);
  validate(c.tol.series);
  bounds::Side side;
  if (side_text == "lower") {
    side = bounds::Side::lower;
  } else if (side_text == "upper") {
    side = bounds::Side::upper;
  } else {
    throw UsageError("--side must be lower or upper");
  }
  auto opt = bounds::optimize_delta_at(m, d, t, side, c.tol);
  json out = {{"manifold", m.tag()}, {"n", m.dimension()},
              {"d", d},              {"t", t},
              {"side", side_text},   {"delta_star", opt.delta_star},
              {"value", opt.value},  {"log_value", opt.log_value},
              {"at_boundary", opt.at_boundary}};
  write_output(c.out, dumped(out));
  return 0;
}

int cmd_asymptotics(const CommonFlags& c, double beta, double scale,
                    const std::string& t_text) {
  if (c.format != "json") throw UsageError("asymptotics emits json only");
  auto m = need_manifold(c);
  validate(c.tol.series);
  std::vector<double> t_grid = parse_grid(t_text);
  auto rep = verify::asymptotic_diagnostics(m, verify::PathSpec{beta, scale}, t_grid,
                                            c.tol);
  write_output(c.out, dumped(to_json(rep)));
  return rep.pass ? 0 : 1;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw UsageError("empty grid");
  if (text.rfind("log:", 0) == 0) {
    std::string rest = text.substr(4);
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      std::size_t next = rest.find(':', pos);
      parts.push_back(rest.substr(pos, next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (parts.size() != 3) throw UsageError("log grid needs log:a:b:k");
    double a = parse_double(parts[0]);
    double b = parse_double(parts[1]);
    int k = parse_int(parts[2]);
    if (!(a > 0) || !(b > 0) || k < 1)
      throw UsageError("log grid needs a, b > 0 and k >= 1");
    return numerics::logspace(a, b, k);
  }
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = text.find(',', pos);
    out.push_back(parse_double(text.substr(pos, next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"heat kernel bounds on model manifolds"};
  app.require_subcommand(1);

  CommonFlags ce, cs, cv, co, ca;
  double d_eval = 1.0, t_eval = 1.0, delta_eval = 1.0, c1 = 1.0, c2 = 1.0;
  std::string d_text, t_text, delta_text;
  std::string suite = "all";
  double d_opt = 1.0, t_opt = 1.0;
  std::string side = "upper";
  double beta = 0.4, scale = 1.0;
  std::string t_asym = "log:1:1e6:25";

  CLI::App* eval = app.add_subcommand("eval", "evaluate kernel and bounds at a point");
  add_common(eval, &ce, "json");
  eval->add_option("--d", d_eval, "geodesic distance");
  eval->add_option("--t", t_eval, "time");
  eval->add_option("--delta", delta_eval, "bound parameter delta > 0");
  eval->add_option("--c1", c1, "baseline constant c1");
  eval->add_option("--c2", c2, "baseline constant c2");

  CLI::App* sweep = app.add_subcommand("sweep", "two-sided bound sweep over a grid");
  add_common(sweep, &cs, "csv");
  sweep->add_option("--d", d_text, "distance grid (list or log:a:b:k)");
  sweep->add_option("--t", t_text, "time grid (list or log:a:b:k)");
  sweep->add_option("--delta", delta_text, "delta grid (list or log:a:b:k)");

  CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
  add_common(ver, &cv, "json");
  ver->add_option("--suite", suite, "sandwich|gradient|classical|asymptotics|all");

  CLI::App* opt = app.add_subcommand("optimize-delta", "optimize delta for one bound");
  add_common(opt, &co, "json");
  opt->add_option("--d", d_opt, "geodesic distance");
  opt->add_option("--t", t_opt, "time");
  opt->add_option("--side", side, "lower|upper");

  CLI::App* asym = app.add_subcommand("asymptotics", "normalized long-time diagnostics");
  add_common(asym, &ca, "json");
  asym->add_option("--beta", beta, "path exponent in d(t) = scale * t^beta");
  asym->add_option("--scale", scale, "path scale");
  asym->add_option("--t", t_asym, "time grid (list or log:a:b:k)");

  try {
    app.parse(argc, argv);
    if (eval->parsed()) return cmd_eval(ce, d_eval, t_eval, delta_eval, c1, c2);
    if (sweep->parsed()) return cmd_sweep(cs, d_text, t_text, delta_text);
    if (ver->parsed()) return cmd_verify(cv, suite);
    if (opt->parsed()) return cmd_optimize(co, d_opt, t_opt, side);
    if (asym->parsed()) return cmd_asymptotics(ca, beta, scale, t_asym);
    throw UsageError("no subcommand given");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const PrecisionError& e) {
    std::cerr << "precision error: " << e.what() << "\n";
    return 3;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("heatbound");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace heatbound::cli
