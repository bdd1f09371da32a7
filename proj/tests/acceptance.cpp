// Acceptance gate: ten end-to-end criteria, one line each, exit code is the
// number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "heatbound/bounds.hpp"
#include "heatbound/errors.hpp"
#include "heatbound/estimates.hpp"
#include "heatbound/geometry.hpp"
#include "heatbound/kernels.hpp"
#include "heatbound/numerics.hpp"
#include "heatbound/verify.hpp"

using namespace heatbound;
using geometry::ModelManifold;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string metric;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// ---- 1: the lower bound on flat space is exactly e^{-delta} H ------------

Outcome flat_exactness() {
  double worst = 0;
  for (int n : {1, 2, 3}) {
    auto m = ModelManifold::euclidean(n);
    for (double d : numerics::logspace(0.01, 10.0, 10))
      for (double t : numerics::logspace(0.01, 10.0, 10))
        for (double delta : {0.1, 1.0, 10.0}) {
          auto lo = bounds::lower_bound_at(m, d, t, delta);
          double h = kernels::heat_kernel_at(m, d, t);
          worst = std::max(worst, std::fabs(lo.value * std::exp(delta) / h - 1.0));
        }
  }
  return {worst <= 1e-12, fmt("worst rel dev=%.3e (tol 1e-12)", worst)};
}

// ---- 2: two-sided bounds sandwich every catalog kernel -------------------

Outcome sandwich_everywhere() {
  double worst = 1e300;
  int skipped = 0;
  bool pass = true;
  for (const auto& m : verify::default_catalog()) {
    auto rep = verify::sandwich_sweep(m, verify::default_sandwich_grid(m));
    pass = pass && rep.pass;
    worst = std::min({worst, rep.worst_margin_lower, rep.worst_margin_upper,
                      rep.worst_chain_margin});
    skipped += rep.skipped;
  }
  return {pass, fmt("worst margin=%.3e (>= -1e-9), skipped=%.0f", worst,
                    double(skipped))};
}

// ---- 3: kernels dominate the flat Gaussian; tight on the sphere ----------

Outcome gaussian_comparison() {
  bool pass = true;
  double worst = 1e300;
  for (const auto& m : verify::default_catalog()) {
    auto r = estimates::check_classical(estimates::ClassicalCheck::cheeger_yau, m);
    pass = pass && r.pass && r.worst_margin >= -1e-9;
    worst = std::min(worst, r.worst_margin);
  }
  // Shrinking delta pushes the lower bound onto the Gaussian itself.
  auto s2 = ModelManifold::sphere2();
  double dev = 0;
  for (double t : numerics::logspace(1e-3, 1.0, 10))
    for (double d : {0.0, 0.5, 1.0, 2.0, 3.0}) {
      auto lo = bounds::lower_bound_at(s2, d, t, 1e-6);
      dev = std::max(dev, std::fabs(std::expm1(
                              lo.log_value - kernels::log_gaussian_kernel(2, d, t))));
    }
  pass = pass && dev <= 1e-3;
  return {pass, fmt("worst margin=%.3e, sphere gaussian dev=%.3e (<= 1e-3)",
                    worst, dev)};
}

// ---- 4: unit-delta chains stay ordered against each kernel ---------------

Outcome unit_delta_chains() {
  double worst = 1e300;
  int cells = 0, skipped = 0;
  auto gap = [](double small, double big) { return -std::expm1(small - big); };
  for (const auto& m : verify::default_catalog()) {
    double dmax = std::min(m.diameter(), 6.0);
    for (int i = 0; i < 10; ++i) {
      double d = dmax * i / 9.0;
      for (double t : numerics::logspace(0.05, 20.0, 10)) {
        double log_h;
        bounds::Delta1Chains c;
        try {
          log_h = kernels::log_heat_kernel_at(m, d, t);
          c = bounds::bounds_delta1_at(m, d, t);
        } catch (const PrecisionError&) {
          ++skipped;
          continue;
        }
        ++cells;
        for (std::size_t k = 0; k < c.lower.size(); ++k) {
          worst = std::min(worst, gap(c.lower[k].log_value, log_h));
          if (k) worst = std::min(worst, gap(c.lower[k].log_value,
                                             c.lower[k - 1].log_value));
        }
        for (std::size_t k = 0; k < c.lower_symmetric.size(); ++k) {
          worst = std::min(worst, gap(c.lower_symmetric[k].log_value, log_h));
          if (k)
            worst = std::min(worst, gap(c.lower_symmetric[k].log_value,
                                        c.lower_symmetric[k - 1].log_value));
        }
        for (std::size_t k = 0; k < c.upper.size(); ++k) {
          worst = std::min(worst, gap(log_h, c.upper[k].log_value));
          if (k) worst = std::min(worst, gap(c.upper[k - 1].log_value,
                                             c.upper[k].log_value));
        }
        for (std::size_t k = 0; k < c.upper_symmetric.size(); ++k) {
          worst = std::min(worst, gap(log_h, c.upper_symmetric[k].log_value));
          if (k)
            worst = std::min(worst, gap(c.upper_symmetric[k - 1].log_value,
                                        c.upper_symmetric[k].log_value));
        }
      }
    }
  }
  bool pass = worst >= -1e-9 && cells >= 700;
  return {pass, fmt("worst link margin=%.3e over %.0f cells (skipped %.0f)",
                    worst, double(cells), double(skipped))};
}

// ---- 5: closed-form constants match independent evaluations --------------

Outcome dimensional_constants() {
  double worst_c = 0, worst_g = 0;
  for (int n = 1; n <= 10; ++n) {
    double lg = (n % 2) ? 0.5 * std::log(pi) : 0.0;  // ln Gamma(n/2 + 1)
    for (double z = 0.5 * n; z > 0.4; z -= 1.0) lg += std::log(z);
    double s = std::sqrt(n * double(n) + 1.0);
    double want = 0.5 * n * std::log(8.0 * (n + s)) + lg + 0.5 * (5.0 - s);
    worst_c = std::max(worst_c, std::fabs(estimates::c_n(n) / want - 1.0));

    auto log_phi = [n](double x) {
      return n * std::log(std::sqrt(1.0 + x * x) + x) - x * x;
    };
    double best_x = 0, best = log_phi(0.0);
    for (int i = 1; i <= 200000; ++i) {
      double x = 4.0 * i / 200000.0;
      if (double v = log_phi(x); v > best) best = v, best_x = x;
    }
    auto g = numerics::golden_min([&](double x) { return -log_phi(x); },
                                  std::max(0.0, best_x - 1e-3), best_x + 1e-3,
                                  1e-10);
    worst_g = std::max(worst_g,
                       std::fabs(estimates::g_max(n).value / std::exp(-g.fx) - 1.0));
  }
  bool pass = worst_c <= 1e-12 && worst_g <= 1e-10;
  return {pass, fmt("constant dev=%.3e (<= 1e-12), profile max dev=%.3e (<= 1e-10)",
                    worst_c, worst_g)};
}

// ---- 6: derivative estimates hold, and are tight at large rho ------------

Outcome derivative_estimates() {
  double worst = 1e300;
  for (int n : {1, 2, 3}) {
    auto m = ModelManifold::euclidean(n);
    std::vector<double> ds = numerics::logspace(0.01, 50.0, 10);
    ds.push_back(0.0);
    for (double d : ds)
      for (double t : numerics::logspace(0.01, 10.0, 10)) {
        auto k = kernels::kernel_derivatives_at(m, d, t);
        auto rel = [](double lhs, double rhs) {
          return (rhs - lhs) / std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
        };
        auto gs = estimates::gradient_rhs(d, t, n);
        worst = std::min(worst, rel(gs.lhs_coefficient * t * k.grad_log_sq, gs.rhs));
        auto ls = estimates::laplacian_rhs(d, t, n);
        worst = std::min(worst,
                         rel(ls.lhs_coefficient * t * k.laplacian_ratio, ls.rhs));
        for (double a : {0.1, 0.25, 0.5, 0.9}) {
          auto ga = estimates::gradient_rhs(d, t, n, a);
          worst = std::min(worst, rel((1.0 - a) * t * k.grad_log_sq, ga.rhs));
          auto la = estimates::laplacian_rhs(d, t, n, a);
          worst = std::min(worst, rel((1.0 - a) * t * k.laplacian_ratio, la.rhs));
        }
      }
  }
  auto m2 = ModelManifold::euclidean(2);
  const double dr = 2000.0, tr = 1.0;  // rho = 1e6
  auto k = kernels::kernel_derivatives_at(m2, dr, tr);
  auto g = estimates::gradient_rhs(dr, tr, 2);
  double grad_ratio = g.lhs_coefficient * tr * k.grad_log_sq / g.rhs;
  auto l = estimates::laplacian_rhs(dr, tr, 2);
  double lap_ratio = l.rhs / (l.lhs_coefficient * tr * k.laplacian_ratio);
  bool pass = worst >= -1e-12 && grad_ratio >= 0.99 && grad_ratio <= 1.0 &&
              lap_ratio >= 3.9 && lap_ratio <= 4.1;
  return {pass, fmt("worst margin=%.3e, tightness ratios %.4f and %.3f", worst,
                    grad_ratio, lap_ratio)};
}

// ---- 7: the classical estimate suite passes across the catalog -----------

Outcome classical_suite() {
  auto catalog = verify::default_catalog();
  auto res = verify::run_suite("classical", catalog);
  double worst = 1e300;
  for (const auto& r : res.checks) worst = std::min(worst, r.worst_margin);
  // Flat space attains the parabolic gradient identity exactly.
  double eq = 0;
  for (int n : {1, 2, 3}) {
    auto r = estimates::check_classical(estimates::ClassicalCheck::li_yau_gradient,
                                        ModelManifold::euclidean(n));
    eq = std::max(eq, std::fabs(r.worst_margin));
  }
  bool pass = res.pass && eq <= 1e-12;
  return {pass, fmt("%.0f checks, worst margin=%.3e, flat equality dev=%.3e",
                    double(res.checks.size()), worst, eq)};
}

// ---- 8: independent kernel representations agree --------------------------

Outcome kernel_cross_validation() {
  const double L = 2.0 * pi;
  double worst_rep = 0;
  int compared = 0;
  for (double t : numerics::logspace(0.05, 50.0, 12))
    for (int i = 0; i < 10; ++i) {
      double d = (L / 2.0) * i / 9.0;
      try {
        double a = kernels::circle_kernel_images(L, d, t);
        double b = kernels::circle_kernel_spectral(L, d, t);
        worst_rep = std::max(worst_rep, std::fabs(a / b - 1.0));
        ++compared;
      } catch (const PrecisionError&) {
      }
    }

  double worst_pde = 0;
  for (double t : {0.5, 2.0}) {
    auto sol = kernels::pde_oracle_circle_run(L, t);
    for (int i = 0; i < 10; ++i) {
      double d = (L / 2.0) * i / 9.0;
      worst_pde = std::max(worst_pde, std::fabs(sol.value_at(d) /
                                                    kernels::circle_kernel(L, d, t) -
                                                1.0));
    }
  }

  double worst_mass = 0;
  auto quad = numerics::gauss_legendre(16);
  for (double t : {1e-3, 1e-2, 0.1, 1.0}) {
    double mass = 0;
    const int panels = 64;
    for (int p = 0; p < panels; ++p) {
      double a = pi * p / panels, b = pi * (p + 1) / panels;
      for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
        double theta = 0.5 * (a + b) + 0.5 * (b - a) * quad.nodes[q];
        mass += 0.5 * (b - a) * quad.weights[q] *
                kernels::sphere2_kernel_ungated(theta, t) * 2.0 * pi *
                std::sin(theta);
      }
    }
    worst_mass = std::max(worst_mass, std::fabs(mass - 1.0));
  }

  bool pass = worst_rep <= 1e-10 && compared >= 100 && worst_pde <= 1e-5 &&
              worst_mass <= 1e-9;
  return {pass, fmt("reps dev=%.3e, pde dev=%.3e, sphere mass dev=%.3e",
                    worst_rep, worst_pde, worst_mass)};
}

// ---- 9: the diagonal quantity t^{n/2} H(p,p,t) never decreases ------------

Outcome diagonal_monotonicity() {
  double worst = 1e300, flat_dev = 0;
  bool pass = true;
  for (const auto& m : verify::default_catalog()) {
    auto rep = verify::asymptotic_diagnostics(
        m, verify::PathSpec{0.0, 0.0}, verify::default_monotonicity_times(m));
    pass = pass && rep.monotonic;
    worst = std::min(worst, rep.worst_monotonicity_margin);
    if (!m.is_product() && m.tag().rfind("rn:", 0) == 0)
      flat_dev = std::max(flat_dev, std::fabs(rep.worst_monotonicity_margin));
  }
  pass = pass && worst >= -1e-10 && flat_dev <= 1e-12;
  return {pass, fmt("worst step margin=%.3e, flat constancy dev=%.3e", worst,
                    flat_dev)};
}

// ---- 10: the normalized kernel attains the volume-growth limit -----------

Outcome volume_growth_limit() {
  auto m = ModelManifold::euclidean(2);
  auto rep = verify::asymptotic_diagnostics(m, verify::PathSpec{0.4, 1.0},
                                            numerics::logspace(1.0, 1e6, 25));
  bool pass = rep.limit.has_value() && std::fabs(*rep.limit - 0.25) <= 1e-15 &&
              rep.last_quartile_dev <= 1e-12 && rep.pass;
  return {pass, fmt("limit=%.17g, last-quartile dev=%.3e (<= 1e-12)",
                    rep.limit.value_or(0.0), rep.last_quartile_dev)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"flat lower-bound exactness", flat_exactness},
      {"catalog sandwich", sandwich_everywhere},
      {"gaussian comparison", gaussian_comparison},
      {"unit-delta chains", unit_delta_chains},
      {"dimensional constants", dimensional_constants},
      {"derivative estimates", derivative_estimates},
      {"classical suite", classical_suite},
      {"kernel cross-validation", kernel_cross_validation},
      {"diagonal monotonicity", diagonal_monotonicity},
      {"volume-growth limit", volume_growth_limit},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start)
                      .count();
    std::printf("%s %2zu/%zu %-28s %s [%.2fs]\n", out.pass ? "PASS" : "FAIL",
                i + 1, criteria.size(), criteria[i].name, out.metric.c_str(),
                secs);
    if (!out.pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
