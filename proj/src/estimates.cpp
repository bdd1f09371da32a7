#include "heatbound/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "heatbound/errors.hpp"
#include "heatbound/kernels.hpp"
#include "heatbound/numerics.hpp"

namespace heatbound::estimates {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_dt(double d, double t) {
  if (!(d >= 0) || !std::isfinite(d)) throw DomainError("distance must be nonnegative");
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("time must be positive and finite");
}

double rho_of(double d, double t) { return d * d / (4.0 * t); }

// ln(sqrt(1+rho) + sqrt(rho))
double log_J(double rho) {
  return std::log(std::sqrt(1.0 + rho) + std::sqrt(rho));
}

std::string format_point(double d, double t, double extra = kNaN,
                         const char* extra_name = nullptr) {
  char buf[128];
  if (extra_name)
    std::snprintf(buf, sizeof buf, "d=%.6g t=%.6g %s=%.6g", d, t, extra_name, extra);
  else
    std::snprintf(buf, sizeof buf, "d=%.6g t=%.6g", d, t);
  return buf;
}

}  // namespace

double c_n(int n) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  const double s = std::sqrt(n * static_cast<double>(n) + 1.0);
  return 0.5 * n * std::log(8.0 * (n + s)) + std::lgamma(0.5 * n + 1.0) +
         0.5 * (5.0 - s);
}

GMax g_max(int n) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  const double s = std::sqrt(n * static_cast<double>(n) + 1.0);
  GMax g;
  g.maximizer_sq = 0.5 * (s - 1.0);
  g.value = std::exp(0.5 * n * std::log(s + n) - g.maximizer_sq);
  return g;
}

double alpha_star(double d, double t) {
  check_dt(d, t);
  if (d == 0) return 0.5;
  const double rho = rho_of(d, t);
  const double J = std::sqrt(1.0 + rho) + std::sqrt(rho);
  return std::min(0.5, 1.0 / (J * J));
}

double one_minus_alpha_star(double d, double t) {
  check_dt(d, t);
  if (d == 0) return 0.5;
  return std::max(0.5, 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * t / (d * d))));
}

namespace {

EstimateRHS base_rhs(double d, double t, int n) {
  check_dt(d, t);
  if (n < 1) throw DomainError("dimension must be at least 1");
  EstimateRHS e;
  e.d = d;
  e.t = t;
  e.n = n;
  e.alpha = kNaN;
  return e;
}

void check_alpha(double alpha) {
  if (!(alpha > 0) || !(alpha < 1))
    throw DomainError("alpha must lie in (0, 1)");
}

}  // namespace

EstimateRHS gradient_rhs(double d, double t, int n) {
  EstimateRHS e = base_rhs(d, t, n);
  const double rho = rho_of(d, t);
  e.sharp = true;
  e.lhs_coefficient = one_minus_alpha_star(d, t);
  e.rhs = c_n(n) + 0.5 * n * std::log(2.0) + 2.0 * n * log_J(rho) + rho;
  return e;
}

EstimateRHS gradient_rhs(double d, double t, int n, double alpha) {
  check_alpha(alpha);
  EstimateRHS e = base_rhs(d, t, n);
  const double rho = rho_of(d, t);
  e.sharp = false;
  e.alpha = alpha;
  e.lhs_coefficient = 1.0 - alpha;
  e.rhs = c_n(n) - 0.5 * n * std::log(alpha) + n * log_J(rho) + rho;
  return e;
}

EstimateRHS laplacian_rhs(double d, double t, int n) {
  EstimateRHS e = base_rhs(d, t, n);
  const double rho = rho_of(d, t);
  e.sharp = true;
  e.lhs_coefficient = one_minus_alpha_star(d, t);
  e.rhs = n + 4.0 * c_n(n) + 2.0 * n * std::log(2.0) + 8.0 * n * log_J(rho) +
          4.0 * rho;
  return e;
}

EstimateRHS laplacian_rhs(double d, double t, int n, double alpha) {
  check_alpha(alpha);
  EstimateRHS e = base_rhs(d, t, n);
  const double rho = rho_of(d, t);
  e.sharp = false;
  e.alpha = alpha;
  e.lhs_coefficient = 1.0 - alpha;
  e.rhs = n + 4.0 * c_n(n) - 2.0 * n * std::log(alpha) + 4.0 * n * log_J(rho) +
          4.0 * rho;
  return e;
}

ClassicalCheck parse_check(std::string_view name) {
  if (name == "li_yau_gradient") return ClassicalCheck::li_yau_gradient;
  if (name == "harnack") return ClassicalCheck::harnack;
  if (name == "mean_value") return ClassicalCheck::mean_value;
  if (name == "cheeger_yau") return ClassicalCheck::cheeger_yau;
  if (name == "davies_integral") return ClassicalCheck::davies_integral;
  if (name == "hamilton_gradient") return ClassicalCheck::hamilton_gradient;
  if (name == "hamilton_laplacian") return ClassicalCheck::hamilton_laplacian;
  throw UsageError("unknown classical check: " + std::string(name));
}

const char* check_name(ClassicalCheck c) {
  switch (c) {
    case ClassicalCheck::li_yau_gradient: return "li_yau_gradient";
    case ClassicalCheck::harnack: return "harnack";
    case ClassicalCheck::mean_value: return "mean_value";
    case ClassicalCheck::cheeger_yau: return "cheeger_yau";
    case ClassicalCheck::davies_integral: return "davies_integral";
    case ClassicalCheck::hamilton_gradient: return "hamilton_gradient";
    case ClassicalCheck::hamilton_laplacian: return "hamilton_laplacian";
  }
  return "unknown";
}

bool check_applicable(ClassicalCheck c, const ModelManifold& m) {
  switch (c) {
    case ClassicalCheck::mean_value:
      // Radial averaging needs the kernel to depend on distance alone, which
      // fails on products.
      return !m.is_product();
    case ClassicalCheck::davies_integral:
      return m.dimension() == 1 && !m.is_product();
    default:
      return true;
  }
}

namespace {

bool has_sphere_factor(const ModelManifold& m) {
  for (const auto& f : m.factors())
    if (std::holds_alternative<geometry::Sphere2>(f)) return true;
  return false;
}

std::vector<double> clip_distances(const ModelManifold& m,
                                   std::vector<double> ds, bool derivatives) {
  double cap = m.diameter();
  if (derivatives && !m.is_product() && has_sphere_factor(m))
    cap = std::min(cap, kPi - 2e-3);
  std::erase_if(ds, [&](double d) { return d > cap; });
  return ds;
}

}  // namespace

CheckParams default_check_params(ClassicalCheck c, const ModelManifold& m) {
  CheckParams p;
  const bool derivs = c == ClassicalCheck::li_yau_gradient ||
                      c == ClassicalCheck::hamilton_gradient ||
                      c == ClassicalCheck::hamilton_laplacian;
  p.d_grid = clip_distances(m, {0.0, 0.5, 1.0, 2.0}, derivs);
  p.t_grid = numerics::logspace(0.01, 10.0, 12);
  p.time_pairs = {{0.1, 0.2}, {0.5, 1.0}, {1.0, 5.0}, {2.0, 2.5}};
  p.radii = {0.5, 1.0};
  if (c == ClassicalCheck::cheeger_yau) {
    p.d_grid = clip_distances(m, {0.0, 0.5, 1.0, 2.0, 3.0}, false);
    p.t_grid = numerics::logspace(0.01, 100.0, 15);
  }
  if (c == ClassicalCheck::davies_integral) {
    if (const auto* circ = std::get_if<geometry::Circle>(&m.factors()[0])) {
      const double L = circ->length;
      p.set1 = {0.0, L / 12.0};
      p.set2 = {0.5 * L, L / 12.0};
    } else {
      p.set1 = {0.0, 1.0};
      p.set2 = {2.0, 1.0};
    }
    p.set_times = {0.25, 0.5, 1.0, 2.0};
  }
  if (c == ClassicalCheck::hamilton_gradient ||
      c == ClassicalCheck::hamilton_laplacian) {
    p.sup_shift = 0.1;
    p.elapsed = {0.05, 0.2, 1.0, 5.0};
    p.d_grid = clip_distances(m, {0.0, 0.5, 1.0}, true);
  }
  return p;
}

namespace {

struct Margin {
  double value = std::numeric_limits<double>::infinity();
  std::string at;
  int points = 0;
  int skipped = 0;

  void record(double m, std::string where) {
    ++points;
    if (m < value) {
      value = m;
      at = std::move(where);
    }
  }
};

using kernels::KernelEval;

Margin run_li_yau_gradient(const ModelManifold& m, const CheckParams& p,
                           const ToleranceConfig& tol) {
  Margin worst;
  const int n = m.dimension();
  for (double d : p.d_grid)
    for (double t : p.t_grid) {
      try {
        const KernelEval k = kernels::kernel_derivatives_at(m, d, t, tol.series);
        const double lhs = k.grad_log_sq - k.dt_log;
        worst.record(0.5 * n / t - lhs, format_point(d, t));
      } catch (const PrecisionError&) {
        ++worst.skipped;
      }
    }
  return worst;
}

Margin run_harnack(const ModelManifold& m, const CheckParams& p,
                   const ToleranceConfig& tol) {
  Margin worst;
  const int n = m.dimension();
  std::vector<double> positions = p.d_grid;
  for (double a : positions)
    for (double b : positions)
      for (auto [t1, t2] : p.time_pairs) {
        const geometry::Point xa = geometry::point_at(m, a);
        const geometry::Point xb = geometry::point_at(m, b);
        const geometry::Point o = geometry::origin(m);
        try {
          const double log_lhs = kernels::log_heat_kernel(m, o, xa, t1, tol.series);
          const double dab = geometry::distance(m, xa, xb);
          const double log_rhs =
              kernels::log_heat_kernel(m, o, xb, t2, tol.series) +
              0.5 * n * std::log(t2 / t1) + dab * dab / (4.0 * (t2 - t1));
          worst.record(-std::expm1(log_lhs - log_rhs),
                       format_point(a, t1, b, "b"));
        } catch (const PrecisionError&) {
          ++worst.skipped;
        }
      }
  return worst;
}

Margin run_mean_value(const ModelManifold& m, const CheckParams& p,
                      const ToleranceConfig& tol) {
  Margin worst;
  const int n = m.dimension();
  const double diam = m.diameter();
  for (double R : p.radii)
    for (auto [t1, t2] : p.time_pairs) {
      try {
        const double lhs = kernels::heat_kernel_at(m, 0.0, t1, tol.series);
        const double upper = std::min(R, diam);
        auto integrand = [&](double s) {
          if (s <= 0)
            return n == 1 ? 2.0 * kernels::heat_kernel_at(m, 0.0, t2, tol.series)
                          : 0.0;
          return geometry::sphere_area(m, s, tol.tol_quad) *
                 kernels::heat_kernel_at(m, s, t2, tol.series);
        };
        const double integral =
            numerics::adaptive_simpson(integrand, 0.0, upper, 1e-10);
        const double avg = integral / geometry::ball_volume(m, R, tol.tol_quad);
        const double rhs = avg * std::pow(t2 / t1, 0.5 * n) *
                           std::exp(R * R / (4.0 * (t2 - t1)));
        worst.record((rhs - lhs) / rhs, format_point(R, t1, t2, "t2"));
      } catch (const PrecisionError&) {
        ++worst.skipped;
      }
    }
  return worst;
}

Margin run_cheeger_yau(const ModelManifold& m, const CheckParams& p,
                       const ToleranceConfig& tol) {
  Margin worst;
  const int n = m.dimension();
  for (double d : p.d_grid)
    for (double t : p.t_grid) {
      try {
        const double log_h = kernels::log_heat_kernel_at(m, d, t, tol.series);
        const double log_g = kernels::log_gaussian_kernel(n, d, t);
        worst.record(-std::expm1(log_g - log_h), format_point(d, t));
      } catch (const PrecisionError&) {
        ++worst.skipped;
      }
    }
  return worst;
}

Margin run_davies(const ModelManifold& m, const CheckParams& p,
                  const ToleranceConfig& tol) {
  Margin worst;
  const auto& f = m.factors()[0];
  const bool circle = std::holds_alternative<geometry::Circle>(f);
  const double L = circle ? std::get<geometry::Circle>(f).length : 0.0;
  auto dist1d = [&](double u, double v) {
    if (!circle) return std::abs(u - v);
    double delta = std::fmod(std::abs(u - v), L);
    return std::min(delta, L - delta);
  };
  const auto [a1, len1] = p.set1;
  const auto [a2, len2] = p.set2;
  // Minimal distance between the two coordinate intervals.
  double dsets = dist1d(a1 + len1, a2);
  dsets = std::min(dsets, dist1d(a2 + len2, a1));
  dsets = std::min(dsets, dist1d(a1, a2));
  dsets = std::min(dsets, dist1d(a1 + len1, a2 + len2));
  if ((a2 > a1 && a2 < a1 + len1) || (a1 > a2 && a1 < a2 + len2)) dsets = 0.0;

  const auto q1 = numerics::gauss_legendre(48, a1, a1 + len1);
  const auto q2 = numerics::gauss_legendre(48, a2, a2 + len2);
  for (double t : p.set_times) {
    try {
      double lhs = 0.0;
      for (std::size_t i = 0; i < q1.nodes.size(); ++i)
        for (std::size_t j = 0; j < q2.nodes.size(); ++j)
          lhs += q1.weights[i] * q2.weights[j] *
                 kernels::heat_kernel_at(m, dist1d(q1.nodes[i], q2.nodes[j]), t,
                                         tol.series);
      const double rhs =
          std::sqrt(len1 * len2) * std::exp(-dsets * dsets / (4.0 * t));
      worst.record(1.0 - lhs / rhs, format_point(dsets, t));
    } catch (const PrecisionError&) {
      ++worst.skipped;
    }
  }
  return worst;
}

Margin run_hamilton(const ModelManifold& m, const CheckParams& p,
                    const ToleranceConfig& tol, bool laplacian) {
  Margin worst;
  const int n = m.dimension();
  const double shift = p.sup_shift;
  // Grid supremum of the kernel at the shifted initial time, inflated.
  double dmax = std::min(m.diameter(), 8.0);
  double sup = 0.0;
  int skipped_sup = 0;
  for (int i = 0; i < p.sup_grid; ++i) {
    const double d = dmax * i / (p.sup_grid - 1);
    try {
      sup = std::max(sup, kernels::heat_kernel_at(m, d, shift, tol.series));
    } catch (const PrecisionError&) {
      ++skipped_sup;
    }
  }
  const double log_A = std::log(sup * (1.0 + p.sup_inflation));
  for (double d : p.d_grid)
    for (double s : p.elapsed) {
      try {
        const KernelEval k =
            kernels::kernel_derivatives_at(m, d, shift + s, tol.series);
        const double log_ratio = log_A - k.log_value;
        const double margin =
            laplacian ? n + 4.0 * log_ratio - s * k.laplacian_ratio
                      : log_ratio - s * k.grad_log_sq;
        worst.record(margin, format_point(d, s, shift, "shift"));
      } catch (const PrecisionError&) {
        ++worst.skipped;
      }
    }
  worst.skipped += skipped_sup;
  return worst;
}

}  // namespace

CheckReport check_classical(ClassicalCheck c, const ModelManifold& m,
                            const CheckParams& params,
                            const ToleranceConfig& tol) {
  if (!check_applicable(c, m))
    throw UsageError(std::string("check ") + check_name(c) +
                     " does not apply to " + m.tag());
  Margin worst;
  switch (c) {
    case ClassicalCheck::li_yau_gradient:
      worst = run_li_yau_gradient(m, params, tol);
      break;
    case ClassicalCheck::harnack:
      worst = run_harnack(m, params, tol);
      break;
    case ClassicalCheck::mean_value:
      worst = run_mean_value(m, params, tol);
      break;
    case ClassicalCheck::cheeger_yau:
      worst = run_cheeger_yau(m, params, tol);
      break;
    case ClassicalCheck::davies_integral:
      worst = run_davies(m, params, tol);
      break;
    case ClassicalCheck::hamilton_gradient:
      worst = run_hamilton(m, params, tol, false);
      break;
    case ClassicalCheck::hamilton_laplacian:
      worst = run_hamilton(m, params, tol, true);
      break;
  }
  CheckReport r;
  r.id = c;
  r.manifold = m.tag();
  r.points = worst.points;
  r.skipped = worst.skipped;
  r.worst_margin = worst.value;
  r.worst_at = worst.at;
  r.pass = worst.points > 0 && worst.value >= -tol.slack;
  return r;
}

CheckReport check_classical(ClassicalCheck c, const ModelManifold& m,
                            const ToleranceConfig& tol) {
  return check_classical(c, m, default_check_params(c, m), tol);
}

}  // namespace heatbound::estimates
