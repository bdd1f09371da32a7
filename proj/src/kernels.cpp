#include "heatbound/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "heatbound/errors.hpp"

namespace heatbound {

void validate(const SeriesConfig& cfg) {
  if (!(cfg.tol_series > 0)) throw DomainError("tol_series must be positive");
  if (cfg.max_terms < 8) throw DomainError("max_terms must be at least 8");
  if (!(cfg.switch_ratio > 0)) throw DomainError("switch_ratio must be positive");
  if (!(cfg.sphere_t_min > 0)) throw DomainError("sphere_t_min must be positive");
  if (!(cfg.precision_cap > 0)) throw DomainError("precision_cap must be positive");
}

}  // namespace heatbound

namespace heatbound::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_time(double t) {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("time must be positive and finite");
}

void check_circle_distance(double L, double d) {
  if (!(d >= 0) || d > 0.5 * L * (1 + 1e-12))
    throw DomainError("circle distance must lie in [0, L/2]");
}

// Per-factor kernel data; derivative fields only filled on request.
struct FactorEval {
  double log_value = 0;
  double grad_log_sq = 0;
  double laplacian_ratio = 0;
  double dt_log = 0;
};

// Wrapped Gaussian image sums, factored against the k = 0 term so every
// summand is exp of a nonpositive exponent. S0 tracks H relative to the
// k = 0 Gaussian, S1 and S2 the first and second distance derivatives.
struct ImageSums {
  double s0 = 0, s1 = 0, s2 = 0;
};

ImageSums circle_image_sums(double L, double d, double t, const SeriesConfig& cfg,
                            bool need_derivs) {
  ImageSums s;
  const double inv2t = 1.0 / (2.0 * t);
  auto add = [&](double xi, double w) {
    s.s0 += w;
    if (need_derivs) {
      s.s1 += w * (-xi * inv2t);
      s.s2 += w * (xi * xi * inv2t * inv2t - inv2t);
    }
  };
  add(d, 1.0);
  bool converged = false;
  for (int k = 1; k <= cfg.max_terms; ++k) {
    const double kL = k * L;
    // (d + kL)^2 - d^2 and (d - kL)^2 - d^2, in cancellation-free form.
    const double a_plus = kL * (2.0 * d + kL) / (4.0 * t);
    const double a_minus = kL * (kL - 2.0 * d) / (4.0 * t);
    const double wp = std::exp(-a_plus);
    const double wm = std::exp(-a_minus);
    add(d + kL, wp);
    add(d - kL, wm);
    const double xi = d + kL;
    const double envelope =
        (wp + wm) * (need_derivs ? 1.0 + xi * inv2t + xi * xi * inv2t * inv2t : 1.0);
    if (envelope < cfg.tol_series * s.s0) {
      converged = true;
      break;
    }
  }
  if (!converged) throw PrecisionError("circle image series did not converge");
  return s;
}

double circle_log_images_impl(double L, double d, double t, const SeriesConfig& cfg) {
  const ImageSums s = circle_image_sums(L, d, t, cfg, false);
  return -d * d / (4.0 * t) - 0.5 * std::log(4.0 * kPi * t) + std::log(s.s0);
}

struct SpectralSums {
  double s = 0;       // L * H
  double s1 = 0;      // L * dH/dd
  double s2 = 0;      // L * d2H/dd2
  double s_abs = 0;
};

SpectralSums circle_spectral_sums(double L, double d, double t,
                                  const SeriesConfig& cfg, bool need_derivs,
                                  bool gate) {
  SpectralSums s;
  s.s = 1.0;
  s.s_abs = 1.0;
  bool converged = false;
  for (int j = 1; j <= cfg.max_terms; ++j) {
    const double w = 2.0 * kPi * j / L;
    const double e = std::exp(-w * w * t);
    const double term = 2.0 * e;
    s.s += term * std::cos(w * d);
    s.s_abs += term;
    if (need_derivs) {
      s.s1 -= term * w * std::sin(w * d);
      s.s2 -= term * w * w * std::cos(w * d);
    }
    const double envelope = term * (need_derivs ? 1.0 + w + w * w : 1.0);
    if (envelope < cfg.tol_series * std::abs(s.s) || envelope < 1e-16 * s.s_abs) {
      converged = true;
      break;
    }
  }
  if (!converged) throw PrecisionError("circle eigenfunction series did not converge");
  if (gate && 4.0 * kEps * s.s_abs > cfg.precision_cap * std::abs(s.s))
    throw PrecisionError("circle eigenfunction series lost to cancellation");
  return s;
}

struct SphereSums {
  double s = 0;      // H
  double st = 0;     // dH/dt, equals Delta H by the eigenvalue relation
  double sp = 0;     // sum of c_l P_l'(cos d), before the -sin d factor
  double s_abs = 0;
};

SphereSums sphere2_sums(double d, double t, const SeriesConfig& cfg,
                        bool need_derivs, bool gate = true) {
  if (!(d >= 0) || d > kPi * (1 + 1e-12))
    throw DomainError("sphere distance must lie in [0, pi]");
  check_time(t);
  if (t < cfg.sphere_t_min)
    throw PrecisionError("sphere kernel rejected below the small-time floor");
  const double x = std::cos(d);
  SphereSums s;
  double p_prev = 0.0;  // P_{l-1}
  double p = 1.0;       // P_l, starting at l = 0
  double dp_prev = 0.0;
  double dp = 0.0;
  bool converged = false;
  for (int l = 0; l <= cfg.max_terms; ++l) {
    if (l > 0) {
      const double p_next = ((2.0 * l - 1.0) * x * p - (l - 1.0) * p_prev) / l;
      const double dp_next = dp_prev + (2.0 * l - 1.0) * p;
      p_prev = p;
      p = p_next;
      dp_prev = dp;
      dp = dp_next;
    }
    const double lam = static_cast<double>(l) * (l + 1.0);
    const double c = (2.0 * l + 1.0) / (4.0 * kPi) * std::exp(-lam * t);
    s.s += c * p;
    s.s_abs += std::abs(c * p);
    if (need_derivs) {
      s.st -= lam * c * p;
      s.sp += c * dp;
    }
    const double next_l = l + 1.0;
    const double next_lam = next_l * (next_l + 1.0);
    const double envelope = (2.0 * next_l + 1.0) / (4.0 * kPi) *
                            std::exp(-next_lam * t) *
                            (need_derivs ? 1.0 + next_lam : 1.0);
    if (envelope < cfg.tol_series * std::abs(s.s) || envelope < 1e-18 * s.s_abs) {
      converged = true;
      break;
    }
  }
  if (!converged) throw PrecisionError("sphere series did not converge");
  if (gate && 4.0 * kEps * s.s_abs > cfg.precision_cap * std::abs(s.s))
    throw PrecisionError("sphere series lost to cancellation");
  return s;
}

FactorEval eval_factor(const geometry::Factor& f, double d, double t,
                       const SeriesConfig& cfg, bool need_derivs) {
  FactorEval out;
  if (const auto* e = std::get_if<geometry::Euclidean>(&f)) {
    const int n = e->dim;
    out.log_value = -0.5 * n * std::log(4.0 * kPi * t) - d * d / (4.0 * t);
    const double g = d / (2.0 * t);
    out.grad_log_sq = g * g;
    out.laplacian_ratio = g * g - 0.5 * n / t;
    out.dt_log = out.laplacian_ratio;
    return out;
  }
  if (const auto* c = std::get_if<geometry::Circle>(&f)) {
    const double L = c->length;
    check_circle_distance(L, d);
    if (t < cfg.switch_ratio * L * L) {
      const ImageSums s = circle_image_sums(L, d, t, cfg, need_derivs);
      out.log_value =
          -d * d / (4.0 * t) - 0.5 * std::log(4.0 * kPi * t) + std::log(s.s0);
      if (need_derivs) {
        const double hd = s.s1 / s.s0;
        const double hdd = s.s2 / s.s0;
        out.grad_log_sq = hd * hd;
        out.laplacian_ratio = hdd;
        out.dt_log = hdd;
      }
      return out;
    }
    const SpectralSums s = circle_spectral_sums(L, d, t, cfg, need_derivs, true);
    out.log_value = std::log(s.s / L);
    if (need_derivs) {
      const double hd = s.s1 / s.s;
      const double hdd = s.s2 / s.s;
      out.grad_log_sq = hd * hd;
      out.laplacian_ratio = hdd;
      out.dt_log = hdd;
    }
    return out;
  }
  if (need_derivs && d >= kPi - 1e-3)
    throw PrecisionError("sphere derivatives unavailable near the cut locus");
  const SphereSums s = sphere2_sums(d, t, cfg, need_derivs);
  out.log_value = std::log(s.s);
  if (need_derivs) {
    const double ht = s.st / s.s;
    const double hth = -std::sin(d) * s.sp / s.s;
    out.grad_log_sq = hth * hth;
    out.laplacian_ratio = ht;
    out.dt_log = ht;
  }
  return out;
}

FactorEval eval_manifold(const ModelManifold& m, std::span<const double> dists,
                         double t, const SeriesConfig& cfg, bool need_derivs) {
  FactorEval total;
  const auto fs = m.factors();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const FactorEval fe = eval_factor(fs[i], dists[i], t, cfg, need_derivs);
    total.log_value += fe.log_value;
    total.grad_log_sq += fe.grad_log_sq;
    total.laplacian_ratio += fe.laplacian_ratio;
    total.dt_log += fe.dt_log;
  }
  return total;
}

std::vector<double> distances_for(const ModelManifold& m, const Point& x,
                                  const Point& y) {
  return geometry::factor_distances(m, x, y);
}

std::vector<double> distances_at(const ModelManifold& m, double d) {
  const auto [x, y] = geometry::points_at_distance(m, d);
  return geometry::factor_distances(m, x, y);
}

}  // namespace

double gaussian_kernel(int n, double d, double t) {
  return std::exp(log_gaussian_kernel(n, d, t));
}

double log_gaussian_kernel(int n, double d, double t) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  check_time(t);
  return -0.5 * n * std::log(4.0 * kPi * t) - d * d / (4.0 * t);
}

double circle_kernel(double L, double d, double t, const SeriesConfig& cfg) {
  validate(cfg);
  check_time(t);
  check_circle_distance(L, d);
  if (t < cfg.switch_ratio * L * L) return circle_kernel_images(L, d, t, cfg);
  return circle_kernel_spectral(L, d, t, cfg);
}

double circle_kernel_images(double L, double d, double t, const SeriesConfig& cfg) {
  validate(cfg);
  check_time(t);
  check_circle_distance(L, d);
  return std::exp(circle_log_images_impl(L, d, t, cfg));
}

double circle_kernel_spectral(double L, double d, double t, const SeriesConfig& cfg) {
  validate(cfg);
  check_time(t);
  check_circle_distance(L, d);
  return circle_spectral_sums(L, d, t, cfg, false, true).s / L;
}

double sphere2_kernel(double d, double t, const SeriesConfig& cfg) {
  validate(cfg);
  return sphere2_sums(d, t, cfg, false).s;
}

double sphere2_kernel_ungated(double d, double t, const SeriesConfig& cfg) {
  validate(cfg);
  return sphere2_sums(d, t, cfg, false, false).s;
}

double heat_kernel(const ModelManifold& m, const Point& x, const Point& y,
                   double t, const SeriesConfig& cfg) {
  return std::exp(log_heat_kernel(m, x, y, t, cfg));
}

double log_heat_kernel(const ModelManifold& m, const Point& x, const Point& y,
                       double t, const SeriesConfig& cfg) {
  validate(cfg);
  check_time(t);
  const auto dists = distances_for(m, x, y);
  return eval_manifold(m, dists, t, cfg, false).log_value;
}

KernelEval kernel_derivatives(const ModelManifold& m, const Point& x,
                              const Point& y, double t, const SeriesConfig& cfg) {
  validate(cfg);
  check_time(t);
  const auto dists = distances_for(m, x, y);
  const FactorEval fe = eval_manifold(m, dists, t, cfg, true);
  KernelEval out;
  out.log_value = fe.log_value;
  out.value = std::exp(fe.log_value);
  out.grad_log_sq = fe.grad_log_sq;
  out.laplacian_ratio = fe.laplacian_ratio;
  out.dt_log = fe.dt_log;
  return out;
}

double heat_kernel_at(const ModelManifold& m, double d, double t,
                      const SeriesConfig& cfg) {
  return std::exp(log_heat_kernel_at(m, d, t, cfg));
}

double log_heat_kernel_at(const ModelManifold& m, double d, double t,
                          const SeriesConfig& cfg) {
  validate(cfg);
  check_time(t);
  return eval_manifold(m, distances_at(m, d), t, cfg, false).log_value;
}

KernelEval kernel_derivatives_at(const ModelManifold& m, double d, double t,
                                 const SeriesConfig& cfg) {
  validate(cfg);
  check_time(t);
  const FactorEval fe = eval_manifold(m, distances_at(m, d), t, cfg, true);
  KernelEval out;
  out.log_value = fe.log_value;
  out.value = std::exp(fe.log_value);
  out.grad_log_sq = fe.grad_log_sq;
  out.laplacian_ratio = fe.laplacian_ratio;
  out.dt_log = fe.dt_log;
  return out;
}

KernelEval kernel_derivatives_fd(const ModelManifold& m, double d, double t,
                                 double h_scale, const SeriesConfig& cfg) {
  validate(cfg);
  check_time(t);
  if (m.is_product())
    throw UsageError("finite-difference oracle covers single-factor manifolds");
  if (!(d > 0)) throw DomainError("finite-difference oracle needs d > 0");
  double h = h_scale * std::max({1.0, d, std::sqrt(t)});
  if (h >= d) h = 0.5 * d;
  const auto& f = m.factors()[0];
  auto logH = [&](double dd, double tt) {
    return eval_factor(f, dd, tt, cfg, false).log_value;
  };
  const double l0 = logH(d, t);
  const double lp = logH(d + h, t);
  const double lm = logH(d - h, t);
  const double dlog = (lp - lm) / (2.0 * h);

  // Geodesic polar Laplacian: H''/H + a(d) H'/H with a the area log-derivative.
  double a = 0.0;
  if (const auto* e = std::get_if<geometry::Euclidean>(&f))
    a = (e->dim - 1.0) / d;
  else if (std::holds_alternative<geometry::Sphere2>(f))
    a = std::cos(d) / std::sin(d);
  const double rel_p = std::exp(lp - l0);
  const double rel_m = std::exp(lm - l0);
  const double hdd_ratio = (rel_p - 2.0 + rel_m) / (h * h);
  const double hd_ratio = (rel_p - rel_m) / (2.0 * h);

  const double step_t = std::min(h, 0.25 * t);
  const double dt_log =
      (logH(d, t + step_t) - logH(d, t - step_t)) / (2.0 * step_t);

  KernelEval out;
  out.log_value = l0;
  out.value = std::exp(l0);
  out.grad_log_sq = dlog * dlog;
  out.laplacian_ratio = hdd_ratio + a * hd_ratio;
  out.dt_log = dt_log;
  return out;
}

namespace {

// Solves (tridiag(off, diag, off) + cyclic corners off) x = rhs by
// Sherman-Morrison over the Thomas algorithm.
void solve_cyclic(double diag, double off, const std::vector<double>& rhs,
                  std::vector<double>& x, std::vector<double>& y,
                  std::vector<double>& z, std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  const double gamma = -diag;
  auto thomas = [&](const std::vector<double>& b, std::vector<double>& sol) {
    std::vector<double>& c = scratch;
    double a0 = diag - gamma;
    c[0] = off / a0;
    sol[0] = b[0] / a0;
    for (std::size_t i = 1; i < n; ++i) {
      const double ai =
          (i == n - 1 ? diag - off * off / gamma : diag) - off * c[i - 1];
      c[i] = off / ai;
      sol[i] = (b[i] - off * sol[i - 1]) / ai;
    }
    for (std::size_t i = n - 1; i-- > 0;) sol[i] -= c[i] * sol[i + 1];
  };
  thomas(rhs, y);
  std::vector<double>& u = x;  // reuse as the correction rhs
  std::fill(u.begin(), u.end(), 0.0);
  u[0] = gamma;
  u[n - 1] = off;
  thomas(u, z);
  const double v_dot_y = y[0] + (off / gamma) * y[n - 1];
  const double v_dot_z = z[0] + (off / gamma) * z[n - 1];
  const double factor = v_dot_y / (1.0 + v_dot_z);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];
}

}  // namespace

double PdeSolution::value_at(double d) const {
  const double h = length / nodes;
  double pos = std::fmod(std::abs(d), length) / h;
  const int i1 = static_cast<int>(std::floor(pos));
  const double u = pos - i1;
  auto at = [&](int i) { return values[((i % nodes) + nodes) % nodes]; };
  // Cubic Lagrange on the four surrounding nodes.
  const double f0 = at(i1 - 1), f1 = at(i1), f2 = at(i1 + 1), f3 = at(i1 + 2);
  const double c0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
  const double c1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
  const double c2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
  const double c3 = (u + 1.0) * u * (u - 1.0) / 6.0;
  return c0 * f0 + c1 * f1 + c2 * f2 + c3 * f3;
}

PdeSolution pde_oracle_circle_run(double L, double t, int nodes,
                                  const SeriesConfig& cfg) {
  validate(cfg);
  if (!(L > 0)) throw DomainError("circle length must be positive");
  if (nodes < 16) throw DomainError("pde oracle needs at least 16 nodes");
  check_time(t);
  PdeSolution sol;
  sol.length = L;
  sol.nodes = nodes;
  sol.t0 = 1e-4 * L * L;
  sol.t = t;
  if (t < 2.0 * sol.t0)
    throw DomainError("pde oracle target time must be at least twice t0");

  const double h = L / nodes;
  sol.values.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double d = std::min(i * h, L - i * h);
    // Ungated: bootstrap noise of order eps/L only matters where the solution
    // itself is far below double range.
    sol.values[i] = circle_spectral_sums(L, d, sol.t0, cfg, false, false).s / L;
  }

  auto mass = [&] {
    double s = 0.0;
    for (double v : sol.values) s += v;
    return s * h;
  };
  sol.max_mass_error = std::abs(mass() - 1.0);

  std::vector<double> rhs(nodes), x(nodes), y(nodes), z(nodes), scratch(nodes);
  double tc = sol.t0;
  const double grading = 2e-3;
  while (tc < t * (1.0 - 1e-14)) {
    const double dt = std::min(grading * tc, t - tc);
    const double mu = dt / (h * h);
    for (int i = 0; i < nodes; ++i) {
      const double um = sol.values[(i + nodes - 1) % nodes];
      const double up = sol.values[(i + 1) % nodes];
      rhs[i] = (1.0 - mu) * sol.values[i] + 0.5 * mu * (um + up);
    }
    solve_cyclic(1.0 + mu, -0.5 * mu, rhs, x, y, z, scratch);
    sol.values = x;
    tc += dt;
    ++sol.steps;
    sol.max_mass_error = std::max(sol.max_mass_error, std::abs(mass() - 1.0));
  }
  return sol;
}

double pde_oracle_circle(double L, double d, double t, int nodes,
                         const SeriesConfig& cfg) {
  check_circle_distance(L, d);
  return pde_oracle_circle_run(L, t, nodes, cfg).value_at(d);
}

}  // namespace heatbound::kernels
