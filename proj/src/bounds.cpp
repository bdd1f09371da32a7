#include "heatbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "heatbound/errors.hpp"
#include "heatbound/numerics.hpp"

namespace heatbound::bounds {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_dt(double d, double t) {
  if (!(d >= 0) || !std::isfinite(d)) throw DomainError("distance must be nonnegative");
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("time must be positive and finite");
}

void check_delta(double delta) {
  if (!(delta > 0) || !std::isfinite(delta))
    throw DomainError("delta must be positive and finite");
}

double log_euclidean_ball(int n, double r) {
  return std::log(geometry::euclidean_unit_ball_volume(n)) + n * std::log(r);
}

struct VolumePair {
  double log_vol = 0;  // log V_x(R) = log V_y(R) on the homogeneous catalog
  double vol = 0;
};

VolumePair ball(const ModelManifold& m, double r, const ToleranceConfig& tol) {
  VolumePair v;
  v.log_vol = geometry::log_ball_volume(m, r, tol.tol_quad);
  v.vol = std::exp(v.log_vol);
  return v;
}

}  // namespace

double r_delta(double d, double t, double delta) {
  check_dt(d, t);
  check_delta(delta);
  // Positive root of R^2 + d R = delta t without subtractive cancellation.
  return 2.0 * delta * t / (std::sqrt(d * d + 4.0 * delta * t) + d);
}

ShiftedTime t_lower(double d, double t, double delta) {
  check_dt(d, t);
  check_delta(delta);
  if (d == 0) return {0.0, true};
  return {d * t / std::sqrt(d * d + 4.0 * delta * t), false};
}

double t_upper(double d, double t, double delta) {
  check_dt(d, t);
  check_delta(delta);
  const double rho_over = d * d / (4.0 * delta * t);
  if (rho_over <= 1.0 / 3.0) return (1.0 + std::sqrt(delta)) * t;
  return std::sqrt(1.0 + 4.0 * delta * t / (d * d)) * t;
}

double log_f_factor(double delta, double rho, int n) {
  check_delta(delta);
  if (!(rho >= 0)) throw DomainError("rho must be nonnegative");
  if (n < 1) throw DomainError("dimension must be at least 1");
  if (rho / delta <= 1.0 / 3.0)
    return std::sqrt(delta) + delta / 3.0 + 0.5 * n * std::log1p(std::sqrt(delta));
  return 2.0 * delta + 0.25 * n * std::log1p(delta / rho);
}

double f_factor(double delta, double rho, int n) {
  return std::exp(log_f_factor(delta, rho, n));
}

const char* family_name(Family f) {
  switch (f) {
    case Family::lower: return "lower";
    case Family::lower_symmetric: return "lower_symmetric";
    case Family::lower_general: return "lower_general";
    case Family::upper: return "upper";
    case Family::upper_symmetric: return "upper_symmetric";
    case Family::upper_general: return "upper_general";
    case Family::li_yau_lower: return "li_yau_lower";
    case Family::li_yau_upper: return "li_yau_upper";
  }
  return "unknown";
}

namespace {

BoundValue lower_core(const ModelManifold& m, double d, double t, double delta,
                      bool symmetric, const ToleranceConfig& tol) {
  check_dt(d, t);
  check_delta(delta);
  const int n = m.dimension();
  const double R = r_delta(d, t, delta);
  const VolumePair v = ball(m, R, tol);
  const double log_eucl = log_euclidean_ball(n, R);
  const double rho = d * d / (4.0 * t);
  // Symmetric form averages the two volume logs; identical here because the
  // catalog is homogeneous, but kept as its own accumulation path.
  const double log_vol_term =
      symmetric ? 0.5 * (v.log_vol + v.log_vol) : v.log_vol;
  BoundValue b;
  b.family = symmetric ? Family::lower_symmetric : Family::lower;
  b.d = d;
  b.t = t;
  b.delta = delta;
  b.radius = R;
  b.t_shifted = d > 0 ? t_lower(d, t, delta).value : kNaN;
  b.degenerate = !(d > 0);
  b.vol_x = v.vol;
  b.vol_y = v.vol;
  b.vol_eucl = std::exp(log_eucl);
  b.log_value = -delta + log_eucl - log_vol_term -
                0.5 * n * std::log(4.0 * kPi * t) - rho;
  b.value = std::exp(b.log_value);
  return b;
}

BoundValue upper_core(const ModelManifold& m, double d, double t, double delta,
                      bool symmetric, const ToleranceConfig& tol) {
  check_dt(d, t);
  check_delta(delta);
  const int n = m.dimension();
  const double R = r_delta(d, t, delta);
  const double rho = d * d / (4.0 * t);
  const double log_f = log_f_factor(delta, rho, n);
  const VolumePair v = ball(m, R, tol);
  BoundValue b;
  b.family = symmetric ? Family::upper_symmetric : Family::upper;
  b.d = d;
  b.t = t;
  b.delta = delta;
  b.radius = R;
  b.t_shifted = t_upper(d, t, delta);
  b.f = std::exp(log_f);
  b.vol_x = v.vol;
  b.vol_y = v.vol;
  b.vol_eucl = std::exp(log_euclidean_ball(n, R));
  if (symmetric) {
    b.log_value = delta + 2.0 * log_f + 0.5 * n * std::log(4.0 * kPi * t) -
                  log_euclidean_ball(n, R) - v.log_vol - rho;
  } else {
    b.log_value = log_f - 0.5 * (v.log_vol + v.log_vol) - rho;
  }
  b.value = std::exp(b.log_value);
  return b;
}

double distance_checked(const ModelManifold& m, const Point& x, const Point& y) {
  return geometry::distance(m, x, y);
}

}  // namespace

BoundValue lower_bound(const ModelManifold& m, const Point& x, const Point& y,
                       double t, double delta, bool symmetric,
                       const ToleranceConfig& tol) {
  return lower_core(m, distance_checked(m, x, y), t, delta, symmetric, tol);
}

BoundValue lower_bound_at(const ModelManifold& m, double d, double t,
                          double delta, bool symmetric,
                          const ToleranceConfig& tol) {
  return lower_core(m, d, t, delta, symmetric, tol);
}

BoundValue lower_bound_general(const ModelManifold& m, const Point& x,
                               const Point& y, double t, double R, double T,
                               const ToleranceConfig& tol) {
  const double d = distance_checked(m, x, y);
  check_dt(d, t);
  if (!(R > 0)) throw DomainError("radius must be positive");
  if (!(T > 0) || T >= t)
    throw DomainError("auxiliary time must satisfy 0 < T < t");
  const int n = m.dimension();
  const VolumePair v = ball(m, R, tol);
  const double log_eucl = log_euclidean_ball(n, R);
  BoundValue b;
  b.family = Family::lower_general;
  b.d = d;
  b.t = t;
  b.delta = kNaN;
  b.radius = R;
  b.t_shifted = T;
  b.vol_x = v.vol;
  b.vol_y = v.vol;
  b.vol_eucl = std::exp(log_eucl);
  b.log_value = 0.5 * n * (std::log(T) - std::log(t)) - R * R / (t - T) +
                log_eucl - v.log_vol - 0.5 * n * std::log(4.0 * kPi * T) -
                d * d / (4.0 * T);
  b.value = std::exp(b.log_value);
  return b;
}

BoundValue upper_bound(const ModelManifold& m, const Point& x, const Point& y,
                       double t, double delta, bool symmetric,
                       const ToleranceConfig& tol) {
  return upper_core(m, distance_checked(m, x, y), t, delta, symmetric, tol);
}

BoundValue upper_bound_at(const ModelManifold& m, double d, double t,
                          double delta, bool symmetric,
                          const ToleranceConfig& tol) {
  return upper_core(m, d, t, delta, symmetric, tol);
}

BoundValue upper_bound_general(const ModelManifold& m, const Point& x,
                               const Point& y, double t, double R, double T,
                               const ToleranceConfig& tol) {
  const double d = distance_checked(m, x, y);
  check_dt(d, t);
  if (!(R > 0)) throw DomainError("radius must be positive");
  if (!(T > t)) throw DomainError("auxiliary time must exceed t");
  const int n = m.dimension();
  const VolumePair v = ball(m, R, tol);
  const double rho = d * d / (4.0 * t);
  const double gap = std::max(0.0, d - 2.0 * R);  // distance between the balls
  BoundValue b;
  b.family = Family::upper_general;
  b.d = d;
  b.t = t;
  b.delta = kNaN;
  b.radius = R;
  b.t_shifted = T;
  b.vol_x = v.vol;
  b.vol_y = v.vol;
  b.vol_eucl = std::exp(log_euclidean_ball(n, R));
  b.log_value = 0.5 * n * (std::log(T) - std::log(t)) + R * R / (T - t) + rho -
                gap * gap / (4.0 * T) - 0.5 * (v.log_vol + v.log_vol) - rho;
  b.value = std::exp(b.log_value);
  return b;
}

std::pair<BoundValue, BoundValue> li_yau_bounds(const ModelManifold& m,
                                                const Point& x, const Point& y,
                                                double t,
                                                const LiYauConstants& consts,
                                                const ToleranceConfig& tol) {
  const double d = distance_checked(m, x, y);
  check_dt(d, t);
  if (!(consts.delta > 0) || !(consts.delta < 1))
    throw DomainError("li_yau delta must lie in (0, 1)");
  if (!(consts.c1 > 0) || !(consts.c2 > 0))
    throw DomainError("li_yau constants must be positive");
  const double log_C = std::log(consts.c1) + consts.c2 / consts.delta;
  const double rt = std::sqrt(t);
  const VolumePair v = ball(m, rt, tol);

  auto fill = [&](Family fam, double log_value) {
    BoundValue b;
    b.family = fam;
    b.d = d;
    b.t = t;
    b.delta = consts.delta;
    b.radius = rt;
    b.t_shifted = kNaN;
    b.vol_x = v.vol;
    b.vol_y = v.vol;
    b.vol_eucl = std::exp(log_euclidean_ball(m.dimension(), rt));
    b.illustrative = true;
    b.log_value = log_value;
    b.value = std::exp(log_value);
    return b;
  };
  BoundValue lo = fill(Family::li_yau_lower,
                       -log_C - v.log_vol - d * d / (4.0 * (1.0 - consts.delta) * t));
  BoundValue hi = fill(Family::li_yau_upper,
                       log_C - v.log_vol - d * d / (4.0 * (1.0 + consts.delta) * t));
  return {std::move(lo), std::move(hi)};
}

Delta1Chains bounds_delta1_at(const ModelManifold& m, double d, double t,
                              const ToleranceConfig& tol) {
  check_dt(d, t);
  const int n = m.dimension();
  const double rho = d * d / (4.0 * t);
  const double J = std::sqrt(rho + 1.0) + std::sqrt(rho);  // sqrt(t)/R at delta=1
  const double log_J = std::log(J);
  const double R = r_delta(d, t, 1.0);
  const double rt = std::sqrt(t);
  const double log_vR = geometry::log_ball_volume(m, R, tol.tol_quad);
  const double log_vrt = geometry::log_ball_volume(m, rt, tol.tol_quad);
  const double log_omega = std::log(geometry::euclidean_unit_ball_volume(n));
  const double log_4pi = std::log(4.0 * kPi);
  const double log_f1 = log_f_factor(1.0, rho, n);

  Delta1Chains c;
  c.d = d;
  c.t = t;
  auto link = [](std::string name, double log_value) {
    ChainLink l;
    l.name = std::move(name);
    l.log_value = log_value;
    l.value = std::exp(log_value);
    return l;
  };

  // Lower chain: the delta = 1 bound, then the weaker closed form where
  // Bishop replaces V_x(R) by V_x(sqrt t) and (sqrt t / R)^n = J^n.
  const double lower1 = -1.0 + log_omega + n * std::log(R) - log_vR -
                        0.5 * n * (log_4pi + std::log(t)) - rho;
  const double lower2 =
      log_omega - 1.0 - n * log_J - 0.5 * n * log_4pi - log_vrt - rho;
  c.lower.push_back(link("lower_delta1", lower1));
  c.lower.push_back(link("lower_root_t", lower2));
  c.lower_symmetric.push_back(link("lower_sym_delta1", lower1));
  c.lower_symmetric.push_back(link("lower_sym_root_t", lower2));

  // Upper chain: delta = 1 bound, the f <= 2^{n/2} e^2 cap, then Bishop
  // moves the volumes to radius sqrt(t).
  const double upper1 = log_f1 - log_vR - rho;
  const double cap_log_f = 0.5 * n * std::log(2.0) + 2.0;
  const double upper2 = cap_log_f - log_vR - rho;
  const double upper3 = cap_log_f + n * log_J - log_vrt - rho;
  c.upper.push_back(link("upper_delta1", upper1));
  c.upper.push_back(link("upper_fcap", upper2));
  c.upper.push_back(link("upper_root_t", upper3));

  const double sym1 = 1.0 + 2.0 * log_f1 + 0.5 * n * (log_4pi + std::log(t)) -
                      log_omega - n * std::log(R) - log_vR - rho;
  const double sym2 = 5.0 + n * std::log(2.0) +
                      0.5 * n * (log_4pi + std::log(t)) - log_omega -
                      n * std::log(R) - log_vR - rho;
  const double sym3 =
      5.0 + 0.5 * n * std::log(16.0 * kPi) + n * log_J - log_omega - log_vR - rho;
  const double sym4 = 5.0 + 0.5 * n * std::log(16.0 * kPi) + 2.0 * n * log_J -
                      log_omega - log_vrt - rho;
  c.upper_symmetric.push_back(link("upper_sym_delta1", sym1));
  c.upper_symmetric.push_back(link("upper_sym_fcap", sym2));
  c.upper_symmetric.push_back(link("upper_sym_expanded", sym3));
  c.upper_symmetric.push_back(link("upper_sym_root_t", sym4));
  return c;
}

Delta1Chains bounds_delta1(const ModelManifold& m, const Point& x,
                           const Point& y, double t, const ToleranceConfig& tol) {
  return bounds_delta1_at(m, distance_checked(m, x, y), t, tol);
}

DeltaOptimum optimize_delta_at(const ModelManifold& m, double d, double t,
                               Side side, const ToleranceConfig& tol) {
  check_dt(d, t);
  const double lo = std::log(1e-6);
  const double hi = std::log(1e3);
  auto objective = [&](double lambda) {
    const double delta = std::exp(lambda);
    const BoundValue b = side == Side::lower
                             ? lower_core(m, d, t, delta, false, tol)
                             : upper_core(m, d, t, delta, false, tol);
    return side == Side::lower ? -b.log_value : b.log_value;
  };

  constexpr int kScan = 64;
  int best = 0;
  double best_val = objective(lo);
  for (int i = 1; i < kScan; ++i) {
    const double lambda = lo + (hi - lo) * i / (kScan - 1);
    const double v = objective(lambda);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }

  DeltaOptimum out;
  if (best == 0 || best == kScan - 1) {
    out.delta_star = best == 0 ? 1e-6 : 1e3;
    out.at_boundary = true;
    const BoundValue b = side == Side::lower
                             ? lower_core(m, d, t, out.delta_star, false, tol)
                             : upper_core(m, d, t, out.delta_star, false, tol);
    out.value = b.value;
    out.log_value = b.log_value;
    return out;
  }
  const double step = (hi - lo) / (kScan - 1);
  const double a = lo + step * (best - 1);
  const double b = lo + step * (best + 1);
  const auto g = numerics::golden_min(objective, a, b, 1e-6);
  out.delta_star = std::exp(g.x);
  const BoundValue bv = side == Side::lower
                            ? lower_core(m, d, t, out.delta_star, false, tol)
                            : upper_core(m, d, t, out.delta_star, false, tol);
  out.value = bv.value;
  out.log_value = bv.log_value;
  out.at_boundary = false;
  return out;
}

DeltaOptimum optimize_delta(const ModelManifold& m, const Point& x,
                            const Point& y, double t, Side side,
                            const ToleranceConfig& tol) {
  return optimize_delta_at(m, distance_checked(m, x, y), t, side, tol);
}

}  // namespace heatbound::bounds
