#pragma once

#include <string>
#include <vector>

#include "heatbound/geometry.hpp"
#include "heatbound/tolerances.hpp"

namespace heatbound::bounds {

using geometry::ModelManifold;
using geometry::Point;

// Radius with R^2 + d R = delta t, in cancellation-free form.
double r_delta(double d, double t, double delta);

struct ShiftedTime {
  double value = 0;
  bool degenerate = false;  // d = 0 collapses the shifted time to 0
};
ShiftedTime t_lower(double d, double t, double delta);
double t_upper(double d, double t, double delta);

// Piecewise Gaussian-upper-bound factor; always >= 1, discontinuous across
// the branch boundary rho/delta = 1/3 (both branches are valid majorants).
double f_factor(double delta, double rho, int n);
double log_f_factor(double delta, double rho, int n);

enum class Family {
  lower,
  lower_symmetric,
  lower_general,
  upper,
  upper_symmetric,
  upper_general,
  li_yau_lower,
  li_yau_upper,
};
const char* family_name(Family f);

struct BoundValue {
  double value = 0;
  double log_value = 0;
  Family family = Family::lower;
  double d = 0;
  double t = 0;
  double delta = 0;      // NaN for the general forms
  double radius = 0;     // R entering the volumes
  double t_shifted = 0;  // auxiliary time T; NaN when absent
  double f = 1;          // upper-bound factor; 1 elsewhere
  double vol_x = 0;
  double vol_y = 0;
  double vol_eucl = 0;   // flat comparison volume at the same radius
  bool degenerate = false;
  bool at_boundary = false;
  bool illustrative = false;
};

BoundValue lower_bound(const ModelManifold& m, const Point& x, const Point& y,
                       double t, double delta, bool symmetric = false,
                       const ToleranceConfig& tol = {});
BoundValue lower_bound_general(const ModelManifold& m, const Point& x,
                               const Point& y, double t, double R, double T,
                               const ToleranceConfig& tol = {});
BoundValue upper_bound(const ModelManifold& m, const Point& x, const Point& y,
                       double t, double delta, bool symmetric = false,
                       const ToleranceConfig& tol = {});
BoundValue upper_bound_general(const ModelManifold& m, const Point& x,
                               const Point& y, double t, double R, double T,
                               const ToleranceConfig& tol = {});

// Distance-parametrized forms (canonical point placement).
BoundValue lower_bound_at(const ModelManifold& m, double d, double t,
                          double delta, bool symmetric = false,
                          const ToleranceConfig& tol = {});
BoundValue upper_bound_at(const ModelManifold& m, double d, double t,
                          double delta, bool symmetric = false,
                          const ToleranceConfig& tol = {});

struct LiYauConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double delta = 0.5;  // must lie in (0, 1)
};

// Classical two-sided estimate with C(delta) = c1 exp(c2/delta). The
// constants are illustrative configuration, never asserted against the
// kernel.
std::pair<BoundValue, BoundValue> li_yau_bounds(const ModelManifold& m,
                                                const Point& x, const Point& y,
                                                double t,
                                                const LiYauConstants& consts = {},
                                                const ToleranceConfig& tol = {});

struct ChainLink {
  std::string name;
  double value = 0;
  double log_value = 0;
};

// The delta = 1 specializations: each inequality link returned separately,
// tightest first. Lower chains decrease, upper chains increase.
struct Delta1Chains {
  double d = 0, t = 0;
  std::vector<ChainLink> lower;
  std::vector<ChainLink> lower_symmetric;
  std::vector<ChainLink> upper;
  std::vector<ChainLink> upper_symmetric;
};
Delta1Chains bounds_delta1(const ModelManifold& m, const Point& x,
                           const Point& y, double t,
                           const ToleranceConfig& tol = {});
Delta1Chains bounds_delta1_at(const ModelManifold& m, double d, double t,
                              const ToleranceConfig& tol = {});

enum class Side { lower, upper };

struct DeltaOptimum {
  double delta_star = 0;
  double value = 0;
  double log_value = 0;
  bool at_boundary = false;
};

// Golden-section on ln(delta) over [1e-6, 1e3] (tol 1e-6), seeded by a
// coarse scan since unimodality is not assumed.
DeltaOptimum optimize_delta(const ModelManifold& m, const Point& x,
                            const Point& y, double t, Side side,
                            const ToleranceConfig& tol = {});
DeltaOptimum optimize_delta_at(const ModelManifold& m, double d, double t,
                               Side side, const ToleranceConfig& tol = {});

}  // namespace heatbound::bounds
