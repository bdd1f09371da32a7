#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heatbound/geometry.hpp"
#include "heatbound/tolerances.hpp"

namespace heatbound::estimates {

using geometry::ModelManifold;

// Dimensional constant of the sharp gradient estimate:
// (n/2) ln(8(n + sqrt(n^2+1))) + ln Gamma(n/2 + 1) + (5 - sqrt(n^2+1))/2.
double c_n(int n);

struct GMax {
  double value = 0;
  double maximizer_sq = 0;  // x^2 at the maximum of (sqrt(1+x^2)+x)^n e^{-x^2}
};
GMax g_max(int n);

// min{1/2, (sqrt(1+rho)+sqrt(rho))^{-2}} with rho = d^2/(4t).
double alpha_star(double d, double t);
// The complement in its stable closed form max{1/2, 2/(1+sqrt(1+4t/d^2))}.
double one_minus_alpha_star(double d, double t);

struct EstimateRHS {
  double lhs_coefficient = 0;  // multiplies t * (kernel quantity), in (0, 1]
  double rhs = 0;
  double d = 0;
  double t = 0;
  int n = 0;
  double alpha = 0;  // NaN in the sharp form
  bool sharp = true;
};

// Gradient estimate right side: coefficient * t * |grad ln H|^2 <= rhs.
EstimateRHS gradient_rhs(double d, double t, int n);                // sharp
EstimateRHS gradient_rhs(double d, double t, int n, double alpha);  // fixed alpha

// Laplacian estimate right side: coefficient * t * (Delta H / H) <= rhs.
EstimateRHS laplacian_rhs(double d, double t, int n);
EstimateRHS laplacian_rhs(double d, double t, int n, double alpha);

enum class ClassicalCheck {
  li_yau_gradient,
  harnack,
  mean_value,
  cheeger_yau,
  davies_integral,
  hamilton_gradient,
  hamilton_laplacian,
};
ClassicalCheck parse_check(std::string_view name);  // throws UsageError
const char* check_name(ClassicalCheck c);
bool check_applicable(ClassicalCheck c, const ModelManifold& m);

struct CheckParams {
  std::vector<double> d_grid;
  std::vector<double> t_grid;
  // (t1, t2) pairs with t1 < t2 for the two-time inequalities.
  std::vector<std::pair<double, double>> time_pairs;
  std::vector<double> radii;  // ball radii for the mean value check
  // Subsets for the double-integral check: {start, length} along the
  // canonical coordinate of a one-dimensional manifold.
  std::pair<double, double> set1{0.0, 0.5};
  std::pair<double, double> set2{3.141592653589793, 0.5};
  std::vector<double> set_times;
  double sup_shift = 0.1;              // initial-time offset for sup-bound checks
  std::vector<double> elapsed;         // times after the shift
  double sup_inflation = 1e-6;         // relative inflation of the grid supremum
  int sup_grid = 256;
};

CheckParams default_check_params(ClassicalCheck c, const ModelManifold& m);

struct CheckReport {
  ClassicalCheck id = ClassicalCheck::li_yau_gradient;
  std::string manifold;
  int points = 0;
  int skipped = 0;
  double worst_margin = 0;  // signed slack, negative = violation
  std::string worst_at;
  bool pass = false;
};

CheckReport check_classical(ClassicalCheck c, const ModelManifold& m,
                            const CheckParams& params,
                            const ToleranceConfig& tol = {});
CheckReport check_classical(ClassicalCheck c, const ModelManifold& m,
                            const ToleranceConfig& tol = {});

}  // namespace heatbound::estimates
