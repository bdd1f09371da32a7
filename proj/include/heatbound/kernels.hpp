#pragma once

#include <vector>

#include "heatbound/geometry.hpp"
#include "heatbound/tolerances.hpp"

namespace heatbound::kernels {

using geometry::ModelManifold;
using geometry::Point;

struct KernelEval {
  double value = 0;
  double log_value = 0;
  double grad_log_sq = 0;      // |grad_x ln H|^2
  double laplacian_ratio = 0;  // (Delta_x H) / H
  double dt_log = 0;           // d/dt ln H
};

// Gauss-Weierstrass kernel (4 pi t)^{-n/2} exp(-d^2/(4t)).
double gaussian_kernel(int n, double d, double t);
double log_gaussian_kernel(int n, double d, double t);

// Circle heat kernel at geodesic distance d in [0, L/2]. The public entry
// switches representation at t = switch_ratio * L^2: wrapped Gaussian images
// below, eigenfunction sum above.
double circle_kernel(double L, double d, double t, const SeriesConfig& cfg = {});
double circle_kernel_images(double L, double d, double t,
                            const SeriesConfig& cfg = {});
// Throws PrecisionError when cancellation exceeds the reliability cap.
double circle_kernel_spectral(double L, double d, double t,
                              const SeriesConfig& cfg = {});

// Unit sphere heat kernel via the Legendre series. Throws PrecisionError
// below sphere_t_min or when cancellation exceeds the cap.
double sphere2_kernel(double d, double t, const SeriesConfig& cfg = {});
// Same sum without the cancellation gate, for use under integrals where the
// absolute noise (about 4 eps times the absolute-term sum) averages out.
double sphere2_kernel_ungated(double d, double t, const SeriesConfig& cfg = {});

double heat_kernel(const ModelManifold& m, const Point& x, const Point& y,
                   double t, const SeriesConfig& cfg = {});
double log_heat_kernel(const ModelManifold& m, const Point& x, const Point& y,
                       double t, const SeriesConfig& cfg = {});

// Analytic first derivatives of ln H plus the Laplacian ratio, termwise per
// factor. Sphere factors require distance below pi - 1e-3.
KernelEval kernel_derivatives(const ModelManifold& m, const Point& x,
                              const Point& y, double t,
                              const SeriesConfig& cfg = {});

// Distance-parametrized forms using the canonical point placement.
double heat_kernel_at(const ModelManifold& m, double d, double t,
                      const SeriesConfig& cfg = {});
double log_heat_kernel_at(const ModelManifold& m, double d, double t,
                          const SeriesConfig& cfg = {});
KernelEval kernel_derivatives_at(const ModelManifold& m, double d, double t,
                                 const SeriesConfig& cfg = {});

// Central finite differences in d and t for single-factor manifolds; the
// Laplacian uses the geodesic polar form. Cross-validation oracle.
KernelEval kernel_derivatives_fd(const ModelManifold& m, double d, double t,
                                 double h_scale = 1e-5,
                                 const SeriesConfig& cfg = {});

// Crank-Nicolson march of the circle heat equation on a uniform periodic
// grid, bootstrapped from the eigenfunction sum at t0 = 1e-4 L^2.
struct PdeSolution {
  double length = 0;
  int nodes = 0;
  double t0 = 0;
  double t = 0;
  int steps = 0;
  double max_mass_error = 0;   // max |h * sum(u) - 1| over all steps
  std::vector<double> values;  // source at node 0

  double value_at(double d) const;  // cubic interpolation
};

PdeSolution pde_oracle_circle_run(double L, double t, int nodes = 4096,
                                  const SeriesConfig& cfg = {});
double pde_oracle_circle(double L, double d, double t, int nodes = 4096,
                         const SeriesConfig& cfg = {});

}  // namespace heatbound::kernels
