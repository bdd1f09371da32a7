#pragma once

#include <functional>
#include <span>
#include <vector>

namespace heatbound::numerics {

// Adaptive Simpson with Richardson correction. Relative tolerance against the
// local panel, with a global absolute floor so vanishing tails terminate.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_depth = 48);

// Same, split first at the given breakpoints (kinks of the integrand).
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, double rel_tol);

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Quadrature gauss_legendre(int n);                      // on [-1, 1]
Quadrature gauss_legendre(int n, double a, double b);  // mapped to [a, b]

struct GoldenResult {
  double x = 0;
  double fx = 0;
  int evals = 0;
};

// Golden-section minimum of f on [a, b] to the given x tolerance.
GoldenResult golden_min(const std::function<double(double)>& f, double a,
                        double b, double x_tol);

double central_diff(const std::function<double(double)>& f, double x, double h);
double central_diff2(const std::function<double(double)>& f, double x, double h);

// k log-spaced points from a to b inclusive, a, b > 0.
std::vector<double> logspace(double a, double b, int k);

// Worker cap: min(hardware, 4), overridden by HEATBOUND_THREADS when set.
int max_threads();

// Runs fn(i) for i in [0, n). Results must go to caller-indexed slots;
// scheduling is static so output never depends on thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace heatbound::numerics
