#pragma once

#include <numbers>

namespace heatbound {

// Controls for the kernel series evaluators.
struct SeriesConfig {
  // Truncate when the next term drops below tol_series times the partial sum.
  double tol_series = 1e-13;
  int max_terms = 10000;
  // Circle kernel: spectral representation once t >= switch_ratio * L^2,
  // image (wrapped Gaussian) representation below.
  double switch_ratio = 1.0 / (4.0 * std::numbers::pi);
  // Sphere series is rejected below this time.
  double sphere_t_min = 1e-3;
  // Reject an alternating sum once the estimated cancellation error exceeds
  // this relative cap.
  double precision_cap = 1e-11;
};

struct ToleranceConfig {
  SeriesConfig series{};
  double tol_quad = 1e-8;    // relative quadrature tolerance (product volumes)
  double h_fd_scale = 1e-5;  // finite-difference step scale
  double slack = 1e-9;       // permitted relative slack on inequality margins
};

void validate(const SeriesConfig& cfg);  // throws DomainError

}  // namespace heatbound
