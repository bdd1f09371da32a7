#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatbound/bounds.hpp"
#include "heatbound/estimates.hpp"
#include "heatbound/geometry.hpp"
#include "heatbound/tolerances.hpp"

namespace heatbound::verify {

using geometry::ModelManifold;

struct GridSpec {
  std::vector<double> d;
  std::vector<double> t;
  std::vector<double> delta;
};

GridSpec default_sandwich_grid(const ModelManifold& m);
GridSpec default_derivative_grid(const ModelManifold& m);
std::vector<double> default_monotonicity_times(const ModelManifold& m);
std::vector<ModelManifold> default_catalog();

struct SweepRecord {
  double d = 0;
  double t = 0;
  double delta = 0;  // alpha in derivative sweeps, NaN for the sharp mode
  double lower = 0;
  double reference = 0;
  double upper = 0;
  double margin_lower = 0;
  double margin_upper = 0;
  bool pass = false;
  bool skipped = false;
};

struct SweepReport {
  std::string suite;
  std::string manifold;
  int n = 0;
  GridSpec grid;
  std::vector<SweepRecord> records;
  double worst_margin_lower = 0;
  double worst_margin_upper = 0;
  double worst_chain_margin = 0;  // delta = 1 chain ordering, sandwich only
  int skipped = 0;
  bool informative = false;  // worst margins reported but not enforced
  bool pass = true;
};

// Two-sided bound verification per grid point and delta, margins relative.
// Kernel precision failures become skipped records. Also checks every
// delta = 1 chain link against the kernel and against its neighbors.
SweepReport sandwich_sweep(const ModelManifold& m, const GridSpec& grid,
                           const ToleranceConfig& tol = {});

// Gradient and Laplacian estimates at each grid point: the sharp mode plus
// each supplied alpha. margin_lower carries the gradient margin and
// margin_upper the Laplacian margin. Informative on compact manifolds.
SweepReport derivative_sweep(const ModelManifold& m, const GridSpec& grid,
                             std::span<const double> alphas,
                             const ToleranceConfig& tol = {});

struct PathSpec {
  double beta = 0.4;   // d(t) = scale * t^beta
  double scale = 1.0;
};

struct AsymptoticsRecord {
  double t = 0;
  double d = 0;
  double q = 0;      // V_x(sqrt t) e^{d^2/4t} H(x, y(t), t)
  double tn2h = 0;   // t^{n/2} H(p, p, t)
  bool skipped = false;
};

struct AsymptoticsReport {
  std::string manifold;
  int n = 0;
  PathSpec path;
  std::vector<AsymptoticsRecord> records;
  std::optional<double> limit;    // unit-ball volume / (4 pi)^{n/2} when
                                  // maximal volume growth is present
  double last_quartile_dev = 0;   // NaN when the limit is absent
  double worst_monotonicity_margin = 0;
  bool monotonic = false;
  bool pass = false;
};

// Tabulates the normalized kernel along d(t) = scale * t^beta against the
// flat-space limit, and the on-diagonal monotone quantity t^{n/2} H(p,p,t).
// Throws UsageError when the path leaves the manifold.
AsymptoticsReport asymptotic_diagnostics(const ModelManifold& m,
                                         const PathSpec& path,
                                         std::span<const double> t_grid,
                                         const ToleranceConfig& tol = {},
                                         double quartile_threshold = 1e-3,
                                         double monotonicity_slack = 1e-10);

struct SuiteResult {
  std::vector<SweepReport> sweeps;
  std::vector<estimates::CheckReport> checks;
  std::vector<AsymptoticsReport> asymptotics;
  bool pass = true;
};

// suite in {sandwich, gradient, classical, asymptotics, all}.
SuiteResult run_suite(std::string_view suite,
                      std::span<const ModelManifold> manifolds,
                      const ToleranceConfig& tol = {});

std::string to_csv(const SweepReport& report);
nlohmann::json to_json(const SweepReport& report);
nlohmann::json to_json(const AsymptoticsReport& report);
nlohmann::json to_json(const estimates::CheckReport& report);
nlohmann::json to_json(const SuiteResult& result);

}  // namespace heatbound::verify
