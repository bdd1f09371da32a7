#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace heatbound::geometry {

// Irreducible factors of a model space.
struct Euclidean {
  int dim = 1;
};
struct Circle {
  double length = 6.283185307179586;
};
struct Sphere2 {};  // unit round 2-sphere

using Factor = std::variant<Euclidean, Circle, Sphere2>;

int factor_dimension(const Factor& f);
bool factor_compact(const Factor& f);
double factor_diameter(const Factor& f);  // +inf for Euclidean

// A single factor or a metric product of factors (l2 product metric).
// Nested products flatten; the factor list is never empty.
class ModelManifold {
 public:
  static ModelManifold euclidean(int n);
  static ModelManifold circle(double length);
  static ModelManifold sphere2();
  static ModelManifold product(std::vector<ModelManifold> factors);
  // Grammar: "rn:n=<int>", "circle:L=<float>", "s2",
  // "prod:<part>+<part>[+...]" with non-product parts.
  static ModelManifold from_spec(std::string_view spec);

  int dimension() const { return dim_; }
  bool compact() const;
  bool is_product() const { return factors_.size() > 1; }
  double diameter() const;  // +inf when non-compact
  std::span<const Factor> factors() const { return factors_; }
  std::string tag() const;  // canonical spec string

 private:
  explicit ModelManifold(std::vector<Factor> fs);

  std::vector<Factor> factors_;
  int dim_ = 0;
};

// Per-factor coordinates: a Euclidean factor holds dim reals, a circle one
// real reduced to [0, L), a sphere a unit 3-vector (norm within 1e-12).
struct Point {
  std::vector<std::vector<double>> coords;
};

Point origin(const ModelManifold& m);
// Point at arc length s >= 0 along the canonical geodesic ray from the origin.
Point point_at(const ModelManifold& m, double s);
// Validates shapes, reduces circle coordinates mod L, checks sphere norms.
Point make_point(const ModelManifold& m, std::vector<std::vector<double>> coords);
void validate_point(const ModelManifold& m, const Point& p);
// Origin plus a point at distance d, distance split evenly across factors
// (water-filling against compact diameters). Throws UsageError when d exceeds
// the diameter.
std::pair<Point, Point> points_at_distance(const ModelManifold& m, double d);

std::vector<double> factor_distances(const ModelManifold& m, const Point& p,
                                     const Point& q);
double distance(const ModelManifold& m, const Point& p, const Point& q);

// pi^{n/2} r^n / Gamma(n/2 + 1)
double euclidean_ball_volume(int n, double r);
double euclidean_unit_ball_volume(int n);
double euclidean_sphere_area(int n, double r);

// Geodesic ball volume. Model spaces are homogeneous, so the center only
// enters through validation; tol_quad controls product slice quadrature.
double ball_volume(const ModelManifold& m, double r, double tol_quad = 1e-8);
double ball_volume(const ModelManifold& m, const Point& x, double r,
                   double tol_quad = 1e-8);
double log_ball_volume(const ModelManifold& m, double r, double tol_quad = 1e-8);

// Geodesic sphere area: closed forms for single factors, central difference
// of the volume for products. Returns 0 past the diameter.
double sphere_area(const ModelManifold& m, double r, double tol_quad = 1e-8);
double sphere_area(const ModelManifold& m, const Point& x, double r,
                   double tol_quad = 1e-8);

// Maximal-volume-growth constant lim V_x(r)/r^n: the unit ball volume on
// Euclidean space, absent as soon as a compact factor is present.
std::optional<double> mvg_theta(const ModelManifold& m);

struct VolumeData {
  double radius = 0;
  double volume = 0;            // V_x(r)
  double sphere_area = 0;       // A_x(r)
  double euclidean_volume = 0;  // V_{R^n}(r), same dimension
};

VolumeData volume_data(const ModelManifold& m, const Point& x, double r,
                       double tol_quad = 1e-8);

}  // namespace heatbound::geometry
