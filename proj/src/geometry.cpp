#include "heatbound/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "heatbound/errors.hpp"
#include "heatbound/numerics.hpp"

namespace heatbound::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

double factor_ball_volume(const Factor& f, double r);

struct FactorOps {
  int operator()(const Euclidean& e) const { return e.dim; }
  int operator()(const Circle&) const { return 1; }
  int operator()(const Sphere2&) const { return 2; }
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int factor_dimension(const Factor& f) { return std::visit(FactorOps{}, f); }

bool factor_compact(const Factor& f) {
  return !std::holds_alternative<Euclidean>(f);
}

double factor_diameter(const Factor& f) {
  if (std::holds_alternative<Euclidean>(f)) return kInf;
  if (const auto* c = std::get_if<Circle>(&f)) return 0.5 * c->length;
  return kPi;
}

ModelManifold::ModelManifold(std::vector<Factor> fs) : factors_(std::move(fs)) {
  for (const Factor& f : factors_) dim_ += factor_dimension(f);
}

ModelManifold ModelManifold::euclidean(int n) {
  if (n < 1) throw DomainError("euclidean: dimension must be at least 1");
  return ModelManifold({Euclidean{n}});
}

ModelManifold ModelManifold::circle(double length) {
  if (!(length > 0) || !std::isfinite(length))
    throw DomainError("circle: length must be positive and finite");
  return ModelManifold({Circle{length}});
}

ModelManifold ModelManifold::sphere2() { return ModelManifold({Sphere2{}}); }

ModelManifold ModelManifold::product(std::vector<ModelManifold> factors) {
  if (factors.size() < 2)
    throw DomainError("product: need at least two factors");
  std::vector<Factor> flat;
  for (const ModelManifold& m : factors)
    flat.insert(flat.end(), m.factors_.begin(), m.factors_.end());
  return ModelManifold(std::move(flat));
}

bool ModelManifold::compact() const {
  return std::all_of(factors_.begin(), factors_.end(), factor_compact);
}

double ModelManifold::diameter() const {
  double sq = 0.0;
  for (const Factor& f : factors_) {
    const double d = factor_diameter(f);
    if (!std::isfinite(d)) return kInf;
    sq += d * d;
  }
  return std::sqrt(sq);
}

std::string ModelManifold::tag() const {
  auto one = [](const Factor& f) -> std::string {
    if (const auto* e = std::get_if<Euclidean>(&f))
      return "rn:n=" + std::to_string(e->dim);
    if (const auto* c = std::get_if<Circle>(&f))
      return "circle:L=" + format_double(c->length);
    return "s2";
  };
  if (!is_product()) return one(factors_[0]);
  std::string out = "prod:";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += '+';
    out += one(factors_[i]);
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

ModelManifold parse_single(std::string_view part) {
  part = trim(part);
  if (part == "s2") return ModelManifold::sphere2();
  if (part.rfind("rn:n=", 0) == 0) {
    const std::string num(part.substr(5));
    char* end = nullptr;
    const long n = std::strtol(num.c_str(), &end, 10);
    if (end == num.c_str() || *end != '\0')
      throw UsageError("bad manifold spec: " + std::string(part));
    if (n < 1) throw DomainError("euclidean: dimension must be at least 1");
    return ModelManifold::euclidean(static_cast<int>(n));
  }
  if (part.rfind("circle:L=", 0) == 0) {
    const std::string num(part.substr(9));
    char* end = nullptr;
    const double L = std::strtod(num.c_str(), &end);
    if (end == num.c_str() || *end != '\0')
      throw UsageError("bad manifold spec: " + std::string(part));
    return ModelManifold::circle(L);
  }
  throw UsageError("unknown manifold spec: " + std::string(part));
}

bool part_starts_here(std::string_view s, std::size_t i) {
  return s.compare(i, 3, "rn:") == 0 || s.compare(i, 7, "circle:") == 0 ||
         s.compare(i, 2, "s2") == 0;
}

}  // namespace

ModelManifold ModelManifold::from_spec(std::string_view spec) {
  const std::string_view s = trim(spec);
  if (s.rfind("prod:", 0) != 0) return parse_single(s);
  const std::string_view rest = s.substr(5);
  std::vector<ModelManifold> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    // A '+' splits factors only when a factor spec follows; this keeps
    // exponents like 1e+2 intact.
    if (rest[i] == '+' && i + 1 < rest.size() && part_starts_here(rest, i + 1)) {
      parts.push_back(parse_single(rest.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(parse_single(rest.substr(start)));
  if (parts.size() < 2) throw UsageError("product spec needs at least two factors");
  return ModelManifold::product(std::move(parts));
}

namespace {

std::vector<double> factor_origin(const Factor& f) {
  if (const auto* e = std::get_if<Euclidean>(&f))
    return std::vector<double>(e->dim, 0.0);
  if (std::holds_alternative<Circle>(f)) return {0.0};
  return {0.0, 0.0, 1.0};
}

std::vector<double> factor_point_at(const Factor& f, double s) {
  if (const auto* e = std::get_if<Euclidean>(&f)) {
    std::vector<double> v(e->dim, 0.0);
    v[0] = s;
    return v;
  }
  if (const auto* c = std::get_if<Circle>(&f)) {
    double phi = std::fmod(s, c->length);
    if (phi < 0) phi += c->length;
    return {phi};
  }
  return {std::sin(s), 0.0, std::cos(s)};
}

double factor_distance(const Factor& f, const std::vector<double>& a,
                       const std::vector<double>& b) {
  if (std::holds_alternative<Euclidean>(f)) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double dd = a[i] - b[i];
      sq += dd * dd;
    }
    return std::sqrt(sq);
  }
  if (const auto* c = std::get_if<Circle>(&f)) {
    double delta = std::fmod(std::abs(a[0] - b[0]), c->length);
    return std::min(delta, c->length - delta);
  }
  const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::acos(std::clamp(dot, -1.0, 1.0));
}

void check_factor_point(const Factor& f, const std::vector<double>& v) {
  const std::size_t want =
      std::holds_alternative<Euclidean>(f)
          ? static_cast<std::size_t>(std::get<Euclidean>(f).dim)
          : (std::holds_alternative<Circle>(f) ? 1u : 3u);
  if (v.size() != want) throw UsageError("point shape does not match manifold");
  for (double c : v)
    if (!std::isfinite(c)) throw UsageError("point has non-finite coordinate");
  if (std::holds_alternative<Sphere2>(f)) {
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (std::abs(norm - 1.0) > 1e-12)
      throw UsageError("sphere point is not on the unit sphere");
  }
}

// Even split of d across factors, capping compact factors at their diameter
// and redistributing the excess.
std::vector<double> split_shares(const ModelManifold& m, double d) {
  if (!(d >= 0)) throw DomainError("distance must be nonnegative");
  const auto fs = m.factors();
  std::vector<double> share(fs.size(), 0.0);
  std::vector<std::size_t> active(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) active[i] = i;
  double remaining_sq = d * d;
  while (!active.empty() && remaining_sq > 0) {
    const double want_sq = remaining_sq / active.size();
    std::size_t tightest = active[0];
    double tight_cap = factor_diameter(fs[tightest]);
    for (std::size_t idx : active) {
      const double cap = factor_diameter(fs[idx]);
      if (cap < tight_cap) {
        tight_cap = cap;
        tightest = idx;
      }
    }
    if (tight_cap * tight_cap < want_sq) {
      share[tightest] = tight_cap;
      remaining_sq -= tight_cap * tight_cap;
      std::erase(active, tightest);
      continue;
    }
    const double s = std::sqrt(want_sq);
    for (std::size_t idx : active) share[idx] = s;
    remaining_sq = 0;
  }
  if (remaining_sq > 1e-12 * d * d)
    throw UsageError("distance exceeds the manifold diameter");
  return share;
}

}  // namespace

Point origin(const ModelManifold& m) {
  Point p;
  for (const Factor& f : m.factors()) p.coords.push_back(factor_origin(f));
  return p;
}

Point point_at(const ModelManifold& m, double s) {
  const std::vector<double> share = split_shares(m, s);
  Point p;
  const auto fs = m.factors();
  for (std::size_t i = 0; i < fs.size(); ++i)
    p.coords.push_back(factor_point_at(fs[i], share[i]));
  return p;
}

Point make_point(const ModelManifold& m, std::vector<std::vector<double>> coords) {
  Point p{std::move(coords)};
  const auto fs = m.factors();
  if (p.coords.size() != fs.size())
    throw UsageError("point shape does not match manifold");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    check_factor_point(fs[i], p.coords[i]);
    if (const auto* c = std::get_if<Circle>(&fs[i])) {
      double phi = std::fmod(p.coords[i][0], c->length);
      if (phi < 0) phi += c->length;
      p.coords[i][0] = phi;
    }
  }
  return p;
}

void validate_point(const ModelManifold& m, const Point& p) {
  const auto fs = m.factors();
  if (p.coords.size() != fs.size())
    throw UsageError("point shape does not match manifold");
  for (std::size_t i = 0; i < fs.size(); ++i) check_factor_point(fs[i], p.coords[i]);
}

std::pair<Point, Point> points_at_distance(const ModelManifold& m, double d) {
  const std::vector<double> share = split_shares(m, d);
  Point y;
  const auto fs = m.factors();
  for (std::size_t i = 0; i < fs.size(); ++i)
    y.coords.push_back(factor_point_at(fs[i], share[i]));
  return {origin(m), std::move(y)};
}

std::vector<double> factor_distances(const ModelManifold& m, const Point& p,
                                     const Point& q) {
  validate_point(m, p);
  validate_point(m, q);
  const auto fs = m.factors();
  std::vector<double> out(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i)
    out[i] = factor_distance(fs[i], p.coords[i], q.coords[i]);
  return out;
}

double distance(const ModelManifold& m, const Point& p, const Point& q) {
  const std::vector<double> per = factor_distances(m, p, q);
  if (per.size() == 1) return per[0];
  double sq = 0.0;
  for (double d : per) sq += d * d;
  return std::sqrt(sq);
}

double euclidean_unit_ball_volume(int n) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  return std::exp(0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0));
}

double euclidean_ball_volume(int n, double r) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  if (!(r >= 0)) throw DomainError("radius must be nonnegative");
  return euclidean_unit_ball_volume(n) * std::pow(r, n);
}

double euclidean_sphere_area(int n, double r) {
  if (n < 1) throw DomainError("dimension must be at least 1");
  if (!(r >= 0)) throw DomainError("radius must be nonnegative");
  return n * euclidean_unit_ball_volume(n) * std::pow(r, n - 1);
}

namespace {

double factor_ball_volume(const Factor& f, double r) {
  if (const auto* e = std::get_if<Euclidean>(&f))
    return euclidean_ball_volume(e->dim, r);
  if (const auto* c = std::get_if<Circle>(&f))
    return std::min(2.0 * r, c->length);
  const double rc = std::min(r, kPi);
  const double s = std::sin(0.5 * rc);
  return 4.0 * kPi * s * s;  // 2*pi*(1 - cos rc), cancellation-free
}

double factor_sphere_area(const Factor& f, double s) {
  if (const auto* e = std::get_if<Euclidean>(&f))
    return euclidean_sphere_area(e->dim, s);
  if (const auto* c = std::get_if<Circle>(&f))
    return s < 0.5 * c->length ? 2.0 : 0.0;
  return s < kPi ? 2.0 * kPi * std::sin(s) : 0.0;
}

double product_ball_volume(std::span<const Factor> fs, double r, double tol) {
  if (r <= 0) return 0.0;
  if (fs.size() == 1) return factor_ball_volume(fs[0], r);
  const Factor& first = fs[0];
  const auto rest = fs.subspan(1);
  const double cap = std::min(r, factor_diameter(first));
  // Slice by the distance s contributed by the first factor.
  auto integrand = [&](double s) {
    const double u = std::sqrt(std::max(0.0, r * r - s * s));
    return factor_sphere_area(first, s) * product_ball_volume(rest, u, tol);
  };
  std::vector<double> cuts;
  for (const Factor& g : rest) {
    const double D = factor_diameter(g);
    if (std::isfinite(D) && D < r) cuts.push_back(std::sqrt(r * r - D * D));
  }
  return numerics::integrate(integrand, 0.0, cap, cuts, tol);
}

}  // namespace

double ball_volume(const ModelManifold& m, double r, double tol_quad) {
  if (!(r >= 0)) throw DomainError("radius must be nonnegative");
  if (r == 0) return 0.0;
  if (!m.is_product()) return factor_ball_volume(m.factors()[0], r);
  return product_ball_volume(m.factors(), r, tol_quad);
}

double ball_volume(const ModelManifold& m, const Point& x, double r,
                   double tol_quad) {
  validate_point(m, x);
  return ball_volume(m, r, tol_quad);
}

double log_ball_volume(const ModelManifold& m, double r, double tol_quad) {
  if (!(r > 0)) throw DomainError("radius must be positive");
  if (!m.is_product()) {
    const Factor& f = m.factors()[0];
    if (const auto* e = std::get_if<Euclidean>(&f))
      return std::log(euclidean_unit_ball_volume(e->dim)) + e->dim * std::log(r);
    if (const auto* c = std::get_if<Circle>(&f))
      return std::log(std::min(2.0 * r, c->length));
    const double rc = std::min(r, kPi);
    return std::log(4.0 * kPi) + 2.0 * std::log(std::sin(0.5 * rc));
  }
  return std::log(product_ball_volume(m.factors(), r, tol_quad));
}

double sphere_area(const ModelManifold& m, double r, double tol_quad) {
  if (!(r > 0)) throw DomainError("radius must be positive");
  if (!m.is_product()) return factor_sphere_area(m.factors()[0], r);
  const double h = std::max(1e-6, 1e-6 * r);
  const double lo = std::max(0.0, r - h);
  const double hi = r + h;
  const double tol = std::min(tol_quad, 1e-12);
  const double vlo = product_ball_volume(m.factors(), lo, tol);
  const double vhi = product_ball_volume(m.factors(), hi, tol);
  return std::max(0.0, (vhi - vlo) / (hi - lo));
}

double sphere_area(const ModelManifold& m, const Point& x, double r,
                   double tol_quad) {
  validate_point(m, x);
  return sphere_area(m, r, tol_quad);
}

std::optional<double> mvg_theta(const ModelManifold& m) {
  for (const Factor& f : m.factors())
    if (factor_compact(f)) return std::nullopt;
  return euclidean_unit_ball_volume(m.dimension());
}

VolumeData volume_data(const ModelManifold& m, const Point& x, double r,
                       double tol_quad) {
  validate_point(m, x);
  VolumeData v;
  v.radius = r;
  v.volume = ball_volume(m, r, tol_quad);
  v.sphere_area = sphere_area(m, r, tol_quad);
  v.euclidean_volume = euclidean_ball_volume(m.dimension(), r);
  return v;
}

}  // namespace heatbound::geometry
