#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "heatbound/errors.hpp"
#include "heatbound/geometry.hpp"
#include "heatbound/numerics.hpp"

using namespace heatbound;
using namespace heatbound::geometry;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<ModelManifold> catalog() {
  return {ModelManifold::euclidean(1),
          ModelManifold::euclidean(2),
          ModelManifold::euclidean(3),
          ModelManifold::circle(2.0 * pi),
          ModelManifold::sphere2(),
          ModelManifold::product({ModelManifold::euclidean(1), ModelManifold::circle(2.0 * pi)}),
          ModelManifold::product({ModelManifold::circle(2.0 * pi), ModelManifold::circle(2.0 * pi)}),
          ModelManifold::product({ModelManifold::euclidean(1), ModelManifold::sphere2()})};
}

}  // namespace

TEST_CASE("spec strings parse and round trip") {
  CHECK(ModelManifold::from_spec("rn:n=3").dimension() == 3);
  CHECK(ModelManifold::from_spec("s2").dimension() == 2);
  CHECK(ModelManifold::from_spec("circle:L=6.2831853").diameter() ==
        doctest::Approx(3.14159265).epsilon(1e-8));

  auto p = ModelManifold::from_spec("prod:rn:n=2+circle:L=1+s2");
  CHECK(p.dimension() == 5);
  CHECK(p.factors().size() == 3);
  CHECK(p.is_product());
  CHECK(!p.compact());
  CHECK(ModelManifold::from_spec(p.tag()).tag() == p.tag());

  // '+' inside a float exponent is not a factor separator.
  auto q = ModelManifold::from_spec("prod:circle:L=1e+2+s2");
  REQUIRE(q.factors().size() == 2);
  CHECK(factor_diameter(q.factors()[0]) == doctest::Approx(50.0));

  CHECK_THROWS_AS(ModelManifold::from_spec("torus"), UsageError);
  CHECK_THROWS_AS(ModelManifold::from_spec("rn:n=x"), UsageError);
  CHECK_THROWS_AS(ModelManifold::from_spec("rn:n=2.5"), UsageError);
  CHECK_THROWS_AS(ModelManifold::from_spec("prod:s2"), UsageError);
  CHECK_THROWS_AS(ModelManifold::from_spec("rn:n=0"), DomainError);
  CHECK_THROWS_AS(ModelManifold::from_spec("circle:L=-1"), DomainError);
}

TEST_CASE("products flatten and validate") {
  auto inner = ModelManifold::product(
      {ModelManifold::euclidean(1), ModelManifold::sphere2()});
  auto outer = ModelManifold::product({inner, ModelManifold::circle(3.0)});
  CHECK(outer.factors().size() == 3);
  CHECK(outer.dimension() == 4);
  CHECK_THROWS_AS(ModelManifold::product({ModelManifold::sphere2()}), DomainError);
  CHECK(ModelManifold::circle(2.0 * pi).compact());
  CHECK(ModelManifold::product({ModelManifold::circle(1.0), ModelManifold::circle(2.0)})
            .compact());
}

TEST_CASE("distances on single factors") {
  auto c = ModelManifold::circle(2.0 * pi);
  auto a = make_point(c, {{0.1}});
  auto b = make_point(c, {{2.0 * pi - 0.1}});
  CHECK(distance(c, a, b) == doctest::Approx(0.2).epsilon(1e-13));

  // Circle coordinates reduce mod L.
  auto wrapped = make_point(c, {{7.0}});
  CHECK(wrapped.coords[0][0] == doctest::Approx(7.0 - 2.0 * pi).epsilon(1e-13));

  auto s = ModelManifold::sphere2();
  auto north = origin(s);
  auto equator = make_point(s, {{1.0, 0.0, 0.0}});
  CHECK(distance(s, north, equator) == doctest::Approx(pi / 2).epsilon(1e-13));
  CHECK(distance(s, north, make_point(s, {{0.0, 0.0, -1.0}})) ==
        doctest::Approx(pi).epsilon(1e-13));
  CHECK_THROWS_AS(make_point(s, {{1.0, 1.0, 1.0}}), UsageError);
  CHECK_THROWS_AS(make_point(s, {{1.0, 0.0}}), UsageError);

  auto r2 = ModelManifold::euclidean(2);
  CHECK(distance(r2, make_point(r2, {{0.0, 0.0}}), make_point(r2, {{3.0, 4.0}})) ==
        doctest::Approx(5.0).epsilon(1e-14));
  CHECK_THROWS_AS(make_point(r2, {{1.0, 2.0}, {3.0}}), UsageError);
}

TEST_CASE("product distance combines factors in l2") {
  auto m = ModelManifold::product(
      {ModelManifold::euclidean(1), ModelManifold::circle(2.0 * pi)});
  auto a = make_point(m, {{0.0}, {0.1}});
  auto b = make_point(m, {{3.0}, {2.0 * pi - 0.2}});
  double dc = 0.3;  // wraparound arc
  CHECK(distance(m, a, b) == doctest::Approx(std::sqrt(9.0 + dc * dc)).epsilon(1e-13));
  auto fd = factor_distances(m, a, b);
  REQUIRE(fd.size() == 2);
  CHECK(fd[0] == doctest::Approx(3.0));
  CHECK(fd[1] == doctest::Approx(0.3));
}

TEST_CASE("points at distance realize the requested distance") {
  for (const auto& m : catalog()) {
    double diam = m.diameter();
    for (double d : {0.0, 0.4, 1.7, 3.0, 4.4}) {
      if (d > diam) continue;
      auto [x, y] = points_at_distance(m, d);
      CHECK(distance(m, x, y) == doctest::Approx(d).epsilon(1e-12));
    }
  }
  auto s = ModelManifold::sphere2();
  CHECK_THROWS_AS(points_at_distance(s, 3.5), UsageError);

  // Compact factors saturate and the remainder goes to the open factor.
  auto m = ModelManifold::product(
      {ModelManifold::euclidean(1), ModelManifold::sphere2()});
  auto [x, y] = points_at_distance(m, 6.0);
  auto fd = factor_distances(m, x, y);
  CHECK(fd[1] == doctest::Approx(pi).epsilon(1e-12));
  CHECK(fd[0] == doctest::Approx(std::sqrt(36.0 - pi * pi)).epsilon(1e-12));
  CHECK(distance(m, x, y) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("euclidean ball volumes match closed forms") {
  CHECK(euclidean_ball_volume(1, 2.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(euclidean_ball_volume(2, 1.5) == doctest::Approx(pi * 2.25).epsilon(1e-14));
  CHECK(euclidean_ball_volume(3, 1.0) ==
        doctest::Approx(4.0 * pi / 3.0).epsilon(1e-14));
  // omega_n for n = 4..6: pi^2/2, 8 pi^2/15, pi^3/6.
  CHECK(euclidean_unit_ball_volume(4) == doctest::Approx(pi * pi / 2).epsilon(1e-13));
  CHECK(euclidean_unit_ball_volume(5) ==
        doctest::Approx(8.0 * pi * pi / 15.0).epsilon(1e-13));
  CHECK(euclidean_unit_ball_volume(6) ==
        doctest::Approx(pi * pi * pi / 6.0).epsilon(1e-13));
  // Area is the radial derivative of volume.
  CHECK(euclidean_sphere_area(3, 2.0) == doctest::Approx(16.0 * pi).epsilon(1e-13));
}

TEST_CASE("single factor ball volumes") {
  auto c = ModelManifold::circle(5.0);
  CHECK(ball_volume(c, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ball_volume(c, 2.5) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(ball_volume(c, 100.0) == doctest::Approx(5.0).epsilon(1e-14));

  auto s = ModelManifold::sphere2();
  CHECK(ball_volume(s, pi / 2) == doctest::Approx(2.0 * pi).epsilon(1e-13));
  CHECK(ball_volume(s, pi) == doctest::Approx(4.0 * pi).epsilon(1e-13));
  CHECK(ball_volume(s, 10.0) == doctest::Approx(4.0 * pi).epsilon(1e-13));
  // Quadrature oracle: volume is the integral of the sphere-area function.
  for (double r : {0.5, 1.3, 2.9}) {
    double quad = numerics::adaptive_simpson(
        [&](double u) { return u > 0 ? sphere_area(s, u) : 0.0; }, 0.0, r,
        1e-12);
    CHECK(ball_volume(s, r) == doctest::Approx(quad).epsilon(1e-11));
  }
}

TEST_CASE("torus ball volume against the disk-square closed form") {
  double L = 2.0 * pi;
  auto m = ModelManifold::product(
      {ModelManifold::circle(L), ModelManifold::circle(L)});
  double h = L / 2;
  for (double r : {0.5, 1.0, 2.0, 3.0, 3.5, 4.0, 4.3}) {
    double want;
    if (r <= h) {
      want = pi * r * r;
    } else if (r <= std::sqrt(2.0) * h) {
      want = pi * r * r -
             4.0 * (r * r * std::acos(h / r) - h * std::sqrt(r * r - h * h));
    } else {
      want = L * L;
    }
    CHECK(ball_volume(m, r, 1e-10) == doctest::Approx(want).epsilon(1e-8));
  }
  CHECK(ball_volume(m, 100.0) == doctest::Approx(L * L).epsilon(1e-10));
}

TEST_CASE("line times sphere ball volume against a slice oracle") {
  auto m = ModelManifold::product(
      {ModelManifold::euclidean(1), ModelManifold::sphere2()});
  auto sphere_vol = [](double u) {
    return 2.0 * pi * (1.0 - std::cos(std::min(u, pi)));
  };
  for (double r : {0.8, 2.0, 3.5, 6.0}) {
    std::vector<double> kinks;
    if (r > pi) kinks.push_back(std::sqrt(r * r - pi * pi));
    double want = 2.0 * numerics::integrate(
                            [&](double s) { return sphere_vol(std::sqrt(r * r - s * s)); },
                            0.0, r, kinks, 1e-12);
    CHECK(ball_volume(m, r, 1e-10) == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("line times circle ball volume against the cap closed form") {
  double L = 2.0 * pi;
  auto m = ModelManifold::product(
      {ModelManifold::euclidean(1), ModelManifold::circle(L)});
  for (double r : {1.0, 2.5, 3.14, 4.0, 8.0}) {
    double want;
    if (r <= L / 2) {
      want = pi * r * r;
    } else {
      // Saturated band of width s0 plus the remaining disk segment.
      double s0 = std::sqrt(r * r - L * L / 4.0);
      want = L * s0 + pi * r * r - 2.0 * r * r * std::asin(s0 / r);
    }
    CHECK(ball_volume(m, r, 1e-10) == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("volume ratio to flat space is monotone non-increasing") {
  for (const auto& m : catalog()) {
    int n = m.dimension();
    double prev = 1e300;
    for (double r : numerics::logspace(0.05, 12.0, 24)) {
      double ratio = ball_volume(m, r, 1e-10) / euclidean_ball_volume(n, r);
      CHECK(ratio <= prev + 1e-9);
      CHECK(ratio <= 1.0 + 1e-9);
      prev = ratio;
    }
    // Small balls are asymptotically flat.
    double small = ball_volume(m, 0.01, 1e-10) / euclidean_ball_volume(n, 0.01);
    CHECK(small == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("sphere area is consistent with the volume derivative") {
  for (const auto& m : catalog()) {
    for (double r : {0.7, 1.9, 3.2}) {
      if (r >= m.diameter()) continue;
      double fd = (ball_volume(m, r + 1e-5, 1e-11) - ball_volume(m, r - 1e-5, 1e-11)) /
                  2e-5;
      CHECK(sphere_area(m, r, 1e-10) == doctest::Approx(fd).epsilon(2e-4));
    }
  }
  CHECK(sphere_area(ModelManifold::sphere2(), 1.0) ==
        doctest::Approx(2.0 * pi * std::sin(1.0)).epsilon(1e-13));
  CHECK(sphere_area(ModelManifold::circle(4.0), 1.0) == doctest::Approx(2.0));
  CHECK(sphere_area(ModelManifold::circle(4.0), 2.5) == doctest::Approx(0.0));
}

TEST_CASE("log volumes and volume data") {
  for (const auto& m : catalog()) {
    for (double r : {0.3, 2.2}) {
      CHECK(log_ball_volume(m, r, 1e-10) ==
            doctest::Approx(std::log(ball_volume(m, r, 1e-10))).epsilon(1e-12));
    }
    auto vd = volume_data(m, origin(m), 1.1, 1e-10);
    CHECK(vd.radius == 1.1);
    CHECK(vd.volume == doctest::Approx(ball_volume(m, 1.1, 1e-10)).epsilon(1e-12));
    CHECK(vd.euclidean_volume ==
          doctest::Approx(euclidean_ball_volume(m.dimension(), 1.1)).epsilon(1e-13));
  }
}

TEST_CASE("maximal volume growth constant") {
  CHECK(mvg_theta(ModelManifold::euclidean(2)).value() ==
        doctest::Approx(pi).epsilon(1e-14));
  CHECK(mvg_theta(ModelManifold::euclidean(3)).value() ==
        doctest::Approx(4.0 * pi / 3.0).epsilon(1e-13));
  CHECK(!mvg_theta(ModelManifold::sphere2()).has_value());
  CHECK(!mvg_theta(ModelManifold::product({ModelManifold::euclidean(1),
                                           ModelManifold::circle(1.0)}))
             .has_value());
}

TEST_CASE("ball volume rejects bad radii") {
  auto m = ModelManifold::euclidean(2);
  CHECK_THROWS_AS(ball_volume(m, -1.0), DomainError);
  CHECK(ball_volume(m, 0.0) == 0.0);  // log form requires r > 0 instead
  CHECK_THROWS_AS(log_ball_volume(m, 0.0), DomainError);
  CHECK_THROWS_AS(sphere_area(m, 0.0), DomainError);
}
